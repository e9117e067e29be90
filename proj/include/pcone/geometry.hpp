#pragma once

// The Finsler manifold structure on the positive cone: the invariant tangent
// norm ||x||_{a,p} = ||a^(-1/2) x a^(-1/2)||_p, the geodesics
// gamma_{a,b}(t) = a^(1/2) (a^(-1/2) b a^(-1/2))^t a^(1/2), the closed-form
// geodesic distance d_p(a,b) = ||ln(a^(-1/2) b a^(-1/2))||_p, exponential
// charts, the differential of exp, geodesic symmetries, congruence
// isometries and rectifiable curve length.

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pcone/matcore.hpp"
#include "pcone/quadrature.hpp"

namespace pcone {

/// Tangent vector dir at the base point; every tangent space is the space
/// of Hermitian matrices.
struct TangentVec {
  PosDefMatrix base;
  HermMatrix dir;
};

/// ||x||_{a,p} = ||a^(-1/2) x a^(-1/2)||_p.
inline double finsler_norm(const PosDefMatrix& base, const HermMatrix& dir,
                           const PParams& pp) {
  if (base.dim() != dir.dim()) throw DomainError("finsler_norm: dimension mismatch");
  const CMatrix s = base.power(-0.5);
  return schatten_norm(HermMatrix(s * dir.mat() * s), pp);
}

inline double finsler_norm(const TangentVec& v, const PParams& pp) {
  return finsler_norm(v.base, v.dir, pp);
}

/// The curve gamma_{a,b}(t) = a^(1/2) (a^(-1/2) b a^(-1/2))^t a^(1/2),
/// defined for every real t, with gamma(0) = a and gamma(1) = b. Caches
/// a^(+-1/2) and the spectral data of w = ln(a^(-1/2) b a^(-1/2)); its speed
/// is constant and equals ||w||_p for every p.
class GeodesicSegment {
 public:
  GeodesicSegment(PosDefMatrix a, PosDefMatrix b)
      : a_(std::move(a)),
        b_(std::move(b)),
        a_half_(a_.power(0.5)),
        a_neg_half_(a_.power(-0.5)) {
    if (a_.dim() != b_.dim()) throw DomainError("GeodesicSegment: dimension mismatch");
    const HermMatrix m(a_neg_half_ * b_.mat() * a_neg_half_);
    EigDecomp me = herm_eig(m);
    if (!(me.values[0] > 0.0))
      throw DomainError("GeodesicSegment: conjugated midpoint matrix not positive");
    w_eig_.values = me.values.array().log();
    w_eig_.vectors = std::move(me.vectors);
    w_ = HermMatrix(w_eig_.assemble(w_eig_.values));
  }

  const PosDefMatrix& a() const { return a_; }
  const PosDefMatrix& b() const { return b_; }

  /// Initial-speed representative w = ln(a^(-1/2) b a^(-1/2)).
  const HermMatrix& log_map() const { return w_; }

  PosDefMatrix point(double t) const {
    RVector powed(w_eig_.values.size());
    for (Eigen::Index i = 0; i < powed.size(); ++i)
      powed[i] = std::exp(t * w_eig_.values[i]);
    return PosDefMatrix(HermMatrix(a_half_ * w_eig_.assemble(powed) * a_half_));
  }

  /// d/dt gamma(t) = a^(1/2) e^{t w} w a^(1/2); Hermitian since e^{tw} and w
  /// commute.
  HermMatrix velocity(double t) const {
    RVector v(w_eig_.values.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v[i] = std::exp(t * w_eig_.values[i]) * w_eig_.values[i];
    return HermMatrix(a_half_ * w_eig_.assemble(v) * a_half_);
  }

  /// Constant Finsler speed ||w||_p; also the length over [0, 1] and the
  /// geodesic distance between the endpoints.
  double speed(const PParams& pp) const {
    return detail::pnorm_from_svals(w_eig_.values.cwiseAbs(), pp);
  }
  double length(const PParams& pp) const { return speed(pp); }

 private:
  PosDefMatrix a_, b_;
  CMatrix a_half_, a_neg_half_;
  HermMatrix w_ = HermMatrix::zero(1);
  EigDecomp w_eig_;
};

inline PosDefMatrix geodesic_point(const GeodesicSegment& seg, double t) {
  return seg.point(t);
}

/// Eigenvalues of ln(a^(-1/2) b a^(-1/2)); the distance for every p reads
/// off this one decomposition.
inline RVector distance_log_spectrum(const PosDefMatrix& a, const PosDefMatrix& b) {
  if (a.dim() != b.dim())
    throw DomainError("distance_log_spectrum: dimension mismatch");
  const CMatrix s = a.power(-0.5);
  const EigDecomp me = herm_eig(HermMatrix(s * b.mat() * s));
  if (!(me.values[0] > 0.0))
    throw DomainError("distance_log_spectrum: conjugated matrix not positive");
  return me.values.array().log();
}

/// d_p(a, b) = ||ln(a^(-1/2) b a^(-1/2))||_p.
inline double geodesic_distance(const PosDefMatrix& a, const PosDefMatrix& b,
                                const PParams& pp) {
  return detail::pnorm_from_svals(distance_log_spectrum(a, b).cwiseAbs(), pp);
}

/// Exp^a(x) = a^(1/2) exp(a^(-1/2) x a^(-1/2)) a^(1/2). Exp^a(t x) traces
/// the geodesic through a with initial speed x.
inline PosDefMatrix exp_a(const PosDefMatrix& base, const HermMatrix& x) {
  if (base.dim() != x.dim()) throw DomainError("exp_a: dimension mismatch");
  const CMatrix h = base.power(0.5);
  const CMatrix s = base.power(-0.5);
  const HermMatrix inner = mat_exp(HermMatrix(s * x.mat() * s));
  return PosDefMatrix(HermMatrix(h * inner.mat() * h));
}

/// Two-sided inverse of exp_a: log_a(a, b) = a^(1/2) ln(a^(-1/2) b a^(-1/2)) a^(1/2).
inline HermMatrix log_a(const PosDefMatrix& base, const PosDefMatrix& b) {
  if (base.dim() != b.dim()) throw DomainError("log_a: dimension mismatch");
  const CMatrix h = base.power(0.5);
  const CMatrix s = base.power(-0.5);
  const HermMatrix inner = mat_log(HermMatrix(s * b.mat() * s));
  return HermMatrix(h * inner.mat() * h);
}

namespace detail {

/// (e^a - e^b)/(a - b) with the clustered-eigenvalue branch
/// e^{(a+b)/2} sinhc((a-b)/2) evaluated by its even Taylor series, which is
/// immune to the cancellation that kills the raw quotient.
inline double exp_divided_difference(double a, double b) {
  const double diff = a - b;
  if (std::abs(diff) < 1e-7 * (1.0 + std::abs(a) + std::abs(b))) {
    const double z = diff / 2.0;
    const double z2 = z * z;
    const double sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0;
    return std::exp((a + b) / 2.0) * sinhc;
  }
  return (std::exp(a) - std::exp(b)) / diff;
}

}  // namespace detail

/// Differential of the matrix exponential, (exp)_*x(y), computed spectrally:
/// in the eigenbasis of x the (i,j) entry of y is scaled by the divided
/// difference (e^{l_i} - e^{l_j})/(l_i - l_j). Satisfies
/// e^{-x/2} dexp(x, y) e^{-x/2} = F(ad x/2)(y) with F(z) = sinh(z)/z.
inline HermMatrix dexp(const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw DomainError("dexp: dimension mismatch");
  const EigDecomp d = herm_eig(x);
  CMatrix yt = d.vectors.adjoint() * y.mat() * d.vectors;
  const int n = x.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      yt(i, j) *= detail::exp_divided_difference(d.values[i], d.values[j]);
  return HermMatrix(d.vectors * yt * d.vectors.adjoint());
}

/// Same operator through its integral form int_0^1 e^{(1-t)x} y e^{tx} dt,
/// evaluated with a 64-node Gauss-Legendre rule. Kept as an independent
/// route for cross-checking dexp and the exponential-metric-increasing
/// inequality.
inline HermMatrix dexp_quadrature(const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw DomainError("dexp_quadrature: dimension mismatch");
  const EigDecomp d = herm_eig(x);
  const GaussRule& rule = gauss64();
  CMatrix acc = CMatrix::Zero(x.dim(), x.dim());
  RVector e(d.values.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double t = rule.nodes[k];
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = std::exp((1.0 - t) * d.values[i]);
    const CMatrix left = d.assemble(e);
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = std::exp(t * d.values[i]);
    const CMatrix right = d.assemble(e);
    acc += rule.weights[k] * (left * y.mat() * right);
  }
  return HermMatrix(acc);
}

/// Geodesic symmetry sigma_a(b) = a b^(-1) a; an involution and a
/// d_p-isometry for every p.
inline PosDefMatrix geodesic_symmetry(const PosDefMatrix& a, const PosDefMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("geodesic_symmetry: dimension mismatch");
  return PosDefMatrix(HermMatrix(a.mat() * b.power(-1.0) * a.mat()));
}

/// Congruence action I_g(a) = g* a g for invertible g; acts isometrically
/// on (P, d_p). Throws when g is singular to working precision.
inline PosDefMatrix congruence(const CMatrix& g, const PosDefMatrix& a) {
  if (g.rows() != g.cols() || g.rows() != a.dim())
    throw DomainError("congruence: g must be square and match the point dimension");
  if (!detail::all_finite(g)) throw DomainError("congruence: non-finite entries in g");
  Eigen::JacobiSVD<CMatrix> svd(g);
  const double smax = svd.singularValues()[0];
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (!(smin > 1e-12 * smax))
    throw DomainError("congruence: g is numerically singular (sigma_min/sigma_max = " +
                      detail::fmt(smax > 0 ? smin / smax : 0.0) + ")");
  return PosDefMatrix(HermMatrix(g.adjoint() * a.mat() * g));
}

// ---------------------------------------------------------------------------
// Rectifiable length
// ---------------------------------------------------------------------------

struct CurveSample {
  double t;
  PosDefMatrix matrix;
};

using CurveFn = std::function<PosDefMatrix(double)>;
using CurveDerivFn = std::function<HermMatrix(double)>;

struct CurveLengthOptions {
  int subintervals = 8;      // initial composite pieces, 16-node rule each
  int max_refinements = 3;   // interval-doubling passes (first is Richardson)
  double rel_tol = 1e-9;     // stop once the refinement changes this little
  double fd_step = 1e-6;     // centered-difference step for the velocity
};

namespace detail {

inline double composite_speed_integral(const std::function<double(double)>& speed,
                                       int pieces) {
  const GaussRule& rule = gauss16();
  double acc = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double lo = static_cast<double>(k) / pieces;
    const double width = 1.0 / pieces;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += width * rule.weights[i] * speed(lo + width * rule.nodes[i]);
  }
  return acc;
}

inline double curve_length_impl(const std::function<double(double)>& speed,
                                const CurveLengthOptions& opts) {
  int pieces = opts.subintervals;
  double est = composite_speed_integral(speed, pieces);
  for (int r = 0; r < opts.max_refinements; ++r) {
    pieces *= 2;
    const double next = composite_speed_integral(speed, pieces);
    const double change = std::abs(next - est);
    est = next;
    if (change <= opts.rel_tol * std::max(1.0, std::abs(est))) break;
  }
  return est;
}

}  // namespace detail

/// Length of a smooth curve [0,1] -> P with a caller-supplied derivative:
/// composite Gauss-Legendre quadrature of the Finsler speed.
inline double curve_length(const CurveFn& curve, const CurveDerivFn& deriv,
                           const PParams& pp, const CurveLengthOptions& opts = {}) {
  auto speed = [&](double t) { return finsler_norm(curve(t), deriv(t), pp); };
  return detail::curve_length_impl(speed, opts);
}

/// Same, with the derivative taken by centered finite differences.
inline double curve_length(const CurveFn& curve, const PParams& pp,
                           const CurveLengthOptions& opts = {}) {
  const double h = opts.fd_step;
  auto speed = [&](double t) {
    const HermMatrix dot((curve(t + h).mat() - curve(t - h).mat()) / (2.0 * h));
    return finsler_norm(curve(t), dot, pp);
  };
  return detail::curve_length_impl(speed, opts);
}

/// Exact constant-speed value ||w||_p for geodesic segments.
inline double curve_length(const GeodesicSegment& seg, const PParams& pp) {
  return seg.length(pp);
}

/// Length of a tabulated curve: velocities by three-point finite differences
/// on the sample grid (one-sided second order at the endpoints), trapezoid
/// rule over the node speeds. Consecutive duplicate points (zero-length
/// subintervals) are merged away before differencing.
inline double curve_length(std::span<const CurveSample> samples, const PParams& pp) {
  if (samples.size() < 2)
    throw DomainError("curve_length: need at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].t > samples[i - 1].t))
      throw DomainError("curve_length: parameter values must be strictly increasing");

  std::vector<const CurveSample*> pts;
  pts.push_back(&samples[0]);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const CMatrix diff = samples[i].matrix.mat() - pts.back()->matrix.mat();
    const double scale = std::max(1.0, pts.back()->matrix.herm().max_abs());
    if (diff.cwiseAbs().maxCoeff() <= 1e-14 * scale) continue;
    pts.push_back(&samples[i]);
  }
  if (pts.size() < 2) return 0.0;

  // Derivative of the quadratic through three consecutive nodes, evaluated
  // at node x.
  auto lagrange_dot = [&](std::size_t i0, std::size_t i1, std::size_t i2, double x) {
    const double ta = pts[i0]->t, tb = pts[i1]->t, tc = pts[i2]->t;
    const double ca = (2 * x - tb - tc) / ((ta - tb) * (ta - tc));
    const double cb = (2 * x - ta - tc) / ((tb - ta) * (tb - tc));
    const double cc = (2 * x - ta - tb) / ((tc - ta) * (tc - tb));
    return HermMatrix(ca * pts[i0]->matrix.mat() + cb * pts[i1]->matrix.mat() +
                      cc * pts[i2]->matrix.mat());
  };

  const std::size_t m = pts.size();
  std::vector<double> speeds(m);
  for (std::size_t i = 0; i < m; ++i) {
    HermMatrix dot = HermMatrix::zero(pts[0]->matrix.dim());
    if (m == 2) {
      dot = HermMatrix((pts[1]->matrix.mat() - pts[0]->matrix.mat()) /
                       (pts[1]->t - pts[0]->t));
    } else if (i == 0) {
      dot = lagrange_dot(0, 1, 2, pts[0]->t);
    } else if (i == m - 1) {
      dot = lagrange_dot(m - 3, m - 2, m - 1, pts[m - 1]->t);
    } else {
      dot = lagrange_dot(i - 1, i, i + 1, pts[i]->t);
    }
    speeds[i] = finsler_norm(pts[i]->matrix, dot, pp);
  }

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i)
    acc += (pts[i + 1]->t - pts[i]->t) * (speeds[i] + speeds[i + 1]) / 2.0;
  return acc;
}

}  // namespace pcone

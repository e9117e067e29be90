#pragma once

// Nearest-point machinery for 1 < p < infinity: the duality pairing
// tau(|v|^{p-1} u w) behind the derivative of t -> ||v - t w||_p, linear
// nearest-point projection in the flat p-norm, Birkhoff orthogonality, the
// nonlinear projection onto a convex exponential set driven by the
// first-order geodesic criterion, and the empirical convexity-gap constant
// b_p.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pcone/convexity.hpp"
#include "pcone/geometry.hpp"
#include "pcone/matcore.hpp"
#include "pcone/rng.hpp"

namespace pcone {

namespace detail {

inline void require_uniformly_convex(const PParams& pp, const char* who) {
  if (!pp.uniformly_convex())
    throw DomainError(std::string(who) + ": requires 1 < p < inf, got p = " +
                      fmt(pp.p()));
}

/// tau(|v|^{p-1} u w) from a precomputed decomposition of v. Eigenvalues of
/// v are floored at 1e-13 in magnitude inside the power (the |v|^{p-1}
/// kernel is not Lipschitz at 0 for p < 2); values within the polar-sign
/// zero band contribute nothing.
inline double duality_pair_decomposed(const EigDecomp& dv, const HermMatrix& w,
                                      const PParams& pp) {
  const Eigen::Index n = dv.values.size();
  const double scale = std::max(1.0, dv.values.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-13 * scale;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = dv.values[i];
    if (std::abs(lam) <= zero_tol) continue;
    const double psi = (lam > 0 ? 1.0 : -1.0) *
                       std::pow(std::max(std::abs(lam), 1e-13), pp.p() - 1.0);
    const Complex diag = dv.vectors.col(i).adjoint() * w.mat() * dv.vectors.col(i);
    acc += psi * diag.real();
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

/// tau(|v|^{p-1} u w) with u = polar_sign(v). Equals
/// -||v||_p^{p-1} * d/dt ||v - t w||_p at t = 0, and ||v||_p^p when w = v.
inline double duality_pair(const HermMatrix& v, const HermMatrix& w, const PParams& pp) {
  detail::require_uniformly_convex(pp, "duality_pair");
  if (v.dim() != w.dim()) throw DomainError("duality_pair: dimension mismatch");
  return detail::duality_pair_decomposed(herm_eig(v), w, pp);
}

struct LinearProjectOptions {
  double tol = 1e-7;
  int max_iter = 500;
};

/// Nearest point to x in the subspace H under ||.||_p. Gradient descent with
/// Armijo backtracking on the smooth convex objective tau(|x - h|^p),
/// warm-started at the p = 2 orthogonal projection (which is also the
/// closed-form answer when p = 2). The optimality certificate is
/// |duality_pair(x - h, b_i, p)| <= tol * ||x - h||_p^{p-1} on every basis
/// element.
inline HermMatrix linear_project(const HermMatrix& x, const HermSubspace& H,
                                 const PParams& pp, LinearProjectOptions opts = {}) {
  detail::require_uniformly_convex(pp, "linear_project");
  if (x.dim() != H.ambient_dim()) throw DomainError("linear_project: dimension mismatch");
  const int d = H.dim();
  if (d == 0) return HermMatrix::zero(x.dim());

  std::vector<double> c = H.coefficients(x);
  if (pp.p() == 2.0) return H.combine(c);

  const double xnorm = schatten_norm(x, pp);
  auto objective = [&](const std::vector<double>& coef, EigDecomp* out_eig) {
    const HermMatrix v = x - H.combine(coef);
    EigDecomp dv = herm_eig(v);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dv.values.size(); ++i)
      acc += std::pow(std::abs(dv.values[i]), pp.p());
    if (out_eig) *out_eig = std::move(dv);
    return acc / static_cast<double>(v.dim());
  };

  EigDecomp dv;
  double fval = objective(c, &dv);
  double step = 1.0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double vnorm = detail::pnorm_from_svals(dv.values.cwiseAbs(), pp);
    if (vnorm <= 1e-13 * (1.0 + xnorm)) return H.combine(c);  // x is in H

    std::vector<double> g(d);
    double gnorm2 = 0.0;
    double res = 0.0;
    for (int i = 0; i < d; ++i) {
      g[i] = detail::duality_pair_decomposed(dv, H.basis()[i], pp);
      gnorm2 += g[i] * g[i];
      res = std::max(res, std::abs(g[i]));
    }
    if (res <= opts.tol * std::pow(vnorm, pp.p() - 1.0)) return H.combine(c);

    // phi(c + s g) decreases: d/dc_i tau(|x - Bc|^p) = -p * g_i.
    if (step <= 0.0 || !std::isfinite(step)) step = 1.0;
    step *= 2.0;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      std::vector<double> trial = c;
      for (int i = 0; i < d; ++i) trial[i] += step * g[i];
      EigDecomp dtrial;
      const double ftrial = objective(trial, &dtrial);
      if (ftrial <= fval - 1e-4 * step * pp.p() * gnorm2) {
        c = std::move(trial);
        fval = ftrial;
        dv = std::move(dtrial);
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted)
      throw ConvergenceError("linear_project: line search stalled, residual = " +
                             detail::fmt(res));
  }

  double final_res = 0.0;
  for (int i = 0; i < d; ++i)
    final_res = std::max(final_res,
                         std::abs(detail::duality_pair_decomposed(dv, H.basis()[i], pp)));
  throw ConvergenceError("linear_project: no convergence in " +
                         std::to_string(opts.max_iter) +
                         " iterations, residual = " + detail::fmt(final_res));
}

struct BirkhoffResult {
  bool orthogonal;
  double residual;  // max_i |pair| / max(1, ||a^(-1/2) v a^(-1/2)||_p^{p-1})
};

/// Birkhoff orthogonality of v to the tangent copy of H at a: true when the
/// trace pairing of a^(-1/2) v a^(-1/2) against every basis element of H
/// vanishes to tolerance.
inline BirkhoffResult birkhoff_orthogonal(const HermMatrix& v, const HermSubspace& H,
                                          const PosDefMatrix& a, const PParams& pp,
                                          double tol = 1e-7) {
  detail::require_uniformly_convex(pp, "birkhoff_orthogonal");
  if (v.dim() != a.dim() || v.dim() != H.ambient_dim())
    throw DomainError("birkhoff_orthogonal: dimension mismatch");
  const CMatrix s = a.power(-0.5);
  const HermMatrix vt(s * v.mat() * s);
  const EigDecomp dv = herm_eig(vt);
  double worst = 0.0;
  for (const HermMatrix& b : H.basis())
    worst = std::max(worst, std::abs(detail::duality_pair_decomposed(dv, b, pp)));
  const double vnorm = detail::pnorm_from_svals(dv.values.cwiseAbs(), pp);
  const double res = worst / std::max(1.0, std::pow(vnorm, pp.p() - 1.0));
  return {res <= tol, res};
}

struct ProjectionOptions {
  double tol = 1e-7;   // first-order residual target
  int max_iter = 500;  // coordinate-descent cycles
  std::uint64_t seed = 0;  // nonzero: randomize the starting point in K
};

struct ProjectionResult {
  PosDefMatrix argmin;
  double distance;
  double first_order_residual;
  int iterations;
  bool converged;
  int boundary_hits;  // line searches that ended on the search-region edge
};

namespace detail {

template <typename F>
double golden_min(F&& f, double lo, double hi, double xtol) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return (a + b) / 2.0;
}

/// max_i |duality_pair(ln(a^(-1/2) b a^(-1/2)), b_i)| normalized by
/// ||y||_p^{p-1}: the derivative of the distance to b along the unit
/// tangent directions of K at a.
inline double first_order_residual(const PosDefMatrix& a, const PosDefMatrix& b,
                                   const HermSubspace& H, const PParams& pp) {
  const CMatrix s = a.power(-0.5);
  const EigDecomp me = herm_eig(HermMatrix(s * b.mat() * s));
  EigDecomp dy;
  dy.values = me.values.array().log();
  dy.vectors = me.vectors;
  const double ynorm = pnorm_from_svals(dy.values.cwiseAbs(), pp);
  if (ynorm <= 1e-13) return 0.0;  // a coincides with b
  double worst = 0.0;
  for (const HermMatrix& w : H.basis())
    worst = std::max(worst, std::abs(duality_pair_decomposed(dy, w, pp)));
  return worst / std::pow(ynorm, pp.p() - 1.0);
}

}  // namespace detail

/// Best approximation to b inside K = exp(H): geodesic coordinate descent.
/// Each sweep runs a golden-section search along t -> d_p(b, a^(1/2) e^{t b_i}
/// a^(1/2)) — a convex one-dimensional function whose curve stays inside K —
/// and the iterate is re-expressed as exp of its H-projection to cancel
/// drift. Converged means the normalized first-order residual passed tol;
/// otherwise the best iterate is returned flagged. The search region is
/// bounded through d_p(b, 1): a minimizer beyond it would already lose to
/// the identity.
inline ProjectionResult project_to_k(const PosDefMatrix& b, const ExponentialSet& K,
                                     const PParams& pp, ProjectionOptions opts = {}) {
  detail::require_uniformly_convex(pp, "project_to_k");
  if (!K.lts_verified())
    throw DomainError("project_to_k: subspace is not a verified Lie triple system "
                      "(residual " + detail::fmt(K.lts_residual()) + ")");
  if (b.dim() != K.subspace().ambient_dim())
    throw DomainError("project_to_k: dimension mismatch");
  const HermSubspace& H = K.subspace();

  // Member short-circuit.
  if (k_membership(K, b).member) {
    const PosDefMatrix inside(mat_exp(H.project(b.log())));
    return {inside, geodesic_distance(b, inside, pp),
            detail::first_order_residual(inside, b, H, pp), 0, true, 0};
  }

  const int n = b.dim();
  const PosDefMatrix eye = PosDefMatrix::identity(n);
  const double reach = 2.0 * std::pow(static_cast<double>(n), 1.0 / pp.p()) *
                           geodesic_distance(b, eye, pp) +
                       1.0;
  const double span = 2.0 * reach + 1.0;
  const double xtol = 1e-10 * (1.0 + span);

  // Warm start at exp of the log's H-projection; a nonzero seed perturbs it
  // inside K so callers can cross-check uniqueness by restarting.
  HermMatrix h0 = H.project(b.log());
  if (opts.seed != 0) {
    Rng rng(opts.seed);
    h0 = h0 + random_in_subspace(rng, H, 0.5);
  }
  PosDefMatrix a(mat_exp(h0));
  double residual = detail::first_order_residual(a, b, H, pp);
  int cycles = 0;
  int boundary_hits = 0;
  bool converged = residual <= opts.tol;

  while (!converged && cycles < opts.max_iter) {
    ++cycles;
    for (std::size_t i = 0; i < H.basis().size(); ++i) {
      const CMatrix h = a.power(0.5);
      const EigDecomp dd = herm_eig(H.basis()[i]);
      auto phi = [&](double t) {
        RVector e(dd.values.size());
        for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = std::exp(t * dd.values[k]);
        const PosDefMatrix cand(HermMatrix(h * dd.assemble(e) * h));
        return geodesic_distance(b, cand, pp);
      };
      const double tstar = detail::golden_min(phi, -span, span, xtol);
      if (std::abs(tstar) > span - 10.0 * xtol) ++boundary_hits;
      RVector e(dd.values.size());
      for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = std::exp(tstar * dd.values[k]);
      a = PosDefMatrix(HermMatrix(h * dd.assemble(e) * h));
    }
    a = PosDefMatrix(mat_exp(H.project(a.log())));
    residual = detail::first_order_residual(a, b, H, pp);
    converged = residual <= opts.tol;
  }

  return {a, geodesic_distance(b, a, pp), residual, cycles, converged, boundary_hits};
}

/// w_r(t) = t^r (1-t) + t (1-t)^r, the weight in the convexity-gap
/// inequality for d_p^r along geodesics.
inline double w_r(double t, double r) {
  return std::pow(t, r) * (1.0 - t) + t * std::pow(1.0 - t, r);
}

/// Empirical infimum of h(t) = [(1-t) f(0) + t f(1) - f(t)] / w_r(t) with
/// f(t) = [d_p(a, gamma_t)/d_p(gamma_0, gamma_1)]^r over seeded random
/// configurations (a, gamma) and an interior t-grid. Degenerate geodesics
/// and points lying numerically on the geodesic are resampled. The returned
/// value is strictly positive for 1 < p < infinity.
inline double estimate_bp(int samples, const PParams& pp, std::uint64_t seed,
                          int n_max = 6, double cap = 1.5) {
  detail::require_uniformly_convex(pp, "estimate_bp");
  if (samples < 1) throw DomainError("estimate_bp: need at least one sample");
  const double r = pp.r();
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int n = rng.uniform_int(2, n_max);
      const PosDefMatrix g0 = random_posdef(rng, n, cap);
      const PosDefMatrix g1 = random_posdef(rng, n, cap);
      const GeodesicSegment seg(g0, g1);
      const double dg = seg.length(pp);
      if (dg < 0.05) continue;
      const PosDefMatrix a = random_posdef(rng, n, cap);

      const double d0 = geodesic_distance(a, g0, pp);
      const double d1 = geodesic_distance(a, g1, pp);
      double dmin = std::min(d0, d1);
      std::vector<double> dt(15);
      for (int j = 1; j <= 15; ++j) {
        dt[j - 1] = geodesic_distance(a, seg.point(j / 16.0), pp);
        dmin = std::min(dmin, dt[j - 1]);
      }
      if (dmin < 1e-3 * dg) continue;  // a sits on the geodesic: resample

      const double f0 = std::pow(d0 / dg, r);
      const double f1 = std::pow(d1 / dg, r);
      for (int j = 1; j <= 15; ++j) {
        const double t = j / 16.0;
        const double ft = std::pow(dt[j - 1] / dg, r);
        const double h = ((1.0 - t) * f0 + t * f1 - ft) / w_r(t, r);
        best = std::min(best, h);
      }
      break;
    }
  }
  if (!std::isfinite(best))
    throw ConvergenceError("estimate_bp: sampling failed to produce a configuration");
  return best;
}

}  // namespace pcone

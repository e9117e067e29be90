#pragma once

// Dense Hermitian linear algebra over M_n(C) with the normalized trace
// tau = tr/n: eigendecomposition with a deterministic ordering and phase
// convention, spectral functional calculus, Schatten p-norms and the
// commutator algebra the rest of the library is built on.
//
// All norms here are induced by the *normalized* trace; they differ from
// the conventional Schatten norms by a factor n^(-1/p). In exchange
// ||I||_p = 1 for every p and every dimension, and tau(1) = 1.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <utility>

#include "pcone/errors.hpp"

namespace pcone {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

namespace detail {

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline bool all_finite(const CMatrix& m) {
  return m.allFinite();
}

}  // namespace detail

/// Self-adjoint element of M_n(C). The constructor symmetrizes through
/// (x + x*)/2, so entries(i,j) == conj(entries(j,i)) holds exactly after
/// construction, and the diagonal is exactly real.
class HermMatrix {
 public:
  explicit HermMatrix(const CMatrix& m) {
    if (m.rows() != m.cols())
      throw DomainError("HermMatrix: matrix must be square, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    if (m.rows() < 1) throw DomainError("HermMatrix: empty matrix");
    if (!detail::all_finite(m)) throw DomainError("HermMatrix: non-finite entries");
    mat_ = (m + m.adjoint()) / 2.0;
  }

  static HermMatrix zero(int n) { return HermMatrix(CMatrix::Zero(n, n)); }
  static HermMatrix identity(int n) { return HermMatrix(CMatrix::Identity(n, n)); }
  static HermMatrix from_diagonal(const RVector& d) {
    CMatrix m = CMatrix::Zero(d.size(), d.size());
    m.diagonal() = d.cast<Complex>();
    return HermMatrix(m);
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMatrix& mat() const { return mat_; }

  /// Largest entry magnitude (the max-norm used in tolerances).
  double max_abs() const { return mat_.cwiseAbs().maxCoeff(); }

  HermMatrix operator+(const HermMatrix& o) const { return HermMatrix(mat_ + o.mat_); }
  HermMatrix operator-(const HermMatrix& o) const { return HermMatrix(mat_ - o.mat_); }
  HermMatrix operator-() const { return HermMatrix(-mat_); }
  HermMatrix operator*(double s) const { return HermMatrix(mat_ * s); }
  friend HermMatrix operator*(double s, const HermMatrix& x) { return x * s; }

 private:
  CMatrix mat_;
};

/// Spectral decomposition x = V diag(values) V* of a Hermitian matrix.
/// Deterministic contract: eigenvalues ascending; each eigenvector column is
/// rotated so that its largest-magnitude component is real and positive.
struct EigDecomp {
  RVector values;
  CMatrix vectors;

  /// V diag(f(values)) V* without re-validation.
  CMatrix assemble(const RVector& transformed) const {
    return vectors * transformed.asDiagonal() * vectors.adjoint();
  }
};

inline EigDecomp herm_eig(const HermMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(x.mat());
  if (solver.info() != Eigen::Success)
    throw ConvergenceError(
        "herm_eig: eigensolver failed to converge within " +
        std::to_string(Eigen::SelfAdjointEigenSolver<CMatrix>::m_maxIterations) +
        " sweeps per eigenvalue (n = " + std::to_string(x.dim()) + ")");
  EigDecomp d{solver.eigenvalues(), solver.eigenvectors()};
  // Phase convention: make the largest-magnitude component of each column
  // real-positive (first index wins ties).
  const int n = x.dim();
  for (int k = 0; k < n; ++k) {
    int imax = 0;
    double best = std::norm(d.vectors(0, k));
    for (int i = 1; i < n; ++i) {
      const double a = std::norm(d.vectors(i, k));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    const Complex v = d.vectors(imax, k);
    const double a = std::abs(v);
    if (a > 0.0) d.vectors.col(k) *= std::conj(v) / a;
  }
  return d;
}

/// Spectral functional calculus: f applied to the eigenvalues in the
/// eigenbasis. Throws DomainError naming the offending eigenvalue when f
/// returns a non-finite value there.
template <typename F>
HermMatrix func_calc(const EigDecomp& d, F&& f, std::string_view fname = "f") {
  RVector t(d.values.size());
  for (Eigen::Index i = 0; i < d.values.size(); ++i) {
    t[i] = f(d.values[i]);
    if (!std::isfinite(t[i]))
      throw DomainError("func_calc: " + std::string(fname) +
                        " undefined on eigenvalue " + detail::fmt(d.values[i]) +
                        " (index " + std::to_string(i) + ")");
  }
  return HermMatrix(d.assemble(t));
}

template <typename F>
HermMatrix func_calc(const HermMatrix& x, F&& f, std::string_view fname = "f") {
  return func_calc(herm_eig(x), std::forward<F>(f), fname);
}

inline HermMatrix mat_exp(const HermMatrix& x) {
  return func_calc(x, [](double t) { return std::exp(t); }, "exp");
}

/// Logarithm of a positive definite Hermitian matrix. Throws if any
/// eigenvalue is not strictly positive.
inline HermMatrix mat_log(const HermMatrix& x) {
  return func_calc(
      x,
      [](double t) { return t > 0.0 ? std::log(t) : std::numeric_limits<double>::quiet_NaN(); },
      "log");
}

/// Normalized trace tau = tr/n. tau(1) = 1 for every dimension.
inline Complex ntrace(const CMatrix& x) {
  if (x.rows() != x.cols()) throw DomainError("ntrace: matrix must be square");
  return x.trace() / static_cast<double>(x.rows());
}

inline double ntrace(const HermMatrix& x) {
  return x.mat().diagonal().real().sum() / static_cast<double>(x.dim());
}

/// Real inner product Re tau(xy) on Hermitian matrices (the p = 2 pairing).
inline double ntrace_inner(const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw DomainError("ntrace_inner: dimension mismatch");
  return (x.mat().array() * y.mat().transpose().array()).sum().real() /
         static_cast<double>(x.dim());
}

/// The exponent triple (p, q, r): q the conjugate exponent, r = max(p, q).
/// p = 1 and p = infinity are representable but flagged as not uniformly
/// convex; operations that rely on uniform convexity reject them.
class PParams {
 public:
  explicit PParams(double p) : p_(p) {
    if (std::isnan(p) || p < 1.0)
      throw DomainError("PParams: p must lie in [1, inf], got " + detail::fmt(p));
    if (std::isinf(p_))
      q_ = 1.0;
    else if (p_ == 1.0)
      q_ = std::numeric_limits<double>::infinity();
    else
      q_ = p_ / (p_ - 1.0);
    r_ = std::max(p_, q_);
  }

  static PParams infinity() { return PParams(std::numeric_limits<double>::infinity()); }

  double p() const { return p_; }
  double q() const { return q_; }
  double r() const { return r_; }
  bool is_inf() const { return std::isinf(p_); }
  bool uniformly_convex() const { return p_ > 1.0 && !std::isinf(p_); }

 private:
  double p_, q_, r_;
};

namespace detail {

/// ((1/n) sum s_i^p)^(1/p) for nonnegative s; max(s) for p = inf.
/// Scaled by the largest value to avoid overflow for large p.
inline double pnorm_from_svals(const RVector& s, const PParams& pp) {
  const Eigen::Index n = s.size();
  double smax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) smax = std::max(smax, s[i]);
  if (smax == 0.0) return 0.0;
  if (pp.is_inf()) return smax;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += std::pow(s[i] / smax, pp.p());
  return smax * std::pow(acc / static_cast<double>(n), 1.0 / pp.p());
}

}  // namespace detail

/// Schatten p-norm induced by the normalized trace,
/// ||x||_p = tau(|x|^p)^(1/p); for p = inf the largest singular value.
inline double schatten_norm(const HermMatrix& x, const PParams& pp) {
  return detail::pnorm_from_svals(herm_eig(x).values.cwiseAbs(), pp);
}

inline double schatten_norm(const CMatrix& x, const PParams& pp) {
  Eigen::JacobiSVD<CMatrix> svd(x);
  return detail::pnorm_from_svals(svd.singularValues(), pp);
}

/// Spectral sign u of a Hermitian v with sign(0) = 0, so v = u|v|, u = u*
/// and u commutes with |v|. Eigenvalues below 1e-13 * max(1, ||v||_inf) in
/// magnitude count as zero.
inline HermMatrix polar_sign(const HermMatrix& v) {
  const EigDecomp d = herm_eig(v);
  const double scale = std::max(1.0, d.values.cwiseAbs().maxCoeff());
  const double tol = 1e-13 * scale;
  return func_calc(
      d, [tol](double t) { return std::abs(t) <= tol ? 0.0 : (t > 0.0 ? 1.0 : -1.0); },
      "sign");
}

/// Commutator [x, y] = xy - yx; skew-Hermitian for Hermitian inputs.
inline CMatrix bracket(const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw DomainError("bracket: dimension mismatch");
  return x.mat() * y.mat() - y.mat() * x.mat();
}

/// [x, [y, z]]; Hermitian for Hermitian inputs.
inline HermMatrix double_bracket(const HermMatrix& x, const HermMatrix& y,
                                 const HermMatrix& z) {
  if (x.dim() != y.dim() || y.dim() != z.dim())
    throw DomainError("double_bracket: dimension mismatch");
  const CMatrix inner = bracket(y, z);
  return HermMatrix(x.mat() * inner - inner * x.mat());
}

inline HermMatrix double_bracket(const HermMatrix& x, const HermMatrix& y) {
  return double_bracket(x, x, y);
}

/// Positive invertible element of M_n(C) with a cached eigendecomposition.
/// The constructor rejects matrices whose smallest eigenvalue does not
/// clear 1e-12 * max(1, ||a||_inf): inverse square roots downstream amplify
/// error as lambda_min^(-1/2).
class PosDefMatrix {
 public:
  explicit PosDefMatrix(const HermMatrix& h) : base_(h), eig_(herm_eig(h)) {
    const double lo = eig_.values[0];
    const double hi = eig_.values[eig_.values.size() - 1];
    const double floor = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (!(lo > floor))
      throw DomainError("PosDefMatrix: not positive definite, min eigenvalue " +
                        detail::fmt(lo) + " (threshold " + detail::fmt(floor) + ")");
  }

  static PosDefMatrix identity(int n) { return PosDefMatrix(HermMatrix::identity(n)); }
  static PosDefMatrix from_diagonal(const RVector& d) {
    return PosDefMatrix(HermMatrix::from_diagonal(d));
  }

  int dim() const { return base_.dim(); }
  const HermMatrix& herm() const { return base_; }
  const CMatrix& mat() const { return base_.mat(); }
  const EigDecomp& eig() const { return eig_; }

  double min_eig() const { return eig_.values[0]; }
  double max_eig() const { return eig_.values[eig_.values.size() - 1]; }

  /// a^t as a plain matrix (Hermitian up to roundoff), from the cached
  /// decomposition.
  CMatrix power(double t) const {
    RVector v(eig_.values.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::pow(eig_.values[i], t);
    return eig_.assemble(v);
  }

  PosDefMatrix pow(double t) const { return PosDefMatrix(HermMatrix(power(t))); }
  PosDefMatrix inverse() const { return pow(-1.0); }

  HermMatrix log() const {
    RVector v(eig_.values.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::log(eig_.values[i]);
    return HermMatrix(eig_.assemble(v));
  }

 private:
  HermMatrix base_;
  EigDecomp eig_;
};

}  // namespace pcone

#pragma once

// Lie triple systems and their exponential sets K = exp(H). A real subspace
// H of Hermitian matrices is a Lie triple system when [x,[y,z]] stays in H;
// exactly then is K geodesically convex, stable under b -> aba and under the
// geodesic symmetries. The probe here stress-tests that equivalence
// numerically.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pcone/geometry.hpp"
#include "pcone/matcore.hpp"
#include "pcone/rng.hpp"

namespace pcone {

/// Real subspace of Hermitian n x n matrices, held as an orthonormal basis
/// under the inner product Re tau(xy). Projection is
/// Pi_H x = sum_i Re tau(x b_i) b_i.
class HermSubspace {
 public:
  /// Orthonormalizes the generators (modified Gram-Schmidt, two passes) and
  /// drops directions whose residual norm falls below tol; the resulting
  /// dimension is the rank actually kept.
  static HermSubspace from_generators(int n, std::span<const HermMatrix> generators,
                                      double tol = 1e-9) {
    HermSubspace h(n);
    for (const HermMatrix& g : generators) {
      if (g.dim() != n) throw DomainError("HermSubspace: generator dimension mismatch");
      h.try_extend(g, tol);
    }
    return h;
  }

  /// The real diagonal matrices; the standard abelian example.
  static HermSubspace diagonals(int n) {
    std::vector<HermMatrix> gens;
    for (int i = 0; i < n; ++i) {
      CMatrix e = CMatrix::Zero(n, n);
      e(i, i) = 1.0;
      gens.push_back(HermMatrix(e));
    }
    return from_generators(n, gens);
  }

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<HermMatrix>& basis() const { return basis_; }

  HermMatrix project(const HermMatrix& x) const {
    if (x.dim() != n_) throw DomainError("HermSubspace: dimension mismatch");
    CMatrix acc = CMatrix::Zero(n_, n_);
    for (const HermMatrix& b : basis_) acc += ntrace_inner(x, b) * b.mat();
    return HermMatrix(acc);
  }

  std::vector<double> coefficients(const HermMatrix& x) const {
    std::vector<double> c;
    c.reserve(basis_.size());
    for (const HermMatrix& b : basis_) c.push_back(ntrace_inner(x, b));
    return c;
  }

  HermMatrix combine(std::span<const double> c) const {
    if (c.size() != basis_.size())
      throw DomainError("HermSubspace: coefficient count mismatch");
    CMatrix acc = CMatrix::Zero(n_, n_);
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * basis_[i].mat();
    return HermMatrix(acc);
  }

  /// Distance of x from the subspace in the normalized 2-norm.
  double residual(const HermMatrix& x) const {
    const HermMatrix r = x - project(x);
    return std::sqrt(std::max(0.0, ntrace_inner(r, r)));
  }

  /// Adds the component of g orthogonal to the current span if it is large
  /// enough; returns whether the basis grew.
  bool try_extend(const HermMatrix& g, double tol = 1e-9) {
    HermMatrix v = g - project(g);
    v = v - project(v);  // second pass kills roundoff leakage
    const double nrm = std::sqrt(std::max(0.0, ntrace_inner(v, v)));
    const double gnrm = std::sqrt(std::max(0.0, ntrace_inner(g, g)));
    if (nrm <= tol * (1.0 + gnrm)) return false;
    basis_.push_back(v * (1.0 / nrm));
    return true;
  }

 private:
  explicit HermSubspace(int n) : n_(n) {
    if (n < 1) throw DomainError("HermSubspace: ambient dimension must be positive");
  }

  int n_;
  std::vector<HermMatrix> basis_;
};

struct LtsCheckResult {
  bool is_lts;
  double worst_residual;  // max over triples of ||w - Pi w||_2 / (1 + ||w||_2)
};

/// Checks closure under double bracketing: [b_i, [b_j, b_k]] must project
/// back into H for every basis triple (j < k covers the polarized set by
/// antisymmetry of the inner bracket).
inline LtsCheckResult lts_check(const HermSubspace& H, double tol = 1e-9) {
  const auto& basis = H.basis();
  const int d = H.dim();
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        const HermMatrix w = double_bracket(basis[i], basis[j], basis[k]);
        const double wn = std::sqrt(std::max(0.0, ntrace_inner(w, w)));
        worst = std::max(worst, H.residual(w) / (1.0 + wn));
      }
    }
  }
  return {worst <= tol, worst};
}

/// Smallest subspace containing the generators and closed under
/// (x, y, z) -> [x, [y, z]]: breadth-first basis extension until a fixed
/// point. Terminates since the ambient real dimension n^2 bounds the rank.
inline HermSubspace lts_closure(std::span<const HermMatrix> generators,
                                double tol = 1e-9) {
  if (generators.empty()) throw DomainError("lts_closure: no generators");
  const int n = generators[0].dim();
  HermSubspace H = HermSubspace::from_generators(n, generators, tol);
  const int max_dim = n * n;

  int frontier_start = 0;
  while (H.dim() < max_dim) {
    const int d = H.dim();
    bool grew = false;
    for (int j = 0; j < d; ++j) {
      for (int k = j + 1; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
          // after the first sweep, only triples touching new directions matter
          if (frontier_start > 0 && i < frontier_start && j < frontier_start &&
              k < frontier_start)
            continue;
          const HermMatrix w = double_bracket(H.basis()[i], H.basis()[j], H.basis()[k]);
          grew |= H.try_extend(w, tol);
        }
      }
    }
    if (!grew) break;
    frontier_start = d;
  }
  return H;
}

/// K = exp(H). The constructor records whether H verified as a Lie triple
/// system; operations needing geodesic convexity require lts_verified().
class ExponentialSet {
 public:
  explicit ExponentialSet(HermSubspace H, double lts_tol = 1e-9)
      : H_(std::move(H)) {
    const LtsCheckResult r = lts_check(H_, lts_tol);
    lts_verified_ = r.is_lts;
    lts_residual_ = r.worst_residual;
  }

  const HermSubspace& subspace() const { return H_; }
  bool lts_verified() const { return lts_verified_; }
  double lts_residual() const { return lts_residual_; }

 private:
  HermSubspace H_;
  bool lts_verified_;
  double lts_residual_;
};

struct MembershipResult {
  bool member;
  double residual;  // ||ln a - Pi_H ln a||_2 / (1 + ||ln a||_2)
};

/// a belongs to K = exp(H) exactly when ln(a) lies in H; the tolerance
/// scales with ||ln a|| so the test stays meaningful far from the identity.
inline MembershipResult k_membership(const ExponentialSet& K, const PosDefMatrix& a,
                                     double tol = 1e-8) {
  const HermMatrix x = a.log();
  const double xn = std::sqrt(std::max(0.0, ntrace_inner(x, x)));
  const double res = K.subspace().residual(x) / (1.0 + xn);
  return {res <= tol, res};
}

/// Draws a random element of H with ||.||_inf in [0.1, 1] * cap.
inline HermMatrix random_in_subspace(Rng& rng, const HermSubspace& H, double cap) {
  if (H.dim() == 0) return HermMatrix::zero(H.ambient_dim());
  std::vector<double> c(H.dim());
  for (double& v : c) v = rng.normal();
  HermMatrix x = H.combine(c);
  const double opnorm = herm_eig(x).values.cwiseAbs().maxCoeff();
  if (opnorm == 0.0) return x;
  return x * (cap * (0.1 + 0.9 * rng.uniform()) / opnorm);
}

struct ProbeReport {
  int trials;
  double max_residual;       // worst normalized membership residual observed
  std::uint64_t worst_seed;  // per-trial seed reproducing it
};

/// Samples a, b in K and checks that aba, the geodesic symmetry sigma_a(b)
/// and the geodesic gamma_{a,b}(t) (including parameters outside [0, 1])
/// stay in K. For a Lie triple system all residuals vanish up to roundoff;
/// for a non-LTS subspace the probe finds violations quickly.
inline ProbeReport convexity_probe(const ExponentialSet& K, int trials,
                                   std::uint64_t seed) {
  static constexpr double kGrid[] = {-1.0, -0.5, 0.25, 0.5, 0.75, 1.5};
  const double cap = 1.5;
  ProbeReport report{trials, 0.0, seed};
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(trial));
    Rng rng(s);
    const PosDefMatrix a = PosDefMatrix(mat_exp(random_in_subspace(rng, K.subspace(), cap)));
    const PosDefMatrix b = PosDefMatrix(mat_exp(random_in_subspace(rng, K.subspace(), cap)));

    double worst = 0.0;
    const PosDefMatrix aba(HermMatrix(a.mat() * b.mat() * a.mat()));
    worst = std::max(worst, k_membership(K, aba).residual);
    worst = std::max(worst, k_membership(K, geodesic_symmetry(a, b)).residual);
    const GeodesicSegment seg(a, b);
    for (double t : kGrid)
      worst = std::max(worst, k_membership(K, seg.point(t)).residual);

    if (worst > report.max_residual) {
      report.max_residual = worst;
      report.worst_seed = s;
    }
  }
  return report;
}

}  // namespace pcone

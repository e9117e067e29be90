#pragma once

// Seeded, reproducible sampling. Gaussian draws go through an explicit
// Box-Muller transform on top of mt19937_64 so that a given seed produces
// the same bytes on every platform; std::normal_distribution makes no such
// promise.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "pcone/matcore.hpp"

namespace pcone {

/// splitmix64 mix; used to decorrelate derived seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trial seed: base XOR trial index, then mixed. Trials are therefore
/// independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(base ^ index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] by rejection-free scaling (bias is
  /// negligible for the tiny ranges used here).
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex cnormal() { return Complex(normal(), normal()) / std::sqrt(2.0); }

 private:
  std::mt19937_64 gen_;
};

/// GUE-style Hermitian sample: independent complex Gaussian entries,
/// symmetrized, then rescaled so that ||x||_inf lands in [0.1, 1] * cap.
inline HermMatrix random_herm(Rng& rng, int n, double cap) {
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
  HermMatrix x((g + g.adjoint()) / 2.0);
  const double opnorm = herm_eig(x).values.cwiseAbs().maxCoeff();
  if (opnorm == 0.0) return x;
  const double target = cap * (0.1 + 0.9 * rng.uniform());
  return x * (target / opnorm);
}

/// exp of a random Hermitian with ||log a||_inf <= cap, so the condition
/// number stays below e^(2 cap).
inline PosDefMatrix random_posdef(Rng& rng, int n, double cap) {
  return PosDefMatrix(mat_exp(random_herm(rng, n, cap)));
}

/// Haar-ish unitary from the QR factorization of a complex Gaussian matrix,
/// with the R diagonal phase fixed for determinism.
inline CMatrix random_unitary(Rng& rng, int n) {
  CMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

}  // namespace pcone

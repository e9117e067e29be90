// A short tour: two positive matrices, the geodesic between them, distances
// for a few exponents, and a nearest-point projection onto the diagonal
// exponential set.

#include <cstdio>

#include "pcone/pcone.hpp"

using namespace pcone;

int main() {
  Rng rng(7);
  const PosDefMatrix a = random_posdef(rng, 3, 1.5);
  const PosDefMatrix b = random_posdef(rng, 3, 1.5);

  std::printf("distances between two random 3x3 positive matrices:\n");
  for (double p : {1.5, 2.0, 3.0, 4.0})
    std::printf("  d_%.1f(a, b) = %.12f\n", p, geodesic_distance(a, b, PParams(p)));
  std::printf("  d_inf(a, b) = %.12f\n",
              geodesic_distance(a, b, PParams::infinity()));

  const GeodesicSegment seg(a, b);
  const PParams p2(2.0);
  std::printf("\nmidpoint splits the distance: d(a, m) = %.12f, half = %.12f\n",
              geodesic_distance(a, seg.point(0.5), p2), seg.length(p2) / 2.0);

  const ExponentialSet K(HermSubspace::diagonals(3));
  const ProjectionResult r = project_to_k(b, K, p2);
  std::printf("\nprojection of b onto exp(diagonals): distance %.10f, "
              "residual %.2e, %d cycles\n",
              r.distance, r.first_order_residual, r.iterations);
  return 0;
}

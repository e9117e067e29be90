#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pcone/geometry.hpp"
#include "pcone/rng.hpp"

using namespace pcone;
using Catch::Approx;

namespace {

double max_rel_diff(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

const std::vector<PParams>& test_ps() {
  static const std::vector<PParams> ps = {PParams(1.5), PParams(2), PParams(3),
                                          PParams(4), PParams::infinity()};
  return ps;
}

}  // namespace

TEST_CASE("finsler_norm") {
  SECTION("identity base reduces to the flat norm") {
    Rng rng(3);
    const HermMatrix x = random_herm(rng, 4, 2.0);
    const PosDefMatrix eye = PosDefMatrix::identity(4);
    for (const PParams& pp : test_ps())
      REQUIRE(finsler_norm(eye, x, pp) == Approx(schatten_norm(x, pp)).margin(1e-12));
  }
  SECTION("base = dir = diag(4,4) has norm one for any p") {
    RVector d(2);
    d << 4, 4;
    const PosDefMatrix a = PosDefMatrix::from_diagonal(d);
    for (const PParams& pp : test_ps())
      REQUIRE(finsler_norm(a, a.herm(), pp) == Approx(1.0).margin(1e-12));
  }
  SECTION("invariance under the congruence action") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix a = random_posdef(rng, n, 2.0);
      const HermMatrix x = random_herm(rng, n, 2.0);
      CMatrix g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
      g += 3.0 * CMatrix::Identity(n, n);  // keep g comfortably invertible
      const PosDefMatrix moved = congruence(g, a);
      const HermMatrix gxg(g.adjoint() * x.mat() * g);
      for (const PParams& pp : test_ps())
        REQUIRE(std::abs(finsler_norm(moved, gxg, pp) - finsler_norm(a, x, pp)) <=
                1e-9);
    }
  }
}

TEST_CASE("geodesic endpoints, reversal, diagonal midpoint") {
  Rng rng(5);
  SECTION("endpoints") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = rng.uniform_int(2, 7);
      const PosDefMatrix a = random_posdef(rng, n, 2.0);
      const PosDefMatrix b = random_posdef(rng, n, 2.0);
      const GeodesicSegment seg(a, b);
      REQUIRE(max_rel_diff(seg.point(0.0).mat(), a.mat()) <= 1e-10);
      REQUIRE(max_rel_diff(seg.point(1.0).mat(), b.mat()) <= 1e-10);
      // exp(w) must reproduce the conjugated endpoint
      const CMatrix s = a.power(-0.5);
      REQUIRE(max_rel_diff(mat_exp(seg.log_map()).mat(), s * b.mat() * s) <= 1e-10);
    }
  }
  SECTION("a = 1 gives b^t; diagonal half-way point") {
    RVector d(2);
    d << std::exp(1.0), std::exp(2.0);
    const GeodesicSegment seg(PosDefMatrix::identity(2), PosDefMatrix::from_diagonal(d));
    const PosDefMatrix mid = seg.point(0.5);
    REQUIRE(mid.mat()(0, 0).real() == Approx(std::exp(0.5)).epsilon(1e-12));
    REQUIRE(mid.mat()(1, 1).real() == Approx(std::exp(1.0)).epsilon(1e-12));
    REQUIRE(std::abs(mid.mat()(0, 1)) <= 1e-14);
  }
  SECTION("gamma_{a,b}(1-t) = gamma_{b,a}(t)") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix a = random_posdef(rng, n, 2.0);
      const PosDefMatrix b = random_posdef(rng, n, 2.0);
      const GeodesicSegment ab(a, b), ba(b, a);
      for (double t : {-0.5, 0.25, 0.75, 1.5})
        REQUIRE((ab.point(1.0 - t).mat() - ba.point(t).mat()).cwiseAbs().maxCoeff() <=
                1e-9);
    }
  }
}

TEST_CASE("geodesic distance") {
  Rng rng(7);
  SECTION("coincident points, and the identity-to-scalar case") {
    const PosDefMatrix a = random_posdef(rng, 4, 2.0);
    for (const PParams& pp : test_ps())
      REQUIRE(geodesic_distance(a, a, pp) <= 1e-12);
    RVector d(2);
    d << std::exp(1.0), std::exp(1.0);
    const PosDefMatrix b = PosDefMatrix::from_diagonal(d);
    for (const PParams& pp : test_ps())
      REQUIRE(geodesic_distance(PosDefMatrix::identity(2), b, pp) ==
              Approx(1.0).epsilon(1e-12));
  }
  SECTION("commuting case reduces to the flat norm of the log difference") {
    for (int trial = 0; trial < 12; ++trial) {
      const int n = rng.uniform_int(2, 6);
      RVector v(n), w(n);
      for (int i = 0; i < n; ++i) {
        v[i] = 2.0 * rng.uniform() - 1.0;
        w[i] = 2.0 * rng.uniform() - 1.0;
      }
      const PosDefMatrix ev = PosDefMatrix::from_diagonal(v.array().exp());
      const PosDefMatrix ew = PosDefMatrix::from_diagonal(w.array().exp());
      const HermMatrix diff = HermMatrix::from_diagonal(v - w);
      for (const PParams& pp : test_ps())
        REQUIRE(std::abs(geodesic_distance(ev, ew, pp) - schatten_norm(diff, pp)) <=
                1e-12);
    }
  }
  SECTION("symmetry and triangle inequality") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix a = random_posdef(rng, n, 2.0);
      const PosDefMatrix b = random_posdef(rng, n, 2.0);
      const PosDefMatrix c = random_posdef(rng, n, 2.0);
      for (const PParams& pp : test_ps()) {
        REQUIRE(std::abs(geodesic_distance(a, b, pp) - geodesic_distance(b, a, pp)) <=
                1e-10);
        REQUIRE(geodesic_distance(a, c, pp) <=
                geodesic_distance(a, b, pp) + geodesic_distance(b, c, pp) + 1e-10);
      }
    }
  }
  SECTION("midpoint splits the distance in half") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix a = random_posdef(rng, n, 2.5);
      const PosDefMatrix b = random_posdef(rng, n, 2.5);
      const GeodesicSegment seg(a, b);
      const PosDefMatrix mid = seg.point(0.5);
      for (const PParams& pp : test_ps()) {
        const double d = seg.length(pp);
        REQUIRE(std::abs(geodesic_distance(a, mid, pp) - d / 2.0) <= 1e-9);
        REQUIRE(std::abs(geodesic_distance(mid, b, pp) - d / 2.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("exponential charts") {
  Rng rng(9);
  SECTION("base = identity reduces to exp, log of self is zero") {
    const HermMatrix x = random_herm(rng, 3, 2.0);
    const PosDefMatrix eye = PosDefMatrix::identity(3);
    REQUIRE((exp_a(eye, x).mat() - mat_exp(x).mat()).cwiseAbs().maxCoeff() <= 1e-12);
    const PosDefMatrix a = random_posdef(rng, 3, 2.0);
    REQUIRE(log_a(a, a).max_abs() <= 1e-12);
  }
  SECTION("round trips both ways") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix base = random_posdef(rng, n, 2.0);
      const PosDefMatrix b = random_posdef(rng, n, 2.0);
      const HermMatrix x = random_herm(rng, n, 2.0);
      REQUIRE((exp_a(base, log_a(base, b)).mat() - b.mat()).cwiseAbs().maxCoeff() <=
              1e-9);
      REQUIRE((log_a(base, exp_a(base, x)).mat() - x.mat()).cwiseAbs().maxCoeff() <=
              1e-9);
    }
  }
  SECTION("exp_a(t x) traces the geodesic with initial speed x") {
    const PosDefMatrix base = random_posdef(rng, 3, 1.5);
    const HermMatrix x = random_herm(rng, 3, 1.5);
    const GeodesicSegment seg(base, exp_a(base, x));
    for (double t : {0.25, 0.5, 0.75, 1.5})
      REQUIRE((exp_a(base, x * t).mat() - seg.point(t).mat()).cwiseAbs().maxCoeff() <=
              1e-9);
    REQUIRE((seg.velocity(0.0).mat() - x.mat()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("dexp") {
  Rng rng(13);
  SECTION("at zero it is the identity") {
    const HermMatrix y = random_herm(rng, 4, 2.0);
    REQUIRE((dexp(HermMatrix::zero(4), y).mat() - y.mat()).cwiseAbs().maxCoeff() <=
            1e-12);
  }
  SECTION("commuting arguments give e^x y") {
    RVector dx(3), dy(3);
    dx << 0.3, -0.7, 1.1;
    dy << 1.0, 2.0, -0.5;
    const HermMatrix x = HermMatrix::from_diagonal(dx);
    const HermMatrix y = HermMatrix::from_diagonal(dy);
    const CMatrix expect = mat_exp(x).mat() * y.mat();
    REQUIRE((dexp(x, y).mat() - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SECTION("finite-difference oracle") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const HermMatrix x = random_herm(rng, n, 2.0);
      const HermMatrix y = random_herm(rng, n, 2.0);
      const double h = 1e-6;
      const CMatrix fd = (mat_exp(x + y * h).mat() - mat_exp(x).mat()) / h;
      const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
      REQUIRE((dexp(x, y).mat() - fd).cwiseAbs().maxCoeff() / scale <= 1e-5);
    }
  }
  SECTION("matches the 64-node integral route, including clustered spectra") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const HermMatrix x = random_herm(rng, n, 2.0);
      const HermMatrix y = random_herm(rng, n, 2.0);
      REQUIRE((dexp(x, y).mat() - dexp_quadrature(x, y).mat()).cwiseAbs().maxCoeff() <=
              1e-10);
    }
    // nearly degenerate spectrum drives the sinhc branch
    RVector d(3);
    d << 0.5, 0.5 + 3e-9, -0.2;
    CMatrix rot = random_unitary(rng, 3);
    const HermMatrix x(rot * HermMatrix::from_diagonal(d).mat() * rot.adjoint());
    const HermMatrix y = random_herm(rng, 3, 1.0);
    REQUIRE((dexp(x, y).mat() - dexp_quadrature(x, y).mat()).cwiseAbs().maxCoeff() <=
            1e-10);
  }
  SECTION("conjugated differential does not shrink any p-norm") {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const HermMatrix x = random_herm(rng, n, 2.5);
      const HermMatrix y = random_herm(rng, n, 2.5);
      const CMatrix s = PosDefMatrix(mat_exp(x)).power(-0.5);
      const HermMatrix conj(s * dexp(x, y).mat() * s);
      for (const PParams& pp : test_ps())
        REQUIRE(schatten_norm(conj, pp) >= schatten_norm(y, pp) - 1e-10);
    }
  }
}

TEST_CASE("geodesic symmetry") {
  Rng rng(15);
  const PosDefMatrix a = random_posdef(rng, 3, 2.0);
  const PosDefMatrix b = random_posdef(rng, 3, 2.0);
  SECTION("fixed point and inversion at the identity") {
    REQUIRE((geodesic_symmetry(a, a).mat() - a.mat()).cwiseAbs().maxCoeff() <= 1e-10);
    const PosDefMatrix eye = PosDefMatrix::identity(3);
    REQUIRE((geodesic_symmetry(eye, b).mat() - b.power(-1.0)).cwiseAbs().maxCoeff() <=
            1e-12);
  }
  SECTION("involution") {
    REQUIRE((geodesic_symmetry(a, geodesic_symmetry(a, b)).mat() - b.mat())
                .cwiseAbs()
                .maxCoeff() <= 1e-10);
  }
  SECTION("isometry for every p") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix c = random_posdef(rng, n, 2.0);
      const PosDefMatrix x = random_posdef(rng, n, 2.0);
      const PosDefMatrix y = random_posdef(rng, n, 2.0);
      for (const PParams& pp : test_ps())
        REQUIRE(std::abs(geodesic_distance(geodesic_symmetry(c, x),
                                           geodesic_symmetry(c, y), pp) -
                         geodesic_distance(x, y, pp)) <= 1e-9);
    }
  }
}

TEST_CASE("congruence action") {
  Rng rng(21);
  const PosDefMatrix a = random_posdef(rng, 3, 2.0);
  SECTION("identity acts trivially") {
    REQUIRE((congruence(CMatrix::Identity(3, 3), a).mat() - a.mat())
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  SECTION("g = a^(-1/2) b^(1/2) carries a to b") {
    const PosDefMatrix b = random_posdef(rng, 3, 2.0);
    const CMatrix g = a.power(-0.5) * b.power(0.5);
    REQUIRE((congruence(g, a).mat() - b.mat()).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SECTION("unitary congruence preserves the Schatten norms") {
    const CMatrix u = random_unitary(rng, 3);
    const PosDefMatrix moved = congruence(u, a);
    for (const PParams& pp : test_ps())
      REQUIRE(std::abs(schatten_norm(moved.herm(), pp) - schatten_norm(a.herm(), pp)) <=
              1e-10);
  }
  SECTION("isometry of the geodesic distance") {
    for (int trial = 0; trial < 15; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix x = random_posdef(rng, n, 2.0);
      const PosDefMatrix y = random_posdef(rng, n, 2.0);
      CMatrix g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
      g += 3.0 * CMatrix::Identity(n, n);
      for (const PParams& pp : test_ps())
        REQUIRE(std::abs(geodesic_distance(congruence(g, x), congruence(g, y), pp) -
                         geodesic_distance(x, y, pp)) <= 1e-9);
    }
  }
  SECTION("near-singular factor is rejected") {
    CMatrix g = CMatrix::Identity(3, 3);
    g(2, 2) = 1e-14;
    REQUIRE_THROWS_AS(congruence(g, a), DomainError);
  }
}

TEST_CASE("curve length") {
  Rng rng(27);
  SECTION("geodesic segments have length equal to the distance, exactly") {
    const PosDefMatrix a = random_posdef(rng, 4, 2.0);
    const PosDefMatrix b = random_posdef(rng, 4, 2.0);
    const GeodesicSegment seg(a, b);
    for (const PParams& pp : test_ps())
      REQUIRE(curve_length(seg, pp) == Approx(geodesic_distance(a, b, pp)).epsilon(1e-14));
  }
  SECTION("constant curves have zero length") {
    const PosDefMatrix a = random_posdef(rng, 3, 2.0);
    const double len =
        curve_length([&](double) { return a; }, PParams(2));
    REQUIRE(len <= 1e-9);
  }
  SECTION("quadrature over the geodesic reproduces the distance") {
    for (int trial = 0; trial < 8; ++trial) {
      const int n = rng.uniform_int(2, 5);
      const PosDefMatrix a = random_posdef(rng, n, 2.0);
      const PosDefMatrix b = random_posdef(rng, n, 2.0);
      const GeodesicSegment seg(a, b);
      for (const PParams& pp : {PParams(1.5), PParams(2), PParams(4)}) {
        // finite-difference velocity path
        const double len_fd =
            curve_length([&](double t) { return seg.point(t); }, pp);
        REQUIRE(std::abs(len_fd - seg.length(pp)) <= 1e-6);
        // analytic velocity path
        const double len_exact = curve_length(
            [&](double t) { return seg.point(t); },
            [&](double t) { return seg.velocity(t); }, pp);
        REQUIRE(std::abs(len_exact - seg.length(pp)) <= 1e-10);
      }
    }
  }
  SECTION("straight segment between commuting endpoints is never shorter") {
    RVector da(3), db(3);
    da << 0.5, 1.0, 2.0;
    db << 1.5, 0.8, 3.0;
    const PosDefMatrix a = PosDefMatrix::from_diagonal(da);
    const PosDefMatrix b = PosDefMatrix::from_diagonal(db);
    auto chord = [&](double t) {
      return PosDefMatrix(HermMatrix((1.0 - t) * a.mat() + t * b.mat()));
    };
    const HermMatrix slope(b.mat() - a.mat());
    for (const PParams& pp : test_ps()) {
      const double len =
          curve_length(chord, [&](double) { return slope; }, pp);
      REQUIRE(len >= geodesic_distance(a, b, pp) - 1e-8);
    }
  }
  SECTION("constant speed along geodesics on a nine-point grid") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = rng.uniform_int(2, 6);
      const PosDefMatrix a = random_posdef(rng, n, 2.5);
      const PosDefMatrix b = random_posdef(rng, n, 2.5);
      const GeodesicSegment seg(a, b);
      for (const PParams& pp : test_ps()) {
        const double nominal = seg.length(pp);
        for (int k = 1; k <= 9; ++k) {
          const double t = (k - 1) / 8.0;
          REQUIRE(std::abs(finsler_norm(seg.point(t), seg.velocity(t), pp) - nominal) <=
                  1e-8);
        }
      }
    }
  }
  SECTION("tabulated curves: validation, duplicates, convergence") {
    const PosDefMatrix a = PosDefMatrix::identity(2);
    RVector d(2);
    d << std::exp(0.7), std::exp(-0.4);
    const PosDefMatrix b = PosDefMatrix::from_diagonal(d);
    const GeodesicSegment seg(a, b);

    std::vector<CurveSample> bad = {{0.0, a}, {0.0, b}};
    REQUIRE_THROWS_AS(curve_length(bad, PParams(2)), DomainError);

    std::vector<CurveSample> samples;
    const int m = 2001;
    for (int i = 0; i < m; ++i) {
      const double t = static_cast<double>(i) / (m - 1);
      samples.push_back({t, seg.point(t)});
    }
    const PParams p2(2);
    REQUIRE(std::abs(curve_length(samples, p2) - seg.length(p2)) <= 1e-6);

    // duplicate consecutive points are dropped, not differentiated across
    std::vector<CurveSample> dup;
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      dup.push_back({t, seg.point(t)});
      if (i == 5) dup.push_back({0.55, seg.point(0.5)});
    }
    std::vector<CurveSample> plain;
    for (int i = 0; i <= 10; ++i) plain.push_back({i / 10.0, seg.point(i / 10.0)});
    REQUIRE(curve_length(dup, p2) == Approx(curve_length(plain, p2)).margin(1e-3));
  }
  SECTION("distance never exceeds the length of any sampled path") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = rng.uniform_int(2, 5);
      const HermMatrix v = random_herm(rng, n, 1.5);
      const HermMatrix w = random_herm(rng, n, 1.5);
      // log-linear interpolation path from e^v to e^w
      auto path = [&](double t) {
        return PosDefMatrix(mat_exp(HermMatrix((1.0 - t) * v.mat() + t * w.mat())));
      };
      const PParams p3(3);
      const double len = curve_length(path, p3);
      REQUIRE(len >= geodesic_distance(PosDefMatrix(mat_exp(v)),
                                       PosDefMatrix(mat_exp(w)), p3) -
                         1e-8);
      // and the flat lower bound holds too
      REQUIRE(len >= schatten_norm(v - w, p3) - 1e-8);
    }
  }
}

TEST_CASE("distance lower bound against the flat metric") {
  Rng rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.uniform_int(2, 7);
    const HermMatrix v = random_herm(rng, n, 2.5);
    const HermMatrix w = random_herm(rng, n, 2.5);
    const PosDefMatrix ev(mat_exp(v)), ew(mat_exp(w));
    for (const PParams& pp : test_ps())
      REQUIRE(geodesic_distance(ev, ew, pp) >= schatten_norm(v - w, pp) - 1e-10);
  }
}

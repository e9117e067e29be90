#pragma once

// Certification engine: every metric inequality the library's geometry rests
// on, verified over seeded random ensembles with worst-slack reporting. A
// slack is (larger side) - (smaller side) of the inequality under test, so
// negative slack beyond the per-check tolerance means a violation. Each
// check is a pure function of the ensemble seed; the worst slack is always
// attributed to the per-trial seed that produced it.
//
// Tolerance budget: pure-algebra identities 1e-10, eigendecomposition-backed
// distance identities 1e-9, quadrature-dependent checks 1e-8, checks that
// lean on an empirical constant 1e-6.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pcone/geometry.hpp"
#include "pcone/matcore.hpp"
#include "pcone/projection.hpp"
#include "pcone/rng.hpp"

namespace pcone {

struct CheckReport {
  std::string name;
  int trials = 0;
  double worst_slack = 0.0;
  std::uint64_t worst_seed = 0;  // per-trial seed attaining worst_slack
  double tolerance = 0.0;
  bool passed = true;
  std::map<std::string, double> info;  // check-specific extras (coverage, h_inf)
};

/// Seeded sampling plan shared by all checks. Sampling is deterministic
/// given the seed; Hermitians are GUE-style with ||.||_inf <= norm_cap and
/// positive matrices are exponentials of such, so condition numbers stay
/// bounded by e^(2 cap).
struct Ensemble {
  std::uint64_t seed = 42;
  int n_min = 2;
  int n_max = 8;
  double norm_cap = 2.5;
  int trials = 1000;
  std::vector<PParams> p_set = default_p_set();

  static std::vector<PParams> default_p_set() {
    return {PParams(1.5), PParams(2.0), PParams(3.0), PParams(4.0), PParams::infinity()};
  }

  std::vector<PParams> uniformly_convex_ps() const {
    std::vector<PParams> out;
    for (const PParams& pp : p_set)
      if (pp.uniformly_convex()) out.push_back(pp);
    return out;
  }
};

namespace detail {

inline double pnorm_abs(const RVector& vals, const PParams& pp) {
  return pnorm_from_svals(vals.cwiseAbs(), pp);
}

template <typename PerTrial>
CheckReport run_trials(std::string name, const Ensemble& e, double tolerance,
                       PerTrial&& per_trial) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.trials = e.trials;
  rep.tolerance = tolerance;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  rep.worst_seed = e.seed;
  for (int trial = 0; trial < e.trials; ++trial) {
    const std::uint64_t s = derive_seed(e.seed, static_cast<std::uint64_t>(trial));
    Rng rng(s);
    const double slack = per_trial(rng);
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_seed = s;
    }
  }
  if (!std::isfinite(rep.worst_slack)) rep.worst_slack = 0.0;  // no admissible trial
  rep.passed = rep.worst_slack >= -tolerance;
  return rep;
}

}  // namespace detail

/// ||int_0^1 a^{1-t} b a^t dt||_p >= ||a^(1/2) b a^(1/2)||_p, with the
/// integral evaluated by the 64-node quadrature route.
inline CheckReport check_emi(const Ensemble& e) {
  return detail::run_trials("emi", e, 1e-8, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const PosDefMatrix a = random_posdef(rng, n, e.norm_cap);
    const HermMatrix b = random_herm(rng, n, e.norm_cap);
    const RVector lhs = herm_eig(dexp_quadrature(a.log(), b)).values;
    const CMatrix ah = a.power(0.5);
    const RVector rhs = herm_eig(HermMatrix(ah * b.mat() * ah)).values;
    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.p_set)
      worst = std::min(worst, detail::pnorm_abs(lhs, pp) - detail::pnorm_abs(rhs, pp));
    return worst;
  });
}

/// d_p(e^v, e^w) >= ||v - w||_p: the exponential map does not shorten.
inline CheckReport check_distance_lower(const Ensemble& e) {
  return detail::run_trials("distance_lower", e, 1e-10, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const HermMatrix v = random_herm(rng, n, e.norm_cap);
    const HermMatrix w = random_herm(rng, n, e.norm_cap);
    const RVector dist = distance_log_spectrum(PosDefMatrix(mat_exp(v)),
                                               PosDefMatrix(mat_exp(w)));
    const RVector flat = herm_eig(v - w).values;
    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.p_set)
      worst = std::min(worst, detail::pnorm_abs(dist, pp) - detail::pnorm_abs(flat, pp));
    return worst;
  });
}

/// ||ln(e^{tx/2} e^{-ty} e^{tx/2})||_p <= t ||ln(e^{x/2} e^{-y} e^{x/2})||_p
/// for t in [0, 1]: the segment inequality behind convexity of d_p.
inline CheckReport check_cordes(const Ensemble& e) {
  return detail::run_trials("cordes", e, 1e-9, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const EigDecomp dx = herm_eig(random_herm(rng, n, e.norm_cap));
    const EigDecomp dy = herm_eig(random_herm(rng, n, e.norm_cap));
    auto log_spectrum = [&](double t) -> RVector {
      RVector ex(dx.values.size()), ey(dy.values.size());
      for (Eigen::Index i = 0; i < ex.size(); ++i) ex[i] = std::exp(t * dx.values[i] / 2.0);
      for (Eigen::Index i = 0; i < ey.size(); ++i) ey[i] = std::exp(-t * dy.values[i]);
      const CMatrix half = dx.assemble(ex);
      const EigDecomp m = herm_eig(HermMatrix(half * dy.assemble(ey) * half));
      return m.values.array().log();
    };
    const RVector base = log_spectrum(1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 9; ++k) {
      const double t = k / 10.0;
      const RVector at_t = log_spectrum(t);
      for (const PParams& pp : e.p_set)
        worst = std::min(worst, t * detail::pnorm_abs(base, pp) -
                                    detail::pnorm_abs(at_t, pp));
    }
    return worst;
  });
}

/// t -> d_p(gamma_{a,b}(t), gamma_{c,d}(t)) is convex: midpoint form on
/// random geodesic rectangles, plus f(t) <= t f(1) when the start points
/// coincide.
inline CheckReport check_convexity_two_geodesics(const Ensemble& e) {
  return detail::run_trials("convexity_two_geodesics", e, 1e-9, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const PosDefMatrix a = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix b = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix c = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix d = random_posdef(rng, n, e.norm_cap);
    const GeodesicSegment ab(a, b), cd(c, d), ac(a, c);

    const RVector g0 = distance_log_spectrum(a, c);
    const RVector g1 = distance_log_spectrum(b, d);
    const RVector gh = distance_log_spectrum(ab.point(0.5), cd.point(0.5));
    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.p_set)
      worst = std::min(worst, (detail::pnorm_abs(g0, pp) + detail::pnorm_abs(g1, pp)) / 2.0 -
                                  detail::pnorm_abs(gh, pp));

    const RVector f1 = distance_log_spectrum(b, c);
    for (double t : {0.25, 0.5, 0.75}) {
      const RVector ft = distance_log_spectrum(ab.point(t), ac.point(t));
      for (const PParams& pp : e.p_set)
        worst = std::min(worst,
                         t * detail::pnorm_abs(f1, pp) - detail::pnorm_abs(ft, pp));
    }
    return worst;
  });
}

/// Semi-parallelogram law with exponent r = max(p, q):
/// (1/2^r) d(g0,g1)^r <= (d(a,g0)^r + d(a,g1)^r)/2 - d(a, g_half)^r.
inline CheckReport check_semi_parallelogram(const Ensemble& e) {
  CheckReport rep = detail::run_trials("semi_parallelogram", e, 1e-9, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const PosDefMatrix a = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix g0 = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix g1 = random_posdef(rng, n, e.norm_cap);
    const GeodesicSegment seg(g0, g1);
    const PosDefMatrix mid = seg.point(0.5);
    const RVector s0 = distance_log_spectrum(a, g0);
    const RVector s1 = distance_log_spectrum(a, g1);
    const RVector sm = distance_log_spectrum(a, mid);
    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.uniformly_convex_ps()) {
      const double r = pp.r();
      const double d0 = detail::pnorm_abs(s0, pp);
      const double d1 = detail::pnorm_abs(s1, pp);
      const double dm = detail::pnorm_abs(sm, pp);
      const double dg = seg.length(pp);
      worst = std::min(worst, (std::pow(d0, r) + std::pow(d1, r)) / 2.0 -
                                  std::pow(dm, r) - std::pow(dg / 2.0, r));
    }
    return worst;
  });
  return rep;
}

/// Clarkson-McCarthy two-point inequality with exponent r = max(p, q):
/// ||x||_p^r + ||y||_p^r <= (||x+y||_p^r + ||x-y||_p^r)/2.
inline CheckReport check_clarkson(const Ensemble& e) {
  return detail::run_trials("clarkson", e, 1e-10, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const HermMatrix x = random_herm(rng, n, e.norm_cap);
    const HermMatrix y = random_herm(rng, n, e.norm_cap);
    const RVector sx = herm_eig(x).values;
    const RVector sy = herm_eig(y).values;
    const RVector sp = herm_eig(x + y).values;
    const RVector sm = herm_eig(x - y).values;
    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.uniformly_convex_ps()) {
      const double r = pp.r();
      const double lhs = std::pow(detail::pnorm_abs(sp, pp), r) +
                         std::pow(detail::pnorm_abs(sm, pp), r);
      const double rhs = std::pow(detail::pnorm_abs(sx, pp), r) +
                         std::pow(detail::pnorm_abs(sy, pp), r);
      worst = std::min(worst, lhs / 2.0 - rhs);
    }
    return worst;
  });
}

/// Uniform ball convexity with modulus delta(eps) = 1 - [1 - (eps/2)^r]^(1/r):
/// whenever d(g0,g1) > eps * max{d(g0,a), d(g1,a)}, the midpoint satisfies
/// d(a, g_half) <= (1 - delta) * max. Configurations are produced by
/// rejection sampling around the geodesic midpoint; coverage lands in info.
inline CheckReport check_modulus(const Ensemble& e) {
  static constexpr double kEps[] = {0.25, 0.5, 1.0, 1.5};
  CheckReport rep;
  rep.name = "modulus";
  rep.tolerance = 1e-9;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  rep.worst_seed = e.seed;
  const int target = std::max(200, e.trials / 5);
  std::uint64_t stream = 0;
  for (const PParams& pp : e.uniformly_convex_ps()) {
    const double r = pp.r();
    for (const double eps : kEps) {
      const double delta = 1.0 - std::pow(1.0 - std::pow(eps / 2.0, r), 1.0 / r);
      int accepted = 0;
      for (int attempt = 0; attempt < 10000 && accepted < target; ++attempt) {
        const std::uint64_t s = derive_seed(e.seed, 0x10000ULL * stream + attempt);
        Rng rng(s);
        const int n = rng.uniform_int(e.n_min, e.n_max);
        const PosDefMatrix g0 = random_posdef(rng, n, e.norm_cap);
        const PosDefMatrix g1 = random_posdef(rng, n, e.norm_cap);
        const GeodesicSegment seg(g0, g1);
        const double dg = seg.length(pp);
        if (dg < 0.05) continue;
        const PosDefMatrix mid = seg.point(0.5);
        // propose a at controlled Finsler radius from the midpoint
        HermMatrix dir = random_herm(rng, n, 1.0);
        const double dirnorm = schatten_norm(dir, pp);
        if (dirnorm < 1e-6) continue;
        const double radius =
            dg * std::max(1.0 / eps - 0.5, 0.05) * 1.2 * rng.uniform();
        const CMatrix mh = mid.power(0.5);
        const HermMatrix step = dir * (radius / dirnorm);
        const PosDefMatrix a(
            HermMatrix(mh * mat_exp(step).mat() * mh));
        const double d0 = geodesic_distance(g0, a, pp);
        const double d1 = geodesic_distance(g1, a, pp);
        const double mx = std::max(d0, d1);
        if (!(dg > eps * mx)) continue;
        ++accepted;
        const double slack = (1.0 - delta) * mx - geodesic_distance(a, mid, pp);
        if (slack < rep.worst_slack) {
          rep.worst_slack = slack;
          rep.worst_seed = s;
        }
      }
      rep.info["coverage_p" + detail::fmt(pp.p()) + "_eps" + detail::fmt(eps)] =
          static_cast<double>(accepted);
      rep.trials += accepted;
      ++stream;
    }
  }
  if (!std::isfinite(rep.worst_slack)) rep.worst_slack = 0.0;
  rep.passed = rep.worst_slack >= -rep.tolerance;
  return rep;
}

/// Both two-sided comparisons between the geodesic and the flat metrics:
/// ||v-w||_p <= d_p(e^v, e^w) <= K_inf ||v-w||_p with
/// K_inf = (e^{2(||v||+||w||)} - 1)/(2(||v||+||w||)), and
/// ||e^v - e^w||_p <= e^C ||v-w||_p with C = max(||v||, ||w||). A small-norm
/// probe (||v||, ||w|| <= 0.05) checks the ratio d_p/||v-w||_p stays in
/// [1, 1.05]; its slacks are dimensionless and share this report.
inline CheckReport check_metric_comparison(const Ensemble& e) {
  return detail::run_trials("metric_comparison", e, 1e-9, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const HermMatrix v = random_herm(rng, n, e.norm_cap);
    const HermMatrix w = random_herm(rng, n, e.norm_cap);
    const double vn = herm_eig(v).values.cwiseAbs().maxCoeff();
    const double wn = herm_eig(w).values.cwiseAbs().maxCoeff();
    const double s2 = 2.0 * (vn + wn);
    const double kinf = s2 > 1e-14 ? std::expm1(s2) / s2 : 1.0;
    const double ec = std::exp(std::max(vn, wn));

    const PosDefMatrix ev(mat_exp(v)), ew(mat_exp(w));
    const RVector geo = distance_log_spectrum(ev, ew);
    const RVector flat = herm_eig(v - w).values;
    const RVector lin = herm_eig(HermMatrix(ev.mat() - ew.mat())).values;

    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.p_set) {
      const double d = detail::pnorm_abs(geo, pp);
      const double f = detail::pnorm_abs(flat, pp);
      const double l = detail::pnorm_abs(lin, pp);
      worst = std::min({worst, kinf * f - d, d - f, ec * f - l});
    }

    // sharpness probe at small norms
    const HermMatrix vs = random_herm(rng, n, 0.05);
    const HermMatrix ws = random_herm(rng, n, 0.05);
    const RVector fs = herm_eig(vs - ws).values;
    const RVector gs = distance_log_spectrum(PosDefMatrix(mat_exp(vs)),
                                             PosDefMatrix(mat_exp(ws)));
    for (const PParams& pp : e.p_set) {
      const double f = detail::pnorm_abs(fs, pp);
      if (f < 1e-4) continue;
      const double ratio = detail::pnorm_abs(gs, pp) / f;
      worst = std::min({worst, ratio - 1.0, 1.05 - ratio});
    }
    return worst;
  });
}

/// d_p(a, g_t)^r <= (1-t) d_p(a,g_0)^r + t d_p(a,g_1)^r
///                  - w_r(t) b_p d_p(g_0,g_1)^r,
/// run with the empirical b_p estimate scaled by a 0.5 safety factor, plus
/// nonnegativity of the raw gap h(t). Slacks are normalized by d(g0,g1)^r;
/// the empirical infimum of h lands in info.
inline CheckReport check_wr_inequality(const Ensemble& e) {
  std::map<double, double> bp_scaled;
  std::uint64_t k = 1;
  for (const PParams& pp : e.uniformly_convex_ps()) {
    bp_scaled[pp.p()] =
        0.5 * estimate_bp(std::min(e.trials, 200), pp,
                          derive_seed(e.seed, 0xb9000000ULL + k), e.n_max,
                          std::min(e.norm_cap, 1.5));
    ++k;
  }
  double h_inf = std::numeric_limits<double>::infinity();
  CheckReport rep = detail::run_trials("wr_inequality", e, 1e-6, [&](Rng& rng) {
    const int n = rng.uniform_int(e.n_min, e.n_max);
    const PosDefMatrix g0 = random_posdef(rng, n, e.norm_cap);
    const PosDefMatrix g1 = random_posdef(rng, n, e.norm_cap);
    const GeodesicSegment seg(g0, g1);
    const PosDefMatrix a = random_posdef(rng, n, e.norm_cap);
    std::vector<RVector> mids;
    for (int j = 1; j <= 9; ++j) mids.push_back(distance_log_spectrum(a, seg.point(j / 10.0)));
    const RVector s0 = distance_log_spectrum(a, g0);
    const RVector s1 = distance_log_spectrum(a, g1);

    double worst = std::numeric_limits<double>::infinity();
    for (const PParams& pp : e.uniformly_convex_ps()) {
      const double dg = seg.length(pp);
      if (dg < 0.05) continue;  // degenerate geodesic: skipped
      const double r = pp.r();
      const double f0 = std::pow(detail::pnorm_abs(s0, pp) / dg, r);
      const double f1 = std::pow(detail::pnorm_abs(s1, pp) / dg, r);
      const double bhat = bp_scaled.at(pp.p());
      for (int j = 1; j <= 9; ++j) {
        const double t = j / 10.0;
        const double ft = std::pow(detail::pnorm_abs(mids[j - 1], pp) / dg, r);
        const double gap = (1.0 - t) * f0 + t * f1 - ft;
        const double h = gap / w_r(t, r);
        h_inf = std::min(h_inf, h);
        worst = std::min({worst, h, gap - w_r(t, r) * bhat});
      }
    }
    return worst;
  });
  rep.info["h_inf"] = h_inf;
  for (const auto& [p, b] : bp_scaled) rep.info["bp_scaled_p" + detail::fmt(p)] = b;
  return rep;
}

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {
      "emi",        "distance_lower",          "cordes",
      "convexity_two_geodesics", "semi_parallelogram", "clarkson",
      "modulus",    "metric_comparison",       "wr_inequality"};
  return names;
}

/// Runs the selected checks (all of them when the selection is empty) in a
/// fixed order. Throws DomainError for unknown names.
inline std::vector<CheckReport> run_all(const Ensemble& e,
                                        const std::vector<std::string>& selection = {}) {
  auto selected = [&](const std::string& name) {
    if (selection.empty()) return true;
    return std::find(selection.begin(), selection.end(), name) != selection.end();
  };
  for (const std::string& s : selection)
    if (std::find(check_names().begin(), check_names().end(), s) == check_names().end())
      throw DomainError("run_all: unknown check '" + s + "'");

  std::vector<CheckReport> reports;
  if (selected("emi")) reports.push_back(check_emi(e));
  if (selected("distance_lower")) reports.push_back(check_distance_lower(e));
  if (selected("cordes")) reports.push_back(check_cordes(e));
  if (selected("convexity_two_geodesics"))
    reports.push_back(check_convexity_two_geodesics(e));
  if (selected("semi_parallelogram")) reports.push_back(check_semi_parallelogram(e));
  if (selected("clarkson")) reports.push_back(check_clarkson(e));
  if (selected("modulus")) reports.push_back(check_modulus(e));
  if (selected("metric_comparison")) reports.push_back(check_metric_comparison(e));
  if (selected("wr_inequality")) reports.push_back(check_wr_inequality(e));
  return reports;
}

}  // namespace pcone

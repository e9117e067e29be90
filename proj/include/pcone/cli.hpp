#pragma once

// Command-line front end. Every command is a pure function of its input
// files, flags and seed, and machine output is written atomically, so
// re-running a command reproduces its output byte for byte.
//
// Exit codes: 0 success, 1 check failure / non-converged projection,
// 2 domain error (bad matrix, unsupported exponent), 3 I/O or parse error.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcone/convexity.hpp"
#include "pcone/geometry.hpp"
#include "pcone/io.hpp"
#include "pcone/matcore.hpp"
#include "pcone/oracle.hpp"
#include "pcone/projection.hpp"
#include "pcone/rng.hpp"

namespace pcone {

namespace cli_detail {

inline std::vector<double> parse_t_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw IoError("cannot parse t value '" + item + "'");
    }
  }
  if (out.empty()) throw IoError("empty t list");
  return out;
}

inline std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 2)
    throw IoError("grid spec must be lo:hi:count with count >= 2, got '" + spec + "'");
  if (!(hi > lo)) throw IoError("grid spec needs hi > lo");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return out;
}

inline void require_strictly_increasing(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw DomainError("t grid must be strictly increasing");
}

inline void emit(const Json& j, const std::string& output_path, std::ostream& out) {
  if (output_path.empty())
    out << j.dump(2) << "\n";
  else
    save_json_atomic(output_path, j);
}

inline int cmd_distance(const std::string& file_a, const std::string& file_b,
                        const std::string& pstr, std::ostream& out) {
  const PParams pp = parse_p(pstr);
  const PosDefMatrix a = posdef_from_json(load_json_file(file_a));
  const PosDefMatrix b = posdef_from_json(load_json_file(file_b));
  const GeodesicSegment seg(a, b);
  // certificate: gamma(1) rebuilt from the log map must reproduce b
  const double recon = (seg.point(1.0).mat() - b.mat()).cwiseAbs().maxCoeff() /
                       std::max(1.0, b.herm().max_abs());
  const Json j{{"distance", seg.length(pp)},
               {"p", p_to_json(pp)},
               {"n", a.dim()},
               {"log_map_residual", recon}};
  out << j.dump() << "\n";
  return 0;
}

inline int cmd_geodesic(const std::string& file_a, const std::string& file_b,
                        const std::string& pstr, const std::string& t_csv,
                        const std::string& grid_spec, const std::string& output,
                        std::ostream& out) {
  const PParams pp = parse_p(pstr);
  std::vector<double> ts;
  if (!grid_spec.empty())
    ts = parse_grid(grid_spec);
  else
    ts = parse_t_list(t_csv);
  require_strictly_increasing(ts);

  const PosDefMatrix a = posdef_from_json(load_json_file(file_a));
  const PosDefMatrix b = posdef_from_json(load_json_file(file_b));
  const GeodesicSegment seg(a, b);
  const double nominal = seg.length(pp);

  Json arr = Json::array();
  for (double t : ts) {
    const PosDefMatrix pt = seg.point(t);
    const double speed = finsler_norm(pt, seg.velocity(t), pp);
    arr.push_back(Json{{"t", t},
                       {"matrix", matrix_to_json(pt.mat())},
                       {"speed", speed},
                       {"speed_dev", std::abs(speed - nominal)}});
  }
  emit(arr, output, out);
  if (!output.empty())
    out << "wrote " << ts.size() << " samples to " << output << " (length "
        << nominal << ")\n";
  return 0;
}

inline int cmd_exp(const std::string& base_file, const std::string& x_file,
                   const std::string& output, std::ostream& out) {
  const PosDefMatrix base = posdef_from_json(load_json_file(base_file));
  const HermMatrix x = herm_from_json(load_json_file(x_file));
  emit(matrix_to_json(exp_a(base, x).mat()), output, out);
  return 0;
}

inline int cmd_log(const std::string& base_file, const std::string& b_file,
                   const std::string& output, std::ostream& out) {
  const PosDefMatrix base = posdef_from_json(load_json_file(base_file));
  const PosDefMatrix b = posdef_from_json(load_json_file(b_file));
  emit(matrix_to_json(log_a(base, b).mat()), output, out);
  return 0;
}

inline int cmd_project(const std::string& query_file, const std::string& subspace_file,
                       const std::string& pstr, double tol, int max_iter,
                       std::uint64_t seed, const std::string& output,
                       std::ostream& out) {
  const PParams pp = parse_p(pstr);
  const PosDefMatrix query = posdef_from_json(load_json_file(query_file));
  const LoadedSubspace loaded = subspace_from_json(load_json_file(subspace_file));
  const ExponentialSet K(loaded.subspace);
  const ProjectionResult r =
      project_to_k(query, K, pp, ProjectionOptions{tol, max_iter, seed});
  const Json j{{"distance", r.distance},
               {"argmin", matrix_to_json(r.argmin.mat())},
               {"residual", r.first_order_residual},
               {"iterations", r.iterations},
               {"converged", r.converged},
               {"boundary_hits", r.boundary_hits}};
  emit(j, output, out);
  if (!output.empty())
    out << (r.converged ? "converged" : "NOT converged") << ", distance "
        << r.distance << ", residual " << r.first_order_residual << "\n";
  return r.converged ? 0 : 1;
}

inline int cmd_closure(const std::vector<std::string>& generator_files,
                       const std::string& output, std::ostream& out) {
  std::vector<HermMatrix> gens;
  for (const std::string& f : generator_files)
    gens.push_back(herm_from_json(load_json_file(f)));
  const HermSubspace H = lts_closure(gens);
  if (!output.empty()) save_json_atomic(output, subspace_to_json(H));
  const Json j{{"n", H.ambient_dim()},
               {"generators", static_cast<int>(gens.size())},
               {"rank", H.dim()}};
  out << j.dump() << "\n";
  return 0;
}

inline int cmd_check(const Ensemble& e, const std::vector<std::string>& selection,
                     const std::string& output, std::ostream& out) {
  const std::vector<CheckReport> reports = run_all(e, selection);
  char line[160];
  std::snprintf(line, sizeof(line), "%-26s %8s  %13s  %11s  %s", "check", "trials",
                "worst_slack", "tolerance", "result");
  out << line << "\n";
  bool all_passed = true;
  for (const CheckReport& r : reports) {
    std::snprintf(line, sizeof(line), "%-26s %8d  %13.4e  %11.1e  %s",
                  r.name.c_str(), r.trials, r.worst_slack, r.tolerance,
                  r.passed ? "PASS" : "FAIL");
    out << line << "\n";
    if (!r.passed) {
      all_passed = false;
      out << "  reproduce with per-trial seed " << r.worst_seed << "\n";
    }
  }
  if (!output.empty()) save_json_atomic(output, report_to_json(reports, e));
  out << (all_passed ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
  return all_passed ? 0 : 1;
}

inline int cmd_gen(const std::string& kind, int n, std::uint64_t seed, int count,
                   double cap, const std::string& prefix, std::ostream& out) {
  if (n < 1) throw DomainError("gen: n must be positive");
  if (count < 1) throw DomainError("gen: count must be positive");
  for (int k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const std::string path = prefix + "_" + std::to_string(k) + ".json";
    if (kind == "hermitian") {
      save_json_atomic(path, matrix_to_json(random_herm(rng, n, cap).mat()));
    } else if (kind == "posdef") {
      save_json_atomic(path, matrix_to_json(random_posdef(rng, n, cap).mat()));
    } else if (kind == "subspace-lts") {
      // commuting family conjugated by a random unitary; always a Lie
      // triple system, re-verified before writing
      const CMatrix u = random_unitary(rng, n);
      std::vector<HermMatrix> gens;
      for (int i = 0; i < n; ++i) {
        CMatrix eii = CMatrix::Zero(n, n);
        eii(i, i) = 1.0;
        gens.push_back(HermMatrix(u * eii * u.adjoint()));
      }
      HermSubspace H = HermSubspace::from_generators(n, gens);
      if (!lts_check(H).is_lts) H = lts_closure(gens);  // fallback
      save_json_atomic(path, subspace_to_json(H));
    } else {
      throw DomainError("gen: unknown kind '" + kind + "'");
    }
    out << path << "\n";
  }
  return 0;
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Finsler geometry of the positive-definite matrix cone under "
               "trace-derived p-norms"};
  app.require_subcommand(1);
  int result = 0;

  // distance
  std::string da, db, dp = "2";
  auto* distance = app.add_subcommand("distance", "geodesic distance d_p(a, b)");
  distance->add_option("a", da, "positive definite matrix file")->required();
  distance->add_option("b", db, "positive definite matrix file")->required();
  distance->add_option("-p,--p", dp, "exponent in [1, inf]; 'inf' allowed");
  distance->callback([&] { result = cli_detail::cmd_distance(da, db, dp, out); });

  // geodesic
  std::string ga, gb, gp = "2", gt = "0,0.25,0.5,0.75,1", ggrid, gout;
  auto* geodesic =
      app.add_subcommand("geodesic", "sample the geodesic from a to b");
  geodesic->add_option("a", ga, "positive definite matrix file")->required();
  geodesic->add_option("b", gb, "positive definite matrix file")->required();
  geodesic->add_option("-p,--p", gp, "exponent for the speed certificate");
  auto* topt = geodesic->add_option("-t,--t", gt, "comma-separated parameter list");
  auto* gridopt =
      geodesic->add_option("--grid", ggrid, "uniform grid spec lo:hi:count");
  topt->excludes(gridopt);
  geodesic->add_option("-o,--output", gout, "curve sample file (stdout if omitted)");
  geodesic->callback(
      [&] { result = cli_detail::cmd_geodesic(ga, gb, gp, gt, ggrid, gout, out); });

  // exp
  std::string ebase, ex, eout;
  auto* expc = app.add_subcommand("exp", "Exp^a(x): exponential chart at a");
  expc->add_option("base", ebase, "positive definite matrix file")->required();
  expc->add_option("x", ex, "Hermitian matrix file")->required();
  expc->add_option("-o,--output", eout, "output matrix file (stdout if omitted)");
  expc->callback([&] { result = cli_detail::cmd_exp(ebase, ex, eout, out); });

  // log
  std::string lbase, lb, lout;
  auto* logc = app.add_subcommand("log", "log_a(b): inverse of the chart at a");
  logc->add_option("base", lbase, "positive definite matrix file")->required();
  logc->add_option("b", lb, "positive definite matrix file")->required();
  logc->add_option("-o,--output", lout, "output matrix file (stdout if omitted)");
  logc->callback([&] { result = cli_detail::cmd_log(lbase, lb, lout, out); });

  // project
  std::string pq, ps, pexp = "2", pout;
  double ptol = 1e-7;
  int pmax = 500;
  std::uint64_t pseed = 0;
  auto* project = app.add_subcommand(
      "project", "nearest point in K = exp(H) to a query (1 < p < inf)");
  project->add_option("query", pq, "positive definite matrix file")->required();
  project->add_option("subspace", ps, "subspace file (verified as an LTS)")->required();
  project->add_option("-p,--p", pexp, "exponent in (1, inf)");
  project->add_option("--tol", ptol, "first-order residual target");
  project->add_option("--max-iter", pmax, "coordinate-descent cycle budget");
  project->add_option("--seed", pseed, "seed reserved for randomized restarts");
  project->add_option("-o,--output", pout, "result file (stdout if omitted)");
  project->callback([&] {
    result = cli_detail::cmd_project(pq, ps, pexp, ptol, pmax, pseed, pout, out);
  });

  // closure
  std::vector<std::string> cgens;
  std::string cout_file;
  auto* closure = app.add_subcommand(
      "closure", "smallest Lie triple system containing the generators");
  closure->add_option("generators", cgens, "Hermitian matrix files")->required();
  closure->add_option("-o,--output", cout_file, "subspace file to write");
  closure->callback([&] { result = cli_detail::cmd_closure(cgens, cout_file, out); });

  // check
  Ensemble ens;
  std::vector<std::string> pflags, only;
  std::string chout;
  auto* check = app.add_subcommand("check", "run the inequality certification suite");
  check->add_option("--seed", ens.seed, "ensemble seed");
  check->add_option("--trials", ens.trials, "trials per check");
  check->add_option("--n-min", ens.n_min, "smallest matrix dimension");
  check->add_option("--n-max", ens.n_max, "largest matrix dimension");
  check->add_option("--norm-cap", ens.norm_cap, "operator-norm cap for samples");
  check->add_option("-p,--p", pflags, "exponent (repeatable; default 1.5 2 3 4 inf)");
  check->add_option("--only", only, "run only the named checks (repeatable)");
  check->add_option("-o,--output", chout, "machine-readable report file");
  check->callback([&] {
    if (!pflags.empty()) {
      ens.p_set.clear();
      for (const std::string& s : pflags) ens.p_set.push_back(parse_p(s));
    }
    if (ens.n_min < 1 || ens.n_max < ens.n_min)
      throw DomainError("check: need 1 <= n-min <= n-max");
    result = cli_detail::cmd_check(ens, only, chout, out);
  });

  // gen
  std::string gkind, gprefix;
  int gn = 3, gcount = 1;
  std::uint64_t gseed = 0;
  double gcap = 2.5;
  auto* gen = app.add_subcommand("gen", "deterministic seeded instance files");
  gen->add_option("--kind", gkind, "hermitian | posdef | subspace-lts")
      ->required()
      ->check(CLI::IsMember({"hermitian", "posdef", "subspace-lts"}));
  gen->add_option("--n", gn, "matrix dimension");
  gen->add_option("--seed", gseed, "generation seed");
  gen->add_option("--count", gcount, "number of files");
  gen->add_option("--cap", gcap, "operator-norm cap");
  gen->add_option("--prefix", gprefix, "output path prefix")->required();
  gen->callback([&] {
    result = cli_detail::cmd_gen(gkind, gn, gseed, gcount, gcap, gprefix, out);
  });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return result;
}

}  // namespace pcone

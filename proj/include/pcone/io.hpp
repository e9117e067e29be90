#pragma once

// JSON serialization for the on-disk formats:
//   matrix    {"n": int, "re": [[...]], "im": [[...]]}    ("im" may be omitted)
//   subspace  {"n": int, "basis": [<matrix>, ...]}
//   curve     [{"t": real, "matrix": <matrix>}, ...]      (extra keys ignored)
//   report    {"checks": [...], "config": {...}}
// Structural problems raise IoError; value-level violations (non-Hermitian
// beyond tolerance, not positive definite) raise DomainError so the CLI can
// distinguish exit codes. Files are written atomically (temp file + rename).

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pcone/convexity.hpp"
#include "pcone/geometry.hpp"
#include "pcone/matcore.hpp"
#include "pcone/oracle.hpp"

namespace pcone {

using Json = nlohmann::ordered_json;

inline PParams parse_p(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return PParams::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return PParams(v);
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw IoError("cannot parse p value '" + s + "' (number or \"inf\")");
  }
}

inline Json p_to_json(const PParams& pp) {
  if (pp.is_inf()) return Json("inf");
  return Json(pp.p());
}

inline Json matrix_to_json(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  Json re = Json::array(), im = Json::array();
  for (int i = 0; i < n; ++i) {
    Json rrow = Json::array(), irow = Json::array();
    for (int j = 0; j < n; ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return Json{{"n", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re"))
    throw IoError("matrix object must carry \"n\" and \"re\"");
  const int n = j.at("n").get<int>();
  if (n < 1) throw IoError("matrix dimension must be positive");
  const bool has_im = j.contains("im");
  const Json& re = j.at("re");
  if (!re.is_array() || static_cast<int>(re.size()) != n)
    throw IoError("\"re\" must be an n x n array");
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& rrow = re.at(i);
    if (!rrow.is_array() || static_cast<int>(rrow.size()) != n)
      throw IoError("\"re\" must be an n x n array");
    for (int jcol = 0; jcol < n; ++jcol) {
      double imval = 0.0;
      if (has_im) {
        const Json& irow = j.at("im").at(i);
        if (!irow.is_array() || static_cast<int>(irow.size()) != n)
          throw IoError("\"im\" must be an n x n array");
        imval = irow.at(jcol).get<double>();
      }
      m(i, jcol) = Complex(rrow.at(jcol).get<double>(), imval);
    }
  }
  if (!m.allFinite()) throw IoError("matrix entries must be finite");
  return m;
}

/// Validates hermiticity within 1e-9 (scaled by the entry magnitude), then
/// symmetrizes.
inline HermMatrix herm_from_json(const Json& j) {
  const CMatrix m = matrix_from_json(j);
  const double dev = (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (dev > 1e-9 * scale)
    throw DomainError("matrix is not Hermitian: max |x - x*| = " + detail::fmt(dev));
  return HermMatrix(m);
}

inline PosDefMatrix posdef_from_json(const Json& j) {
  return PosDefMatrix(herm_from_json(j));  // constructor carries the diagnostic
}

inline Json subspace_to_json(const HermSubspace& H) {
  Json basis = Json::array();
  for (const HermMatrix& b : H.basis()) basis.push_back(matrix_to_json(b.mat()));
  return Json{{"n", H.ambient_dim()}, {"basis", std::move(basis)}};
}

struct LoadedSubspace {
  HermSubspace subspace;
  int input_count;  // generators present in the file before orthonormalization
};

inline LoadedSubspace subspace_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("basis"))
    throw IoError("subspace object must carry \"n\" and \"basis\"");
  const int n = j.at("n").get<int>();
  const Json& basis = j.at("basis");
  if (!basis.is_array()) throw IoError("\"basis\" must be an array of matrices");
  std::vector<HermMatrix> gens;
  for (const Json& g : basis) gens.push_back(herm_from_json(g));
  return {HermSubspace::from_generators(n, gens), static_cast<int>(gens.size())};
}

inline Json curve_to_json(std::span<const CurveSample> samples) {
  Json arr = Json::array();
  for (const CurveSample& s : samples)
    arr.push_back(Json{{"t", s.t}, {"matrix", matrix_to_json(s.matrix.mat())}});
  return arr;
}

inline std::vector<CurveSample> curve_from_json(const Json& j) {
  if (!j.is_array()) throw IoError("curve file must be a JSON array");
  std::vector<CurveSample> out;
  for (const Json& s : j) {
    if (!s.is_object() || !s.contains("t") || !s.contains("matrix"))
      throw IoError("curve sample must carry \"t\" and \"matrix\"");
    out.push_back({s.at("t").get<double>(), posdef_from_json(s.at("matrix"))});
  }
  return out;
}

inline Json report_to_json(std::span<const CheckReport> reports, const Ensemble& e) {
  Json checks = Json::array();
  for (const CheckReport& r : reports) {
    Json c{{"name", r.name},
           {"trials", r.trials},
           {"worst_slack", r.worst_slack},
           {"passed", r.passed}};
    if (!r.passed) c["violating_seed"] = r.worst_seed;
    if (!r.info.empty()) c["info"] = r.info;
    checks.push_back(std::move(c));
  }
  Json pset = Json::array();
  for (const PParams& pp : e.p_set) pset.push_back(p_to_json(pp));
  Json config{{"seed", e.seed},          {"trials", e.trials},
              {"n_min", e.n_min},        {"n_max", e.n_max},
              {"norm_cap", e.norm_cap},  {"p_set", std::move(pset)}};
  return Json{{"checks", std::move(checks)}, {"config", std::move(config)}};
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("cannot parse '" + path + "': " + ex.what());
  }
}

/// Writes through a sibling temp file and renames over the target.
inline void save_json_atomic(const std::string& path, const Json& j) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path + "'");
}

}  // namespace pcone

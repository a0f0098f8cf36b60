#ifndef POSMAP_IO_HPP
#define POSMAP_IO_HPP

// JSON documents for the command-line tool.
//
// Matrices are row-major nested arrays of [re, im] pairs; vectors are flat
// arrays of [re, im] pairs. Input documents:
//
//   {"kind": "map", "dim_in": n, "dim_out": m, "repr": "choi",  "matrix": ...}
//   {"kind": "map", "dim_in": n, "dim_out": m, "repr": "kraus", "kraus": [V_1, ...]}   V_k is n x m
//   {"kind": "map", "dim_in": n, "dim_out": m, "repr": "dense", "matrix": L}           L is m^2 x n^2,
//                                                          vec_row(T(X)) = L vec_row(X)
//   {"kind": "operator", "dim_a": a, "dim_b": b, "repr": "dense", "matrix": ...}
//
// Reports echo the configuration and carry one certificate per decided verdict.

#include "posmap/choi.hpp"
#include "posmap/classify.hpp"
#include "posmap/cones.hpp"
#include "posmap/gallery.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace posmap {

inline constexpr const char* version = "0.1.0";

using json = nlohmann::json;

/// Malformed or inconsistent document.
class ParseError : public std::invalid_argument {
 public:
  explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

// ---------------------------------------------------------------------------
// matrix encoding

inline json encode_complex(Complex z) { return json::array({z.real(), z.imag()}); }

inline json encode_matrix(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(encode_complex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json encode_vector(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_complex(v(i)));
  return out;
}

inline Complex decode_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": expected a [re, im] pair");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParseError(where + ": non-finite entry");
  return z;
}

inline ComplexMatrix decode_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(where + ": row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = decode_complex(row[static_cast<std::size_t>(k)],
                               where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return m;
}

inline ComplexVector decode_vector(const json& j, Eigen::Index size, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw ParseError(where + ": expected " + std::to_string(size) + " entries");
  ComplexVector v(size);
  for (Eigen::Index i = 0; i < size; ++i)
    v(i) = decode_complex(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  return v;
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline Eigen::Index dimension(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 64)
    throw ParseError(where + ": '" + key + "' must be an integer in [1, 64]");
  return static_cast<Eigen::Index>(v.get<long long>());
}

inline double number(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ParseError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline std::string text(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw ParseError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline void check_fields(const json& j, const std::set<std::string>& known, bool strict, const std::string& where,
                         std::vector<std::string>& warnings) {
  for (const auto& [key, value] : j.items()) {
    if (known.count(key)) continue;
    if (strict) throw ParseError(where + ": unknown field '" + key + "'");
    warnings.push_back(where + ": ignoring unknown field '" + key + "'");
  }
}

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

// ---------------------------------------------------------------------------
// input documents

struct InputDocument {
  std::variant<MapRepr, BipartiteOperator> object;
  std::string repr = "choi";
  json source;  // free-form provenance, echoed unchanged
  std::vector<std::string> warnings;

  bool is_map() const { return std::holds_alternative<MapRepr>(object); }
  const MapRepr& map() const { return std::get<MapRepr>(object); }
  const BipartiteOperator& op() const { return std::get<BipartiteOperator>(object); }
};

/// Choi matrix from the row-major natural representation L[(k,l),(i,j)] = T(e_ij)_kl.
inline ComplexMatrix choi_from_natural(const ComplexMatrix& l, Eigen::Index n, Eigen::Index m) {
  ComplexMatrix c(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index q = 0; q < m; ++q) c(i * m + k, j * m + q) = l(k * m + q, i * n + j);
  return c;
}

inline InputDocument parse_input(const json& j, bool strict = false) {
  const std::string where = "input";
  if (!j.is_object()) throw ParseError("input: document must be a JSON object");
  InputDocument doc;
  const std::string kind = detail::text(j, "kind", where);
  doc.repr = j.contains("repr") ? detail::text(j, "repr", where) : std::string(kind == "map" ? "choi" : "dense");
  if (j.contains("source")) doc.source = j.at("source");

  try {
    if (kind == "map") {
      detail::check_fields(j, {"kind", "dim_in", "dim_out", "repr", "matrix", "kraus", "source", "version"}, strict,
                           where, doc.warnings);
      const Eigen::Index n = detail::dimension(j, "dim_in", where);
      const Eigen::Index m = detail::dimension(j, "dim_out", where);
      if (doc.repr == "choi") {
        doc.object = MapRepr(n, m, decode_matrix(detail::field(j, "matrix", where), n * m, n * m, "matrix"));
      } else if (doc.repr == "dense") {
        const ComplexMatrix l = decode_matrix(detail::field(j, "matrix", where), m * m, n * n, "matrix");
        doc.object = MapRepr(n, m, choi_from_natural(l, n, m));
      } else if (doc.repr == "kraus") {
        const json& list = detail::field(j, "kraus", where);
        if (!list.is_array() || list.empty()) throw ParseError("kraus: expected a non-empty list of matrices");
        KrausFamily kraus;
        for (std::size_t t = 0; t < list.size(); ++t)
          kraus.push_back(decode_matrix(list[t], n, m, "kraus[" + std::to_string(t) + "]"));
        doc.object = map_from_kraus(kraus, n, m);
      } else {
        throw ParseError("input: unknown repr '" + doc.repr + "' for a map (choi, kraus, dense)");
      }
    } else if (kind == "operator") {
      detail::check_fields(j, {"kind", "dim_a", "dim_b", "repr", "matrix", "source", "version"}, strict, where,
                           doc.warnings);
      if (doc.repr != "dense" && doc.repr != "choi")
        throw ParseError("input: unknown repr '" + doc.repr + "' for an operator (dense)");
      const Eigen::Index a = detail::dimension(j, "dim_a", where);
      const Eigen::Index b = detail::dimension(j, "dim_b", where);
      doc.object = BipartiteOperator(a, b, decode_matrix(detail::field(j, "matrix", where), a * b, a * b, "matrix"));
    } else {
      throw ParseError("input: kind must be \"map\" or \"operator\"");
    }
  } catch (const NonHermitianInput& e) {
    throw ParseError(std::string("input: ") + e.what());
  } catch (const SizeMismatch& e) {
    throw ParseError(std::string("input: ") + e.what());
  }
  return doc;
}

inline json input_document(const MapRepr& t, json source = nullptr) {
  json j;
  j["kind"] = "map";
  j["dim_in"] = t.dim_in();
  j["dim_out"] = t.dim_out();
  j["repr"] = "choi";
  j["matrix"] = encode_matrix(t.choi().matrix());
  if (!source.is_null()) j["source"] = std::move(source);
  return j;
}

inline json input_document(const BipartiteOperator& x, json source = nullptr) {
  json j;
  j["kind"] = "operator";
  j["dim_a"] = x.dim_a();
  j["dim_b"] = x.dim_b();
  j["repr"] = "dense";
  j["matrix"] = encode_matrix(x.matrix());
  if (!source.is_null()) j["source"] = std::move(source);
  return j;
}

inline json input_document(const GalleryEntry& e) {
  json src;
  src["gallery"] = e.name;
  src["parameters"] = json::object();
  for (const auto& [k, v] : e.parameters) src["parameters"][k] = v;
  src["seed"] = e.seed ? json(*e.seed) : json(nullptr);
  src["provenance"] = e.provenance;
  if (!e.warnings.empty()) src["warnings"] = e.warnings;
  src["version"] = version;
  return e.is_map() ? input_document(e.map(), std::move(src)) : input_document(e.op(), std::move(src));
}

// ---------------------------------------------------------------------------
// certificates and verdicts

inline json certificate_json(const Certificate& c) {
  struct Visitor {
    json operator()(const ProductWitness& w) const {
      return {{"f", encode_vector(w.f)}, {"g", encode_vector(w.g)}, {"value", w.value}};
    }
    json operator()(const SpectralWitness& w) const {
      return {{"v", encode_vector(w.v)}, {"eigenvalue", w.eigenvalue}, {"partial_transposed", w.partial_transposed}};
    }
    json operator()(const SchmidtWitness& w) const {
      return {{"psi", encode_vector(w.psi)}, {"k", w.k}, {"value", w.value}};
    }
    json operator()(const PptWitnessState& w) const {
      return {{"dim_a", w.rho.dim_a()},
              {"dim_b", w.rho.dim_b()},
              {"rho", encode_matrix(w.rho.matrix())},
              {"pairing_value", w.pairing_value}};
    }
    json operator()(const ProductDecomposition& d) const {
      json terms = json::array();
      for (const ProductTerm& t : d.terms)
        terms.push_back({{"weight", t.weight}, {"f", encode_vector(t.f)}, {"g", encode_vector(t.g)}});
      return {{"terms", std::move(terms)}, {"residual", d.residual}};
    }
    json operator()(const ConeSplit& s) const {
      return {{"a", encode_matrix(s.a.matrix())}, {"b", encode_matrix(s.b.matrix())}, {"residual", s.residual}};
    }
  };
  json j = std::visit(Visitor{}, c);
  j["kind"] = certificate_kind(c);
  return j;
}

/// Certificates are decoded against the operator they certify, which fixes the sizes.
inline Certificate certificate_from_json(const json& j, Eigen::Index da, Eigen::Index db) {
  const std::string where = "certificate";
  const std::string kind = detail::text(j, "kind", where);
  const Eigen::Index d = da * db;
  try {
    if (kind == "product_witness")
      return ProductWitness{decode_vector(detail::field(j, "f", where), da, "f"),
                            decode_vector(detail::field(j, "g", where), db, "g"), detail::number(j, "value", where)};
    if (kind == "spectral_witness") {
      const json& pt = detail::field(j, "partial_transposed", where);
      if (!pt.is_boolean()) throw ParseError("certificate: 'partial_transposed' must be a boolean");
      return SpectralWitness{decode_vector(detail::field(j, "v", where), d, "v"),
                             detail::number(j, "eigenvalue", where), pt.get<bool>()};
    }
    if (kind == "schmidt_witness") {
      const json& k = detail::field(j, "k", where);
      if (!k.is_number_integer()) throw ParseError("certificate: 'k' must be an integer");
      return SchmidtWitness{decode_vector(detail::field(j, "psi", where), d, "psi"), k.get<int>(),
                            detail::number(j, "value", where)};
    }
    if (kind == "ppt_witness_state") {
      if (detail::dimension(j, "dim_a", where) != da || detail::dimension(j, "dim_b", where) != db)
        throw ParseError("certificate: witness dimensions do not match the operator");
      return PptWitnessState{BipartiteOperator(da, db, decode_matrix(detail::field(j, "rho", where), d, d, "rho")),
                             detail::number(j, "pairing_value", where)};
    }
    if (kind == "product_decomposition") {
      ProductDecomposition pd;
      const json& terms = detail::field(j, "terms", where);
      if (!terms.is_array()) throw ParseError("certificate: 'terms' must be a list");
      for (const json& t : terms)
        pd.terms.push_back(ProductTerm{detail::number(t, "weight", "term"), decode_vector(detail::field(t, "f", "term"), da, "f"),
                                       decode_vector(detail::field(t, "g", "term"), db, "g")});
      pd.residual = detail::number(j, "residual", where);
      return pd;
    }
    if (kind == "cone_split")
      return ConeSplit{HermitianMatrix(decode_matrix(detail::field(j, "a", where), d, d, "a")),
                       HermitianMatrix(decode_matrix(detail::field(j, "b", where), d, d, "b")),
                       detail::number(j, "residual", where)};
  } catch (const NonHermitianInput& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  } catch (const SizeMismatch& e) {
    throw ParseError(std::string("certificate: ") + e.what());
  }
  throw ParseError("certificate: unknown kind '" + kind + "'");
}

// Map tests print YES/NO/UNKNOWN, raw cone oracles MEMBER/NOT_MEMBER/UNKNOWN.
enum class VerdictStyle { map, cone };

inline const char* verdict_string(Decision d, VerdictStyle style) {
  if (style == VerdictStyle::cone) return to_string(d);
  switch (d) {
    case Decision::member: return "YES";
    case Decision::not_member: return "NO";
    case Decision::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

inline Decision decision_from_string(const std::string& s) {
  if (s == "YES" || s == "MEMBER") return Decision::member;
  if (s == "NO" || s == "NOT_MEMBER") return Decision::not_member;
  if (s == "UNKNOWN") return Decision::unknown;
  throw ParseError("report: unknown verdict '" + s + "'");
}

inline json verdict_json(const Verdict& v, VerdictStyle style, bool wall_clock = true) {
  json j;
  j["verdict"] = verdict_string(v.decision, style);
  j["certificate"] = v.certificate ? certificate_json(*v.certificate) : json(nullptr);
  json diag;
  diag["method"] = v.diagnostics.method;
  diag["heuristic"] = v.diagnostics.heuristic;
  diag["min_value_found"] = detail::number_or_null(v.diagnostics.min_value_found);
  diag["starts_used"] = v.diagnostics.starts_used;
  diag["iterations"] = v.diagnostics.iterations;
  if (wall_clock) diag["wall_ms"] = v.diagnostics.wall_ms;
  j["diagnostics"] = std::move(diag);
  return j;
}

inline Verdict verdict_from_json(const json& j, Eigen::Index da, Eigen::Index db) {
  Verdict v;
  v.decision = decision_from_string(detail::text(j, "verdict", "verdict"));
  if (j.contains("certificate") && !j.at("certificate").is_null())
    v.certificate = certificate_from_json(j.at("certificate"), da, db);
  if (j.contains("diagnostics")) {
    const json& d = j.at("diagnostics");
    if (d.contains("method") && d.at("method").is_string()) v.diagnostics.method = d.at("method").get<std::string>();
    if (d.contains("heuristic") && d.at("heuristic").is_boolean()) v.diagnostics.heuristic = d.at("heuristic").get<bool>();
    if (d.contains("min_value_found")) v.diagnostics.min_value_found = detail::number(d, "min_value_found", "diagnostics");
    if (d.contains("starts_used") && d.at("starts_used").is_number_integer())
      v.diagnostics.starts_used = d.at("starts_used").get<int>();
    if (d.contains("iterations") && d.at("iterations").is_number_integer())
      v.diagnostics.iterations = d.at("iterations").get<int>();
    if (d.contains("wall_ms") && d.at("wall_ms").is_number()) v.diagnostics.wall_ms = d.at("wall_ms").get<double>();
  }
  return v;
}

// ---------------------------------------------------------------------------
// configuration echo

inline json config_json(const ConeConfig& c) {
  const SolverConfig& s = c.solver;
  return {{"tol", c.tol},
          {"seed", s.seed},
          {"starts", s.starts},
          {"threads", s.threads},
          {"budget_ms", s.budget_ms ? json(*s.budget_ms) : json(nullptr)},
          {"mesh_points", s.mesh_points},
          {"max_outer_iters", s.max_outer_iters},
          {"seesaw_max_iters", s.seesaw_max_iters},
          {"inner_tol", s.inner_tol},
          {"feas_tol", s.feas_tol},
          {"fit_starts", s.fit_starts},
          {"fit_rounds", c.fit_rounds},
          {"bisection_steps", s.bisection_steps},
          {"dykstra_max_iters", s.dykstra_max_iters}};
}

inline ConeConfig config_from_json(const json& j) {
  ConeConfig c;
  auto get_int = [&](const char* key, int& out) {
    if (j.contains(key) && j.at(key).is_number_integer()) out = j.at(key).get<int>();
  };
  auto get_real = [&](const char* key, double& out) {
    if (j.contains(key) && j.at(key).is_number()) out = j.at(key).get<double>();
  };
  get_real("tol", c.tol);
  if (j.contains("seed") && j.at("seed").is_number_unsigned()) c.solver.seed = j.at("seed").get<std::uint64_t>();
  get_int("starts", c.solver.starts);
  get_int("threads", c.solver.threads);
  if (j.contains("budget_ms") && j.at("budget_ms").is_number_integer()) c.solver.budget_ms = j.at("budget_ms").get<std::int64_t>();
  get_int("mesh_points", c.solver.mesh_points);
  get_int("max_outer_iters", c.solver.max_outer_iters);
  get_int("seesaw_max_iters", c.solver.seesaw_max_iters);
  get_real("inner_tol", c.solver.inner_tol);
  get_real("feas_tol", c.solver.feas_tol);
  get_int("fit_starts", c.solver.fit_starts);
  get_int("fit_rounds", c.fit_rounds);
  get_int("bisection_steps", c.solver.bisection_steps);
  get_int("dykstra_max_iters", c.solver.dykstra_max_iters);
  return c;
}

// ---------------------------------------------------------------------------
// reports

inline json operational_definitions() {
  return {{"positive", "Choi matrix block-positive; YES is one-sided (no product counterexample found)"},
          {"k_positive", "<psi|C|psi> >= 0 for Schmidt rank <= k; k runs to min(n, m), where it equals cp"},
          {"cp", "Choi matrix PSD"},
          {"co_cp", "partial transpose of the Choi matrix PSD"},
          {"decomposable", "C = A + PT(B) with A, B PSD; NO carries a PPT state with negative pairing"},
          {"super_positive", "Choi matrix separable (operational definition)"}};
}

inline json report_json(const ClassificationReport& r, bool wall_clock = true) {
  json j;
  j["version"] = version;
  j["kind"] = "classification";
  j["dim_in"] = r.dim_in;
  j["dim_out"] = r.dim_out;
  j["config"] = config_json(r.config.cone);
  json tests;
  tests["positive"] = verdict_json(r.positive, VerdictStyle::map, wall_clock);
  json ks = json::array();
  for (const auto& [k, v] : r.k_positive) {
    json e = verdict_json(v, VerdictStyle::map, wall_clock);
    e["k"] = k;
    ks.push_back(std::move(e));
  }
  tests["k_positive"] = std::move(ks);
  tests["cp"] = verdict_json(r.cp, VerdictStyle::map, wall_clock);
  tests["co_cp"] = verdict_json(r.co_cp, VerdictStyle::map, wall_clock);
  tests["decomposable"] = verdict_json(r.decomposable, VerdictStyle::map, wall_clock);
  tests["super_positive"] = verdict_json(r.super_positive, VerdictStyle::map, wall_clock);
  j["tests"] = std::move(tests);
  j["events"] = r.events;
  j["operational_definitions"] = operational_definitions();
  if (wall_clock) j["wall_ms"] = r.wall_ms;
  return j;
}

inline ClassificationReport report_from_json(const json& j) {
  const std::string where = "report";
  if (detail::text(j, "kind", where) != "classification") throw ParseError("report: not a classification report");
  ClassificationReport r;
  r.dim_in = detail::dimension(j, "dim_in", where);
  r.dim_out = detail::dimension(j, "dim_out", where);
  if (j.contains("config")) r.config.cone = config_from_json(j.at("config"));
  const json& t = detail::field(j, "tests", where);
  const Eigen::Index n = r.dim_in, m = r.dim_out;
  r.positive = verdict_from_json(detail::field(t, "positive", "tests"), n, m);
  const json& ks = detail::field(t, "k_positive", "tests");
  if (!ks.is_array()) throw ParseError("report: 'k_positive' must be a list");
  for (const json& e : ks) {
    const json& k = detail::field(e, "k", "k_positive");
    if (!k.is_number_integer()) throw ParseError("report: 'k' must be an integer");
    r.k_positive.emplace_back(k.get<int>(), verdict_from_json(e, n, m));
  }
  for (std::size_t i = 0; i < r.k_positive.size(); ++i)
    if (r.k_positive[i].first != static_cast<int>(i) + 1) throw ParseError("report: k_positive must list k = 1, 2, ...");
  r.cp = verdict_from_json(detail::field(t, "cp", "tests"), n, m);
  r.co_cp = verdict_from_json(detail::field(t, "co_cp", "tests"), n, m);
  r.decomposable = verdict_from_json(detail::field(t, "decomposable", "tests"), n, m);
  r.super_positive = verdict_from_json(detail::field(t, "super_positive", "tests"), n, m);
  if (j.contains("events") && j.at("events").is_array())
    for (const json& e : j.at("events"))
      if (e.is_string()) r.events.push_back(e.get<std::string>());
  if (j.contains("wall_ms") && j.at("wall_ms").is_number()) r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

inline json cone_report_json(Cone cone, const BipartiteOperator& x, const Verdict& v, const ConeConfig& cfg,
                             bool wall_clock = true) {
  json j;
  j["version"] = version;
  j["kind"] = "cone_verdict";
  j["cone"] = to_string(cone);
  j["dim_a"] = x.dim_a();
  j["dim_b"] = x.dim_b();
  j["config"] = config_json(cfg);
  json vj = verdict_json(v, VerdictStyle::cone, wall_clock);
  for (auto& [key, value] : vj.items()) j[key] = value;
  return j;
}

struct ConeReport {
  Cone cone = Cone::cp;
  Eigen::Index dim_a = 0, dim_b = 0;
  Verdict verdict;
  ConeConfig config;
};

inline ConeReport cone_report_from_json(const json& j) {
  const std::string where = "report";
  if (detail::text(j, "kind", where) != "cone_verdict") throw ParseError("report: not a cone verdict");
  ConeReport r;
  const auto cone = cone_from_string(detail::text(j, "cone", where));
  if (!cone) throw ParseError("report: unknown cone");
  r.cone = *cone;
  r.dim_a = detail::dimension(j, "dim_a", where);
  r.dim_b = detail::dimension(j, "dim_b", where);
  if (j.contains("config")) r.config = config_from_json(j.at("config"));
  r.verdict = verdict_from_json(j, r.dim_a, r.dim_b);
  return r;
}

// ---------------------------------------------------------------------------
// plain-text rendering

inline std::string verdict_line(const std::string& name, const Verdict& v, VerdictStyle style) {
  std::string s = name;
  s.resize(std::max<std::size_t>(s.size() + 1, 16), ' ');
  s += verdict_string(v.decision, style);
  if (v.certificate) s += std::string("  [") + certificate_kind(*v.certificate) + "]";
  if (v.diagnostics.heuristic) s += "  (heuristic, " + std::to_string(v.diagnostics.starts_used) + " starts)";
  if (std::isfinite(v.diagnostics.min_value_found)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  min %.6g", v.diagnostics.min_value_found);
    s += buf;
  }
  return s + "\n";
}

inline std::string report_text(const ClassificationReport& r) {
  std::string s = "map M_" + std::to_string(r.dim_in) + " -> M_" + std::to_string(r.dim_out) + "\n";
  s += verdict_line("positive", r.positive, VerdictStyle::map);
  for (const auto& [k, v] : r.k_positive)
    if (k > 1) s += verdict_line(std::to_string(k) + "-positive", v, VerdictStyle::map);
  s += verdict_line("cp", r.cp, VerdictStyle::map);
  s += verdict_line("co_cp", r.co_cp, VerdictStyle::map);
  s += verdict_line("decomposable", r.decomposable, VerdictStyle::map);
  s += verdict_line("super_positive", r.super_positive, VerdictStyle::map);
  for (const std::string& e : r.events) s += "event: " + e + "\n";
  return s;
}

inline std::string cone_report_text(Cone cone, const BipartiteOperator& x, const Verdict& v) {
  return "operator " + std::to_string(x.dim_a()) + "x" + std::to_string(x.dim_b()) + "\n" +
         verdict_line(std::string("C_") + to_string(cone), v, VerdictStyle::cone);
}

}  // namespace posmap

#endif  // POSMAP_IO_HPP

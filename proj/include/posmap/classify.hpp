#ifndef POSMAP_CLASSIFY_HPP
#define POSMAP_CLASSIFY_HPP

// Classification of a map T: M_n -> M_m by cone tests on its Choi matrix:
//
//   positive        C_T block-positive
//   k-positive      <psi|C_T|psi> >= 0 for Schmidt rank <= k
//   cp              C_T PSD
//   co-cp           PT(C_T) PSD
//   decomposable    C_T = A + PT(B), A, B PSD
//   super-positive  C_T separable
//
// The report enforces super_positive => cp => decomposable => positive,
// co_cp => decomposable, cp => k-positive and (k+1)-positive => k-positive.

#include "posmap/choi.hpp"
#include "posmap/cones.hpp"
#include "posmap/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace posmap {

struct ClassifyConfig {
  ConeConfig cone;
};

struct ClassificationReport {
  Eigen::Index dim_in = 0;
  Eigen::Index dim_out = 0;
  Verdict positive;
  std::vector<std::pair<int, Verdict>> k_positive;
  Verdict cp;
  Verdict co_cp;
  Verdict decomposable;
  Verdict super_positive;
  ClassifyConfig config;
  std::vector<std::string> events;
  double wall_ms = 0.0;

  const Verdict& k(int k) const { return k_positive.at(static_cast<std::size_t>(k - 1)).second; }
};

inline Verdict is_positive(const MapRepr& t, const ClassifyConfig& cfg = {}) {
  return in_C_i(t.choi(), cfg.cone);
}

inline Verdict is_k_positive(const MapRepr& t, int k, const ClassifyConfig& cfg = {}) {
  detail::Stopwatch sw;
  const Eigen::Index kmax = std::min(t.dim_in(), t.dim_out());
  if (k < 1 || k > kmax)
    throw InvalidK("is_k_positive: k = " + std::to_string(k) + " outside [1, " + std::to_string(kmax) + "]");
  const BipartiteOperator& c = t.choi();
  const SpectralDecomposition sd = herm_eig(c.hermitian());
  const double threshold = -cfg.cone.tol * operator_scale(sd);
  Verdict v;
  v.diagnostics.method = "schmidt-k";
  if (sd.min_eigenvalue() >= threshold) {
    v.decision = Decision::member;
    v.diagnostics.method = "spectral";
    v.diagnostics.min_value_found = sd.min_eigenvalue();
    v.diagnostics.wall_ms = sw.ms();
    return v;
  }
  const SchmidtMinimum sm = min_schmidt_k(c, k, cfg.cone.solver);
  v.diagnostics.min_value_found = sm.value;
  v.diagnostics.starts_used = sm.starts_used;
  v.diagnostics.iterations = sm.iterations;
  if (sm.value < threshold) {
    v.decision = Decision::not_member;
    v.certificate = SchmidtWitness{sm.psi, k, expectation(c.matrix(), sm.psi)};
  } else {
    v.decision = Decision::member;
    // At full Schmidt rank the search is an exact eigenproblem.
    v.diagnostics.heuristic = k < kmax;
  }
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

inline Verdict is_cp(const MapRepr& t, const ClassifyConfig& cfg = {}) { return in_C_cp(t.choi(), cfg.cone.tol); }

inline Verdict is_co_cp(const MapRepr& t, const ClassifyConfig& cfg = {}) {
  return in_C_ccp(t.choi(), cfg.cone.tol);
}

inline Verdict is_decomposable(const MapRepr& t, const ClassifyConfig& cfg = {}) {
  detail::Stopwatch sw;
  const SplitResult res = decomposability_split(t.choi(), cfg.cone.solver);
  Verdict v;
  v.diagnostics.method = "split";
  v.diagnostics.iterations = res.primal_iterations + res.dual_iterations;
  if (const auto* s = std::get_if<Split>(&res.outcome)) {
    v.decision = Decision::member;
    v.certificate = ConeSplit{s->a, s->b, s->residual};
    v.diagnostics.min_value_found = s->residual;
  } else if (const auto* w = std::get_if<Witness>(&res.outcome)) {
    v.decision = Decision::not_member;
    v.certificate = PptWitnessState{w->rho, w->pairing_value};
    v.diagnostics.min_value_found = w->pairing_value;
    v.diagnostics.method = "split(dual)";
  } else {
    v.decision = Decision::unknown;
    v.diagnostics.min_value_found = std::get<Undecided>(res.outcome).residual;
  }
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

inline Verdict is_super_positive(const MapRepr& t, const ClassifyConfig& cfg = {}) {
  return in_C_p(t.choi(), cfg.cone);
}

namespace detail {

inline Verdict propagated_no(Certificate cert, const std::string& method) {
  Verdict v;
  v.decision = Decision::not_member;
  v.certificate = std::move(cert);
  v.diagnostics.method = method;
  return v;
}

inline ProductWitness product_witness_of(const Verdict& v) { return std::get<ProductWitness>(*v.certificate); }

// A certified refutation of the weaker class must not sit under a YES of the
// stronger class. Heuristic YES verdicts are downgraded; certified conflicts
// (only possible at tolerance edges) demote the YES to UNKNOWN as well.
inline void demote(Verdict& stronger, const std::string& stronger_name, const Verdict& weaker,
                   const std::string& weaker_name, std::vector<std::string>& events) {
  if (!(stronger.member() && weaker.not_member())) return;
  events.push_back(std::string(stronger.diagnostics.heuristic ? "heuristic" : "certified") + " YES for " +
                   stronger_name + " contradicts certified NO for " + weaker_name + "; downgraded to UNKNOWN");
  stronger.decision = Decision::unknown;
  stronger.certificate.reset();
}

}  // namespace detail

/// Re-establishes the implication chain on a report.
inline void enforce_implication_chain(ClassificationReport& r) {
  auto& ev = r.events;
  const int kmax = static_cast<int>(r.k_positive.size());

  // k-positivity: a witness of Schmidt rank <= k refutes every k' >= k.
  for (int k = 1; k < kmax; ++k) {
    Verdict& lower = r.k_positive[static_cast<std::size_t>(k - 1)].second;
    Verdict& upper = r.k_positive[static_cast<std::size_t>(k)].second;
    if (lower.not_member() && !upper.not_member()) {
      Certificate cert = *lower.certificate;
      if (auto* pw = std::get_if<ProductWitness>(&cert))
        cert = SchmidtWitness{kron_vector(pw->f, pw->g), 1, pw->value};
      if (upper.member())
        ev.push_back(std::string(upper.diagnostics.heuristic ? "heuristic" : "certified") + " YES for " +
                     std::to_string(k + 1) + "-positive replaced by the " + std::to_string(k) +
                     "-positive witness");
      upper = detail::propagated_no(std::move(cert), "propagated from k=" + std::to_string(k));
    }
  }
  // A product witness refuting positivity is also a PPT witness state.
  if (r.positive.not_member() && r.decomposable.decision == Decision::unknown) {
    const ProductWitness pw = detail::product_witness_of(r.positive);
    const ComplexVector v = kron_vector(pw.f, pw.g);
    BipartiteOperator rho(r.dim_in, r.dim_out, ComplexMatrix(v * v.adjoint()));
    // Tr(C |v><v|) = <v|C|v>, the witness value.
    r.decomposable = detail::propagated_no(PptWitnessState{std::move(rho), pw.value}, "propagated from positive");
    ev.push_back("decomposable UNKNOWN replaced by the product-state witness refuting positivity");
  }

  detail::demote(r.super_positive, "super_positive", r.cp, "cp", ev);
  detail::demote(r.cp, "cp", r.decomposable, "decomposable", ev);
  detail::demote(r.co_cp, "co_cp", r.decomposable, "decomposable", ev);
  detail::demote(r.decomposable, "decomposable", r.positive, "positive", ev);
  detail::demote(r.cp, "cp", r.positive, "positive", ev);
  detail::demote(r.co_cp, "co_cp", r.positive, "positive", ev);
  for (auto& [k, v] : r.k_positive) detail::demote(r.cp, "cp", v, std::to_string(k) + "-positive", ev);
  detail::demote(r.super_positive, "super_positive", r.decomposable, "decomposable", ev);
  detail::demote(r.super_positive, "super_positive", r.positive, "positive", ev);
}

/// Runs every test on C_T and assembles a chain-consistent report.
inline ClassificationReport classify_map(const MapRepr& t, const ClassifyConfig& cfg = {}) {
  detail::Stopwatch sw;
  ClassificationReport r;
  r.dim_in = t.dim_in();
  r.dim_out = t.dim_out();
  r.config = cfg;
  r.positive = is_positive(t, cfg);
  const int kmax = static_cast<int>(std::min(t.dim_in(), t.dim_out()));
  // 1-positivity is positivity.
  r.k_positive.emplace_back(1, r.positive);
  for (int k = 2; k <= kmax; ++k) r.k_positive.emplace_back(k, is_k_positive(t, k, cfg));
  r.cp = is_cp(t, cfg);
  r.co_cp = is_co_cp(t, cfg);
  r.decomposable = is_decomposable(t, cfg);
  r.super_positive = is_super_positive(t, cfg);
  enforce_implication_chain(r);
  r.wall_ms = sw.ms();
  return r;
}

inline const char* yes_no(const Verdict& v) {
  switch (v.decision) {
    case Decision::member: return "YES";
    case Decision::not_member: return "NO";
    case Decision::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

/// Re-validates every certificate of a map report against C_T alone.
inline CheckResult check_report(const MapRepr& t, const ClassificationReport& r) {
  const ConeConfig& cc = r.config.cone;
  const BipartiteOperator& c = t.choi();
  auto tagged = [](const std::string& name, CheckResult res) {
    if (!res.ok) res.reason = name + ": " + res.reason;
    return res;
  };
  if (auto res = tagged("positive", check_cone_verdict(Cone::i, c, r.positive, cc)); !res.ok) return res;
  if (auto res = tagged("cp", check_cone_verdict(Cone::cp, c, r.cp, cc)); !res.ok) return res;
  if (auto res = tagged("co_cp", check_cone_verdict(Cone::ccp, c, r.co_cp, cc)); !res.ok) return res;
  if (auto res = tagged("super_positive", check_cone_verdict(Cone::p, c, r.super_positive, cc)); !res.ok) return res;
  for (const auto& [k, v] : r.k_positive) {
    if (k == 1) continue;
    if (v.not_member()) {
      if (!v.certificate || !std::holds_alternative<SchmidtWitness>(*v.certificate))
        return CheckResult::fail(std::to_string(k) + "-positive: NO without Schmidt witness");
      const auto& w = std::get<SchmidtWitness>(*v.certificate);
      if (w.k > k) return CheckResult::fail(std::to_string(k) + "-positive: witness rank too high");
      if (auto res = tagged(std::to_string(k) + "-positive", check_schmidt_witness(c, w)); !res.ok) return res;
    }
  }
  const Verdict& d = r.decomposable;
  if (d.member()) {
    if (!d.certificate || !std::holds_alternative<ConeSplit>(*d.certificate))
      return CheckResult::fail("decomposable: YES without split");
    if (auto res = tagged("decomposable", check_cone_split(c, std::get<ConeSplit>(*d.certificate), cc.solver.feas_tol));
        !res.ok)
      return res;
  } else if (d.not_member()) {
    if (!d.certificate || !std::holds_alternative<PptWitnessState>(*d.certificate))
      return CheckResult::fail("decomposable: NO without PPT witness");
    if (auto res = tagged("decomposable",
                          check_ppt_witness(c, std::get<PptWitnessState>(*d.certificate), cc.solver.feas_tol));
        !res.ok)
      return res;
  }
  return {};
}

}  // namespace posmap

#endif  // POSMAP_CLASSIFY_HPP

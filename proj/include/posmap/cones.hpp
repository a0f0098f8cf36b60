#ifndef POSMAP_CONES_HPP
#define POSMAP_CONES_HPP

// Membership oracles for the five tensor cones on a bipartite operator X:
//
//   cp   PSD                         lambda_min(X) >= 0
//   ccp  partially transposed PSD    lambda_min(PT X) >= 0
//   d    PPT                         cp and ccp
//   i    block-positive              <f g|X|f g> >= 0 for all product vectors
//   p    separable                   conv of PSD (x) PSD
//
// cp, ccp and d are decided exactly up to `tol`. NOT_MEMBER verdicts always
// carry a certificate that re-verifies from the raw matrix. MEMBER of i is
// one-sided ("no counterexample after N starts plus the mesh"). p is decided
// by a ladder: spectral refutation, PPT sufficiency for dim_a*dim_b <= 6, an
// explicit product decomposition, otherwise UNKNOWN.

#include "posmap/linalg.hpp"
#include "posmap/solver.hpp"

#include <chrono>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace posmap {

enum class Decision { member, not_member, unknown };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::member: return "MEMBER";
    case Decision::not_member: return "NOT_MEMBER";
    case Decision::unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

enum class Cone { cp, ccp, d, i, p };

inline const char* to_string(Cone c) {
  switch (c) {
    case Cone::cp: return "cp";
    case Cone::ccp: return "ccp";
    case Cone::d: return "d";
    case Cone::i: return "i";
    case Cone::p: return "p";
  }
  return "?";
}

inline std::optional<Cone> cone_from_string(const std::string& s) {
  if (s == "cp") return Cone::cp;
  if (s == "ccp") return Cone::ccp;
  if (s == "d") return Cone::d;
  if (s == "i") return Cone::i;
  if (s == "p") return Cone::p;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// certificates

/// <f (x) g|X|f (x) g> = value < 0.
struct ProductWitness {
  ComplexVector f, g;
  double value = 0.0;
};

/// v^dagger X v = eigenvalue < 0, or on PT(X) when partial_transposed.
struct SpectralWitness {
  ComplexVector v;
  double eigenvalue = 0.0;
  bool partial_transposed = false;
};

/// Unit psi of Schmidt rank <= k with <psi|X|psi> = value < 0.
struct SchmidtWitness {
  ComplexVector psi;
  int k = 1;
  double value = 0.0;
};

/// PPT state with Tr(X rho) = pairing_value < 0.
struct PptWitnessState {
  BipartiteOperator rho;
  double pairing_value = 0.0;
};

struct ProductDecomposition {
  std::vector<ProductTerm> terms;
  double residual = 0.0;
};

/// X = A + PT(B) with A, B PSD.
struct ConeSplit {
  HermitianMatrix a, b;
  double residual = 0.0;
};

using Certificate = std::variant<ProductWitness, SpectralWitness, SchmidtWitness, PptWitnessState,
                                 ProductDecomposition, ConeSplit>;

inline const char* certificate_kind(const Certificate& c) {
  struct Visitor {
    const char* operator()(const ProductWitness&) const { return "product_witness"; }
    const char* operator()(const SpectralWitness&) const { return "spectral_witness"; }
    const char* operator()(const SchmidtWitness&) const { return "schmidt_witness"; }
    const char* operator()(const PptWitnessState&) const { return "ppt_witness_state"; }
    const char* operator()(const ProductDecomposition&) const { return "product_decomposition"; }
    const char* operator()(const ConeSplit&) const { return "cone_split"; }
  };
  return std::visit(Visitor{}, c);
}

struct Diagnostics {
  double min_value_found = std::numeric_limits<double>::quiet_NaN();
  int starts_used = 0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string method;
  bool heuristic = false;
};

struct Verdict {
  Decision decision = Decision::unknown;
  std::optional<Certificate> certificate;
  Diagnostics diagnostics;

  bool member() const { return decision == Decision::member; }
  bool not_member() const { return decision == Decision::not_member; }
  bool decided() const { return decision != Decision::unknown; }
};

struct ConeConfig {
  double tol = 1e-9;
  SolverConfig solver;
  // Greedy rounds for the separable fit; 0 picks 4 * dim_a * dim_b.
  int fit_rounds = 0;
};

/// max(1, ||X||) with the spectral norm.
inline double operator_scale(const SpectralDecomposition& sd) {
  return std::max(1.0, sd.spectral_norm());
}

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Verdict spectral_verdict(const ComplexMatrix& m, double tol, bool partial_transposed) {
  const SpectralDecomposition sd = jacobi_eigen(m);
  Verdict v;
  v.diagnostics.min_value_found = sd.min_eigenvalue();
  v.diagnostics.method = partial_transposed ? "spectral(PT)" : "spectral";
  if (sd.min_eigenvalue() >= -tol * operator_scale(sd)) {
    v.decision = Decision::member;
  } else {
    v.decision = Decision::not_member;
    v.certificate = SpectralWitness{sd.min_eigenvector(), sd.min_eigenvalue(), partial_transposed};
  }
  return v;
}

}  // namespace detail

inline Verdict in_C_cp(const BipartiteOperator& x, double tol = 1e-9) {
  detail::Stopwatch sw;
  Verdict v = detail::spectral_verdict(x.matrix(), tol, false);
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

inline Verdict in_C_ccp(const BipartiteOperator& x, double tol = 1e-9) {
  detail::Stopwatch sw;
  Verdict v = detail::spectral_verdict(
      partial_transpose_matrix(x.matrix(), x.dim_a(), x.dim_b(), Slot::second), tol, true);
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

inline Verdict in_C_d(const BipartiteOperator& x, double tol = 1e-9) {
  detail::Stopwatch sw;
  Verdict cp = in_C_cp(x, tol);
  if (cp.not_member()) {
    cp.diagnostics.wall_ms = sw.ms();
    return cp;
  }
  Verdict ccp = in_C_ccp(x, tol);
  ccp.diagnostics.min_value_found = std::min(cp.diagnostics.min_value_found, ccp.diagnostics.min_value_found);
  ccp.diagnostics.method = "spectral+spectral(PT)";
  ccp.diagnostics.wall_ms = sw.ms();
  return ccp;
}

/// Block positivity by multi-start see-saw plus the deterministic mesh pass.
inline Verdict in_C_i(const BipartiteOperator& x, const ConeConfig& cfg = {}) {
  detail::Stopwatch sw;
  const SpectralDecomposition sd = herm_eig(x.hermitian());
  const double threshold = -cfg.tol * operator_scale(sd);
  Verdict v;
  v.diagnostics.method = "seesaw+mesh";
  // PSD operators are block-positive outright.
  if (sd.min_eigenvalue() >= threshold) {
    v.decision = Decision::member;
    v.diagnostics.min_value_found = sd.min_eigenvalue();
    v.diagnostics.method = "spectral";
    v.diagnostics.wall_ms = sw.ms();
    return v;
  }
  const ProductMinimum ss = seesaw_min_product(x, cfg.solver);
  const ProductMinimum mesh = mesh_min_product(x, cfg.solver);
  const ProductMinimum& best = mesh.value < ss.value ? mesh : ss;
  v.diagnostics.min_value_found = best.value;
  v.diagnostics.starts_used = ss.starts_used;
  v.diagnostics.iterations = ss.iterations + mesh.iterations;
  if (best.value < threshold) {
    // Re-evaluate directly before committing to the witness.
    const double direct = product_expectation(x, best.f, best.g);
    if (direct < threshold) {
      v.decision = Decision::not_member;
      v.certificate = ProductWitness{best.f, best.g, direct};
      v.diagnostics.min_value_found = direct;
      v.diagnostics.wall_ms = sw.ms();
      return v;
    }
  }
  v.decision = Decision::member;
  v.diagnostics.heuristic = true;
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

/// Separability ladder.
inline Verdict in_C_p(const BipartiteOperator& x, const ConeConfig& cfg = {}) {
  detail::Stopwatch sw;
  Verdict cp = in_C_cp(x, cfg.tol);
  if (cp.not_member()) {
    cp.diagnostics.wall_ms = sw.ms();
    return cp;
  }
  Verdict ccp = in_C_ccp(x, cfg.tol);
  if (ccp.not_member()) {
    ccp.diagnostics.wall_ms = sw.ms();
    return ccp;
  }
  Verdict v;
  v.diagnostics.min_value_found = std::min(cp.diagnostics.min_value_found, ccp.diagnostics.min_value_found);
  if (x.dim() <= 6) {
    v.decision = Decision::member;
    v.diagnostics.method = "ppt-low-dimension";
    v.diagnostics.wall_ms = sw.ms();
    return v;
  }
  const int rounds = cfg.fit_rounds > 0 ? cfg.fit_rounds : static_cast<int>(4 * x.dim());
  const SeparableFit fit = separable_fit(x, rounds, cfg.solver);
  v.diagnostics.method = "separable-fit";
  v.diagnostics.iterations = fit.iterations;
  v.diagnostics.starts_used = fit.rounds;
  if (fit.success) {
    v.decision = Decision::member;
    v.certificate = ProductDecomposition{fit.terms, fit.residual};
  } else {
    v.decision = Decision::unknown;
    v.diagnostics.min_value_found = fit.residual;
  }
  v.diagnostics.wall_ms = sw.ms();
  return v;
}

inline Verdict in_cone(Cone cone, const BipartiteOperator& x, const ConeConfig& cfg = {}) {
  switch (cone) {
    case Cone::cp: return in_C_cp(x, cfg.tol);
    case Cone::ccp: return in_C_ccp(x, cfg.tol);
    case Cone::d: return in_C_d(x, cfg.tol);
    case Cone::i: return in_C_i(x, cfg);
    case Cone::p: return in_C_p(x, cfg);
  }
  return {};
}

// ---------------------------------------------------------------------------
// certificate re-verification from raw matrices

struct CheckResult {
  bool ok = true;
  std::string reason;

  static CheckResult fail(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

inline bool is_unit(const ComplexVector& v) { return std::abs(v.norm() - 1.0) <= 1e-8; }

// A recomputed violation must be negative and at least half the claimed size.
inline bool reproduces(double recomputed, double claimed) {
  return recomputed < 0.0 && recomputed <= 0.5 * claimed;
}

}  // namespace detail

inline CheckResult check_product_witness(const BipartiteOperator& x, const ProductWitness& w) {
  if (w.f.size() != x.dim_a() || w.g.size() != x.dim_b()) return CheckResult::fail("product witness: wrong sizes");
  if (!detail::is_unit(w.f) || !detail::is_unit(w.g)) return CheckResult::fail("product witness: not unit vectors");
  const double value = product_expectation(x, w.f, w.g);
  if (!detail::reproduces(value, w.value))
    return CheckResult::fail("product witness: value " + std::to_string(value) + " does not reproduce " +
                             std::to_string(w.value));
  return {};
}

inline CheckResult check_spectral_witness(const BipartiteOperator& x, const SpectralWitness& w) {
  if (w.v.size() != x.dim()) return CheckResult::fail("spectral witness: wrong size");
  if (!detail::is_unit(w.v)) return CheckResult::fail("spectral witness: not a unit vector");
  const ComplexMatrix m = w.partial_transposed
                              ? partial_transpose_matrix(x.matrix(), x.dim_a(), x.dim_b(), Slot::second)
                              : x.matrix();
  const double value = expectation(m, w.v);
  if (!detail::reproduces(value, w.eigenvalue))
    return CheckResult::fail("spectral witness: value " + std::to_string(value) + " does not reproduce " +
                             std::to_string(w.eigenvalue));
  return {};
}

/// Number of Schmidt coefficients above 1e-8.
inline int schmidt_rank(const ComplexVector& psi, Eigen::Index da, Eigen::Index db, double cutoff = 1e-8) {
  const RealVector s = schmidt_coefficients(psi, da, db);
  int rank = 0;
  for (Eigen::Index r = 0; r < s.size(); ++r)
    if (s(r) > cutoff) ++rank;
  return rank;
}

inline CheckResult check_schmidt_witness(const BipartiteOperator& x, const SchmidtWitness& w) {
  if (w.psi.size() != x.dim()) return CheckResult::fail("schmidt witness: wrong size");
  if (!detail::is_unit(w.psi)) return CheckResult::fail("schmidt witness: not a unit vector");
  if (schmidt_rank(w.psi, x.dim_a(), x.dim_b()) > w.k)
    return CheckResult::fail("schmidt witness: Schmidt rank exceeds " + std::to_string(w.k));
  const double value = expectation(x.matrix(), w.psi);
  if (!detail::reproduces(value, w.value))
    return CheckResult::fail("schmidt witness: value does not reproduce");
  return {};
}

inline CheckResult check_ppt_witness(const BipartiteOperator& x, const PptWitnessState& w, double feas_tol) {
  const BipartiteOperator& rho = w.rho;
  if (rho.dim_a() != x.dim_a() || rho.dim_b() != x.dim_b()) return CheckResult::fail("ppt witness: wrong dims");
  if (std::abs(rho.hermitian().trace() - 1.0) > 1e-9) return CheckResult::fail("ppt witness: trace is not 1");
  if (herm_eig(rho.hermitian()).min_eigenvalue() < -feas_tol)
    return CheckResult::fail("ppt witness: state is not PSD");
  if (herm_eig(partial_transpose(rho).hermitian()).min_eigenvalue() < -feas_tol)
    return CheckResult::fail("ppt witness: state is not PPT");
  const double value = pairing(x.hermitian(), rho.hermitian());
  if (value > -feas_tol) return CheckResult::fail("ppt witness: pairing is not negative");
  if (std::abs(value - w.pairing_value) > 1e-9 * std::max(1.0, std::abs(value)))
    return CheckResult::fail("ppt witness: pairing value mismatch");
  return {};
}

inline CheckResult check_product_decomposition(const BipartiteOperator& x, const ProductDecomposition& pd,
                                               double feas_tol) {
  for (const ProductTerm& t : pd.terms) {
    if (!(t.weight >= 0.0)) return CheckResult::fail("product decomposition: negative weight");
    if (t.f.size() != x.dim_a() || t.g.size() != x.dim_b())
      return CheckResult::fail("product decomposition: wrong vector sizes");
    if (!detail::is_unit(t.f) || !detail::is_unit(t.g))
      return CheckResult::fail("product decomposition: vectors not unit");
  }
  const double residual = (x.matrix() - detail::decomposition_sum(pd.terms, x.dim())).norm();
  if (residual > feas_tol * detail::bipartite_scale(x.matrix()))
    return CheckResult::fail("product decomposition: residual " + std::to_string(residual) + " too large");
  return {};
}

inline CheckResult check_cone_split(const BipartiteOperator& x, const ConeSplit& s, double feas_tol) {
  if (s.a.size() != x.dim() || s.b.size() != x.dim()) return CheckResult::fail("split: wrong sizes");
  const double scale = detail::bipartite_scale(x.matrix());
  if (herm_eig(s.a).min_eigenvalue() < -feas_tol * scale) return CheckResult::fail("split: A is not PSD");
  if (herm_eig(s.b).min_eigenvalue() < -feas_tol * scale) return CheckResult::fail("split: B is not PSD");
  const ComplexMatrix sum =
      s.a.matrix() + partial_transpose_matrix(s.b.matrix(), x.dim_a(), x.dim_b(), Slot::second);
  const double residual = (x.matrix() - sum).norm();
  if (residual > feas_tol * scale) return CheckResult::fail("split: residual " + std::to_string(residual) + " too large");
  return {};
}

/// Re-checks any certificate against X. Witness certificates are checked as
/// refutations, ConeSplit and ProductDecomposition as membership evidence.
inline CheckResult check_certificate(const BipartiteOperator& x, const Certificate& c, double feas_tol = 1e-8) {
  struct Visitor {
    const BipartiteOperator& x;
    double feas_tol;
    CheckResult operator()(const ProductWitness& w) const { return check_product_witness(x, w); }
    CheckResult operator()(const SpectralWitness& w) const { return check_spectral_witness(x, w); }
    CheckResult operator()(const SchmidtWitness& w) const { return check_schmidt_witness(x, w); }
    CheckResult operator()(const PptWitnessState& w) const { return check_ppt_witness(x, w, feas_tol); }
    CheckResult operator()(const ProductDecomposition& d) const { return check_product_decomposition(x, d, feas_tol); }
    CheckResult operator()(const ConeSplit& s) const { return check_cone_split(x, s, feas_tol); }
  };
  return std::visit(Visitor{x, feas_tol}, c);
}

/// Re-validates a cone verdict from X alone. Certified decisions are
/// re-derived; heuristic MEMBER verdicts are checked for consistency with the
/// spectral lower bound only.
inline CheckResult check_cone_verdict(Cone cone, const BipartiteOperator& x, const Verdict& v,
                                      const ConeConfig& cfg = {}) {
  const double feas_tol = cfg.solver.feas_tol;
  if (v.decision == Decision::unknown) {
    if (v.certificate) return CheckResult::fail("UNKNOWN verdict must not carry a certificate");
    return {};
  }
  auto spectral_member = [&](bool pt) {
    const ComplexMatrix m =
        pt ? partial_transpose_matrix(x.matrix(), x.dim_a(), x.dim_b(), Slot::second) : x.matrix();
    const SpectralDecomposition sd = herm_eig(m);
    return sd.min_eigenvalue() >= -cfg.tol * operator_scale(sd);
  };
  if (v.decision == Decision::not_member) {
    if (!v.certificate) return CheckResult::fail("NOT_MEMBER verdict without certificate");
    const Certificate& c = *v.certificate;
    const bool allowed =
        (cone == Cone::cp && std::holds_alternative<SpectralWitness>(c) && !std::get<SpectralWitness>(c).partial_transposed) ||
        (cone == Cone::ccp && std::holds_alternative<SpectralWitness>(c) && std::get<SpectralWitness>(c).partial_transposed) ||
        ((cone == Cone::d || cone == Cone::p) && std::holds_alternative<SpectralWitness>(c)) ||
        (cone == Cone::i && std::holds_alternative<ProductWitness>(c));
    if (!allowed) return CheckResult::fail(std::string("certificate kind ") + certificate_kind(c) +
                                           " cannot refute cone " + to_string(cone));
    return check_certificate(x, c, feas_tol);
  }
  switch (cone) {
    case Cone::cp:
      return spectral_member(false) ? CheckResult{} : CheckResult::fail("cp: not PSD within tolerance");
    case Cone::ccp:
      return spectral_member(true) ? CheckResult{} : CheckResult::fail("ccp: not PT-PSD within tolerance");
    case Cone::d:
      return spectral_member(false) && spectral_member(true) ? CheckResult{}
                                                             : CheckResult::fail("d: not PPT within tolerance");
    case Cone::i: {
      const double lower = herm_eig(x.hermitian()).min_eigenvalue();
      const double found = v.diagnostics.min_value_found;
      if (std::isfinite(found) && found < lower - 1e-9) return CheckResult::fail("i: min value below lambda_min");
      return {};
    }
    case Cone::p: {
      if (!(spectral_member(false) && spectral_member(true))) return CheckResult::fail("p: not PPT");
      if (v.certificate) {
        if (!std::holds_alternative<ProductDecomposition>(*v.certificate))
          return CheckResult::fail("p: MEMBER evidence must be a product decomposition");
        return check_certificate(x, *v.certificate, feas_tol);
      }
      if (x.dim() > 6) return CheckResult::fail("p: MEMBER without decomposition above dimension 6");
      return {};
    }
  }
  return {};
}

}  // namespace posmap

#endif  // POSMAP_CONES_HPP

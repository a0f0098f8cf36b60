#ifndef POSMAP_GALLERY_HPP
#define POSMAP_GALLERY_HPP

// Named maps and states used as fixtures and by the CLI.
//
//   identity(n) transpose(n) reduction(n) depolarizing(n, lambda)
//   choi3  choi3_rev                                  maps M_n -> M_m
//   random_cp(n, m, rank) random_block_positive(n, m)
//   werner(p) max_entangled(n) random_ppt(n, m)       bipartite states

#include "posmap/choi.hpp"
#include "posmap/cones.hpp"
#include "posmap/solver.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace posmap {

class UnknownName : public std::invalid_argument {
 public:
  explicit UnknownName(const std::string& what) : std::invalid_argument(what) {}
};

class BadParameter : public std::invalid_argument {
 public:
  explicit BadParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a constructed object fails its own self-check.
class SelfCheckFailure : public std::runtime_error {
 public:
  explicit SelfCheckFailure(const std::string& what) : std::runtime_error(what) {}
};

using Parameters = std::map<std::string, double>;

struct GalleryEntry {
  std::string name;
  Parameters parameters;
  std::optional<std::uint64_t> seed;
  std::variant<MapRepr, BipartiteOperator> object;
  std::string provenance;
  std::vector<std::string> warnings;

  bool is_map() const { return std::holds_alternative<MapRepr>(object); }
  const MapRepr& map() const { return std::get<MapRepr>(object); }
  const BipartiteOperator& op() const { return std::get<BipartiteOperator>(object); }
};

struct GalleryOptions {
  // Expensive construction-time oracles (e.g. 500-start positivity of choi3).
  bool deep_checks = false;
};

inline const std::vector<std::string>& gallery_catalog() {
  static const std::vector<std::string> names = {
      "identity",  "transpose", "choi3",        "choi3_rev", "reduction",
      "depolarizing", "werner", "max_entangled", "random_cp", "random_block_positive",
      "random_ppt"};
  return names;
}

// ---------------------------------------------------------------------------
// constructors

inline MapRepr identity_map(Eigen::Index n) {
  return choi_of_map([](const ComplexMatrix& x) { return x; }, n, n);
}

inline MapRepr transpose_map(Eigen::Index n) {
  return choi_of_map([](const ComplexMatrix& x) { return ComplexMatrix(x.transpose()); }, n, n);
}

/// X ↦ Tr(X) I - X.
inline MapRepr reduction_map(Eigen::Index n) {
  return choi_of_map(
      [n](const ComplexMatrix& x) {
        return ComplexMatrix(x.trace() * ComplexMatrix::Identity(n, n) - x);
      },
      n, n);
}

/// X ↦ lambda X + (1 - lambda) Tr(X) I / n.
inline MapRepr depolarizing_map(Eigen::Index n, double lambda) {
  return choi_of_map(
      [n, lambda](const ComplexMatrix& x) {
        return ComplexMatrix(lambda * x + ((1.0 - lambda) / static_cast<double>(n)) * x.trace() *
                                              ComplexMatrix::Identity(n, n));
      },
      n, n);
}

/// Choi's map on M_3: diagonal x_ii + x_{i+s, i+s} (indices mod 3), off-diagonal -x_ij.
/// shift = 1 gives choi3, shift = 2 the reversed orientation.
inline MapRepr choi3_map(int shift = 1) {
  return choi_of_map(
      [shift](const ComplexMatrix& x) {
        ComplexMatrix y = -x;
        for (int i = 0; i < 3; ++i) y(i, i) = x(i, i) + x((i + shift) % 3, (i + shift) % 3);
        return y;
      },
      3, 3);
}

/// p |Psi-><Psi-| + (1 - p) I/4 on C^2 (x) C^2.
inline BipartiteOperator werner_state(double p) {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix rho = p * psi * psi.adjoint() + ((1.0 - p) / 4.0) * ComplexMatrix::Identity(4, 4);
  return BipartiteOperator(2, 2, std::move(rho));
}

/// |Omega><Omega| with |Omega> = sum_i |ii>/sqrt(n).
inline BipartiteOperator max_entangled_state(Eigen::Index n) {
  const ComplexVector omega = max_entangled_vector(n);
  return BipartiteOperator(n, n, ComplexMatrix(omega * omega.adjoint()));
}

inline MapRepr random_cp_map(Eigen::Index n, Eigen::Index m, Eigen::Index rank, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, detail::stream_gallery, 0));
  KrausFamily kraus;
  for (Eigen::Index r = 0; r < rank; ++r) kraus.push_back(detail::random_complex_matrix(rng, n, m));
  return map_from_kraus(kraus, n, m);
}

/// Random CP map plus a signed, scaled co-CP map, accepted once the see-saw
/// oracle finds no product vector with negative expectation.
inline MapRepr random_block_positive_map(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                                         int* attempts_out = nullptr) {
  std::mt19937_64 rng(derive_seed(seed, detail::stream_gallery, 1));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ConeConfig oracle;
  oracle.solver.starts = 50;
  oracle.solver.mesh_points = 12;
  constexpr int max_attempts = 1000;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::uint64_t sub = rng();
    const MapRepr base = random_cp_map(n, m, 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n * m)), sub);
    const MapRepr other = random_cp_map(n, m, 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n * m)), sub + 1);
    const double weight = 0.05 + 0.95 * std::abs(unit(rng));
    const double s = unit(rng);
    const MapRepr candidate = weight * base + s * co_compose(other);
    oracle.solver.seed = sub;
    if (in_C_i(candidate.choi(), oracle).member()) {
      if (attempts_out) *attempts_out = attempt;
      return candidate;
    }
  }
  throw SelfCheckFailure("random_block_positive: no block-positive sample after 1000 attempts");
}

/// Random Hermitian matrix projected onto PPT states by Dykstra, then made
/// exactly PSD and PPT with unit trace.
inline BipartiteOperator random_ppt_state(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, detail::stream_gallery, 2));
  const Eigen::Index d = n * m;
  const ComplexMatrix g = detail::random_complex_matrix(rng, d, d);
  const ComplexMatrix h = 0.5 * (g + g.adjoint()) / std::sqrt(static_cast<double>(d));
  const std::vector<Projector<ComplexMatrix>> sets = {
      [](const ComplexMatrix& x) { return psd_project_matrix(x); },
      [n, m](const ComplexMatrix& x) { return detail::project_ppt_slice(x, n, m); },
      [d](const ComplexMatrix& x) {
        return ComplexMatrix(x + ((1.0 - x.trace().real()) / static_cast<double>(d)) *
                                     ComplexMatrix::Identity(d, d));
      },
  };
  DykstraOptions opt;
  opt.max_iters = 5000;
  opt.tol = 1e-10;
  const auto res = dykstra<ComplexMatrix>(sets, h, opt);
  auto rho = detail::repair_ppt_state(res.point, n, m);
  if (!rho) throw SelfCheckFailure("random_ppt: projection collapsed to zero");
  return BipartiteOperator(n, m, *rho);
}

// ---------------------------------------------------------------------------
// make

namespace detail {

class ParamReader {
 public:
  ParamReader(const std::string& name, const Parameters& p, std::set<std::string> allowed)
      : name_(name), params_(p) {
    for (const auto& [k, v] : p)
      if (!allowed.count(k)) throw BadParameter(name + ": unknown parameter '" + k + "'");
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto it = params_.find(key);
    if (it == params_.end()) {
      if (!fallback) throw BadParameter(name_ + ": missing parameter '" + key + "'");
      return *fallback;
    }
    if (!std::isfinite(it->second)) throw BadParameter(name_ + ": parameter '" + key + "' is not finite");
    return it->second;
  }

  Eigen::Index count(const std::string& key, std::optional<Eigen::Index> fallback = std::nullopt,
                     Eigen::Index lo = 1, Eigen::Index hi = 16) const {
    const double v = real(key, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
    if (v != std::floor(v) || v < static_cast<double>(lo) || v > static_cast<double>(hi))
      throw BadParameter(name_ + ": parameter '" + key + "' must be an integer in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    return static_cast<Eigen::Index>(v);
  }

 private:
  std::string name_;
  const Parameters& params_;
};

inline void self_check_hermitian(const ComplexMatrix& m, const std::string& name) {
  if (hermitian_defect(m) > tolerance::hermitian_strict)
    throw SelfCheckFailure(name + ": constructed Choi matrix is not Hermitian");
}

}  // namespace detail

/// Builds a catalog object and runs its self-checks.
inline GalleryEntry make(const std::string& name, const Parameters& params = {},
                         std::optional<std::uint64_t> seed = std::nullopt, const GalleryOptions& opt = {}) {
  GalleryEntry e;
  e.name = name;
  e.parameters = params;
  e.seed = seed;
  const std::uint64_t s = seed.value_or(0);

  if (name == "identity" || name == "transpose" || name == "reduction" || name == "max_entangled") {
    detail::ParamReader rd(name, params, {"n"});
    const Eigen::Index n = rd.count("n", 2);
    e.parameters["n"] = static_cast<double>(n);
    if (name == "identity") {
      e.object = identity_map(n);
      e.provenance = "identity map on M_n; Choi matrix n|Omega><Omega|";
    } else if (name == "transpose") {
      e.object = transpose_map(n);
      e.provenance = "transpose map in the computational basis; Choi matrix SWAP";
    } else if (name == "reduction") {
      e.object = reduction_map(n);
      e.provenance = "reduction map X -> Tr(X) I - X; Choi matrix I - n|Omega><Omega|";
    } else {
      e.object = max_entangled_state(n);
      e.provenance = "maximally entangled state |Omega><Omega|";
    }
  } else if (name == "choi3" || name == "choi3_rev") {
    detail::ParamReader rd(name, params, {});
    e.object = choi3_map(name == "choi3" ? 1 : 2);
    e.provenance = "Choi's positive, non-decomposable map on M_3";
  } else if (name == "depolarizing") {
    detail::ParamReader rd(name, params, {"n", "lambda"});
    const Eigen::Index n = rd.count("n", 2);
    const double lambda = rd.real("lambda", 0.5);
    e.parameters = {{"n", static_cast<double>(n)}, {"lambda", lambda}};
    const double lo = -1.0 / (static_cast<double>(n * n) - 1.0);
    if (n > 1 && (lambda < lo || lambda > 1.0))
      e.warnings.push_back("depolarizing: lambda outside the CP range [" + std::to_string(lo) + ", 1]");
    e.object = depolarizing_map(n, lambda);
    e.provenance = "depolarizing map X -> lambda X + (1 - lambda) Tr(X) I/n";
  } else if (name == "werner") {
    detail::ParamReader rd(name, params, {"p"});
    const double p = rd.real("p", 0.5);
    e.parameters = {{"p", p}};
    if (p < 0.0 || p > 1.0) e.warnings.push_back("werner: p outside [0, 1], operator may not be a state");
    e.object = werner_state(p);
    e.provenance = "Werner state p|Psi-><Psi-| + (1 - p) I/4";
  } else if (name == "random_cp") {
    detail::ParamReader rd(name, params, {"n", "m", "rank"});
    const Eigen::Index n = rd.count("n", 2), m = rd.count("m", n);
    const Eigen::Index rank = rd.count("rank", n * m, 1, n * m);
    e.parameters = {{"n", static_cast<double>(n)}, {"m", static_cast<double>(m)}, {"rank", static_cast<double>(rank)}};
    e.seed = s;
    e.object = random_cp_map(n, m, rank, s);
    e.provenance = "random CP map from Gaussian Kraus operators";
  } else if (name == "random_block_positive") {
    detail::ParamReader rd(name, params, {"n", "m"});
    const Eigen::Index n = rd.count("n", 2, 1, 4), m = rd.count("m", n, 1, 4);
    e.parameters = {{"n", static_cast<double>(n)}, {"m", static_cast<double>(m)}};
    e.seed = s;
    e.object = random_block_positive_map(n, m, s);
    e.provenance = "random CP map plus signed co-CP map, rejected through the block-positivity oracle";
  } else if (name == "random_ppt") {
    detail::ParamReader rd(name, params, {"n", "m"});
    const Eigen::Index n = rd.count("n", 3), m = rd.count("m", n);
    e.parameters = {{"n", static_cast<double>(n)}, {"m", static_cast<double>(m)}};
    e.seed = s;
    e.object = random_ppt_state(n, m, s);
    e.provenance = "random Hermitian matrix projected onto PPT states of unit trace";
  } else {
    throw UnknownName("gallery: unknown name '" + name + "'");
  }

  // self-checks
  if (e.is_map()) {
    detail::self_check_hermitian(e.map().choi().matrix(), name);
  } else {
    detail::self_check_hermitian(e.op().matrix(), name);
  }
  if (name == "random_ppt") {
    const BipartiteOperator& rho = e.op();
    if (in_C_d(rho, 1e-12).not_member() || std::abs(rho.hermitian().trace() - 1.0) > 1e-12)
      throw SelfCheckFailure("random_ppt: result is not a PPT state");
  }
  if (name == "choi3" || name == "choi3_rev") {
    if (!in_C_cp(e.map().choi(), 1e-3).not_member()) throw SelfCheckFailure(name + ": map is unexpectedly CP");
    if (opt.deep_checks) {
      SolverConfig cfg;
      cfg.starts = 500;
      if (seesaw_min_product(e.map().choi(), cfg).value < -1e-9)
        throw SelfCheckFailure(name + ": see-saw found a negative product expectation");
    }
  }
  return e;
}

}  // namespace posmap

#endif  // POSMAP_GALLERY_HPP

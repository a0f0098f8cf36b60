#ifndef POSMAP_SOLVER_HPP
#define POSMAP_SOLVER_HPP

// Numerical engines behind the cone oracles:
//  - Dykstra alternating projections for conic feasibility,
//  - see-saw minimisation of <f (x) g|C|f (x) g> over product vectors,
//  - block-alternating minimisation over Schmidt-rank-k vectors,
//  - greedy separable fitting with nonnegative least squares,
//  - the decomposability split / PPT witness search.
//
// Every multi-start engine derives per-start generators from the master seed
// with a counter-based mix, stores per-start results by index and reduces by
// (value, index), so results do not depend on the thread count.

#include "posmap/linalg.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace posmap {

class InvalidK : public std::invalid_argument {
 public:
  explicit InvalidK(const std::string& what) : std::invalid_argument(what) {}
};

struct SolverConfig {
  std::uint64_t seed = 0;
  int starts = 200;
  int max_outer_iters = 20000;
  double inner_tol = 1e-13;
  double feas_tol = 1e-8;
  std::optional<std::int64_t> budget_ms;

  int seesaw_max_iters = 2000;
  int mesh_points = 24;
  int threads = 1;
  int bisection_steps = 20;
  int dykstra_max_iters = 5000;
  int stall_window = 200;
  double stall_decrease = 1e-12;
  // Separable fit: see-saw starts per greedy round.
  int fit_starts = 8;

  void validate() const {
    if (starts < 1) throw std::invalid_argument("SolverConfig: starts must be >= 1");
    if (!(inner_tol > 0.0) || !(feas_tol > 0.0))
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (max_outer_iters < 1 || seesaw_max_iters < 1 || dykstra_max_iters < 1 || threads < 1 ||
        stall_window < 1 || fit_starts < 1 || bisection_steps < 0 || mesh_points < 0)
      throw std::invalid_argument("SolverConfig: iteration counts must be positive");
  }
};

class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(const std::optional<std::int64_t>& budget_ms) {
    if (budget_ms) end_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(*budget_ms);
  }
  bool expired() const { return end_ && std::chrono::steady_clock::now() >= *end_; }

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

// ---------------------------------------------------------------------------
// random starts

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for work item `index` of stream `stream` under master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

/// Normalised standard complex Gaussian vector.
inline ComplexVector random_unit_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      v(i) = Complex(re, im);
    }
    const double nrm = v.norm();
    if (nrm > 1e-12) return v / nrm;
  }
}

namespace detail {

// Runs work(i) for i in [0, count); slots left empty once the deadline hits.
template <class Result, class Work>
std::vector<std::optional<Result>> run_indexed(int count, int threads, const Deadline& deadline,
                                               Work&& work) {
  std::vector<std::optional<Result>> out(static_cast<std::size_t>(count));
  auto worker = [&](int first, int stride) {
    for (int i = first; i < count; i += stride) {
      if (deadline.expired()) return;
      out[static_cast<std::size_t>(i)] = work(i);
    }
  };
  if (threads <= 1 || count <= 1) {
    worker(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  const int used = std::min(threads, count);
  pool.reserve(static_cast<std::size_t>(used));
  for (int t = 0; t < used; ++t) pool.emplace_back(worker, t, used);
  for (auto& th : pool) th.join();
  return out;
}

inline double bipartite_scale(const ComplexMatrix& m) { return std::max(1.0, m.norm()); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Dykstra

template <class Point>
using Projector = std::function<Point(const Point&)>;

template <class Point>
struct DykstraResult {
  Point point;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
};

struct DykstraOptions {
  int max_iters = 5000;
  double tol = 1e-8;
  int check_every = 1;
  Deadline deadline;
};

inline double point_norm(double x) { return std::abs(x); }
inline double point_norm(const ComplexMatrix& x) { return x.norm(); }

/// Dykstra's cyclic projection algorithm. The residual is the largest
/// distance from the current point to any set, measured by projecting once more.
template <class Point>
DykstraResult<Point> dykstra(std::span<const Projector<Point>> projectors, Point start,
                             const DykstraOptions& opt) {
  DykstraResult<Point> res;
  res.point = std::move(start);
  if (projectors.empty()) {
    res.converged = true;
    return res;
  }
  const Point zero = res.point - res.point;
  std::vector<Point> increments(projectors.size(), zero);
  auto residual_of = [&](const Point& x) {
    double worst = 0.0;
    for (const auto& proj : projectors) worst = std::max(worst, point_norm(Point(proj(x) - x)));
    return worst;
  };
  res.residual = residual_of(res.point);
  if (res.residual <= opt.tol) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= opt.max_iters; ++it) {
    for (std::size_t i = 0; i < projectors.size(); ++i) {
      const Point y = res.point + increments[i];
      Point next = projectors[i](y);
      increments[i] = y - next;
      res.point = std::move(next);
    }
    res.iterations = it;
    if (it % std::max(1, opt.check_every) == 0 || it == opt.max_iters) {
      res.residual = residual_of(res.point);
      if (res.residual <= opt.tol) {
        res.converged = true;
        return res;
      }
      if (opt.deadline.expired()) return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// product-vector minimisation

/// M(g)[i,j] = <i (x) g| C |j (x) g>.
inline ComplexMatrix contract_second(const BipartiteOperator& c, const ComplexVector& g) {
  const Eigen::Index da = c.dim_a(), db = c.dim_b();
  ComplexMatrix m(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      m(i, j) = g.dot(c.matrix().block(i * db, j * db, db, db) * g);
  return 0.5 * (m + m.adjoint());
}

/// N(f)[k,l] = <f (x) k| C |f (x) l>.
inline ComplexMatrix contract_first(const BipartiteOperator& c, const ComplexVector& f) {
  const Eigen::Index da = c.dim_a(), db = c.dim_b();
  ComplexMatrix n = ComplexMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) {
      const Complex w = std::conj(f(i)) * f(j);
      if (w != Complex(0.0)) n.noalias() += w * c.matrix().block(i * db, j * db, db, db);
    }
  return 0.5 * (n + n.adjoint());
}

struct SeesawRun {
  double value = std::numeric_limits<double>::infinity();
  ComplexVector f, g;
  int iterations = 0;
  std::vector<double> history;
};

/// One see-saw descent from the start vector g0 on the second factor.
/// Each half-step is an exact smallest-eigenvector problem, so the
/// objective sequence is non-increasing.
inline SeesawRun seesaw_from(const BipartiteOperator& c, ComplexVector g0, const SolverConfig& cfg,
                             bool keep_history = false) {
  SeesawRun run;
  run.g = std::move(g0);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.seesaw_max_iters; ++it) {
    const SpectralDecomposition sf = detail::jacobi_eigen(contract_second(c, run.g));
    run.f = sf.min_eigenvector();
    const SpectralDecomposition sg = detail::jacobi_eigen(contract_first(c, run.f));
    run.g = sg.min_eigenvector();
    // The new g is an eigenvector of N(f), so its eigenvalue is the objective.
    const double value = sg.min_eigenvalue();
    run.iterations = it + 1;
    if (keep_history) run.history.push_back(sg.min_eigenvalue());
    if (prev - value <= cfg.inner_tol * std::max(1.0, std::abs(value))) break;
    prev = value;
  }
  run.value = product_expectation(c, run.f, run.g);
  return run;
}

struct ProductMinimum {
  double value = std::numeric_limits<double>::infinity();
  ComplexVector f, g;
  int starts_used = 0;
  int iterations = 0;
  int best_start = -1;
};

namespace detail {
inline constexpr std::uint64_t stream_seesaw = 1;
inline constexpr std::uint64_t stream_schmidt = 2;
inline constexpr std::uint64_t stream_fit = 3;
inline constexpr std::uint64_t stream_gallery = 4;
inline constexpr std::uint64_t stream_dual = 5;
}  // namespace detail

/// Multi-start see-saw: min over starts of <f (x) g|C|f (x) g>.
inline ProductMinimum seesaw_min_product(const BipartiteOperator& c, const SolverConfig& cfg) {
  cfg.validate();
  const Deadline deadline(cfg.budget_ms);
  auto runs = detail::run_indexed<SeesawRun>(cfg.starts, cfg.threads, deadline, [&](int s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, detail::stream_seesaw, static_cast<std::uint64_t>(s)));
    return seesaw_from(c, random_unit_vector(rng, c.dim_b()), cfg);
  });
  ProductMinimum best;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    if (!runs[s]) continue;
    ++best.starts_used;
    best.iterations += runs[s]->iterations;
    if (runs[s]->value < best.value) {
      best.value = runs[s]->value;
      best.f = runs[s]->f;
      best.g = runs[s]->g;
      best.best_start = static_cast<int>(s);
    }
  }
  return best;
}

/// Real mesh directions: basis vectors and cos(t) e_p + sin(t) e_q for every
/// coordinate pair p < q, t on `points` equally spaced angles in [0, pi).
inline std::vector<ComplexVector> mesh_directions(Eigen::Index d, int points) {
  std::vector<ComplexVector> out;
  for (Eigen::Index p = 0; p < d; ++p) out.push_back(ComplexVector::Unit(d, p));
  const double pi = std::acos(-1.0);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = p + 1; q < d; ++q)
      for (int t = 1; t < points; ++t) {
        const double theta = pi * t / points;
        ComplexVector v = ComplexVector::Zero(d);
        v(p) = std::cos(theta);
        v(q) = std::sin(theta);
        out.push_back(std::move(v));
      }
  return out;
}

/// Deterministic grid pass over product mesh points; the best few are
/// polished by see-saw descent.
inline ProductMinimum mesh_min_product(const BipartiteOperator& c, const SolverConfig& cfg,
                                       int polish = 4) {
  ProductMinimum best;
  if (cfg.mesh_points <= 0) return best;
  const auto fs = mesh_directions(c.dim_a(), cfg.mesh_points);
  const auto gs = mesh_directions(c.dim_b(), cfg.mesh_points);
  struct Point {
    double value;
    std::size_t fi, gi;
  };
  std::vector<Point> points;
  points.reserve(fs.size() * gs.size());
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const ComplexMatrix n = contract_first(c, fs[fi]);
    for (std::size_t gi = 0; gi < gs.size(); ++gi)
      points.push_back({expectation(n, gs[gi]), fi, gi});
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(polish, 1)), points.size());
  std::partial_sort(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(keep), points.end(),
                    [](const Point& x, const Point& y) {
                      return x.value < y.value || (x.value == y.value && (x.fi < y.fi || (x.fi == y.fi && x.gi < y.gi)));
                    });
  best.starts_used = static_cast<int>(points.size());
  for (std::size_t r = 0; r < keep; ++r) {
    const Point& p = points[r];
    if (p.value < best.value) {
      best.value = p.value;
      best.f = fs[p.fi];
      best.g = gs[p.gi];
    }
    SeesawRun run = seesaw_from(c, gs[p.gi], cfg);
    best.iterations += run.iterations;
    if (run.value < best.value) {
      best.value = run.value;
      best.f = run.f;
      best.g = run.g;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Schmidt-rank-k minimisation

struct SchmidtMinimum {
  double value = std::numeric_limits<double>::infinity();
  ComplexVector psi;
  int k = 1;
  int starts_used = 0;
  int iterations = 0;
};

namespace detail {

// Columns l*da + i hold e_i (x) g_l.
inline ComplexMatrix left_embedding(const ComplexMatrix& gs, Eigen::Index da) {
  const Eigen::Index db = gs.rows(), k = gs.cols();
  ComplexMatrix e = ComplexMatrix::Zero(da * db, da * k);
  for (Eigen::Index l = 0; l < k; ++l)
    for (Eigen::Index i = 0; i < da; ++i) e.block(i * db, l * da + i, db, 1) = gs.col(l);
  return e;
}

// Columns l*db + j hold f_l (x) e_j.
inline ComplexMatrix right_embedding(const ComplexMatrix& fs, Eigen::Index db) {
  const Eigen::Index da = fs.rows(), k = fs.cols();
  ComplexMatrix e = ComplexMatrix::Zero(da * db, db * k);
  for (Eigen::Index l = 0; l < k; ++l)
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < db; ++j) e(i * db + j, l * db + j) = fs(i, l);
  return e;
}

// k orthonormal vectors spanning (at least) the column space of the
// coefficient matrix of psi on the requested side.
inline ComplexMatrix schmidt_span(const ComplexVector& psi, Eigen::Index da, Eigen::Index db,
                                  Eigen::Index k, bool first_factor) {
  ComplexMatrix coeff(da, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < db; ++j) coeff(i, j) = psi(i * db + j);
  const ComplexMatrix gram = first_factor ? ComplexMatrix(coeff * coeff.adjoint())
                                          : ComplexMatrix(coeff.transpose() * coeff.conjugate());
  const SpectralDecomposition sd = jacobi_eigen(0.5 * (gram + gram.adjoint()));
  return sd.eigenvectors.leftCols(k);
}

inline ComplexMatrix orthonormal_columns(ComplexMatrix m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < c; ++p) m.col(c) -= m.col(p).dot(m.col(c)) * m.col(p);
    m.col(c).normalize();
  }
  return m;
}

}  // namespace detail

struct SchmidtRun {
  double value = std::numeric_limits<double>::infinity();
  ComplexVector psi;
  int iterations = 0;
  std::vector<double> history;
};

/// One block-alternating descent over Schmidt-rank-k vectors starting from
/// k vectors on the second factor.
inline SchmidtRun schmidt_from(const BipartiteOperator& c, Eigen::Index k, ComplexMatrix g0,
                               const SolverConfig& cfg, bool keep_history = false) {
  const Eigen::Index da = c.dim_a(), db = c.dim_b();
  SchmidtRun run;
  ComplexMatrix gs = detail::orthonormal_columns(std::move(g0));
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.seesaw_max_iters; ++it) {
    const ComplexMatrix left = detail::left_embedding(gs, da);
    const ComplexMatrix hf = left.adjoint() * c.matrix() * left;
    const SpectralDecomposition sf = detail::jacobi_eigen(0.5 * (hf + hf.adjoint()));
    ComplexVector psi = left * sf.min_eigenvector();

    const ComplexMatrix fs = detail::schmidt_span(psi, da, db, k, true);
    const ComplexMatrix right = detail::right_embedding(fs, db);
    const ComplexMatrix hg = right.adjoint() * c.matrix() * right;
    const SpectralDecomposition sg = detail::jacobi_eigen(0.5 * (hg + hg.adjoint()));
    psi = right * sg.min_eigenvector();
    psi.normalize();
    gs = detail::schmidt_span(psi, da, db, k, false);

    const double value = std::min(sg.min_eigenvalue(), sf.min_eigenvalue());
    run.psi = std::move(psi);
    run.iterations = it + 1;
    if (keep_history) run.history.push_back(sg.min_eigenvalue());
    if (prev - value <= cfg.inner_tol * std::max(1.0, std::abs(value))) break;
    prev = value;
  }
  run.value = expectation(c.matrix(), run.psi);
  return run;
}

/// Min of <psi|C|psi> over unit psi of Schmidt rank <= k (multi-start).
inline SchmidtMinimum min_schmidt_k(const BipartiteOperator& c, int k, const SolverConfig& cfg) {
  cfg.validate();
  if (k < 1 || k > std::min(c.dim_a(), c.dim_b()))
    throw InvalidK("min_schmidt_k: k = " + std::to_string(k) + " outside [1, " +
                   std::to_string(std::min(c.dim_a(), c.dim_b())) + "]");
  const Deadline deadline(cfg.budget_ms);
  auto runs = detail::run_indexed<SchmidtRun>(cfg.starts, cfg.threads, deadline, [&](int s) {
    std::mt19937_64 rng(derive_seed(cfg.seed, detail::stream_seesaw, static_cast<std::uint64_t>(s)));
    ComplexMatrix g0(c.dim_b(), k);
    for (int l = 0; l < k; ++l) g0.col(l) = random_unit_vector(rng, c.dim_b());
    return schmidt_from(c, k, std::move(g0), cfg);
  });
  SchmidtMinimum best;
  best.k = k;
  for (const auto& run : runs) {
    if (!run) continue;
    ++best.starts_used;
    best.iterations += run->iterations;
    if (run->value < best.value) {
      best.value = run->value;
      best.psi = run->psi;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// nonnegative least squares (Lawson-Hanson active set)

inline RealVector nnls(const Eigen::MatrixXd& a, const RealVector& b, int max_iter = 0) {
  const Eigen::Index n = a.cols();
  RealVector x = RealVector::Zero(n);
  if (n == 0) return x;
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, a.cwiseAbs().colwise().sum().maxCoeff()) *
                     static_cast<double>(std::max(a.rows(), n));

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) ap.col(static_cast<Eigen::Index>(t)) = a.col(idx[t]);
    const RealVector zp = ap.colPivHouseholderQr().solve(b);
    RealVector z = RealVector::Zero(n);
    for (std::size_t t = 0; t < idx.size(); ++t) z(idx[t]) = zp(static_cast<Eigen::Index>(t));
    return z;
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    const RealVector w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      RealVector z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0)
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// separable fitting

struct ProductTerm {
  double weight = 0.0;
  ComplexVector f, g;
};

struct SeparableFit {
  bool success = false;
  std::vector<ProductTerm> terms;
  double residual = 0.0;
  int rounds = 0;
  int iterations = 0;
};

namespace detail {

// Frobenius-isometric real coordinates of a complex matrix.
inline RealVector real_coords(const ComplexMatrix& m) {
  RealVector out(2 * m.size());
  for (Eigen::Index t = 0; t < m.size(); ++t) {
    out(2 * t) = m.data()[t].real();
    out(2 * t + 1) = m.data()[t].imag();
  }
  return out;
}

inline ComplexMatrix product_projector(const ComplexVector& f, const ComplexVector& g) {
  const ComplexVector v = kron_vector(f, g);
  return v * v.adjoint();
}

inline ComplexMatrix decomposition_sum(const std::vector<ProductTerm>& terms, Eigen::Index d) {
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const ProductTerm& t : terms) sum += t.weight * product_projector(t.f, t.g);
  return sum;
}

// Joint Levenberg-Marquardt on unnormalised factors u_t = a_t (x) b_t of
// |X - sum u_t u_t^+|_F. The greedy rounds alone converge sublinearly.
inline std::vector<ProductTerm> product_polish(const ComplexMatrix& x, const std::vector<ProductTerm>& terms,
                                               Eigen::Index da, Eigen::Index db, double target,
                                               int max_iters = 100) {
  const Eigen::Index r = static_cast<Eigen::Index>(terms.size()), per = da + db;
  if (r == 0) return terms;
  RealVector z0(2 * r * per);
  std::vector<Complex> coeffs(static_cast<std::size_t>(r * per));
  for (Eigen::Index t = 0; t < r; ++t) {
    const double s = std::pow(std::max(terms[t].weight, 0.0), 0.25);
    for (Eigen::Index i = 0; i < da; ++i) coeffs[t * per + i] = s * terms[t].f(i);
    for (Eigen::Index k = 0; k < db; ++k) coeffs[t * per + da + k] = s * terms[t].g(k);
  }
  auto vec = [&](const std::vector<Complex>& z, Eigen::Index t, bool first) {
    const Eigen::Index n = first ? da : db, off = t * per + (first ? 0 : da);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = z[off + i];
    return v;
  };
  auto residual_of = [&](const std::vector<Complex>& z) {
    ComplexMatrix res = x;
    for (Eigen::Index t = 0; t < r; ++t) {
      const ComplexVector u = kron_vector(vec(z, t, true), vec(z, t, false));
      res.noalias() -= u * u.adjoint();
    }
    return res;
  };

  ComplexMatrix res = residual_of(coeffs);
  double cost = res.squaredNorm();
  double damping = 1e-3;
  const Eigen::Index nvar = 2 * r * per;
  for (int it = 0; it < max_iters && std::sqrt(cost) > target; ++it) {
    Eigen::MatrixXd jac(2 * x.size(), nvar);
    for (Eigen::Index t = 0; t < r; ++t) {
      const ComplexVector a = vec(coeffs, t, true), b = vec(coeffs, t, false);
      const ComplexVector u = kron_vector(a, b);
      for (Eigen::Index e = 0; e < per; ++e) {
        for (int part = 0; part < 2; ++part) {
          const Complex z = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
          ComplexVector du;
          if (e < da) {
            ComplexVector ea = ComplexVector::Zero(da);
            ea(e) = z;
            du = kron_vector(ea, b);
          } else {
            ComplexVector eb = ComplexVector::Zero(db);
            eb(e - da) = z;
            du = kron_vector(a, eb);
          }
          const ComplexMatrix dm = du * u.adjoint() + u * du.adjoint();
          jac.col(2 * (t * per + e) + part) = real_coords(ComplexMatrix(-dm));
        }
      }
    }
    const RealVector rv = real_coords(res);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const RealVector jtr = jac.transpose() * rv;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += damping * (1.0 + jtj.diagonal().array());
      const RealVector step = lhs.ldlt().solve(-jtr);
      std::vector<Complex> trial = coeffs;
      for (Eigen::Index t = 0; t < r * per; ++t) trial[t] += Complex(step(2 * t), step(2 * t + 1));
      const ComplexMatrix res2 = residual_of(trial);
      const double cost2 = res2.squaredNorm();
      if (cost2 < cost) {
        coeffs = std::move(trial);
        res = res2;
        cost = cost2;
        damping = std::max(1e-12, damping / 3.0);
        improved = true;
      } else {
        damping *= 4.0;
      }
    }
    if (!improved) break;
  }

  std::vector<ProductTerm> out;
  for (Eigen::Index t = 0; t < r; ++t) {
    const ComplexVector a = vec(coeffs, t, true), b = vec(coeffs, t, false);
    const double na = a.norm(), nb = b.norm();
    if (!(na * nb > 0.0)) continue;
    out.push_back({na * na * nb * nb, ComplexVector(a / na), ComplexVector(b / nb)});
  }
  return out;
}

}  // namespace detail

/// Greedy product-state fit X ~ sum_t w_t |f_t g_t><f_t g_t| with w_t >= 0.
/// Each round adds the product vectors maximising <fg|R|fg> on the residual R
/// (see-saw on -R) and refits every weight by NNLS.
inline SeparableFit separable_fit(const BipartiteOperator& x, int r_max, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = x.dim();
  const SpectralDecomposition sd = herm_eig(x.hermitian());
  if (sd.min_eigenvalue() < -cfg.feas_tol * std::max(1.0, sd.spectral_norm()))
    throw std::domain_error("separable_fit: input is not positive semidefinite");

  SeparableFit fit;
  const double target = cfg.feas_tol * detail::bipartite_scale(x.matrix());
  const RealVector b = detail::real_coords(x.matrix());
  fit.residual = x.matrix().norm();
  if (fit.residual <= target) {
    fit.success = true;
    return fit;
  }

  std::vector<ProductTerm> pool;
  const Deadline deadline(cfg.budget_ms);
  ComplexMatrix residual = x.matrix();
  SolverConfig inner = cfg;
  inner.starts = cfg.fit_starts;
  inner.threads = 1;
  inner.budget_ms.reset();
  auto try_polish = [&] {
    std::vector<ProductTerm> polished = detail::product_polish(x.matrix(), pool, x.dim_a(), x.dim_b(), 0.5 * target);
    const double r = (x.matrix() - detail::decomposition_sum(polished, d)).norm();
    if (r > target) return false;
    pool = std::move(polished);
    residual = x.matrix() - detail::decomposition_sum(pool, d);
    fit.residual = r;
    return true;
  };
  for (int round = 0; round < r_max; ++round) {
    if (deadline.expired()) break;
    fit.rounds = round + 1;
    const BipartiteOperator neg(x.dim_a(), x.dim_b(), ComplexMatrix(-residual));
    bool added = false;
    for (int s = 0; s < inner.starts; ++s) {
      std::mt19937_64 rng(derive_seed(cfg.seed, detail::stream_fit,
                                      static_cast<std::uint64_t>(round) * 1024u + static_cast<std::uint64_t>(s)));
      SeesawRun run = seesaw_from(neg, random_unit_vector(rng, x.dim_b()), inner);
      fit.iterations += run.iterations;
      if (run.value < -1e-14 * std::max(1.0, residual.norm())) {
        pool.push_back({0.0, run.f, run.g});
        added = true;
      }
    }
    // No product direction improves the fit: only the joint polish can help.
    if (!added) {
      fit.success = try_polish();
      break;
    }

    Eigen::MatrixXd a(b.size(), static_cast<Eigen::Index>(pool.size()));
    for (std::size_t t = 0; t < pool.size(); ++t)
      a.col(static_cast<Eigen::Index>(t)) = detail::real_coords(detail::product_projector(pool[t].f, pool[t].g));
    const RealVector w = nnls(a, b);
    std::vector<ProductTerm> kept;
    for (std::size_t t = 0; t < pool.size(); ++t)
      if (w(static_cast<Eigen::Index>(t)) > 0.0) kept.push_back({w(static_cast<Eigen::Index>(t)), pool[t].f, pool[t].g});
    pool = std::move(kept);
    residual = x.matrix() - detail::decomposition_sum(pool, d);
    fit.residual = residual.norm();
    if (fit.residual <= target || ((round % 4 == 3 || round + 1 == r_max) && try_polish())) {
      fit.success = true;
      break;
    }
  }
  fit.terms = std::move(pool);
  return fit;
}

// ---------------------------------------------------------------------------
// decomposability split

struct Split {
  HermitianMatrix a;  // CP part of the Choi matrix
  HermitianMatrix b;  // Choi matrix of t∘(co-CP part); C = A + PT(B)
  double residual = 0.0;
};

struct Witness {
  BipartiteOperator rho;
  double pairing_value = 0.0;
};

struct Undecided {
  double residual = 0.0;
};

struct SplitResult {
  std::variant<Split, Witness, Undecided> outcome;
  int primal_iterations = 0;
  int dual_iterations = 0;
  bool primal_stalled = false;
};

namespace detail {

inline ComplexMatrix project_ppt_slice(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db) {
  return partial_transpose_matrix(psd_project_matrix(partial_transpose_matrix(x, da, db, Slot::second)),
                                  da, db, Slot::second);
}

// Projection onto {Tr rho = 1, Tr(C rho) <= -eps}.
inline ComplexMatrix project_trace_halfspace(const ComplexMatrix& x, const ComplexMatrix& c,
                                             const ComplexMatrix& c_perp, double c_perp_sq,
                                             double eps) {
  const auto d = static_cast<double>(x.rows());
  ComplexMatrix y = x + ((1.0 - x.trace().real()) / d) * ComplexMatrix::Identity(x.rows(), x.cols());
  const double value = trace_product(c, y).real();
  if (value <= -eps || c_perp_sq <= 0.0) return y;
  const double shift = (value + eps) / c_perp_sq;
  return y - shift * c_perp;
}

// Make a near-feasible point exactly PSD and PPT with unit trace.
inline std::optional<ComplexMatrix> repair_ppt_state(const ComplexMatrix& x, Eigen::Index da,
                                                     Eigen::Index db) {
  ComplexMatrix rho = psd_project_matrix(x);
  const SpectralDecomposition pt =
      jacobi_eigen(partial_transpose_matrix(rho, da, db, Slot::second));
  const double mu = std::max(0.0, -pt.min_eigenvalue());
  rho += mu * ComplexMatrix::Identity(rho.rows(), rho.cols());
  const double tr = rho.trace().real();
  if (!(tr > 1e-14)) return std::nullopt;
  rho /= tr;
  return ComplexMatrix(0.5 * (rho + rho.adjoint()));
}

// Factored refinement A = P P^+, B = Q Q^+ by Levenberg-Marquardt on
// |C - P P^+ - PT(Q Q^+)|_F, with the column counts of P and Q taken from the
// eigenvalues of the iterate above rel_cut. Alternating projections crawl
// when the split sits on a low-rank face; the factored problem converges fast.
inline std::optional<std::pair<ComplexMatrix, ComplexMatrix>> face_polish(const ComplexMatrix& c,
                                                                          const ComplexMatrix& a,
                                                                          const ComplexMatrix& b,
                                                                          Eigen::Index da, Eigen::Index db,
                                                                          double rel_cut, double target,
                                                                          int max_iters = 100) {
  const SpectralDecomposition ea = jacobi_eigen(a);
  const SpectralDecomposition eb = jacobi_eigen(b);
  const double top = std::max({0.0, ea.max_eigenvalue(), eb.max_eigenvalue()});
  if (!(top > 0.0)) return std::nullopt;
  auto factor = [&](const SpectralDecomposition& e) {
    Eigen::Index r = 0;
    while (r < e.eigenvalues.size() && e.eigenvalues(r) > rel_cut * top) ++r;
    ComplexMatrix f = e.eigenvectors.leftCols(r);
    for (Eigen::Index k = 0; k < r; ++k) f.col(k) *= std::sqrt(e.eigenvalues(k));
    return f;
  };
  ComplexMatrix p = factor(ea), q = factor(eb);
  const Eigen::Index d = c.rows(), rp = p.cols(), rq = q.cols();
  const Eigen::Index np = d * rp, nvar = 2 * (np + d * rq);
  if (nvar == 0) return std::nullopt;

  auto pt = [&](const ComplexMatrix& m) { return partial_transpose_matrix(m, da, db, Slot::second); };
  auto residual_of = [&](const ComplexMatrix& pp, const ComplexMatrix& qq) {
    return ComplexMatrix(c - pp * pp.adjoint() - pt(ComplexMatrix(qq * qq.adjoint())));
  };
  auto perturbed = [&](const RealVector& step, ComplexMatrix& pp, ComplexMatrix& qq) {
    for (Eigen::Index t = 0; t < np + d * rq; ++t) {
      const Complex z(step(2 * t), step(2 * t + 1));
      if (t < np)
        pp.data()[t] += z;
      else
        qq.data()[t - np] += z;
    }
  };

  ComplexMatrix r = residual_of(p, q);
  double cost = r.squaredNorm();
  double damping = 1e-3;
  const ComplexMatrix zero = ComplexMatrix::Zero(d, d);
  for (int it = 0; it < max_iters && std::sqrt(cost) > target; ++it) {
    // Column for a unit step z in one factor entry: -(E F^+ + F E^+), PT'd for Q.
    Eigen::MatrixXd jac(2 * c.size(), nvar);
    for (Eigen::Index t = 0; t < np + d * rq; ++t) {
      const bool in_p = t < np;
      const ComplexMatrix& f = in_p ? p : q;
      const Eigen::Index idx = in_p ? t : t - np;
      const Eigen::Index row = idx % d, col = idx / d;
      for (int part = 0; part < 2; ++part) {
        const Complex z = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
        ComplexMatrix dm = zero;
        dm.row(row) += z * f.col(col).adjoint();
        dm.col(row) += std::conj(z) * f.col(col);
        if (!in_p) dm = pt(dm);
        jac.col(2 * t + part) = real_coords(ComplexMatrix(-dm));
      }
    }
    const RealVector rv = real_coords(r);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const RealVector jtr = jac.transpose() * rv;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += damping * (1.0 + jtj.diagonal().array());
      const RealVector step = lhs.ldlt().solve(-jtr);
      ComplexMatrix p2 = p, q2 = q;
      perturbed(step, p2, q2);
      const ComplexMatrix r2 = residual_of(p2, q2);
      const double cost2 = r2.squaredNorm();
      if (cost2 < cost) {
        p = std::move(p2);
        q = std::move(q2);
        r = r2;
        cost = cost2;
        damping = std::max(1e-12, damping / 3.0);
        improved = true;
      } else {
        damping *= 4.0;
      }
    }
    if (!improved) break;
  }
  ComplexMatrix new_a = p * p.adjoint(), new_b = q * q.adjoint();
  new_a = 0.5 * (new_a + new_a.adjoint());
  new_b = 0.5 * (new_b + new_b.adjoint());
  return std::make_pair(std::move(new_a), std::move(new_b));
}

}  // namespace detail

/// Searches for C = A + PT(B) with A, B PSD (primal) and, if the primal
/// stalls, for a PPT state rho with Tr(C rho) < 0 (dual).
inline SplitResult decomposability_split(const BipartiteOperator& c, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index da = c.dim_a(), db = c.dim_b(), d = c.dim();
  const ComplexMatrix& cm = c.matrix();
  const double scale = detail::bipartite_scale(cm);
  const double target = cfg.feas_tol * scale;
  const Deadline deadline(cfg.budget_ms);
  SplitResult out;

  auto pt = [&](const ComplexMatrix& m) { return partial_transpose_matrix(m, da, db, Slot::second); };

  // Cone shortcuts: C itself or PT(C) positive semidefinite.
  {
    const ComplexMatrix a = psd_project_matrix(cm);
    const double r = (cm - a).norm();
    if (r <= target) {
      out.outcome = Split{HermitianMatrix(a), HermitianMatrix::zero(d), r};
      return out;
    }
    const ComplexMatrix b = psd_project_matrix(pt(cm));
    const double rb = (cm - pt(b)).norm();
    if (rb <= target) {
      out.outcome = Split{HermitianMatrix::zero(d), HermitianMatrix(b), rb};
      return out;
    }
  }

  const int polish_every = 500;
  auto try_polish = [&](const ComplexMatrix& a0, const ComplexMatrix& b0) -> std::optional<Split> {
    for (const double cut : {1e-2, 1e-1, 1e-3, 1e-5}) {
      const auto ab = detail::face_polish(cm, a0, b0, da, db, cut, 0.5 * target);
      if (!ab) continue;
      const double r = (cm - ab->first - pt(ab->second)).norm();
      if (r <= target) return Split{HermitianMatrix(ab->first), HermitianMatrix(ab->second), r};
    }
    return std::nullopt;
  };

  ComplexMatrix a = 0.5 * cm;
  ComplexMatrix b = 0.5 * pt(cm);
  double residual = std::numeric_limits<double>::infinity();
  double window_start = residual;
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    a = psd_project_matrix(a);
    b = psd_project_matrix(b);
    const ComplexMatrix delta = cm - a - pt(b);
    residual = delta.norm();
    out.primal_iterations = it;
    if (residual <= target) {
      out.outcome = Split{HermitianMatrix(a), HermitianMatrix(b), residual};
      return out;
    }
    if (it % polish_every == 0 || it == cfg.max_outer_iters) {
      if (auto s = try_polish(a, b)) {
        out.outcome = std::move(*s);
        return out;
      }
    }
    if (it % cfg.stall_window == 0) {
      if (window_start - residual < cfg.stall_decrease * scale) {
        if (auto s = try_polish(a, b)) {
          out.outcome = std::move(*s);
          return out;
        }
        out.primal_stalled = true;
        break;
      }
      window_start = residual;
    }
    if (deadline.expired()) break;
    a += 0.5 * delta;
    b += 0.5 * pt(delta);
  }
  const double primal_residual = residual;

  // Dual phase. A product vector with negative expectation is already a PPT witness.
  SolverConfig probe = cfg;
  probe.starts = std::min(cfg.starts, 50);
  probe.seed = derive_seed(cfg.seed, detail::stream_dual, 0);
  const ProductMinimum pm = seesaw_min_product(c, probe);
  out.dual_iterations += pm.iterations;
  if (pm.value < -target) {
    const ComplexVector v = kron_vector(pm.f, pm.g);
    Witness w{BipartiteOperator(da, db, ComplexMatrix(v * v.adjoint())), 0.0};
    w.pairing_value = pairing(c.hermitian(), w.rho.hermitian());
    out.outcome = std::move(w);
    return out;
  }

  const ComplexMatrix identity = ComplexMatrix::Identity(d, d);
  const ComplexMatrix c_perp = cm - (cm.trace().real() / static_cast<double>(d)) * identity;
  const double c_perp_sq = c_perp.squaredNorm();
  std::optional<Witness> best;
  double lo = 0.0, hi = cm.norm();
  for (int step = 0; step < cfg.bisection_steps && !deadline.expired(); ++step) {
    const double eps = 0.5 * (lo + hi);
    const std::vector<Projector<ComplexMatrix>> sets = {
        [](const ComplexMatrix& x) { return psd_project_matrix(x); },
        [&](const ComplexMatrix& x) { return detail::project_ppt_slice(x, da, db); },
        [&](const ComplexMatrix& x) {
          return detail::project_trace_halfspace(x, cm, c_perp, c_perp_sq, eps);
        },
    };
    DykstraOptions opt;
    opt.max_iters = cfg.dykstra_max_iters;
    opt.tol = cfg.feas_tol;
    opt.check_every = 5;
    opt.deadline = deadline;
    const auto res = dykstra<ComplexMatrix>(sets, identity / static_cast<double>(d), opt);
    out.dual_iterations += res.iterations;
    if (!res.converged) {
      hi = eps;
      continue;
    }
    lo = eps;
    if (const auto rho = detail::repair_ppt_state(res.point, da, db)) {
      const BipartiteOperator state(da, db, *rho);
      const double value = pairing(c.hermitian(), state.hermitian());
      if (value <= -cfg.feas_tol && (!best || value < best->pairing_value))
        best = Witness{state, value};
    }
  }
  if (best) {
    out.outcome = std::move(*best);
    return out;
  }
  out.outcome = Undecided{primal_residual};
  return out;
}

}  // namespace posmap

#endif  // POSMAP_SOLVER_HPP

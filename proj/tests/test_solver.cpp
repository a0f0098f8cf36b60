#include "posmap/cones.hpp"
#include "posmap/gallery.hpp"
#include "posmap/solver.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace posmap;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const ComplexMatrix g = detail::random_complex_matrix(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

SolverConfig quick(int starts = 30) {
  SolverConfig c;
  c.starts = starts;
  return c;
}

BipartiteOperator diag4(double a, double b, double c, double d) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = a, m(1, 1) = b, m(2, 2) = c, m(3, 3) = d;
  return BipartiteOperator(2, 2, m);
}

}  // namespace

TEST(Config, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.starts = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.feas_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Seeds, CounterBasedDerivation) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(0, 1, 0), derive_seed(1, 1, 0));
  std::mt19937_64 rng(1);
  EXPECT_NEAR(random_unit_vector(rng, 5).norm(), 1.0, 1e-14);
}

TEST(Dykstra, OverlappingHalfLines) {
  const std::vector<Projector<double>> sets = {[](const double& x) { return std::max(x, 0.0); },
                                               [](const double& x) { return std::min(x, 1.0); }};
  const auto res = dykstra<double>(sets, 5.0, DykstraOptions{});
  EXPECT_TRUE(res.converged);
  EXPECT_GE(res.point, -1e-8);
  EXPECT_LE(res.point, 1.0 + 1e-8);
}

TEST(Dykstra, DisjointHalfLines) {
  const std::vector<Projector<double>> sets = {[](const double& x) { return std::min(x, -1.0); },
                                               [](const double& x) { return std::max(x, 1.0); }};
  DykstraOptions opt;
  opt.max_iters = 200;
  const auto res = dykstra<double>(sets, 0.0, opt);
  EXPECT_FALSE(res.converged);
  EXPECT_NEAR(res.residual, 2.0, 1e-6);
}

// Oracle: eigenvalue clipping plus an affine trace shift, iterated independently.
TEST(Dykstra, PsdWithUnitTrace) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const std::vector<Projector<ComplexMatrix>> sets = {
        [](const ComplexMatrix& x) { return psd_project_matrix(x); },
        [](const ComplexMatrix& x) {
          const auto d = static_cast<double>(x.rows());
          return ComplexMatrix(x + ((1.0 - x.trace().real()) / d) * ComplexMatrix::Identity(x.rows(), x.cols()));
        }};
    DykstraOptions opt;
    opt.max_iters = 20000;
    const auto res = dykstra<ComplexMatrix>(sets, random_hermitian(rng, 4), opt);
    ASSERT_TRUE(res.converged);
    EXPECT_LE(res.residual, 1e-8);
    EXPECT_NEAR(res.point.trace().real(), 1.0, 1e-8);
    EXPECT_GE(herm_eig(ComplexMatrix(0.5 * (res.point + res.point.adjoint()))).min_eigenvalue(), -1e-8);
  }
}

TEST(Seesaw, Examples) {
  const BipartiteOperator id(2, 3, ComplexMatrix(ComplexMatrix::Identity(6, 6)));
  EXPECT_NEAR(seesaw_min_product(id, quick()).value, 1.0, 1e-12);
  const ProductMinimum d = seesaw_min_product(diag4(1, 1, 1, -1), quick());
  EXPECT_NEAR(d.value, -1.0, 1e-12);
  EXPECT_NEAR(std::abs(d.f(1)), 1.0, 1e-6);
  EXPECT_NEAR(std::abs(d.g(1)), 1.0, 1e-6);
  const BipartiteOperator sw(2, 2, swap_operator(2));
  EXPECT_NEAR(seesaw_min_product(sw, quick()).value, 0.0, 1e-9);
}

TEST(Seesaw, MonotoneWithinEveryStart) {
  std::mt19937_64 rng(3);
  SolverConfig cfg;
  for (int t = 0; t < 50; ++t) {
    const BipartiteOperator c(3, 3, random_hermitian(rng, 9));
    const SeesawRun run = seesaw_from(c, random_unit_vector(rng, 3), cfg, true);
    ASSERT_FALSE(run.history.empty());
    for (std::size_t i = 1; i < run.history.size(); ++i)
      ASSERT_LE(run.history[i], run.history[i - 1] + 1e-12 * std::max(1.0, std::abs(run.history[i - 1])));
    EXPECT_NEAR(run.value, product_expectation(c, run.f, run.g), 1e-12);
    EXPECT_GE(run.value, herm_eig(c.hermitian()).min_eigenvalue() - 1e-9);
  }
}

TEST(Seesaw, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const BipartiteOperator c(3, 3, random_hermitian(rng, 9));
    SolverConfig one = quick(64), four = quick(64);
    four.threads = 4;
    const ProductMinimum a = seesaw_min_product(c, one), b = seesaw_min_product(c, four);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.best_start, b.best_start);
    EXPECT_EQ(a.f, b.f);
    const SchmidtMinimum sa = min_schmidt_k(c, 2, one), sb = min_schmidt_k(c, 2, four);
    EXPECT_EQ(sa.value, sb.value);
  }
}

TEST(Mesh, FindsAxisAlignedMinimum) {
  SolverConfig cfg;
  cfg.mesh_points = 12;
  const ProductMinimum m = mesh_min_product(diag4(1, 1, 1, -1), cfg);
  EXPECT_NEAR(m.value, -1.0, 1e-12);
  const auto dirs = mesh_directions(3, 12);
  for (const auto& v : dirs) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}

TEST(Schmidt, Examples) {
  // Reduction map on M_2: Choi = I - 2|Omega><Omega|, spectrum (1, 1, 1, -1).
  const BipartiteOperator r = reduction_map(2).choi();
  EXPECT_NEAR(min_schmidt_k(r, 2, quick()).value, -1.0, 1e-8);
  EXPECT_NEAR(min_schmidt_k(r, 1, quick()).value, 0.0, 1e-8);
  const BipartiteOperator id(3, 3, ComplexMatrix(ComplexMatrix::Identity(9, 9)));
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(min_schmidt_k(id, k, quick()).value, 1.0, 1e-12);
  EXPECT_THROW(min_schmidt_k(id, 0, quick()), InvalidK);
  EXPECT_THROW(min_schmidt_k(id, 4, quick()), InvalidK);
}

TEST(Schmidt, RankOneMatchesSeesaw) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index da = 2 + t % 2, db = 2 + (t / 2) % 2;
    const BipartiteOperator c(da, db, random_hermitian(rng, da * db));
    const double a = min_schmidt_k(c, 1, quick()).value;
    const double b = seesaw_min_product(c, quick()).value;
    EXPECT_NEAR(a, b, 1e-8) << t;
  }
}

TEST(Schmidt, NestingAndFullRank) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const BipartiteOperator c(3, 3, random_hermitian(rng, 9));
    const SchmidtMinimum m1 = min_schmidt_k(c, 1, quick()), m2 = min_schmidt_k(c, 2, quick()),
                         m3 = min_schmidt_k(c, 3, quick());
    EXPECT_LE(m2.value, m1.value + 1e-9);
    EXPECT_LE(m3.value, m2.value + 1e-9);
    EXPECT_NEAR(m3.value, herm_eig(c.hermitian()).min_eigenvalue(), 1e-8);
    EXPECT_LE(schmidt_rank(m2.psi, 3, 3), 2);
    EXPECT_NEAR(m2.psi.norm(), 1.0, 1e-10);
  }
}

TEST(Schmidt, MonotoneHistory) {
  std::mt19937_64 rng(7);
  SolverConfig cfg;
  for (int t = 0; t < 20; ++t) {
    const BipartiteOperator c(3, 3, random_hermitian(rng, 9));
    ComplexMatrix g0(3, 2);
    g0.col(0) = random_unit_vector(rng, 3);
    g0.col(1) = random_unit_vector(rng, 3);
    const SchmidtRun run = schmidt_from(c, 2, g0, cfg, true);
    for (std::size_t i = 1; i < run.history.size(); ++i)
      ASSERT_LE(run.history[i], run.history[i - 1] + 1e-12 * std::max(1.0, std::abs(run.history[i - 1])));
  }
}

TEST(Nnls, SolvesNonnegativeLeastSquares) {
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 1, 1;
  RealVector b(3);
  b << 1, -1, 0;
  const RealVector x = nnls(a, b);
  EXPECT_GE(x.minCoeff(), 0.0);
  // unconstrained optimum has x_2 < 0; the constrained one is (0.5, 0)
  EXPECT_NEAR(x(0), 0.5, 1e-12);
  EXPECT_NEAR(x(1), 0.0, 1e-12);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(10, 4);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(rng);
  RealVector truth(4);
  truth << 0.3, 0.0, 1.2, 0.7;
  const RealVector y = nnls(m, m * truth);
  EXPECT_LT((y - truth).norm(), 1e-10);
}

TEST(SeparableFit, ProductState) {
  std::mt19937_64 rng(9);
  const ComplexVector u = random_unit_vector(rng, 2), v = random_unit_vector(rng, 3);
  const ComplexVector w = kron_vector(u, v);
  const BipartiteOperator x(2, 3, ComplexMatrix(w * w.adjoint()));
  const SeparableFit fit = separable_fit(x, 4, quick());
  ASSERT_TRUE(fit.success);
  ASSERT_EQ(fit.terms.size(), 1u);
  EXPECT_NEAR(fit.terms[0].weight, 1.0, 1e-8);
}

TEST(SeparableFit, WernerBelowThreshold) {
  const BipartiteOperator x = werner_state(0.2);
  SolverConfig cfg = quick();
  const SeparableFit fit = separable_fit(x, 16, cfg);
  ASSERT_TRUE(fit.success);
  EXPECT_LE(fit.terms.size(), 16u);
  double sum = 0.0;
  for (const ProductTerm& t : fit.terms) {
    EXPECT_GE(t.weight, 0.0);
    sum += t.weight;
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
  EXPECT_LE((x.matrix() - detail::decomposition_sum(fit.terms, 4)).norm(), 1e-6);
  EXPECT_TRUE(check_product_decomposition(x, ProductDecomposition{fit.terms, fit.residual}, cfg.feas_tol).ok);
}

TEST(SeparableFit, EntangledFails) {
  const ComplexVector w = max_entangled_vector(2);
  const BipartiteOperator x(2, 2, ComplexMatrix(w * w.adjoint()));
  const SeparableFit fit = separable_fit(x, 16, quick());
  EXPECT_FALSE(fit.success);
  EXPECT_GT(fit.residual, 1e-3);
}

TEST(SeparableFit, RejectsNonPsdInput) {
  EXPECT_THROW(separable_fit(diag4(1, 1, 1, -1), 4, quick()), std::domain_error);
}

TEST(Split, PsdInput) {
  std::mt19937_64 rng(10);
  const ComplexMatrix g = detail::random_complex_matrix(rng, 6, 6);
  const BipartiteOperator c(2, 3, ComplexMatrix(g * g.adjoint()));
  const SplitResult r = decomposability_split(c, quick());
  const auto& s = std::get<Split>(r.outcome);
  EXPECT_LT((s.a.matrix() - c.matrix()).norm(), 1e-9);
  EXPECT_LT(s.b.matrix().norm(), 1e-12);
}

TEST(Split, Swap) {
  const BipartiteOperator c(2, 2, swap_operator(2));
  const SplitResult r = decomposability_split(c, quick());
  const auto& s = std::get<Split>(r.outcome);
  const ComplexVector w = max_entangled_vector(2);
  EXPECT_LT(s.a.matrix().norm(), 1e-12);
  EXPECT_LT((s.b.matrix() - 2.0 * w * w.adjoint()).norm(), 1e-12);
}

TEST(Split, GenericDecomposable) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix ga = detail::random_complex_matrix(rng, 6, 2), gb = detail::random_complex_matrix(rng, 6, 2);
    const ComplexMatrix c =
        ga * ga.adjoint() + partial_transpose_matrix(ComplexMatrix(gb * gb.adjoint()), 2, 3, Slot::second);
    const BipartiteOperator x(2, 3, c);
    const SplitResult r = decomposability_split(x, SolverConfig{});
    ASSERT_TRUE(std::holds_alternative<Split>(r.outcome)) << t;
    const auto& s = std::get<Split>(r.outcome);
    EXPECT_TRUE(check_cone_split(x, ConeSplit{s.a, s.b, s.residual}, 1e-8).ok);
  }
}

TEST(Split, Choi3HasPptWitness) {
  SolverConfig cfg;
  const BipartiteOperator c = choi3_map().choi();
  const SplitResult r = decomposability_split(c, cfg);
  ASSERT_TRUE(std::holds_alternative<Witness>(r.outcome));
  const auto& w = std::get<Witness>(r.outcome);
  EXPECT_LE(w.pairing_value, -1e-3);
  // exact re-evaluation of the returned state
  EXPECT_NEAR(pairing(c.hermitian(), w.rho.hermitian()), w.pairing_value, 1e-12);
  EXPECT_TRUE(check_ppt_witness(c, PptWitnessState{w.rho, w.pairing_value}, cfg.feas_tol).ok);
}

TEST(Split, NonPositiveMapGetsProductWitness) {
  const BipartiteOperator c = diag4(1, 1, 1, -1);
  const SplitResult r = decomposability_split(c, quick());
  ASSERT_TRUE(std::holds_alternative<Witness>(r.outcome));
  EXPECT_NEAR(std::get<Witness>(r.outcome).pairing_value, -1.0, 1e-9);
}

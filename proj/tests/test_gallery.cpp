#include "posmap/classify.hpp"
#include "posmap/gallery.hpp"

#include <gtest/gtest.h>

using namespace posmap;

namespace {

double pt_min(const BipartiteOperator& x) { return herm_eig(partial_transpose(x).hermitian()).min_eigenvalue(); }

// Threshold where pred flips from true to false on [lo, hi].
template <class Pred>
double bisect(Pred pred, double lo, double hi, double width = 1e-7) {
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Catalog, EveryNameConstructs) {
  for (const std::string& name : gallery_catalog()) {
    Parameters p;
    if (name == "random_ppt") p = {{"n", 2}, {"m", 2}};
    const GalleryEntry e = make(name, p, 1);
    EXPECT_EQ(e.name, name);
    EXPECT_FALSE(e.provenance.empty());
  }
}

TEST(Make, Identity) {
  const GalleryEntry e = make("identity", {{"n", 2}});
  ASSERT_TRUE(e.is_map());
  const ComplexVector w = max_entangled_vector(2);
  EXPECT_LT((e.map().choi().matrix() - 2.0 * w * w.adjoint()).norm(), 1e-15);
}

TEST(Make, Choi3WithDeepChecks) {
  GalleryOptions opt;
  opt.deep_checks = true;
  const GalleryEntry e = make("choi3", {}, std::nullopt, opt);
  EXPECT_EQ(e.map().dim_in(), 3);
  SolverConfig cfg;
  cfg.starts = 500;
  EXPECT_GE(seesaw_min_product(e.map().choi(), cfg).value, -1e-9);
  EXPECT_LT(herm_eig(e.map().choi().hermitian()).min_eigenvalue(), -1e-9);
  EXPECT_NO_THROW(make("choi3_rev", {}, std::nullopt, opt));
}

TEST(Make, Choi3Entries) {
  const MapRepr c = choi3_map();
  ComplexMatrix x(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = Complex(i + 2 * j + 1, i - j);
  const ComplexMatrix y = posmap::apply(c, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Complex expect = i == j ? x(i, i) + x((i + 1) % 3, (i + 1) % 3) : -x(i, j);
      EXPECT_EQ(y(i, j), expect);
    }
  // choi3_rev uses the i - 1 direction
  const ComplexMatrix z = posmap::apply(choi3_map(2), x);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(z(i, i), x(i, i) + x((i + 2) % 3, (i + 2) % 3));
}

TEST(Make, WernerBoundary) {
  const GalleryEntry e = make("werner", {{"p", 1.0 / 3.0}});
  EXPECT_NEAR(pt_min(e.op()), 0.0, 1e-12);
  for (double p : {0.0, 0.2, 0.5, 0.9}) EXPECT_NEAR(pt_min(werner_state(p)), (1.0 - 3.0 * p) / 4.0, 1e-12);
  EXPECT_NEAR(werner_state(0.3).hermitian().trace(), 1.0, 1e-15);
}

TEST(Make, ErrorPaths) {
  EXPECT_THROW(make("nope"), UnknownName);
  EXPECT_THROW(make("identity", {{"n", 0}}), BadParameter);
  EXPECT_THROW(make("identity", {{"n", 2.5}}), BadParameter);
  EXPECT_THROW(make("identity", {{"q", 2}}), BadParameter);
  EXPECT_THROW(make("random_cp", {{"n", 2}, {"m", 2}, {"rank", 5}}), BadParameter);
  // out-of-range physics parameters only warn
  const GalleryEntry w = make("werner", {{"p", 1.5}});
  EXPECT_FALSE(w.warnings.empty());
  const GalleryEntry d = make("depolarizing", {{"lambda", -2.0}});
  EXPECT_FALSE(d.warnings.empty());
}

TEST(Make, RandomEntriesAreSeeded) {
  const GalleryEntry a = make("random_cp", {{"n", 3}, {"m", 3}, {"rank", 2}}, 7);
  const GalleryEntry b = make("random_cp", {{"n", 3}, {"m", 3}, {"rank", 2}}, 7);
  const GalleryEntry c = make("random_cp", {{"n", 3}, {"m", 3}, {"rank", 2}}, 8);
  EXPECT_EQ(a.map().choi().matrix(), b.map().choi().matrix());
  EXPECT_NE(a.map().choi().matrix(), c.map().choi().matrix());
  EXPECT_EQ(static_cast<int>(kraus_from_choi(a.map()).size()), 2);
}

TEST(Make, RandomPptIsPptState) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const BipartiteOperator rho = random_ppt_state(3, 3, s);
    EXPECT_NEAR(rho.hermitian().trace(), 1.0, 1e-12);
    EXPECT_GE(herm_eig(rho.hermitian()).min_eigenvalue(), -1e-12);
    EXPECT_GE(pt_min(rho), -1e-12);
  }
}

TEST(Make, RandomBlockPositiveIsPositive) {
  int nontrivial = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    int attempts = 0;
    const MapRepr t = random_block_positive_map(2, 3, s, &attempts);
    EXPECT_GE(attempts, 1);
    ConeConfig cfg;
    cfg.solver.starts = 100;
    EXPECT_TRUE(in_C_i(t.choi(), cfg).member());
    nontrivial += in_C_cp(t.choi()).not_member() && in_C_ccp(t.choi()).not_member();
  }
  EXPECT_GT(nontrivial, 0);
}

TEST(Gallery, Choi3Properties) {
  const MapRepr c = choi3_map();
  ClassifyConfig cfg;
  cfg.cone.solver.starts = 500;
  EXPECT_TRUE(is_positive(c, cfg).member());
  EXPECT_TRUE(is_cp(c).not_member());
  EXPECT_TRUE(is_co_cp(c).not_member());
  const Verdict d = is_decomposable(c, cfg);
  ASSERT_TRUE(d.not_member());
  EXPECT_TRUE(check_ppt_witness(c.choi(), std::get<PptWitnessState>(*d.certificate), 1e-8).ok);
}

TEST(Gallery, ReductionProperties) {
  for (Eigen::Index n = 2; n <= 3; ++n) {
    const MapRepr r = reduction_map(n);
    ClassifyConfig cfg;
    cfg.cone.solver.starts = 50;
    EXPECT_TRUE(is_positive(r, cfg).member());
    EXPECT_TRUE(is_k_positive(r, 2, cfg).not_member());
    EXPECT_TRUE(is_co_cp(r).member());
    EXPECT_TRUE(is_decomposable(r, cfg).member());
  }
}

TEST(Gallery, DepolarizingThresholds) {
  const double cp_flip =
      bisect([](double l) { return is_cp(depolarizing_map(2, l)).not_member(); }, -1.0, 0.0);
  EXPECT_NEAR(cp_flip, -1.0 / 3.0, 1e-6);
  const double ccp_flip =
      bisect([](double l) { return is_co_cp(depolarizing_map(2, l)).member(); }, 0.0, 1.0);
  EXPECT_NEAR(ccp_flip, 1.0 / 3.0, 1e-6);
  // closed-form spectra
  for (double l : {-0.5, 0.0, 0.4, 0.9}) {
    const SpectralDecomposition c = herm_eig(depolarizing_map(2, l).choi().hermitian());
    EXPECT_NEAR(c.max_eigenvalue(), std::max(2.0 * l + (1.0 - l) / 2.0, (1.0 - l) / 2.0), 1e-12);
    EXPECT_NEAR(c.min_eigenvalue(), std::min(2.0 * l + (1.0 - l) / 2.0, (1.0 - l) / 2.0), 1e-12);
    const SpectralDecomposition p = herm_eig(partial_transpose(depolarizing_map(2, l).choi()).hermitian());
    EXPECT_NEAR(p.min_eigenvalue(), std::min((1.0 - l) / 2.0 - l, (1.0 - l) / 2.0 + l), 1e-12);
  }
}

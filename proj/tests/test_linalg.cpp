#include "posmap/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace posmap;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  const ComplexMatrix g = random_matrix(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const ComplexMatrix g = random_matrix(rng, n, rank);
  return g * g.adjoint();
}

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(HermitianMatrix, SymmetrizesSmallDefects) {
  ComplexMatrix m = diag({1, 2});
  m(0, 1) = Complex(0.5, 1e-11);
  m(1, 0) = Complex(0.5, 0.0);
  const HermitianMatrix h(m);
  EXPECT_EQ(h.matrix(), h.matrix().adjoint());
}

TEST(HermitianMatrix, RejectsNonHermitian) {
  ComplexMatrix m = diag({1, 2});
  m(0, 1) = 1.0;
  EXPECT_THROW(HermitianMatrix{m}, NonHermitianInput);
  EXPECT_THROW(HermitianMatrix{ComplexMatrix(2, 3)}, NonHermitianInput);
  ComplexMatrix nan = diag({1, 2});
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(HermitianMatrix{nan}, NonHermitianInput);
}

TEST(BipartiteOperator, ChecksDimensions) {
  EXPECT_THROW(BipartiteOperator(2, 3, ComplexMatrix(ComplexMatrix::Identity(4, 4))), SizeMismatch);
  const BipartiteOperator x(2, 3, ComplexMatrix(ComplexMatrix::Identity(6, 6)));
  EXPECT_EQ(x.dim(), 6);
  // flat index i * dim_b + k
  EXPECT_EQ(x(1, 2, 1, 2), Complex(1.0));
}

TEST(HermEig, Examples) {
  EXPECT_LT((herm_eig(HermitianMatrix::identity(2)).eigenvalues - RealVector::Ones(2)).norm(), 1e-15);
  const SpectralDecomposition d = herm_eig(HermitianMatrix(diag({-1, 3})));
  EXPECT_NEAR(d.eigenvalues(0), 3.0, 1e-15);
  EXPECT_NEAR(d.eigenvalues(1), -1.0, 1e-15);
  const SpectralDecomposition s = herm_eig(HermitianMatrix(swap_operator(2)));
  RealVector expect(4);
  expect << 1, 1, 1, -1;
  EXPECT_LT((s.eigenvalues - expect).norm(), 1e-14);
}

TEST(HermEig, RejectsNonHermitianMatrix) {
  ComplexMatrix m = diag({1, 2});
  m(1, 0) = Complex(0.0, 1.0);
  EXPECT_THROW(herm_eig(m), NonHermitianInput);
}

// Reconstruction, orthonormality and agreement with Eigen's solver on 1000 matrices.
TEST(HermEig, RandomReconstruction) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> size(1, 16);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = size(rng);
    const ComplexMatrix h = random_hermitian(rng, n);
    const SpectralDecomposition sd = herm_eig(HermitianMatrix(h));
    const ComplexMatrix& v = sd.eigenvectors;
    const ComplexMatrix rec = v * sd.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
    ASSERT_LE((rec - h).norm(), 1e-10 * std::max(1.0, h.norm())) << "n=" << n;
    const ComplexMatrix gram = v.adjoint() * v;
    ASSERT_LE(max_diff(gram, ComplexMatrix::Identity(n, n)), 1e-10);
    for (Eigen::Index i = 1; i < n; ++i) ASSERT_GE(sd.eigenvalues(i - 1), sd.eigenvalues(i));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> oracle(h);
    ASSERT_LE((sd.eigenvalues.reverse() - oracle.eigenvalues()).norm(), 1e-10 * std::max(1.0, h.norm()));
  }
}

TEST(HermEig, DeterministicAndDegenerate) {
  std::mt19937_64 rng(3);
  const ComplexMatrix h = random_hermitian(rng, 9);
  const SpectralDecomposition a = herm_eig(HermitianMatrix(h));
  const SpectralDecomposition b = herm_eig(HermitianMatrix(h));
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
  // Highly degenerate spectrum: a projector of rank 3 in dimension 9.
  const ComplexMatrix g = random_matrix(rng, 9, 3);
  const ComplexMatrix q = g * (g.adjoint() * g).inverse() * g.adjoint();
  const SpectralDecomposition p = herm_eig(HermitianMatrix(ComplexMatrix(0.5 * (q + q.adjoint()))));
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(p.eigenvalues(i), i < 3 ? 1.0 : 0.0, 1e-12);
}

TEST(Kron, Examples) {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  EXPECT_EQ(kron(i2, i2).matrix(), ComplexMatrix(ComplexMatrix::Identity(4, 4)));
  EXPECT_EQ(kron(diag({1, 0}), diag({0, 1})).matrix(), diag({0, 1, 0, 0}));
}

TEST(Kron, EntryConventionAndPairingFactorizes) {
  std::mt19937_64 rng(5);
  const ComplexMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 3);
  const BipartiteOperator x = kron(a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) EXPECT_EQ(x(i, k, j, l), a(i, j) * b(k, l));
  for (int t = 0; t < 20; ++t) {
    const HermitianMatrix A(random_hermitian(rng, 2)), B(random_hermitian(rng, 2)), C(random_hermitian(rng, 2)),
        D(random_hermitian(rng, 2));
    const double lhs = pairing(kron(A, B), kron(C, D));
    EXPECT_NEAR(lhs, pairing(A, C) * pairing(B, D), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(PartialTranspose, Examples) {
  std::mt19937_64 rng(7);
  const ComplexMatrix a = random_hermitian(rng, 2), b = random_hermitian(rng, 3);
  EXPECT_LT(max_diff(partial_transpose(kron(a, b), Slot::second).matrix(), kron_matrix(a, b.transpose())), 1e-15);
  EXPECT_LT(max_diff(partial_transpose(kron(a, b), Slot::first).matrix(), kron_matrix(a.transpose(), b)), 1e-15);
  const ComplexVector omega = max_entangled_vector(2);
  const BipartiteOperator w(2, 2, ComplexMatrix(2.0 * omega * omega.adjoint()));
  EXPECT_LT(max_diff(partial_transpose(w).matrix(), swap_operator(2)), 1e-15);
}

TEST(PartialTranspose, IndexDefinition) {
  std::mt19937_64 rng(8);
  const BipartiteOperator x(2, 3, random_hermitian(rng, 6));
  const BipartiteOperator y = partial_transpose(x, Slot::second);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) EXPECT_EQ(y(i, k, j, l), x(i, l, j, k));
}

TEST(PartialTranspose, InvolutionTraceNormSelfAdjoint) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index da = 1 + t % 3, db = 1 + (t / 3) % 3;
    const BipartiteOperator x(da, db, random_hermitian(rng, da * db));
    const BipartiteOperator y(da, db, random_hermitian(rng, da * db));
    for (Slot s : {Slot::first, Slot::second}) {
      const BipartiteOperator px = partial_transpose(x, s);
      EXPECT_LT(max_diff(partial_transpose(px, s).matrix(), x.matrix()), 1e-15);
      EXPECT_LE(hermitian_defect(px.matrix()), 1e-15);
      EXPECT_NEAR(px.hermitian().trace(), x.hermitian().trace(), 1e-12);
      EXPECT_NEAR(px.matrix().norm(), x.matrix().norm(), 1e-12);
      EXPECT_NEAR(pairing(x, partial_transpose(y, s)), pairing(px, y), 1e-11);
    }
  }
}

TEST(PartialTrace, Examples) {
  std::mt19937_64 rng(10);
  const ComplexMatrix a = random_hermitian(rng, 3);
  EXPECT_LT(max_diff(partial_trace(kron(a, ComplexMatrix(ComplexMatrix::Identity(2, 2))), Slot::second).matrix(),
                     2.0 * a),
            1e-14);
  for (Eigen::Index n = 1; n <= 4; ++n) {
    const ComplexVector omega = max_entangled_vector(n);
    const BipartiteOperator w(n, n, ComplexMatrix(omega * omega.adjoint()));
    EXPECT_LT(max_diff(partial_trace(w, Slot::first).matrix(),
                       ComplexMatrix::Identity(n, n) / static_cast<double>(n)),
              1e-15);
  }
  const ComplexMatrix b = random_hermitian(rng, 2);
  EXPECT_LT(max_diff(partial_trace(kron(a, b), Slot::second).matrix(), b.trace() * a), 1e-13);
  for (int t = 0; t < 20; ++t) {
    const BipartiteOperator x(2, 3, random_hermitian(rng, 6));
    EXPECT_NEAR(partial_trace(x, Slot::second).trace(), x.hermitian().trace(), 1e-12);
    EXPECT_NEAR(partial_trace(x, Slot::first).trace(), x.hermitian().trace(), 1e-12);
  }
}

TEST(PsdProject, Examples) {
  EXPECT_LT(max_diff(psd_project(HermitianMatrix(diag({2, -3}))).matrix(), diag({2, 0})), 1e-15);
  std::mt19937_64 rng(12);
  const ComplexMatrix p = random_psd(rng, 5, 3);
  EXPECT_LT(max_diff(psd_project(HermitianMatrix(p)).matrix(), p), 1e-12);
  const ComplexMatrix sym = 0.5 * (ComplexMatrix::Identity(4, 4) + swap_operator(2));
  EXPECT_LT(max_diff(psd_project(HermitianMatrix(swap_operator(2))).matrix(), sym), 1e-14);
}

TEST(PsdProject, IdempotentAndOptimal) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const HermitianMatrix h(random_hermitian(rng, 4));
    const HermitianMatrix p = psd_project(h);
    EXPECT_LT(max_diff(psd_project(p).matrix(), p.matrix()), 1e-12);
    EXPECT_GE(herm_eig(p).min_eigenvalue(), -1e-12);
    const double best = (h.matrix() - p.matrix()).norm();
    for (int q = 0; q < 100; ++q) {
      const ComplexMatrix other = random_psd(rng, 4, 1 + q % 4) * 0.3;
      EXPECT_GE((h.matrix() - other).norm(), best - 1e-9);
    }
  }
}

TEST(Pairing, Examples) {
  EXPECT_DOUBLE_EQ(pairing(HermitianMatrix::identity(2), HermitianMatrix::identity(2)), 2.0);
  EXPECT_DOUBLE_EQ(pairing(HermitianMatrix(diag({1, 0})), HermitianMatrix(diag({0, 1}))), 0.0);
  EXPECT_THROW(pairing(HermitianMatrix::identity(2), HermitianMatrix::identity(3)), SizeMismatch);
  std::mt19937_64 rng(14);
  for (int t = 0; t < 100; ++t) {
    const HermitianMatrix a(random_psd(rng, 3, 1 + t % 3)), b(random_psd(rng, 3, 1 + (t / 3) % 3));
    EXPECT_GE(pairing(a, b), -1e-12);
    EXPECT_NEAR(pairing(a, b), pairing(b, a), 1e-12);
    EXPECT_NEAR(pairing(a, b), trace_product(a.matrix(), b.matrix()).real(), 1e-10);
  }
}

TEST(SchmidtCoefficients, MatchSingularValues) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 50; ++t) {
    ComplexVector psi = random_matrix(rng, 6, 1).col(0);
    psi.normalize();
    const RealVector s = schmidt_coefficients(psi, 2, 3);
    ComplexMatrix m(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 3; ++k) m(i, k) = psi(i * 3 + k);
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    ASSERT_EQ(s.size(), 2);
    EXPECT_NEAR(s(0), svd.singularValues()(0), 1e-12);
    EXPECT_NEAR(s(1), svd.singularValues()(1), 1e-12);
  }
}

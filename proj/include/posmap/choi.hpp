#ifndef POSMAP_CHOI_HPP
#define POSMAP_CHOI_HPP

// Linear maps M_n -> M_m represented by their Choi matrices
//   C_T = sum_ij e_ij (x) T(e_ij)      (input factor first)
// together with the Kraus and Jordan decompositions.

#include "posmap/linalg.hpp"

#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace posmap {

class NonlinearAction : public std::invalid_argument {
 public:
  explicit NonlinearAction(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by kraus_from_choi; carries the offending eigenpair.
class NotCompletelyPositive : public std::domain_error {
 public:
  NotCompletelyPositive(double eigenvalue, ComplexVector eigenvector)
      : std::domain_error("map is not completely positive (Choi eigenvalue " +
                          std::to_string(eigenvalue) + ")"),
        eigenvalue_(eigenvalue),
        eigenvector_(std::move(eigenvector)) {}

  double eigenvalue() const { return eigenvalue_; }
  const ComplexVector& eigenvector() const { return eigenvector_; }

 private:
  double eigenvalue_;
  ComplexVector eigenvector_;
};

/// Hermiticity-preserving linear map M_n -> M_m held as its Choi matrix.
class MapRepr {
 public:
  MapRepr() = default;
  explicit MapRepr(BipartiteOperator choi) : choi_(std::move(choi)) {}
  MapRepr(Eigen::Index n, Eigen::Index m, ComplexMatrix choi) : choi_(n, m, std::move(choi)) {}

  Eigen::Index dim_in() const { return choi_.dim_a(); }
  Eigen::Index dim_out() const { return choi_.dim_b(); }
  const BipartiteOperator& choi() const { return choi_; }

  /// T(e_ij), the (i, j) block of the Choi matrix.
  ComplexMatrix block(Eigen::Index i, Eigen::Index j) const {
    const Eigen::Index m = dim_out();
    return choi_.matrix().block(i * m, j * m, m, m);
  }

  MapRepr operator-() const { return MapRepr(dim_in(), dim_out(), ComplexMatrix(-choi_.matrix())); }
  friend MapRepr operator+(const MapRepr& a, const MapRepr& b) {
    return MapRepr(a.dim_in(), a.dim_out(), ComplexMatrix(a.choi_.matrix() + b.choi_.matrix()));
  }
  friend MapRepr operator*(double s, const MapRepr& a) {
    return MapRepr(a.dim_in(), a.dim_out(), ComplexMatrix(s * a.choi_.matrix()));
  }

 private:
  BipartiteOperator choi_;
};

/// V_k stored as n x m matrices so that T(a) = sum_k V_k^dagger a V_k.
using KrausFamily = std::vector<ComplexMatrix>;

using MatrixAction = std::function<ComplexMatrix(const ComplexMatrix&)>;

inline ComplexMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

/// T(X) = Tr_1[(X^t (x) I) C_T] = sum_ij X_ij T(e_ij).
inline ComplexMatrix apply(const MapRepr& t, const ComplexMatrix& x) {
  const Eigen::Index n = t.dim_in(), m = t.dim_out();
  if (x.rows() != n || x.cols() != n)
    throw SizeMismatch("apply: expected " + std::to_string(n) + "x" + std::to_string(n) +
                       " input, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (x(i, j) != Complex(0.0)) out.noalias() += x(i, j) * t.choi().matrix().block(i * m, j * m, m, m);
  return out;
}

namespace detail {

inline ComplexMatrix random_complex_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix out(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
  return out;
}

}  // namespace detail

/// Builds C_T = sum_ij e_ij (x) action(e_ij) after spot-checking linearity.
inline MapRepr choi_of_map(const MatrixAction& action, Eigen::Index n, Eigen::Index m) {
  if (n < 1 || m < 1) throw SizeMismatch("choi_of_map: dimensions must be positive");
  ComplexMatrix c(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const ComplexMatrix img = action(matrix_unit(n, i, j));
      if (img.rows() != m || img.cols() != m)
        throw SizeMismatch("choi_of_map: action returned " + std::to_string(img.rows()) + "x" +
                           std::to_string(img.cols()) + ", expected " + std::to_string(m));
      c.block(i * m, j * m, m, m) = img;
    }

  // Linearity spot check: action(aX + bY) against a*action(X) + b*action(Y).
  std::mt19937_64 rng(0x5eed5eedULL);
  for (int trial = 0; trial < 2; ++trial) {
    const ComplexMatrix x = detail::random_complex_matrix(rng, n, n);
    const ComplexMatrix y = detail::random_complex_matrix(rng, n, n);
    const Complex a(0.7, -0.3), b(-1.1, 0.4);
    const ComplexMatrix lhs = action(a * x + b * y);
    const ComplexMatrix rhs = a * action(x) + b * action(y);
    const double scale = std::max(1.0, rhs.norm());
    if ((lhs - rhs).norm() > 1e-9 * scale)
      throw NonlinearAction("choi_of_map: action failed the linearity spot check");
  }
  if (hermitian_defect(c) > tolerance::hermitian_ingest)
    throw NonHermitianInput("choi_of_map: action is not Hermiticity-preserving");
  return MapRepr(n, m, std::move(c));
}

/// Choi matrix of a ↦ sum_k V_k^dagger a V_k; each V_k is n x m.
inline MapRepr map_from_kraus(const KrausFamily& kraus, Eigen::Index n, Eigen::Index m) {
  ComplexMatrix c = ComplexMatrix::Zero(n * m, n * m);
  for (const ComplexMatrix& v : kraus) {
    if (v.rows() != n || v.cols() != m)
      throw SizeMismatch("map_from_kraus: Kraus operator must be " + std::to_string(n) + "x" +
                         std::to_string(m));
    // C[(i,k),(j,l)] = conj(V_ik) V_jl
    ComplexVector w(n * m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < m; ++k) w(i * m + k) = std::conj(v(i, k));
    c.noalias() += w * w.adjoint();
  }
  return MapRepr(n, m, ComplexMatrix(0.5 * (c + c.adjoint())));
}

/// Sum_i Tr(T(a_i) b_i^t): the functional on the tensor product induced by T.
inline Complex functional_eval(const MapRepr& t,
                               const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& terms) {
  Complex acc = 0.0;
  for (const auto& [a, b] : terms) {
    if (b.rows() != t.dim_out() || b.cols() != t.dim_out())
      throw SizeMismatch("functional_eval: b has wrong size");
    acc += trace_product(posmap::apply(t, a), b.transpose());
  }
  return acc;
}

/// Second evaluation route: Tr(C_T · sum_i a_i^t (x) b_i^t).
inline Complex functional_eval_choi(
    const MapRepr& t, const std::vector<std::pair<ComplexMatrix, ComplexMatrix>>& terms) {
  const Eigen::Index n = t.dim_in(), m = t.dim_out();
  ComplexMatrix sum = ComplexMatrix::Zero(n * m, n * m);
  for (const auto& [a, b] : terms) {
    if (a.rows() != n || a.cols() != n || b.rows() != m || b.cols() != m)
      throw SizeMismatch("functional_eval_choi: term has wrong size");
    sum += kron_matrix(a.transpose(), b.transpose());
  }
  return trace_product(t.choi().matrix(), sum);
}

/// Kraus operators from the spectral decomposition of the Choi matrix,
/// ordered by descending eigenvalue with the first nonzero entry real >= 0.
inline KrausFamily kraus_from_choi(const MapRepr& t) {
  const Eigen::Index n = t.dim_in(), m = t.dim_out();
  const SpectralDecomposition sd = herm_eig(t.choi().hermitian());
  const double scale = sd.spectral_norm();
  if (sd.eigenvalues.size() > 0 && sd.min_eigenvalue() < -1e-9 * scale)
    throw NotCompletelyPositive(sd.min_eigenvalue(), sd.min_eigenvector());

  KrausFamily out;
  for (Eigen::Index r = 0; r < sd.eigenvalues.size(); ++r) {
    const double lambda = sd.eigenvalues(r);
    if (!(lambda > 1e-10 * scale)) break;
    ComplexVector v = sd.eigenvectors.col(r);
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
      if (std::abs(v(idx)) > 1e-12) {
        v *= std::conj(v(idx)) / std::abs(v(idx));
        v(idx) = std::abs(v(idx));
        break;
      }
    }
    ComplexMatrix op(n, m);
    const double root = std::sqrt(lambda);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < m; ++k) op(i, k) = root * std::conj(v(i * m + k));
    out.push_back(std::move(op));
  }
  return out;
}

inline ComplexMatrix apply_kraus(const KrausFamily& kraus, const ComplexMatrix& a) {
  if (kraus.empty()) return ComplexMatrix::Zero(0, 0);
  ComplexMatrix out = ComplexMatrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (const ComplexMatrix& v : kraus) out.noalias() += v.adjoint() * a * v;
  return out;
}

/// t ∘ T, whose Choi matrix is the partial transpose of C_T on the output slot.
inline MapRepr co_compose(const MapRepr& t) {
  return MapRepr(partial_transpose(t.choi(), Slot::second));
}

struct JordanParts {
  MapRepr plus;
  MapRepr minus;
};

/// T = T_plus - T_minus with PSD Choi matrices of orthogonal support.
inline JordanParts jordan_decompose(const MapRepr& t) {
  const Eigen::Index n = t.dim_in(), m = t.dim_out();
  const SpectralDecomposition sd = herm_eig(t.choi().hermitian());
  ComplexMatrix plus = ComplexMatrix::Zero(n * m, n * m);
  ComplexMatrix minus = ComplexMatrix::Zero(n * m, n * m);
  for (Eigen::Index r = 0; r < sd.eigenvalues.size(); ++r) {
    const double lambda = sd.eigenvalues(r);
    const ComplexMatrix proj = sd.eigenvectors.col(r) * sd.eigenvectors.col(r).adjoint();
    if (lambda > 0.0)
      plus.noalias() += lambda * proj;
    else if (lambda < 0.0)
      minus.noalias() -= lambda * proj;
  }
  return {MapRepr(n, m, ComplexMatrix(0.5 * (plus + plus.adjoint()))),
          MapRepr(n, m, ComplexMatrix(0.5 * (minus + minus.adjoint())))};
}

}  // namespace posmap

#endif  // POSMAP_CHOI_HPP

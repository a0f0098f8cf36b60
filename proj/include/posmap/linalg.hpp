#ifndef POSMAP_LINALG_HPP
#define POSMAP_LINALG_HPP

// Dense complex Hermitian linear algebra on tensor-product spaces.
//
// Index convention (global): the basis vector |i> (x) |k> of C^da (x) C^db has
// flat index i*db + k, i.e. the first factor is major.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace posmap {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

class NonHermitianInput : public std::invalid_argument {
 public:
  explicit NonHermitianInput(const std::string& what) : std::invalid_argument(what) {}
};

class SizeMismatch : public std::invalid_argument {
 public:
  explicit SizeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

namespace tolerance {
// Relative Hermiticity tolerance accepted without modification.
inline constexpr double hermitian_strict = 1e-12;
// Inputs within this relative defect are symmetrized instead of rejected.
inline constexpr double hermitian_ingest = 1e-9;
}  // namespace tolerance

inline double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

/// Relative Hermiticity defect ||H - H^dagger||_inf / max(1, ||H||_inf).
inline double hermitian_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return INFINITY;
  const double scale = std::max(1.0, max_abs_entry(h));
  return max_abs_entry(h - h.adjoint()) / scale;
}

/// A square complex matrix equal to its conjugate transpose.
///
/// Construction symmetrizes inputs whose defect is below the ingestion
/// tolerance and rejects everything else with NonHermitianInput.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw NonHermitianInput("matrix is not square (" + std::to_string(m_.rows()) + "x" +
                              std::to_string(m_.cols()) + ")");
    if (!all_finite(m_)) throw NonHermitianInput("matrix has non-finite entries");
    const double defect = hermitian_defect(m_);
    if (defect > tolerance::hermitian_ingest)
      throw NonHermitianInput("matrix is not Hermitian (relative defect " + std::to_string(defect) +
                              ")");
    if (defect > 0.0) m_ = (0.5 * (m_ + m_.adjoint())).eval();
  }

  static HermitianMatrix identity(Eigen::Index n) {
    return HermitianMatrix(ComplexMatrix::Identity(n, n));
  }
  static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(ComplexMatrix::Zero(n, n)); }

  Eigen::Index size() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(ComplexMatrix(a.m_ + b.m_));
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(ComplexMatrix(a.m_ - b.m_));
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    return HermitianMatrix(ComplexMatrix(s * a.m_));
  }
  HermitianMatrix operator-() const { return HermitianMatrix(ComplexMatrix(-m_)); }

 private:
  ComplexMatrix m_;
};

/// Hermitian operator on C^dim_a (x) C^dim_b.
class BipartiteOperator {
 public:
  BipartiteOperator() = default;

  BipartiteOperator(Eigen::Index dim_a, Eigen::Index dim_b, HermitianMatrix m)
      : dim_a_(dim_a), dim_b_(dim_b), m_(std::move(m)) {
    if (dim_a < 1 || dim_b < 1) throw SizeMismatch("factor dimensions must be positive");
    if (m_.size() != dim_a * dim_b)
      throw SizeMismatch("operator size " + std::to_string(m_.size()) + " does not match " +
                         std::to_string(dim_a) + "x" + std::to_string(dim_b));
  }

  BipartiteOperator(Eigen::Index dim_a, Eigen::Index dim_b, ComplexMatrix m)
      : BipartiteOperator(dim_a, dim_b, HermitianMatrix(std::move(m))) {}

  Eigen::Index dim_a() const { return dim_a_; }
  Eigen::Index dim_b() const { return dim_b_; }
  Eigen::Index dim() const { return dim_a_ * dim_b_; }
  const HermitianMatrix& hermitian() const { return m_; }
  const ComplexMatrix& matrix() const { return m_.matrix(); }

  Complex operator()(Eigen::Index i, Eigen::Index k, Eigen::Index j, Eigen::Index l) const {
    return m_(i * dim_b_ + k, j * dim_b_ + l);
  }

 private:
  Eigen::Index dim_a_ = 0;
  Eigen::Index dim_b_ = 0;
  HermitianMatrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;       // non-increasing
  ComplexMatrix eigenvectors;   // column v holds the eigenvector of eigenvalues[v]

  double min_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
  double max_eigenvalue() const { return eigenvalues(0); }
  ComplexVector min_eigenvector() const { return eigenvectors.col(eigenvectors.cols() - 1); }
  double spectral_norm() const {
    return eigenvalues.size() == 0 ? 0.0
                                   : std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
  }
};

namespace detail {

// Cyclic Jacobi on a Hermitian matrix, sweeping (p, q) in row order.
// The input is assumed Hermitian; no validation happens here.
inline SpectralDecomposition jacobi_eigen(ComplexMatrix a) {
  const Eigen::Index n = a.rows();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  SpectralDecomposition out;
  if (n == 0) {
    out.eigenvalues = RealVector(0);
    out.eigenvectors = v;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  const double total = a.norm();
  const double target = 1e-15 * total;
  const double negligible = 1e-18 * total;
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    off = std::sqrt(2.0 * off);
    if (off <= target) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= negligible) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const Complex phase = apq / mag;
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const Complex g00 = c, g01 = s;
        const Complex g10 = -s * std::conj(phase), g11 = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    out.eigenvalues(r) = a(order[static_cast<std::size_t>(r)], order[static_cast<std::size_t>(r)]).real();
    out.eigenvectors.col(r) = v.col(order[static_cast<std::size_t>(r)]);
  }
  return out;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw SizeMismatch(what);
}

}  // namespace detail

/// Eigendecomposition by cyclic Jacobi sweeps; deterministic for a given input.
inline SpectralDecomposition herm_eig(const HermitianMatrix& h) {
  return detail::jacobi_eigen(h.matrix());
}

/// Validating overload for raw matrices.
inline SpectralDecomposition herm_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || hermitian_defect(h) > tolerance::hermitian_ingest)
    throw NonHermitianInput("herm_eig: input is not Hermitian");
  return detail::jacobi_eigen(0.5 * (h + h.adjoint()));
}

inline ComplexMatrix kron_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexVector kron_vector(const ComplexVector& f, const ComplexVector& g) {
  ComplexVector out(f.size() * g.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out.segment(i * g.size(), g.size()) = f(i) * g;
  return out;
}

/// Elementary tensor A (x) B as a bipartite operator.
inline BipartiteOperator kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  return BipartiteOperator(a.size(), b.size(), kron_matrix(a.matrix(), b.matrix()));
}

inline BipartiteOperator kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.rows() == a.cols() && b.rows() == b.cols(), "kron: factors must be square");
  return BipartiteOperator(a.rows(), b.rows(), kron_matrix(a, b));
}

enum class Slot { first = 1, second = 2 };

/// Partial transpose of a raw (da*db)x(da*db) matrix.
inline ComplexMatrix partial_transpose_matrix(const ComplexMatrix& x, Eigen::Index da,
                                              Eigen::Index db, Slot slot) {
  detail::require(x.rows() == da * db && x.cols() == da * db, "partial_transpose: size mismatch");
  ComplexMatrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index k = 0; k < db; ++k)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index l = 0; l < db; ++l) {
          if (slot == Slot::second)
            out(i * db + k, j * db + l) = x(i * db + l, j * db + k);
          else
            out(i * db + k, j * db + l) = x(j * db + k, i * db + l);
        }
  return out;
}

inline BipartiteOperator partial_transpose(const BipartiteOperator& x, Slot slot = Slot::second) {
  return BipartiteOperator(x.dim_a(), x.dim_b(),
                           partial_transpose_matrix(x.matrix(), x.dim_a(), x.dim_b(), slot));
}

inline ComplexMatrix partial_trace_matrix(const ComplexMatrix& x, Eigen::Index da, Eigen::Index db,
                                          Slot slot) {
  detail::require(x.rows() == da * db && x.cols() == da * db, "partial_trace: size mismatch");
  if (slot == Slot::second) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < db; ++k) out(i, j) += x(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index k = 0; k < db; ++k)
    for (Eigen::Index l = 0; l < db; ++l)
      for (Eigen::Index i = 0; i < da; ++i) out(k, l) += x(i * db + k, i * db + l);
  return out;
}

/// Trace over the given slot; the remaining factor is returned.
inline HermitianMatrix partial_trace(const BipartiteOperator& x, Slot slot) {
  return HermitianMatrix(partial_trace_matrix(x.matrix(), x.dim_a(), x.dim_b(), slot));
}

/// Nearest PSD matrix in Frobenius norm (eigenvalues clipped at zero).
inline ComplexMatrix psd_project_matrix(const ComplexMatrix& h) {
  const SpectralDecomposition sd = detail::jacobi_eigen(h);
  ComplexMatrix out = ComplexMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index v = 0; v < sd.eigenvalues.size(); ++v) {
    if (sd.eigenvalues(v) <= 0.0) break;
    out.noalias() += sd.eigenvalues(v) * sd.eigenvectors.col(v) * sd.eigenvectors.col(v).adjoint();
  }
  return 0.5 * (out + out.adjoint());
}

inline HermitianMatrix psd_project(const HermitianMatrix& h) {
  return HermitianMatrix(psd_project_matrix(h.matrix()));
}

/// Tr(AB) for Hermitian A, B (real).
inline double pairing(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.size() != b.size())
    throw SizeMismatch("pairing: sizes " + std::to_string(a.size()) + " and " +
                       std::to_string(b.size()) + " differ");
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

inline double pairing(const BipartiteOperator& a, const BipartiteOperator& b) {
  return pairing(a.hermitian(), b.hermitian());
}

/// Tr(AB) for general square matrices of equal size.
inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  detail::require(a.rows() == b.cols() && a.cols() == b.rows(), "trace_product: size mismatch");
  return (a.array() * b.transpose().array()).sum();
}

/// <v|X|v> for Hermitian X.
inline double expectation(const ComplexMatrix& x, const ComplexVector& v) {
  return v.dot(x * v).real();
}

/// <f (x) g| X |f (x) g>.
inline double product_expectation(const BipartiteOperator& x, const ComplexVector& f,
                                  const ComplexVector& g) {
  return expectation(x.matrix(), kron_vector(f, g));
}

/// Singular values of the da x db coefficient matrix of a bipartite vector,
/// i.e. its Schmidt coefficients, in non-increasing order.
inline RealVector schmidt_coefficients(const ComplexVector& psi, Eigen::Index da, Eigen::Index db) {
  detail::require(psi.size() == da * db, "schmidt_coefficients: size mismatch");
  ComplexMatrix coeff(da, db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index k = 0; k < db; ++k) coeff(i, k) = psi(i * db + k);
  const ComplexMatrix gram = coeff * coeff.adjoint();
  const SpectralDecomposition sd = detail::jacobi_eigen(0.5 * (gram + gram.adjoint()));
  RealVector s(std::min(da, db));
  // |coeff^dagger u_r| rather than sqrt(eigenvalue): small coefficients stay
  // accurate to working precision instead of its square root.
  for (Eigen::Index r = 0; r < s.size(); ++r) s(r) = (coeff.adjoint() * sd.eigenvectors.col(r)).norm();
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

inline ComplexMatrix swap_operator(Eigen::Index n) {
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) s(i * n + k, k * n + i) = 1.0;
  return s;
}

/// |Omega> = sum_i |ii> / sqrt(n).
inline ComplexVector max_entangled_vector(Eigen::Index n) {
  ComplexVector v = ComplexVector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) v(i * n + i) = 1.0 / std::sqrt(static_cast<double>(n));
  return v;
}

}  // namespace posmap

#endif  // POSMAP_LINALG_HPP

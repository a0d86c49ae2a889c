#pragma once

// Dense complex linear algebra used throughout the library. Matrices are
// Eigen::MatrixXcd; the helpers here add the conventions the rest of the
// code relies on (tensor ordering, SVD sign fixing, exponential modes).

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Global numerical thresholds. Defaults match the library's contracts;
/// callers may tighten or loosen them process-wide.
struct Tolerances {
  double exact = 1e-12;     ///< identities that hold up to round-off
  double unitary = 1e-10;   ///< unitarity / completeness / round trips
  double rank = 1e-10;      ///< relative eigenvalue cut-off for ranks
};

inline Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline Eigen::Index pow2(int exponent) { return Eigen::Index{1} << exponent; }

/// Computational basis vector |index> in a space of dimension dim.
inline ComplexVector basis_ket(Eigen::Index dim, Eigen::Index index) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

/// |row><col| in a space of dimension dim.
inline ComplexMatrix outer_basis(Eigen::Index dim, Eigen::Index row, Eigen::Index col) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(row, col) = 1.0;
  return m;
}

/// Kronecker product. The left factor is the most significant index, so
/// tensor(A, B)(i*rB + k, j*cB + l) = A(i, j) * B(k, l).
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexMatrix tensor(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) return identity(1);
  ComplexMatrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
  return out;
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |U^dagger U - I|
inline double unitarity_residual(const ComplexMatrix& u) {
  require_square(u, "unitarity_residual");
  return max_abs(u.adjoint() * u - identity(u.rows()));
}

inline double hermiticity_residual(const ComplexMatrix& m) {
  require_square(m, "hermiticity_residual");
  return max_abs(m - m.adjoint());
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

enum class ExpMode {
  unitary,    ///< exp(i * scale * h)
  generator,  ///< exp(scale * h)
};

/// Matrix exponential by scaling and squaring with a Pade approximant
/// (Eigen's MatrixFunctions implementation).
inline ComplexMatrix matrix_exp(const ComplexMatrix& h, double scale, ExpMode mode = ExpMode::unitary) {
  require_square(h, "matrix_exp");
  const Complex factor = mode == ExpMode::unitary ? kI * scale : Complex{scale, 0.0};
  const ComplexMatrix arg = factor * h;
  return arg.exp();
}

struct HermitianEigen {
  RealVector values;     ///< ascending
  ComplexMatrix vectors; ///< columns are eigenvectors
};

/// Eigendecomposition of the Hermitian part of m.
inline HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigen");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigen: decomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  require_square(m, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigenvalues: decomposition failed");
  return solver.eigenvalues();
}

struct SingularValueDecomposition {
  ComplexMatrix left;   ///< W
  RealVector values;    ///< descending
  ComplexMatrix right;  ///< V, so that m = W diag(values) V^dagger
};

/// Full SVD with a fixed phase convention: the first component of each
/// right singular vector whose magnitude exceeds 1e-12 is real positive.
inline SingularValueDecomposition svd(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SingularValueDecomposition out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  for (Eigen::Index c = 0; c < out.right.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.right.rows(); ++r) {
      const double mag = std::abs(out.right(r, c));
      if (mag > 1e-12) {
        const Complex phase = std::conj(out.right(r, c)) / mag;
        out.right.col(c) *= phase;
        if (c < out.left.cols()) out.left.col(c) *= phase;
        break;
      }
    }
  }
  return out;
}

struct PolarFactors {
  ComplexMatrix unitary;
  ComplexMatrix positive;
};

/// Right polar decomposition k = unitary * positive computed from the SVD
/// k = W S V^dagger: unitary = W V^dagger, positive = V S V^dagger. Null-space
/// directions of a singular k take their unitary columns from the SVD
/// factors, which are deterministic under the phase convention of svd().
inline PolarFactors polar_decompose(const ComplexMatrix& k) {
  require_square(k, "polar_decompose");
  const auto dec = svd(k);
  PolarFactors out;
  out.unitary = dec.left * dec.right.adjoint();
  out.positive = hermitian_part(dec.right * dec.values.cast<Complex>().asDiagonal() * dec.right.adjoint());
  return out;
}

/// Sum of singular values.
inline double trace_norm(const ComplexMatrix& m) {
  require_square(m, "trace_norm");
  if (hermiticity_residual(m) <= 1e-13 * std::max(1.0, max_abs(m))) {
    return hermitian_eigenvalues(m).cwiseAbs().sum();
  }
  Eigen::JacobiSVD<ComplexMatrix> solver(m);
  return solver.singularValues().sum();
}

/// Column-stacking vectorisation: vec(m)[r + c*rows] = m(r, c).
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0) throw DimensionError("unvec: length not divisible by rows");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, v.size() / rows);
}

}  // namespace ctqec

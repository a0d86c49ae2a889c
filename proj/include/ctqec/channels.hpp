#pragma once

// Channel algebra. Superoperators use column stacking:
//   vec(A rho B) = (B^T (x) A) vec(rho),
// and the Choi matrix is J = sum_K (K (x) I)|Omega><Omega|(K (x) I)^dagger with
// |Omega> = sum_i |ii> unnormalised, so J[(a,i),(b,j)] = Phi(|i><j|)[a,b]
// (output index most significant).

#include "ctqec/linalg.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace ctqec {

class ChannelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite Kraus set. Channels flagged trace-preserving must satisfy
/// sum K^dagger K = I to the unitary tolerance; unflagged sets are map
/// fragments and are not checked.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<ComplexMatrix> operators, bool trace_preserving = true,
                        std::optional<double> epsilon = std::nullopt)
      : operators_(std::move(operators)), trace_preserving_(trace_preserving), epsilon_(epsilon) {
    if (operators_.empty()) throw ChannelError("KrausChannel: empty Kraus set");
    const auto rows = operators_.front().rows(), cols = operators_.front().cols();
    if (rows == 0 || cols == 0) throw ChannelError("KrausChannel: empty operator");
    for (const auto& k : operators_) {
      if (k.rows() != rows || k.cols() != cols) throw DimensionError("KrausChannel: operators differ in shape");
    }
    if (trace_preserving_ && completeness_residual() > tolerances().unitary) {
      throw ChannelError("KrausChannel: completeness violated (residual " + std::to_string(completeness_residual()) +
                         ")");
    }
  }

  static KrausChannel identity_channel(Eigen::Index dim) { return KrausChannel({identity(dim)}); }

  Eigen::Index dim_in() const { return operators_.front().cols(); }
  Eigen::Index dim_out() const { return operators_.front().rows(); }
  std::size_t size() const { return operators_.size(); }
  const std::vector<ComplexMatrix>& operators() const { return operators_; }
  bool trace_preserving() const { return trace_preserving_; }
  std::optional<double> epsilon() const { return epsilon_; }

  /// max |sum K^dagger K - I|
  double completeness_residual() const {
    ComplexMatrix s = ComplexMatrix::Zero(dim_in(), dim_in());
    for (const auto& k : operators_) s += k.adjoint() * k;
    return max_abs(s - ctqec::identity(dim_in()));
  }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_in() || rho.cols() != dim_in()) throw DimensionError("KrausChannel::apply: wrong state size");
    ComplexMatrix out = ComplexMatrix::Zero(dim_out(), dim_out());
    for (const auto& k : operators_) out += k * rho * k.adjoint();
    return out;
  }

 private:
  std::vector<ComplexMatrix> operators_;
  bool trace_preserving_;
  std::optional<double> epsilon_;
};

/// rho -> a rho b as a column-stacking superoperator.
inline ComplexMatrix sandwich_superop(const ComplexMatrix& a, const ComplexMatrix& b) {
  return tensor(b.transpose(), a);
}

/// rho -> k rho k^dagger
inline ComplexMatrix conjugation_superop(const ComplexMatrix& k) { return sandwich_superop(k, k.adjoint()); }

/// rho -> -i [h, rho]
inline ComplexMatrix hamiltonian_superop(const ComplexMatrix& h) {
  require_square(h, "hamiltonian_superop");
  const ComplexMatrix id = identity(h.rows());
  return -kI * (sandwich_superop(h, id) - sandwich_superop(id, h));
}

/// rho -> l rho l^dagger - (1/2){l^dagger l, rho}
inline ComplexMatrix dissipator_superop(const ComplexMatrix& l) {
  require_square(l, "dissipator_superop");
  const ComplexMatrix id = identity(l.rows());
  const ComplexMatrix ldl = l.adjoint() * l;
  return conjugation_superop(l) - 0.5 * (sandwich_superop(ldl, id) + sandwich_superop(id, ldl));
}

inline ComplexMatrix superop_of(const KrausChannel& ch) {
  ComplexMatrix s = ComplexMatrix::Zero(ch.dim_out() * ch.dim_out(), ch.dim_in() * ch.dim_in());
  for (const auto& k : ch.operators()) s += conjugation_superop(k);
  return s;
}

/// Linear map on dim x dim matrices as a (dim^2 x dim^2) column-stacking
/// matrix. Used for Lindblad generators and map differences such as R - I.
class SuperoperatorGenerator {
 public:
  SuperoperatorGenerator(Eigen::Index dim, ComplexMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
    if (dim_ <= 0) throw DimensionError("SuperoperatorGenerator: dim must be positive");
    if (matrix_.rows() != dim_ * dim_ || matrix_.cols() != dim_ * dim_) {
      throw DimensionError("SuperoperatorGenerator: matrix must be dim^2 x dim^2");
    }
  }

  static SuperoperatorGenerator zero(Eigen::Index dim) {
    return SuperoperatorGenerator(dim, ComplexMatrix::Zero(dim * dim, dim * dim));
  }
  static SuperoperatorGenerator identity_map(Eigen::Index dim) {
    return SuperoperatorGenerator(dim, ctqec::identity(dim * dim));
  }
  static SuperoperatorGenerator from_channel(const KrausChannel& ch) {
    if (ch.dim_in() != ch.dim_out()) throw DimensionError("SuperoperatorGenerator: channel must be square");
    return SuperoperatorGenerator(ch.dim_in(), superop_of(ch));
  }

  Eigen::Index dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionError("SuperoperatorGenerator::apply: wrong size");
    return unvec(matrix_ * vec(rho), dim_);
  }

  SuperoperatorGenerator operator+(const SuperoperatorGenerator& o) const {
    check(o);
    return {dim_, matrix_ + o.matrix_};
  }
  SuperoperatorGenerator operator-(const SuperoperatorGenerator& o) const {
    check(o);
    return {dim_, matrix_ - o.matrix_};
  }
  SuperoperatorGenerator operator*(double c) const { return {dim_, c * matrix_}; }
  friend SuperoperatorGenerator operator*(double c, const SuperoperatorGenerator& g) { return g * c; }

 private:
  void check(const SuperoperatorGenerator& o) const {
    if (o.dim_ != dim_) throw DimensionError("SuperoperatorGenerator: dimension mismatch");
  }

  Eigen::Index dim_;
  ComplexMatrix matrix_;
};

/// Choi matrix from a square column-stacking superoperator.
inline ComplexMatrix choi_of_superoperator(const ComplexMatrix& s, Eigen::Index dim) {
  if (s.rows() != dim * dim || s.cols() != dim * dim) throw DimensionError("choi_of_superoperator: wrong size");
  ComplexMatrix j(dim * dim, dim * dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index b = 0; b < dim; ++b)
        for (Eigen::Index jj = 0; jj < dim; ++jj) j(a * dim + i, b * dim + jj) = s(a + b * dim, i + jj * dim);
  return j;
}

inline ComplexMatrix choi_matrix(const SuperoperatorGenerator& g) { return choi_of_superoperator(g.matrix(), g.dim()); }

inline ComplexMatrix choi_matrix(const KrausChannel& ch) {
  const Eigen::Index din = ch.dim_in(), dout = ch.dim_out();
  ComplexMatrix j = ComplexMatrix::Zero(dout * din, dout * din);
  ComplexVector v(dout * din);
  for (const auto& k : ch.operators()) {
    for (Eigen::Index a = 0; a < dout; ++a)
      for (Eigen::Index i = 0; i < din; ++i) v(a * din + i) = k(a, i);
    j += v * v.adjoint();
  }
  return j;
}

/// Trace norm of the Choi difference.
inline double choi_distance(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) throw DimensionError("choi_distance: dimension mismatch");
  return trace_norm(choi_matrix(a) - choi_matrix(b));
}

/// Number of linearly independent Kraus operators: rank of the Gram matrix
/// tr(K_j^dagger K_l) with eigenvalues above 1e-10 of the largest.
inline int kraus_rank(const KrausChannel& ch) {
  const auto m = static_cast<Eigen::Index>(ch.size());
  ComplexMatrix gram(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index l = 0; l < m; ++l)
      gram(j, l) = (ch.operators()[static_cast<std::size_t>(j)].adjoint() * ch.operators()[static_cast<std::size_t>(l)]).trace();
  const RealVector ev = hermitian_eigenvalues(gram);
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > tolerances().rank * top).count());
}

namespace detail {

/// Columns are vec(K_j), zero-padded to m columns.
inline ComplexMatrix kraus_columns(const KrausChannel& ch, Eigen::Index m) {
  const Eigen::Index len = ch.dim_in() * ch.dim_out();
  ComplexMatrix out = ComplexMatrix::Zero(len, m);
  for (std::size_t j = 0; j < ch.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = vec(ch.operators()[j]);
  return out;
}

/// Closest matrix with orthonormal columns (unitary polar factor of a tall
/// matrix).
inline ComplexMatrix orthonormalize_columns(const ComplexMatrix& y) {
  Eigen::JacobiSVD<ComplexMatrix> solver(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return solver.matrixU() * solver.matrixV().adjoint();
}

/// Extends orthonormal columns y (m x r) to an m x m unitary whose first r
/// columns are exactly y.
inline ComplexMatrix complete_unitary(const ComplexMatrix& y) {
  const Eigen::Index m = y.rows(), r = y.cols();
  ComplexMatrix out(m, m);
  out.leftCols(r) = y;
  if (r < m) {
    Eigen::HouseholderQR<ComplexMatrix> qr(y);
    const ComplexMatrix q = qr.householderQ() * identity(m);
    out.rightCols(m - r) = q.rightCols(m - r);
  }
  return out;
}

}  // namespace detail

/// If a and b describe the same map (Choi distance <= 1e-8), returns a
/// unitary u with A_j = sum_l u(j,l) B_l after zero-padding the shorter
/// list. The unitary is built from a shared eigenbasis of the Choi matrix
/// and checked by reconstruction.
inline std::optional<ComplexMatrix> kraus_equivalence(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) {
    throw DimensionError("kraus_equivalence: dimension mismatch");
  }
  if (choi_distance(a, b) > 1e-8) return std::nullopt;
  const auto m = static_cast<Eigen::Index>(std::max(a.size(), b.size()));
  const ComplexMatrix ka = detail::kraus_columns(a, m);
  const ComplexMatrix kb = detail::kraus_columns(b, m);
  const auto eig = hermitian_eigen(kb * kb.adjoint());
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > tolerances().rank * top) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  if (r > m) return std::nullopt;
  ComplexMatrix ya(m, r), yb(m, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    const Eigen::Index i = keep[static_cast<std::size_t>(c)];
    const double s = 1.0 / std::sqrt(eig.values(i));
    ya.col(c) = s * (ka.adjoint() * eig.vectors.col(i));
    yb.col(c) = s * (kb.adjoint() * eig.vectors.col(i));
  }
  // ya has orthonormal columns only up to the Choi mismatch; re-orthonormalise.
  ya = detail::orthonormalize_columns(ya);
  const ComplexMatrix w = detail::complete_unitary(yb) * detail::complete_unitary(ya).adjoint();
  const ComplexMatrix u = w.transpose();
  if (max_abs(ka - kb * w) > 1e-8 * std::max(1.0, max_abs(ka))) return std::nullopt;
  return u;
}

}  // namespace ctqec

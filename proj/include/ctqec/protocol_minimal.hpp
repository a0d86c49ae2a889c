#pragma once

// The minimal-ancilla weak-measurement protocol. Everything is built in the
// corrected basis on the syndrome factor (dimension N = 2^(n-k)) and lifted
// to the full space as I_info (x) op on demand. The ancilla has n-k+1 qubits
// and S = 2N outcomes; outcome j < N carries the "+" Kraus operator for
// syndrome j and outcome N + j its conjugate-sign partner.

#include "ctqec/channels.hpp"
#include "ctqec/parallel.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ctqec {

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_code_dims(int n, int k) {
  if (k < 0 || n <= k) throw ProtocolError("protocol: require n > k >= 0");
  if (n - k > 8) throw ProtocolError("protocol: n - k above 8 is not supported");
}

inline void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ProtocolError("protocol: epsilon must lie in [0, 1)");
}

/// |0><j| + |j><0|
inline ComplexMatrix sym0(Eigen::Index n, Eigen::Index j) { return outer_basis(n, 0, j) + outer_basis(n, j, 0); }
/// |0><j| - |j><0|
inline ComplexMatrix anti0(Eigen::Index n, Eigen::Index j) { return outer_basis(n, 0, j) - outer_basis(n, j, 0); }

}  // namespace detail

/// Minimal number of ancilla qubits able to carry `kraus_count` outcomes.
inline int minimal_ancilla_qubits(int kraus_count) {
  if (kraus_count < 1) throw std::invalid_argument("minimal_ancilla_qubits: count must be positive");
  int q = 0;
  while ((1LL << q) < kraus_count) ++q;
  return q;
}

/// Strong-correction target {sqrt(1-eps^2) I, eps R_j} with
/// R_j = I_info (x) |0><j|, on the full 2^n space (corrected basis).
inline KrausChannel target_map(int n, int k, double epsilon) {
  detail::check_code_dims(n, k);
  detail::check_epsilon(epsilon);
  const Eigen::Index N = pow2(n - k), A = pow2(k);
  std::vector<ComplexMatrix> ops;
  ops.push_back(std::sqrt(1.0 - epsilon * epsilon) * identity(A * N));
  for (Eigen::Index j = 0; j < N; ++j) ops.push_back(epsilon * tensor(identity(A), outer_basis(N, 0, j)));
  return KrausChannel(std::move(ops), true, epsilon);
}

/// The strong map R(rho) = sum_j R_j rho R_j^dagger (epsilon = 1 limit).
inline KrausChannel strong_correction_map(int n, int k) {
  detail::check_code_dims(n, k);
  const Eigen::Index N = pow2(n - k), A = pow2(k);
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index j = 0; j < N; ++j) ops.push_back(tensor(identity(A), outer_basis(N, 0, j)));
  return KrausChannel(std::move(ops));
}

/// Syndrome-factor Kraus operators K_j, j in [0, 2N).
inline std::vector<ComplexMatrix> kraus_family_syndrome(int nk, double epsilon) {
  detail::check_epsilon(epsilon);
  const Eigen::Index N = pow2(nk);
  const double norm = 1.0 / std::sqrt(2.0 * static_cast<double>(N));
  const double c = std::sqrt(1.0 - epsilon * epsilon);
  std::vector<ComplexMatrix> out;
  for (int sign : {1, -1}) {
    for (Eigen::Index j = 0; j < N; ++j) {
      out.push_back(norm * (c * identity(N) + (sign * epsilon * std::sqrt(static_cast<double>(N))) * kI *
                                                  outer_basis(N, 0, j)));
    }
  }
  return out;
}

/// Full-space Kraus family I_info (x) K_j.
inline std::vector<ComplexMatrix> build_kraus_family(int n, int k, double epsilon) {
  detail::check_code_dims(n, k);
  std::vector<ComplexMatrix> out;
  for (const auto& kj : kraus_family_syndrome(n - k, epsilon)) out.push_back(tensor(identity(pow2(k)), kj));
  return out;
}

/// Blocks H_{j,l} (N x N, syndrome factor) of the measurement Hamiltonian,
/// indexed [j][l] with j, l in [0, 2N).
inline std::vector<std::vector<ComplexMatrix>> measurement_hamiltonian_blocks(int nk) {
  if (nk < 1 || nk > 8) throw ProtocolError("measurement_hamiltonian_blocks: n - k must be in [1, 8]");
  const Eigen::Index N = pow2(nk), S = 2 * N;
  const double s = std::sqrt(static_cast<double>(N));
  using detail::anti0;
  using detail::sym0;
  std::vector<std::vector<ComplexMatrix>> h(static_cast<std::size_t>(S),
                                            std::vector<ComplexMatrix>(static_cast<std::size_t>(S),
                                                                       ComplexMatrix::Zero(N, N)));
  auto at = [&](Eigen::Index j, Eigen::Index l) -> ComplexMatrix& {
    return h[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  };
  ComplexMatrix all = ComplexMatrix::Zero(N, N);
  for (Eigen::Index l = 1; l < N; ++l) all += sym0(N, l);
  at(0, 0) = (-2.0 / s) * all;
  at(N, N) = -at(0, 0);
  for (Eigen::Index j = 1; j < N; ++j) {
    at(0, j) = at(j, 0) = (2.0 / s) * sym0(N, j);
    at(j, j) = (2.0 * (1.0 - static_cast<double>(N)) / s) * sym0(N, j);
    at(N + j, N + j) = -at(j, j);
    at(N, N + j) = at(N + j, N) = (-2.0 / s) * sym0(N, j);
    at(j, N + j) = (s / 2.0) * anti0(N, j);
    at(N + j, j) = -at(j, N + j);
    for (Eigen::Index l = 1; l < N; ++l) {
      if (l == j) continue;
      at(j, l) = (1.0 / s) * (sym0(N, j) + sym0(N, l));
      at(N + j, N + l) = -at(j, l);
      at(j, N + l) = (1.0 / s) * (sym0(N, j) - sym0(N, l));
      at(N + j, l) = -at(j, N + l);
    }
  }
  return h;
}

/// sum_{j,l} H_{j,l} (x) |j_a><l_a| on syndrome (x) ancilla.
inline ComplexMatrix assemble_from_blocks(const std::vector<std::vector<ComplexMatrix>>& blocks) {
  const auto S = static_cast<Eigen::Index>(blocks.size());
  const Eigen::Index N = blocks.front().front().rows();
  ComplexMatrix out = ComplexMatrix::Zero(N * S, N * S);
  for (Eigen::Index j = 0; j < S; ++j)
    for (Eigen::Index l = 0; l < S; ++l)
      out += tensor(blocks[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)], outer_basis(S, j, l));
  return out;
}

/// Inverse of assemble_from_blocks.
inline std::vector<std::vector<ComplexMatrix>> split_into_blocks(const ComplexMatrix& h, Eigen::Index N,
                                                                  Eigen::Index S) {
  if (h.rows() != N * S || h.cols() != N * S) throw DimensionError("split_into_blocks: wrong size");
  std::vector<std::vector<ComplexMatrix>> out(static_cast<std::size_t>(S),
                                              std::vector<ComplexMatrix>(static_cast<std::size_t>(S)));
  for (Eigen::Index j = 0; j < S; ++j)
    for (Eigen::Index l = 0; l < S; ++l) {
      ComplexMatrix b(N, N);
      for (Eigen::Index p = 0; p < N; ++p)
        for (Eigen::Index q = 0; q < N; ++q) b(p, q) = h(p * S + j, q * S + l);
      out[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] = b;
    }
  return out;
}

/// Full-space H_M on (info (x) syndrome) (x) ancilla.
inline ComplexMatrix build_measurement_hamiltonian(int n, int k) {
  detail::check_code_dims(n, k);
  return tensor(identity(pow2(k)), assemble_from_blocks(measurement_hamiltonian_blocks(n - k)));
}

/// The compact three-qubit form
///   sum_j |0><j| (x) (|u_j><v_j| + |v_j><w_j|) + h.c.
/// with |u_j> = |+>(|0> - sum_{l != j}|l>), |v_j> = |->|j>,
/// |w_j> = |+>(|0> + sum_{l != j}|l> - 2|j>), on syndrome (x) ancilla.
/// It solves the same order conditions as the general blocks but is a
/// different operator. Only defined for n - k = 2.
inline ComplexMatrix example_two_hamiltonian() {
  const Eigen::Index N = 4, S = 8;
  ComplexVector plus(2), minus(2);
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  plus /= std::sqrt(2.0);
  minus /= std::sqrt(2.0);
  auto kron = [](const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
  };
  ComplexMatrix h = ComplexMatrix::Zero(N * S, N * S);
  for (Eigen::Index j = 1; j < N; ++j) {
    ComplexVector others = ComplexVector::Zero(N);
    for (Eigen::Index l = 1; l < N; ++l)
      if (l != j) others += basis_ket(N, l);
    const ComplexVector u = kron(plus, basis_ket(N, 0) - others);
    const ComplexVector v = kron(minus, basis_ket(N, j));
    const ComplexVector w = kron(plus, basis_ket(N, 0) + others - 2.0 * basis_ket(N, j));
    const ComplexMatrix anc = u * v.adjoint() + v * w.adjoint();
    h += tensor(outer_basis(N, 0, j), anc) + tensor(outer_basis(N, j, 0), anc.adjoint());
  }
  return h;
}

/// Residuals of the order-by-order conditions on the blocks (max-norm).
struct OrderConditionReport {
  double first_order_trivial = 0.0;   ///< sum_j H_{0,j} = sum_j H_{N,j} = 0
  double second_order_trivial = 0.0;  ///< sum_{j,l} H_{0,j} H_{j,l} = I - N|0><0| (and for row N)
  double first_order_rows = 0.0;      ///< sum_l H_{j,l} = -sum_l H_{N+j,l} = (sqrt N / 2)(|0><j| - |j><0|)
  double second_order_rows = 0.0;     ///< sum_{l,m} H_{j,l} H_{l,m} = I + (N/4)|0><0| - (3N/4)|j><j|
  double hermitian_pairs = 0.0;       ///< H_{j,l} = H_{l,j}^dagger

  double max() const {
    return std::max({first_order_trivial, second_order_trivial, first_order_rows, second_order_rows, hermitian_pairs});
  }
};

inline OrderConditionReport check_order_conditions(const std::vector<std::vector<ComplexMatrix>>& h) {
  const auto S = static_cast<Eigen::Index>(h.size());
  const Eigen::Index N = S / 2;
  auto at = [&](Eigen::Index j, Eigen::Index l) -> const ComplexMatrix& {
    return h[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
  };
  // row sums and second-moment row sums: sum_{l,m} H_{j,l} H_{l,m} = H_j. * colsum
  std::vector<ComplexMatrix> row_sum(static_cast<std::size_t>(S), ComplexMatrix::Zero(N, N));
  for (Eigen::Index j = 0; j < S; ++j)
    for (Eigen::Index l = 0; l < S; ++l) row_sum[static_cast<std::size_t>(j)] += at(j, l);
  auto second = [&](Eigen::Index j) {
    ComplexMatrix acc = ComplexMatrix::Zero(N, N);
    for (Eigen::Index l = 0; l < S; ++l) acc += at(j, l) * row_sum[static_cast<std::size_t>(l)];
    return acc;
  };
  OrderConditionReport r;
  const ComplexMatrix id = identity(N);
  const ComplexMatrix p0 = outer_basis(N, 0, 0);
  for (Eigen::Index j0 : {Eigen::Index{0}, N}) {
    r.first_order_trivial = std::max(r.first_order_trivial, max_abs(row_sum[static_cast<std::size_t>(j0)]));
    r.second_order_trivial =
        std::max(r.second_order_trivial, max_abs(second(j0) - (id - static_cast<double>(N) * p0)));
  }
  const double s = std::sqrt(static_cast<double>(N));
  for (Eigen::Index j = 1; j < N; ++j) {
    const ComplexMatrix t = (s / 2.0) * detail::anti0(N, j);
    r.first_order_rows = std::max({r.first_order_rows, max_abs(row_sum[static_cast<std::size_t>(j)] - t),
                                   max_abs(row_sum[static_cast<std::size_t>(N + j)] + t)});
    const ComplexMatrix t2 = id + (static_cast<double>(N) / 4.0) * p0 -
                             (3.0 * static_cast<double>(N) / 4.0) * outer_basis(N, j, j);
    r.second_order_rows = std::max({r.second_order_rows, max_abs(second(j) - t2), max_abs(second(N + j) - t2)});
  }
  for (Eigen::Index j = 0; j < S; ++j)
    for (Eigen::Index l = 0; l < S; ++l) r.hermitian_pairs = std::max(r.hermitian_pairs, max_abs(at(j, l) - at(l, j).adjoint()));
  return r;
}

/// Built protocol. Immutable; syndrome-factor data is stored and full-space
/// operators are produced by the accessors.
class WeakProtocol {
 public:
  WeakProtocol(int n, int k, double epsilon) : n_(n), k_(k), epsilon_(epsilon) {
    detail::check_code_dims(n, k);
    detail::check_epsilon(epsilon);
    // H_M lives on 2^(n-k) * 2^(n-k+1) dimensions and is exponentiated densely
    if (n - k > 5) throw ProtocolError("protocol: n - k above 5 is not supported");
    const Eigen::Index N = syndrome_dim();
    kraus_ = kraus_family_syndrome(n - k, epsilon);
    for (std::size_t j = 0; j < kraus_.size(); ++j) {
      const auto polar = polar_decompose(kraus_[j]);
      if (hermitian_eigenvalues(polar.positive).minCoeff() <= 1e-14) {
        throw ProtocolError("protocol: singular Kraus operator");
      }
      povm_.push_back(polar.positive);
      corrections_.push_back(polar.unitary);
      const double sign = j < static_cast<std::size_t>(N) ? 1.0 : -1.0;
      const Eigen::Index jj = static_cast<Eigen::Index>(j) % N;
      const ComplexMatrix closed = sign * (std::sqrt(static_cast<double>(N)) / 2.0) * detail::sym0(N, jj);
      if (epsilon > 0.0) {
        // exact generator: U = exp(i eps H) with H = -i log(U) / eps
        const ComplexMatrix lg = polar.unitary.log();
        correction_hams_.push_back(hermitian_part(-kI * lg / epsilon));
      } else {
        correction_hams_.push_back(closed);
      }
    }
    blocks_ = measurement_hamiltonian_blocks(n - k);
    measurement_ham_ = assemble_from_blocks(blocks_);
    measurement_unitary_ = matrix_exp(measurement_ham_, epsilon);
  }

  int n() const { return n_; }
  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  int ancilla_qubits() const { return n_ - k_ + 1; }
  Eigen::Index syndrome_dim() const { return pow2(n_ - k_); }
  Eigen::Index info_dim() const { return pow2(k_); }
  Eigen::Index system_dim() const { return pow2(n_); }
  Eigen::Index outcome_count() const { return 2 * syndrome_dim(); }

  // syndrome-factor operators
  const std::vector<ComplexMatrix>& kraus_factor() const { return kraus_; }
  const std::vector<ComplexMatrix>& povm_factor() const { return povm_; }
  const std::vector<ComplexMatrix>& corrections_factor() const { return corrections_; }
  const std::vector<ComplexMatrix>& correction_hams_factor() const { return correction_hams_; }
  const std::vector<std::vector<ComplexMatrix>>& measurement_blocks() const { return blocks_; }
  /// H_M on syndrome (x) ancilla
  const ComplexMatrix& measurement_ham_factor() const { return measurement_ham_; }
  /// exp(i eps H_M) on syndrome (x) ancilla
  const ComplexMatrix& measurement_unitary_factor() const { return measurement_unitary_; }

  // full-space operators
  ComplexMatrix kraus(std::size_t j) const { return lift(kraus_.at(j)); }
  ComplexMatrix povm(std::size_t j) const { return lift(povm_.at(j)); }
  ComplexMatrix correction(std::size_t j) const { return lift(corrections_.at(j)); }
  ComplexMatrix correction_ham(std::size_t j) const { return lift(correction_hams_.at(j)); }
  ComplexMatrix measurement_ham() const { return lift(measurement_ham_); }

  /// |+>^(n-k+1)
  ComplexVector ancilla_state() const {
    const Eigen::Index S = outcome_count();
    return ComplexVector::Constant(S, Complex(1.0 / std::sqrt(static_cast<double>(S)), 0.0));
  }

  /// <j_a| U_M |A0> restricted to the syndrome factor: the operator that the
  /// dilation actually applies for outcome j.
  ComplexMatrix dilated_operator_factor(std::size_t j) const {
    const Eigen::Index N = syndrome_dim(), S = outcome_count();
    const ComplexVector a0 = ancilla_state();
    ComplexMatrix out(N, N);
    for (Eigen::Index p = 0; p < N; ++p)
      for (Eigen::Index q = 0; q < N; ++q) {
        Complex acc = 0.0;
        for (Eigen::Index l = 0; l < S; ++l) acc += measurement_unitary_(p * S + static_cast<Eigen::Index>(j), q * S + l) * a0(l);
        out(p, q) = acc;
      }
    return out;
  }

 private:
  ComplexMatrix lift(const ComplexMatrix& m) const { return tensor(identity(info_dim()), m); }

  int n_;
  int k_;
  double epsilon_;
  std::vector<ComplexMatrix> kraus_;
  std::vector<ComplexMatrix> povm_;
  std::vector<ComplexMatrix> corrections_;
  std::vector<ComplexMatrix> correction_hams_;
  std::vector<std::vector<ComplexMatrix>> blocks_;
  ComplexMatrix measurement_ham_;
  ComplexMatrix measurement_unitary_;
};

inline WeakProtocol build_protocol(int n, int k, double epsilon) { return WeakProtocol(n, k, epsilon); }

struct PolarFamily {
  std::vector<ComplexMatrix> povm;
  std::vector<ComplexMatrix> corrections;
  std::vector<ComplexMatrix> correction_hams;
};

/// Full-space polar factors and correction generators.
inline PolarFamily polar_family(const WeakProtocol& p) {
  PolarFamily out;
  for (std::size_t j = 0; j < p.kraus_factor().size(); ++j) {
    out.povm.push_back(p.povm(j));
    out.corrections.push_back(p.correction(j));
    out.correction_hams.push_back(p.correction_ham(j));
  }
  return out;
}

struct DilationReport {
  double residual = 0.0;  ///< max over trials and outcomes of ||<j_a|U_M|psi,A0> - M_j psi||
  OrderConditionReport order_conditions;
  int trials = 0;
};

/// Haar-random system states; per-trial seeds derived from (seed, trial).
inline DilationReport verify_dilation(const WeakProtocol& p, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_dilation: trials must be positive");
  const Eigen::Index N = p.syndrome_dim(), A = p.info_dim();
  const auto S = static_cast<std::size_t>(p.outcome_count());
  std::vector<ComplexMatrix> dilated(S);
  for (std::size_t j = 0; j < S; ++j) dilated[j] = p.dilated_operator_factor(j);
  std::vector<double> per_trial(static_cast<std::size_t>(trials), 0.0);
  parallel_for(trials, [&](int t) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    std::normal_distribution<double> g;
    ComplexMatrix psi(N, A);  // column a = syndrome amplitudes for info index a
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index a = 0; a < A; ++a) psi(i, a) = Complex(g(rng), g(rng));
    psi /= psi.norm();
    double worst = 0.0;
    for (std::size_t j = 0; j < S; ++j) {
      worst = std::max(worst, (dilated[j] * psi - p.povm_factor()[j] * psi).norm());
    }
    per_trial[static_cast<std::size_t>(t)] = worst;
  });
  DilationReport r;
  r.trials = trials;
  for (double v : per_trial) r.residual = std::max(r.residual, v);
  r.order_conditions = check_order_conditions(p.measurement_blocks());
  return r;
}

/// The composed map rho -> sum_j U_{C,j} <j_a|U_M (rho (x) |A0><A0|) U_M^dagger|j_a> U_{C,j}^dagger
/// as an exact Kraus channel on the full space.
inline KrausChannel effective_channel(const WeakProtocol& p) {
  std::vector<ComplexMatrix> ops;
  const auto S = static_cast<std::size_t>(p.outcome_count());
  for (std::size_t j = 0; j < S; ++j) {
    ops.push_back(tensor(identity(p.info_dim()), p.corrections_factor()[j] * p.dilated_operator_factor(j)));
  }
  return KrausChannel(std::move(ops), true, p.epsilon());
}

// ---- text dump ---------------------------------------------------------

enum class DumpLayout { factor, full };

struct NamedMatrix {
  std::string name;
  ComplexMatrix value;
};

inline void write_matrix(std::ostream& os, const std::string& name, const ComplexMatrix& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  std::ostringstream line;
  line.imbue(std::locale::classic());
  line << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    line.str("");
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) line << ' ';
      line << m(r, c).real() << ' ' << m(r, c).imag();
    }
    os << line.str() << '\n';
  }
}

/// Header, then H_M, every M_j and every U_{C,j}; each matrix is written as
/// "matrix <name> <rows> <cols>" followed by one line per row of
/// "re im" pairs with 17 significant digits.
inline void write_protocol_dump(std::ostream& os, const WeakProtocol& p, DumpLayout layout) {
  const bool full = layout == DumpLayout::full;
  std::ostringstream eps;
  eps.imbue(std::locale::classic());
  eps << std::setprecision(17) << p.epsilon();
  os << "ctqec-protocol-dump 1\n";
  os << "n " << p.n() << "\nk " << p.k() << "\nepsilon " << eps.str() << "\nlayout " << (full ? "full" : "factor")
     << "\nancilla_qubits " << p.ancilla_qubits() << '\n';
  write_matrix(os, "H_M", full ? p.measurement_ham() : p.measurement_ham_factor());
  for (std::size_t j = 0; j < p.povm_factor().size(); ++j)
    write_matrix(os, "M_" + std::to_string(j), full ? p.povm(j) : p.povm_factor()[j]);
  for (std::size_t j = 0; j < p.corrections_factor().size(); ++j)
    write_matrix(os, "U_C_" + std::to_string(j), full ? p.correction(j) : p.corrections_factor()[j]);
}

/// Reads every "matrix" record of a dump; header lines are skipped.
inline std::vector<NamedMatrix> read_matrix_dump(std::istream& is) {
  std::vector<NamedMatrix> out;
  std::string word;
  while (is >> word) {
    if (word != "matrix") {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    NamedMatrix m;
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> m.name >> rows >> cols) || rows <= 0 || cols <= 0) throw std::runtime_error("dump: bad matrix header");
    m.value.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        double re = 0.0, im = 0.0;
        if (!(is >> re >> im)) throw std::runtime_error("dump: truncated matrix " + m.name);
        m.value(r, c) = Complex(re, im);
      }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ctqec

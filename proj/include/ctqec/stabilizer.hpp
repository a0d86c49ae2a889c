#pragma once

// Stabilizer codes and the three bases used by the protocols:
//
//   physical  - where noise acts;
//   encoded   - U_E^dagger (.) U_E: first k qubits carry information, the
//               last n-k qubits form the syndrome register |j>;
//   corrected - U_G U_E^dagger (.) U_E U_G^dagger: every correctable error
//               acts on a codeword only through the syndrome register.
//
// Syndrome register labels follow the usual binary convention: bit l-1 of
// j (weight 2^(l-1)) sits on qubit n-l, so j = 1 is |0...01>.

#include "ctqec/linalg.hpp"
#include "ctqec/pauli.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace ctqec {

class CodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index of a syndrome pattern: bit l-1 is set iff the error anticommutes
/// with generator g_l.
struct SyndromeIndex {
  std::uint32_t value = 0;
  auto operator<=>(const SyndromeIndex&) const = default;
};

namespace detail {

inline std::uint64_t low_mask(int bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

/// Packs the symplectic vector of p as x | (z << n).
inline std::uint64_t pack(const PauliOperator& p) { return p.x_bits() | (p.z_bits() << p.size()); }

inline PauliOperator unpack(int n, std::uint64_t v) { return PauliOperator(n, v & low_mask(n), v >> n, 0); }

inline int symplectic(std::uint64_t a, std::uint64_t b, int n) {
  const std::uint64_t m = low_mask(n);
  return (std::popcount((a & m) & (b >> n)) + std::popcount((a >> n) & (b & m))) % 2;
}

/// Incremental GF(2) row space that remembers which inserted vectors
/// combine into each basis row.
class Gf2Basis {
 public:
  /// Returns false if v is already in the span.
  bool insert(std::uint64_t v) {
    std::uint64_t combo = std::uint64_t{1} << count_;
    ++count_;
    std::tie(v, combo) = reduce_with_combo(v, combo);
    if (v == 0) return false;
    rows_.push_back({v, combo, 63 - std::countl_zero(v)});
    std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) { return a.pivot > b.pivot; });
    return true;
  }

  /// Bitmask over inserted vectors whose XOR equals target, if any.
  std::optional<std::uint64_t> solve(std::uint64_t target) const {
    auto [residual, combo] = reduce_with_combo(target, 0);
    if (residual != 0) return std::nullopt;
    return combo;
  }

  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  struct Row {
    std::uint64_t value;
    std::uint64_t combo;
    int pivot;
  };

  std::pair<std::uint64_t, std::uint64_t> reduce_with_combo(std::uint64_t v, std::uint64_t combo) const {
    for (const Row& r : rows_) {
      if ((v >> r.pivot) & 1U) {
        v ^= r.value;
        combo ^= r.combo;
      }
    }
    return {v, combo};
  }

  std::vector<Row> rows_;
  int count_ = 0;
};

/// Applies a Pauli operator to a state vector on n qubits.
inline ComplexVector apply_pauli(const PauliOperator& p, const ComplexVector& psi) {
  const int n = p.size();
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
  int y_count = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    const PauliLetter l = p.letter(q);
    if (l == PauliLetter::X || l == PauliLetter::Y) flip |= bit;
    if (l == PauliLetter::Z || l == PauliLetter::Y) sign |= bit;
    if (l == PauliLetter::Y) ++y_count;
  }
  const Complex global = PauliOperator(1, 0, 0, p.phase() + y_count).phase_factor();
  ComplexVector out = ComplexVector::Zero(psi.size());
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const double s = (std::popcount(ub & sign) % 2) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(ub ^ flip)) += global * s * psi(b);
  }
  return out;
}

/// Pauli strings of weight w on n qubits in lexicographic order with
/// I < X < Y < Z and the leftmost qubit most significant.
inline std::vector<PauliOperator> paulis_of_weight(int n, int w) {
  std::vector<PauliOperator> out;
  const std::uint64_t total = std::uint64_t{1} << (2 * n);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    PauliOperator p(n);
    int weight = 0;
    for (int q = 0; q < n; ++q) {
      const auto digit = static_cast<int>((idx >> (2 * (n - 1 - q))) & 3U);
      if (digit != 0) ++weight;
      p.set_letter(q, static_cast<PauliLetter>(digit));
    }
    if (weight == w) out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// An [[n,k]] stabilizer code together with its encoding and correcting
/// unitaries. All invariants are checked on construction; instances are
/// immutable afterwards.
class StabilizerCode {
 public:
  StabilizerCode(std::string name, int n, int k, std::vector<PauliOperator> generators,
                 std::vector<PauliOperator> correctable_errors, ComplexMatrix encoding_unitary,
                 ComplexMatrix correcting_unitary)
      : name_(std::move(name)),
        n_(n),
        k_(k),
        generators_(std::move(generators)),
        correctable_errors_(std::move(correctable_errors)),
        encoding_unitary_(std::move(encoding_unitary)),
        correcting_unitary_(std::move(correcting_unitary)) {
    validate();
  }

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int syndrome_qubits() const { return n_ - k_; }
  Eigen::Index dim() const { return pow2(n_); }
  Eigen::Index info_dim() const { return pow2(k_); }
  Eigen::Index syndrome_dim() const { return pow2(n_ - k_); }

  const std::vector<PauliOperator>& generators() const { return generators_; }
  const std::vector<PauliOperator>& correctable_errors() const { return correctable_errors_; }
  const ComplexMatrix& encoding_unitary() const { return encoding_unitary_; }
  const ComplexMatrix& correcting_unitary() const { return correcting_unitary_; }

  /// U_G U_E^dagger: maps physical-basis vectors to corrected-basis vectors.
  ComplexMatrix corrected_frame() const { return correcting_unitary_ * encoding_unitary_.adjoint(); }

  /// prod_l (I + g_l) / 2 in the physical basis.
  ComplexMatrix codespace_projector() const {
    ComplexMatrix p = identity(dim());
    for (const auto& g : generators_) p = p * (0.5 * (identity(dim()) + g.matrix()));
    return p;
  }

  /// The 2^k x 2^k block U_{G,j} acting on the information factor when the
  /// syndrome register holds j.
  ComplexMatrix correction_block(Eigen::Index j) const {
    const Eigen::Index N = syndrome_dim();
    ComplexMatrix block(info_dim(), info_dim());
    for (Eigen::Index a = 0; a < info_dim(); ++a) {
      for (Eigen::Index b = 0; b < info_dim(); ++b) block(a, b) = correcting_unitary_(a * N + j, b * N + j);
    }
    return block;
  }

  /// True iff p (with phase) is an element of the stabilizer group.
  bool in_stabilizer_group(const PauliOperator& p) const {
    detail::Gf2Basis basis;
    for (const auto& g : generators_) basis.insert(detail::pack(g));
    const auto combo = basis.solve(detail::pack(p));
    if (!combo) return false;
    PauliOperator product = PauliOperator::identity(n_);
    for (std::size_t l = 0; l < generators_.size(); ++l) {
      if ((*combo >> l) & 1U) product = product * generators_[l];
    }
    return product == p;
  }

 private:
  void validate() const {
    if (n_ < 1 || k_ < 0 || k_ > n_) throw CodeError("stabilizer code: require n >= 1 and 0 <= k <= n");
    if (static_cast<int>(generators_.size()) != n_ - k_) {
      throw CodeError("stabilizer code: expected " + std::to_string(n_ - k_) + " generators, got " +
                      std::to_string(generators_.size()));
    }
    detail::Gf2Basis basis;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      const auto& g = generators_[i];
      if (g.size() != n_) throw CodeError("stabilizer code: generator " + g.to_string() + " has wrong length");
      if (!g.is_hermitian()) throw CodeError("stabilizer code: generator " + g.to_string() + " is not Hermitian");
      for (std::size_t j = 0; j < i; ++j) {
        if (!g.commutes_with(generators_[j])) {
          throw CodeError("stabilizer code: generators " + generators_[j].to_string() + " and " + g.to_string() +
                          " do not commute");
        }
      }
      if (!basis.insert(detail::pack(g))) {
        throw CodeError("stabilizer code: generator " + g.to_string() + " is dependent on the others");
      }
    }
    const Eigen::Index d = dim();
    if (encoding_unitary_.rows() != d || encoding_unitary_.cols() != d || correcting_unitary_.rows() != d ||
        correcting_unitary_.cols() != d) {
      throw CodeError("stabilizer code: unitaries must be 2^n x 2^n");
    }
    if (unitarity_residual(encoding_unitary_) > tolerances().unitary) {
      throw CodeError("stabilizer code: encoding unitary is not unitary");
    }
    if (unitarity_residual(correcting_unitary_) > tolerances().unitary) {
      throw CodeError("stabilizer code: correcting unitary is not unitary");
    }
    const Eigen::Index N = syndrome_dim();
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        if (r % N != c % N && std::abs(correcting_unitary_(r, c)) > tolerances().unitary) {
          throw CodeError("stabilizer code: correcting unitary is not block-diagonal in the syndrome register");
        }
      }
    }
    for (const auto& e : correctable_errors_) {
      if (e.size() != n_) throw CodeError("stabilizer code: correctable error " + e.to_string() + " has wrong length");
    }
    for (std::size_t i = 0; i < correctable_errors_.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const PauliOperator prod = correctable_errors_[i] * correctable_errors_[j];
        bool detectable = false;
        for (const auto& g : generators_) detectable = detectable || !prod.commutes_with(g);
        if (!detectable && !in_stabilizer_group(prod)) {
          throw CodeError("stabilizer code: errors " + correctable_errors_[i].to_string() + " and " +
                          correctable_errors_[j].to_string() + " are not jointly correctable");
        }
      }
    }
  }

  std::string name_;
  int n_;
  int k_;
  std::vector<PauliOperator> generators_;
  std::vector<PauliOperator> correctable_errors_;
  ComplexMatrix encoding_unitary_;
  ComplexMatrix correcting_unitary_;
};

inline SyndromeIndex syndrome_of(const StabilizerCode& code, const PauliOperator& e) {
  if (e.size() != code.n()) {
    throw DimensionError("syndrome_of: error acts on " + std::to_string(e.size()) + " qubits, code has " +
                         std::to_string(code.n()));
  }
  std::uint32_t s = 0;
  for (std::size_t l = 0; l < code.generators().size(); ++l) {
    if (!e.commutes_with(code.generators()[l])) s |= std::uint32_t{1} << l;
  }
  return SyndromeIndex{s};
}

namespace detail {

inline void require_code_dim(const StabilizerCode& code, const ComplexMatrix& op, const char* what) {
  if (op.rows() != code.dim() || op.cols() != code.dim()) {
    throw DimensionError(std::string(what) + ": operator must be " + std::to_string(code.dim()) + "x" +
                         std::to_string(code.dim()));
  }
}

}  // namespace detail

/// U_E^dagger op U_E.
inline ComplexMatrix to_encoded(const StabilizerCode& code, const ComplexMatrix& op_physical) {
  detail::require_code_dim(code, op_physical, "to_encoded");
  return code.encoding_unitary().adjoint() * op_physical * code.encoding_unitary();
}

/// (U_G U_E^dagger) op (U_G U_E^dagger)^dagger.
inline ComplexMatrix to_corrected(const StabilizerCode& code, const ComplexMatrix& op_physical) {
  detail::require_code_dim(code, op_physical, "to_corrected");
  const ComplexMatrix t = code.corrected_frame();
  return t * op_physical * t.adjoint();
}

inline ComplexMatrix from_corrected(const StabilizerCode& code, const ComplexMatrix& op_corrected) {
  detail::require_code_dim(code, op_corrected, "from_corrected");
  const ComplexMatrix t = code.corrected_frame();
  return t.adjoint() * op_corrected * t;
}

/// Syndrome-register label that the Pauli e moves a codeword into, read off
/// in the encoded basis. Returns nullopt if e does not map the trivial
/// register to a single register (never the case for Clifford encoders).
inline std::optional<Eigen::Index> register_of(int n, int k, const ComplexMatrix& encoder, const PauliOperator& e) {
  const Eigen::Index N = pow2(n - k);
  const Eigen::Index A = pow2(k);
  const ComplexMatrix enc = encoder.adjoint() * e.matrix() * encoder;
  std::optional<Eigen::Index> found;
  for (Eigen::Index j = 0; j < N; ++j) {
    double norm2 = 0.0;
    for (Eigen::Index a = 0; a < A; ++a) {
      for (Eigen::Index b = 0; b < A; ++b) norm2 += std::norm(enc(a * N + j, b * N));
    }
    if (norm2 > 0.5 * static_cast<double>(A)) {
      if (norm2 < static_cast<double>(A) - 1e-8 || found) return std::nullopt;
      found = j;
    }
  }
  return found;
}

struct CorrectionTable {
  ComplexMatrix correcting_unitary;
  std::vector<PauliOperator> leaders;  ///< leaders[j] is the coset leader moving codewords to register j
};

/// Builds U_G = sum_j U_{G,j} (x) |j><j| where U_{G,j} undoes the action of
/// the register's leader on the information factor. Errors in `preferred`
/// claim their registers first (a code's declared correctable set must be
/// corrected exactly); remaining registers take minimum-weight coset leaders
/// with ties broken lexicographically (I < X < Y < Z, leftmost qubit first).
inline CorrectionTable derive_correction(int n, int k, const ComplexMatrix& encoder,
                                         const std::vector<PauliOperator>& preferred = {}) {
  const Eigen::Index N = pow2(n - k);
  const Eigen::Index A = pow2(k);
  std::vector<std::optional<PauliOperator>> leaders(static_cast<std::size_t>(N));
  std::vector<ComplexMatrix> blocks(static_cast<std::size_t>(N));
  Eigen::Index filled = 0;
  auto claim = [&](const PauliOperator& p) {
    const auto j = register_of(n, k, encoder, p);
    if (!j || leaders[static_cast<std::size_t>(*j)]) return;
    const ComplexMatrix enc = encoder.adjoint() * p.matrix() * encoder;
    ComplexMatrix block(A, A);
    for (Eigen::Index a = 0; a < A; ++a) {
      for (Eigen::Index b = 0; b < A; ++b) block(a, b) = enc(a * N + *j, b * N);
    }
    leaders[static_cast<std::size_t>(*j)] = p;
    blocks[static_cast<std::size_t>(*j)] = block.adjoint();
    ++filled;
  };
  for (const auto& p : preferred) claim(p);
  for (int w = 0; w <= n && filled < N; ++w) {
    for (const auto& p : detail::paulis_of_weight(n, w)) {
      claim(p);
      if (filled == N) break;
    }
  }
  if (filled != N) throw CodeError("derive_correction: some syndrome registers are unreachable by Pauli errors");
  CorrectionTable table;
  table.correcting_unitary = ComplexMatrix::Zero(A * N, A * N);
  for (Eigen::Index j = 0; j < N; ++j) {
    table.correcting_unitary += tensor(blocks[static_cast<std::size_t>(j)], outer_basis(N, j, j));
    table.leaders.push_back(*leaders[static_cast<std::size_t>(j)]);
  }
  return table;
}

namespace detail {

struct SymplecticFrame {
  std::vector<PauliOperator> destabilizers;  ///< D_l anticommutes with g_l only
  std::vector<PauliOperator> logical_z;
  std::vector<PauliOperator> logical_x;
};

/// Completes commuting independent generators to a symplectic basis:
/// destabilizers from a Gauss-Jordan solve, logical pairs from symplectic
/// Gram-Schmidt over single-qubit Z/X candidates.
inline SymplecticFrame symplectic_frame(int n, const std::vector<PauliOperator>& generators) {
  const int r = static_cast<int>(generators.size());
  const int k = n - r;
  SymplecticFrame frame;

  // Solve <D, g_m> = delta_lm. With s_m = swap(g_m) the constraint is the
  // ordinary GF(2) dot product D . s_m.
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(r));
  std::vector<std::uint64_t> aug(static_cast<std::size_t>(r));
  for (int m = 0; m < r; ++m) {
    const auto& g = generators[static_cast<std::size_t>(m)];
    rows[static_cast<std::size_t>(m)] = g.z_bits() | (g.x_bits() << n);
    aug[static_cast<std::size_t>(m)] = std::uint64_t{1} << m;
  }
  std::vector<int> pivots;
  int pr = 0;
  for (int col = 0; col < 2 * n && pr < r; ++col) {
    int sel = -1;
    for (int i = pr; i < r; ++i) {
      if ((rows[static_cast<std::size_t>(i)] >> col) & 1U) {
        sel = i;
        break;
      }
    }
    if (sel < 0) continue;
    std::swap(rows[static_cast<std::size_t>(sel)], rows[static_cast<std::size_t>(pr)]);
    std::swap(aug[static_cast<std::size_t>(sel)], aug[static_cast<std::size_t>(pr)]);
    for (int i = 0; i < r; ++i) {
      if (i != pr && ((rows[static_cast<std::size_t>(i)] >> col) & 1U)) {
        rows[static_cast<std::size_t>(i)] ^= rows[static_cast<std::size_t>(pr)];
        aug[static_cast<std::size_t>(i)] ^= aug[static_cast<std::size_t>(pr)];
      }
    }
    pivots.push_back(col);
    ++pr;
  }
  if (pr != r) throw CodeError("symplectic_frame: generators are dependent");

  std::vector<std::uint64_t> destab(static_cast<std::size_t>(r), 0);
  for (int l = 0; l < r; ++l) {
    for (int i = 0; i < r; ++i) {
      if ((aug[static_cast<std::size_t>(i)] >> l) & 1U) destab[static_cast<std::size_t>(l)] |= std::uint64_t{1} << pivots[static_cast<std::size_t>(i)];
    }
  }
  std::vector<std::uint64_t> gens(static_cast<std::size_t>(r));
  for (int m = 0; m < r; ++m) gens[static_cast<std::size_t>(m)] = pack(generators[static_cast<std::size_t>(m)]);
  // Make destabilizers mutually commuting; multiplying D_l by g_m only flips
  // its commutation with D_m.
  for (int l = 0; l < r; ++l) {
    for (int m = 0; m < l; ++m) {
      if (symplectic(destab[static_cast<std::size_t>(l)], destab[static_cast<std::size_t>(m)], n)) {
        destab[static_cast<std::size_t>(l)] ^= gens[static_cast<std::size_t>(m)];
      }
    }
  }
  for (auto d : destab) frame.destabilizers.push_back(unpack(n, d));

  auto project_out_pair = [n](std::uint64_t c, std::uint64_t a, std::uint64_t b) {
    // a, b with <a,b> = 1: remove the components of c along the pair.
    const int ca = symplectic(c, a, n);
    const int cb = symplectic(c, b, n);
    if (cb) c ^= a;
    if (ca) c ^= b;
    return c;
  };

  std::vector<std::uint64_t> candidates;
  for (int q = 0; q < n; ++q) {
    candidates.push_back(pack(PauliOperator::single(n, q, PauliLetter::Z)));
    candidates.push_back(pack(PauliOperator::single(n, q, PauliLetter::X)));
  }
  for (auto& c : candidates) {
    for (int l = 0; l < r; ++l) c = project_out_pair(c, gens[static_cast<std::size_t>(l)], destab[static_cast<std::size_t>(l)]);
  }
  while (static_cast<int>(frame.logical_z.size()) < k) {
    auto it = std::find_if(candidates.begin(), candidates.end(), [](std::uint64_t c) { return c != 0; });
    if (it == candidates.end()) throw CodeError("symplectic_frame: failed to find logical operators");
    const std::uint64_t a = *it;
    candidates.erase(it);
    auto jt = std::find_if(candidates.begin(), candidates.end(),
                           [&](std::uint64_t c) { return symplectic(a, c, n) == 1; });
    if (jt == candidates.end()) throw CodeError("symplectic_frame: logical operator without partner");
    const std::uint64_t b = *jt;
    candidates.erase(jt);
    for (auto& c : candidates) c = project_out_pair(c, a, b);
    frame.logical_z.push_back(unpack(n, a));
    frame.logical_x.push_back(unpack(n, b));
  }
  return frame;
}

}  // namespace detail

/// Synthesises U_E as the Clifford map |a, j> -> Xbar^a D^j |0bar>, where
/// |0bar> is the joint +1 eigenstate of the generators and logical Z's. In
/// the encoded basis g_l then acts as Z on the syndrome bit of weight
/// 2^(l-1). U_G comes from derive_correction(); the correctable set is the
/// list of coset leaders ordered by syndrome register.
inline StabilizerCode build_code_from_generators(int n, int k, const std::vector<PauliOperator>& generators,
                                                 std::string name = "custom") {
  if (n < 1 || n > 10) throw CodeError("build_code_from_generators: n must be in [1, 10]");
  if (k < 0 || k > n) throw CodeError("build_code_from_generators: k must be in [0, n]");
  if (static_cast<int>(generators.size()) != n - k) {
    throw CodeError("build_code_from_generators: expected " + std::to_string(n - k) + " generators, got " +
                    std::to_string(generators.size()));
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.size() != n) throw CodeError("build_code_from_generators: generator " + g.to_string() + " has wrong length");
    if (!g.is_hermitian()) throw CodeError("build_code_from_generators: generator " + g.to_string() + " is not Hermitian");
    for (std::size_t j = 0; j < i; ++j) {
      if (!g.commutes_with(generators[j])) {
        throw CodeError("build_code_from_generators: generators " + generators[j].to_string() + " and " +
                        g.to_string() + " do not commute");
      }
    }
  }
  detail::Gf2Basis basis;
  for (const auto& g : generators) {
    if (!basis.insert(detail::pack(g))) {
      throw CodeError("build_code_from_generators: generator " + g.to_string() + " is dependent on the others");
    }
  }

  const auto frame = detail::symplectic_frame(n, generators);
  const Eigen::Index d = pow2(n);
  ComplexVector zero_state;
  for (Eigen::Index s = 0; s < d; ++s) {
    ComplexVector v = basis_ket(d, s);
    for (const auto& g : generators) v = 0.5 * (v + detail::apply_pauli(g, v));
    for (const auto& z : frame.logical_z) v = 0.5 * (v + detail::apply_pauli(z, v));
    if (v.norm() > 1e-8) {
      zero_state = v / v.norm();
      break;
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(zero_state(i)) > 1e-12) {
      zero_state *= std::conj(zero_state(i)) / std::abs(zero_state(i));
      break;
    }
  }

  const int r = n - k;
  const Eigen::Index N = pow2(r);
  ComplexMatrix encoder(d, d);
  for (Eigen::Index a = 0; a < pow2(k); ++a) {
    for (Eigen::Index j = 0; j < N; ++j) {
      ComplexVector v = zero_state;
      for (int l = 0; l < r; ++l) {
        if ((j >> l) & 1) v = detail::apply_pauli(frame.destabilizers[static_cast<std::size_t>(l)], v);
      }
      for (int i = 0; i < k; ++i) {
        // information qubit i is bit (k-1-i) of a
        if ((a >> (k - 1 - i)) & 1) v = detail::apply_pauli(frame.logical_x[static_cast<std::size_t>(i)], v);
      }
      encoder.col(a * N + j) = v;
    }
  }
  auto table = derive_correction(n, k, encoder);
  return StabilizerCode(std::move(name), n, k, generators, table.leaders, std::move(encoder),
                        std::move(table.correcting_unitary));
}

enum class BuiltinCode { three_qubit_bit_flip, three_qubit_phase_flip, five_qubit_perfect };

inline std::vector<std::string> builtin_code_names() {
  return {"three_qubit_bit_flip", "three_qubit_phase_flip", "five_qubit_perfect"};
}

inline StabilizerCode builtin_code(BuiltinCode which) {
  using P = PauliOperator;
  switch (which) {
    case BuiltinCode::three_qubit_bit_flip:
    case BuiltinCode::three_qubit_phase_flip: {
      // |0><0| (x) I (x) I + |1><1| (x) X (x) X
      const ComplexMatrix x = P::parse("X").matrix();
      const ComplexMatrix cnot_pair = tensor(outer_basis(2, 0, 0), identity(4)) +
                                      tensor(outer_basis(2, 1, 1), tensor(x, x));
      const bool bit = which == BuiltinCode::three_qubit_bit_flip;
      ComplexMatrix encoder = cnot_pair;
      if (!bit) {
        const ComplexMatrix h = (ComplexMatrix(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
        encoder = tensor({h, h, h}) * cnot_pair;
      }
      const char e = bit ? 'X' : 'Z';
      const char s = bit ? 'Z' : 'X';
      std::vector<P> generators{P::parse(std::string{s, s, 'I'}), P::parse(std::string{s, 'I', s})};
      std::vector<P> errors{P::parse("III"), P::parse(std::string{e, 'I', 'I'}), P::parse(std::string{'I', e, 'I'}),
                            P::parse(std::string{'I', 'I', e})};
      auto table = derive_correction(3, 1, encoder, errors);
      return StabilizerCode(bit ? "three_qubit_bit_flip" : "three_qubit_phase_flip", 3, 1, std::move(generators),
                            std::move(errors), std::move(encoder), std::move(table.correcting_unitary));
    }
    case BuiltinCode::five_qubit_perfect: {
      std::vector<P> generators{P::parse("XZZXI"), P::parse("IXZZX"), P::parse("XIXZZ"), P::parse("ZXIXZ")};
      auto base = build_code_from_generators(5, 1, generators, "five_qubit_perfect");
      std::vector<P> errors{P::identity(5)};
      for (int q = 0; q < 5; ++q) {
        for (auto l : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) errors.push_back(P::single(5, q, l));
      }
      return StabilizerCode("five_qubit_perfect", 5, 1, generators, std::move(errors), base.encoding_unitary(),
                            base.correcting_unitary());
    }
  }
  throw CodeError("builtin_code: unknown code");
}

inline StabilizerCode builtin_code(std::string_view name) {
  if (name == "three_qubit_bit_flip") return builtin_code(BuiltinCode::three_qubit_bit_flip);
  if (name == "three_qubit_phase_flip") return builtin_code(BuiltinCode::three_qubit_phase_flip);
  if (name == "five_qubit_perfect") return builtin_code(BuiltinCode::five_qubit_perfect);
  throw CodeError("unknown code name: " + std::string(name));
}

/// Malformed code-definition text. line() is 1-based.
class CodeFileError : public CodeError {
 public:
  CodeFileError(int line, const std::string& message)
      : CodeError("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct CodeDefinition {
  int n = 0;
  int k = 0;
  std::vector<PauliOperator> generators;
};

/// Reads a code definition: a header line "n k" followed by one generator
/// per line as a Pauli string ("ZZI", "-XIX"). Blank lines and text after
/// '#' are ignored.
inline CodeDefinition parse_code_definition(std::istream& in) {
  CodeDefinition def;
  std::string raw;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = raw.substr(0, hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 2) throw CodeFileError(line_no, "expected header \"n k\"");
      try {
        std::size_t used_n = 0;
        std::size_t used_k = 0;
        def.n = std::stoi(tokens[0], &used_n);
        def.k = std::stoi(tokens[1], &used_k);
        if (used_n != tokens[0].size() || used_k != tokens[1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw CodeFileError(line_no, "header must contain two integers \"n k\"");
      }
      if (def.n < 1 || def.k < 0 || def.k > def.n) throw CodeFileError(line_no, "require n >= 1 and 0 <= k <= n");
      have_header = true;
      continue;
    }
    if (tokens.size() != 1) throw CodeFileError(line_no, "expected a single Pauli string");
    PauliOperator g;
    try {
      g = PauliOperator::parse(tokens[0]);
    } catch (const std::exception& ex) {
      throw CodeFileError(line_no, ex.what());
    }
    if (g.size() != def.n) {
      throw CodeFileError(line_no, "generator " + tokens[0] + " has length " + std::to_string(g.size()) +
                                       ", expected " + std::to_string(def.n));
    }
    def.generators.push_back(g);
  }
  if (!have_header) throw CodeFileError(line_no == 0 ? 1 : line_no, "missing header \"n k\"");
  if (static_cast<int>(def.generators.size()) != def.n - def.k) {
    throw CodeFileError(line_no, "expected " + std::to_string(def.n - def.k) + " generators, found " +
                                     std::to_string(def.generators.size()));
  }
  return def;
}

inline StabilizerCode load_code_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CodeError("cannot open code file: " + path);
  const auto def = parse_code_definition(in);
  return build_code_from_generators(def.n, def.k, def.generators, path);
}

/// Built-in name or path to a code-definition file.
inline StabilizerCode resolve_code(const std::string& spec) {
  const auto names = builtin_code_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return builtin_code(spec);
  return load_code_file(spec);
}

}  // namespace ctqec

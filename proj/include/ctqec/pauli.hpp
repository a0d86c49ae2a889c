#pragma once

#include "ctqec/linalg.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace ctqec {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Element of the n-qubit Pauli group: i^phase times a tensor product of
/// single-qubit letters. Qubit 0 is the leftmost (most significant) factor.
/// Letters are stored in symplectic form: bit q of x_/z_ encodes qubit q,
/// with Y = (x=1, z=1). Supports up to 32 qubits.
class PauliOperator {
 public:
  static constexpr int kMaxQubits = 32;

  explicit PauliOperator(int n = 1) : n_(checked_size(n)) {}

  PauliOperator(int n, std::uint64_t x_bits, std::uint64_t z_bits, int phase = 0)
      : n_(checked_size(n)), x_(x_bits & mask(n)), z_(z_bits & mask(n)), phase_(((phase % 4) + 4) % 4) {}

  static PauliOperator identity(int n) { return PauliOperator(n); }

  static PauliOperator single(int n, int qubit, PauliLetter letter) {
    PauliOperator p(n);
    p.set_letter(qubit, letter);
    return p;
  }

  /// Parses strings such as "ZZI", "-XIX", "+iYZ", "-iXX".
  static PauliOperator parse(std::string_view text) {
    int phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase += 1;
      ++pos;
    }
    const std::string_view letters = text.substr(pos);
    if (letters.empty()) throw std::invalid_argument("PauliOperator::parse: empty Pauli string");
    if (letters.size() > static_cast<std::size_t>(kMaxQubits)) {
      throw std::invalid_argument("PauliOperator::parse: too many qubits");
    }
    PauliOperator p(static_cast<int>(letters.size()));
    p.phase_ = phase % 4;
    for (std::size_t q = 0; q < letters.size(); ++q) {
      switch (letters[q]) {
        case 'I': break;
        case 'X': p.set_letter(static_cast<int>(q), PauliLetter::X); break;
        case 'Y': p.set_letter(static_cast<int>(q), PauliLetter::Y); break;
        case 'Z': p.set_letter(static_cast<int>(q), PauliLetter::Z); break;
        default:
          throw std::invalid_argument("PauliOperator::parse: invalid letter '" + std::string(1, letters[q]) +
                                      "' in \"" + std::string(text) + "\"");
      }
    }
    return p;
  }

  int size() const { return n_; }
  int phase() const { return phase_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }

  PauliLetter letter(int qubit) const {
    const bool x = (x_ >> qubit) & 1U;
    const bool z = (z_ >> qubit) & 1U;
    if (x && z) return PauliLetter::Y;
    if (x) return PauliLetter::X;
    if (z) return PauliLetter::Z;
    return PauliLetter::I;
  }

  void set_letter(int qubit, PauliLetter l) {
    if (qubit < 0 || qubit >= n_) throw std::out_of_range("PauliOperator::set_letter: qubit out of range");
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    x_ &= ~bit;
    z_ &= ~bit;
    if (l == PauliLetter::X || l == PauliLetter::Y) x_ |= bit;
    if (l == PauliLetter::Z || l == PauliLetter::Y) z_ |= bit;
  }

  int weight() const { return std::popcount(x_ | z_); }

  bool is_identity_up_to_phase() const { return (x_ | z_) == 0; }

  /// Hermitian iff the overall phase is real (letters are Hermitian).
  bool is_hermitian() const { return phase_ % 2 == 0; }

  PauliOperator without_phase() const { return PauliOperator(n_, x_, z_, 0); }

  /// Symplectic inner product; 1 iff the operators anticommute.
  int symplectic_product(const PauliOperator& other) const {
    require_same_size(other);
    return (std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) % 2;
  }

  bool commutes_with(const PauliOperator& other) const { return symplectic_product(other) == 0; }

  PauliOperator operator*(const PauliOperator& rhs) const {
    require_same_size(rhs);
    int phase = phase_ + rhs.phase_;
    for (int q = 0; q < n_; ++q) phase += letter_product(letter(q), rhs.letter(q)).first;
    return PauliOperator(n_, x_ ^ rhs.x_, z_ ^ rhs.z_, phase);
  }

  bool operator==(const PauliOperator& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_ && phase_ == other.phase_;
  }

  /// Same letters, phase ignored.
  bool equal_up_to_phase(const PauliOperator& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

  ComplexMatrix matrix() const {
    static const std::array<ComplexMatrix, 4> single = [] {
      std::array<ComplexMatrix, 4> m;
      m[0] = ComplexMatrix::Identity(2, 2);
      m[1] = ComplexMatrix::Zero(2, 2);
      m[1](0, 1) = 1.0;
      m[1](1, 0) = 1.0;
      m[2] = ComplexMatrix::Zero(2, 2);
      m[2](0, 1) = -kI;
      m[2](1, 0) = kI;
      m[3] = ComplexMatrix::Zero(2, 2);
      m[3](0, 0) = 1.0;
      m[3](1, 1) = -1.0;
      return m;
    }();
    ComplexMatrix out = single[static_cast<int>(letter(0))];
    for (int q = 1; q < n_; ++q) out = tensor(out, single[static_cast<int>(letter(q))]);
    return phase_factor() * out;
  }

  Complex phase_factor() const {
    static constexpr std::array<Complex, 4> table{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0}, Complex{0, -1}};
    return table[phase_];
  }

  std::string to_string() const {
    static constexpr std::array<const char*, 4> prefix{"", "i", "-", "-i"};
    std::string s = prefix[phase_];
    for (int q = 0; q < n_; ++q) s += "IXYZ"[static_cast<int>(letter(q))];
    return s;
  }

 private:
  static int checked_size(int n) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("PauliOperator: qubit count out of range");
    return n;
  }

  static std::uint64_t mask(int n) { return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1; }

  // a*b = i^first * second
  static std::pair<int, PauliLetter> letter_product(PauliLetter a, PauliLetter b) {
    using L = PauliLetter;
    if (a == L::I) return {0, b};
    if (b == L::I) return {0, a};
    if (a == b) return {0, L::I};
    if ((a == L::X && b == L::Y) || (a == L::Y && b == L::Z) || (a == L::Z && b == L::X)) {
      return {1, static_cast<L>(6 - static_cast<int>(a) - static_cast<int>(b))};
    }
    return {3, static_cast<L>(6 - static_cast<int>(a) - static_cast<int>(b))};
  }

  void require_same_size(const PauliOperator& other) const {
    if (other.n_ != n_) throw DimensionError("PauliOperator: qubit count mismatch");
  }

  int n_ = 1;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  int phase_ = 0;
};

}  // namespace ctqec

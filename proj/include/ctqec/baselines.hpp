#pragma once

// Comparison protocols: Oreshkov's quantum-jump scheme (full-space step and
// its four-class weight model for the 3-qubit bit-flip code) and the ADL
// averaged map.

#include "ctqec/diamond_norm.hpp"
#include "ctqec/pauli.hpp"
#include "ctqec/protocol_minimal.hpp"
#include "ctqec/stabilizer.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ctqec {

enum class DeltaPolicy { constant, optimal };

inline const char* to_string(DeltaPolicy p) { return p == DeltaPolicy::constant ? "constant" : "optimal"; }

inline DeltaPolicy parse_policy(const std::string& s) {
  if (s == "constant") return DeltaPolicy::constant;
  if (s == "optimal") return DeltaPolicy::optimal;
  throw std::invalid_argument("unknown policy '" + s + "' (expected constant or optimal)");
}

/// Class weights w0..w3 of the 3-qubit bit-flip model: no error, one, two,
/// three flips.
struct WeightVector {
  std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};

  double& operator[](std::size_t i) { return w[i]; }
  double operator[](std::size_t i) const { return w[i]; }
  double sum() const { return w[0] + w[1] + w[2] + w[3]; }

  WeightVector& operator+=(const WeightVector& o) {
    for (std::size_t i = 0; i < 4; ++i) w[i] += o.w[i];
    return *this;
  }
  friend WeightVector operator+(WeightVector a, const WeightVector& b) { return a += b; }
  friend WeightVector operator*(double s, WeightVector a) {
    for (auto& v : a.w) v *= s;
    return a;
  }
};

class DegenerateWeightsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// One application of the Oreshkov step to the class weights, exactly as the
/// four quadratic update rules read.
inline WeightVector oreshkov_weight_update(const WeightVector& w, double epsilon, double delta) {
  const double a = 3.0 * (epsilon - delta) * (epsilon - delta) / 4.0;
  const double b = (epsilon + delta) * (epsilon + delta) / 4.0;
  WeightVector out;
  out[0] = w[0] * (1 - a) + w[1] * b;
  out[1] = w[1] * (1 - b) + w[0] * a;
  out[2] = w[2] * (1 - b) + w[3] * a;
  out[3] = w[3] * (1 - a) + w[2] * b;
  const double e4 = epsilon * epsilon * epsilon * epsilon;
  if (std::abs(out.sum() - w.sum()) > std::max(e4, 1e-15)) {
    throw std::logic_error("oreshkov_weight_update: weight sum drifted");
  }
  return out;
}

/// argmax over delta of the updated w0.
inline double optimal_delta(const WeightVector& w, double epsilon) {
  if (!(3.0 * w[0] > w[1])) throw DegenerateWeightsError("optimal_delta: requires 3 w0 > w1");
  return epsilon * (3.0 * w[0] + w[1]) / (3.0 * w[0] - w[1]);
}

/// Weight ODE right-hand side (noise at rate lambda per qubit, correction at
/// rate kappa).
inline WeightVector oreshkov_ode_rhs(const WeightVector& w, double lambda, double kappa, DeltaPolicy policy) {
  double c01 = 0.0, c23 = 0.0;
  if (policy == DeltaPolicy::constant) {
    c01 = kappa * w[1];
    c23 = kappa * w[2];
  } else {
    const double den = 3.0 * w[0] - w[1];
    if (!(den > 0.0)) throw DegenerateWeightsError("oreshkov_ode_rhs: requires 3 w0 > w1");
    c01 = kappa * 3.0 * w[0] * w[1] / den;
    c23 = kappa * (9.0 * w[0] * w[0] * w[2] - 3.0 * w[1] * w[1] * w[3]) / (den * den);
  }
  WeightVector d;
  d[0] = -3 * lambda * w[0] + lambda * w[1] + c01;
  d[1] = 3 * lambda * w[0] - 3 * lambda * w[1] + 2 * lambda * w[2] - c01;
  d[2] = 3 * lambda * w[3] - 3 * lambda * w[2] + 2 * lambda * w[1] - c23;
  d[3] = -3 * lambda * w[3] + lambda * w[2] + c23;
  return d;
}

/// Optimal-policy right-hand side expanded to first order in w1/w0.
inline WeightVector oreshkov_ode_rhs_approx(const WeightVector& w, double lambda, double kappa) {
  if (!(w[0] > 0.0)) throw DegenerateWeightsError("oreshkov_ode_rhs_approx: requires w0 > 0");
  const double extra01 = kappa * w[1] * w[1] / (3.0 * w[0]);
  // the expansion of the exact w2/w3 term has 3 w0^2 in the denominator
  const double extra23 = kappa * w[1] * (2.0 * w[0] * w[2] - w[1] * w[3]) / (3.0 * w[0] * w[0]);
  WeightVector d;
  d[0] = -3 * lambda * w[0] + lambda * w[1] + kappa * w[1] + extra01;
  d[1] = 3 * lambda * w[0] - 3 * lambda * w[1] + 2 * lambda * w[2] - kappa * w[1] - extra01;
  d[2] = 3 * lambda * w[3] - 3 * lambda * w[2] + 2 * lambda * w[1] - kappa * w[2] - extra23;
  d[3] = -3 * lambda * w[3] + lambda * w[2] + kappa * w[2] + extra23;
  return d;
}

// ---- Oreshkov full-space construction -----------------------------------

/// Total system + ancilla qubits allowed in a dense Oreshkov step.
inline constexpr int kOreshkovQubitCap = 12;

/// Syndrome-block operators X_j = |j><0| + |0><j| and
/// Y_j = i(|j><0| - |0><j|), ancilla |+>^(N-1), one ancilla per nonzero
/// syndrome. Ancilla qubit j-1 (0-based) pairs with syndrome j.
class OreshkovProtocol {
 public:
  OreshkovProtocol(int n, int k, double epsilon, DeltaPolicy policy = DeltaPolicy::constant)
      : n_(n), k_(k), epsilon_(epsilon), policy_(policy) {
    detail::check_code_dims(n, k);
    detail::check_epsilon(epsilon);
    if (n + ancilla_qubits() > kOreshkovQubitCap) {
      throw ProtocolError("oreshkov: " + std::to_string(n + ancilla_qubits()) + " qubits exceed the dense cap of " +
                          std::to_string(kOreshkovQubitCap));
    }
  }

  int n() const { return n_; }
  int k() const { return k_; }
  double epsilon() const { return epsilon_; }
  DeltaPolicy policy() const { return policy_; }
  int ancilla_qubits() const { return static_cast<int>(pow2(n_ - k_)) - 1; }
  Eigen::Index system_dim() const { return pow2(n_); }
  Eigen::Index ancilla_dim() const { return pow2(ancilla_qubits()); }

  ComplexMatrix block_x(Eigen::Index j) const { return lift(detail::sym0(pow2(n_ - k_), j)); }
  ComplexMatrix block_y(Eigen::Index j) const { return lift(-kI * detail::anti0(pow2(n_ - k_), j)); }

  /// -1/2 sum_j X_j (x) Y^a_j on system (x) ancillas.
  ComplexMatrix measurement_ham() const {
    const int A = ancilla_qubits();
    const ComplexMatrix y = PauliOperator::single(1, 0, PauliLetter::Y).matrix();
    ComplexMatrix h = ComplexMatrix::Zero(system_dim() * ancilla_dim(), system_dim() * ancilla_dim());
    for (int j = 1; j <= A; ++j) {
      const ComplexMatrix ya = tensor({identity(pow2(j - 1)), y, identity(pow2(A - j))});
      h -= 0.5 * tensor(block_x(j), ya);
    }
    return h;
  }

  /// 1/2 sum_j (-1)^{m_j} Y_j on the system; bit j-1 of `outcome` read with
  /// ancilla qubit 0 most significant.
  ComplexMatrix correction_ham(std::uint64_t outcome) const {
    const int A = ancilla_qubits();
    ComplexMatrix h = ComplexMatrix::Zero(system_dim(), system_dim());
    for (int j = 1; j <= A; ++j) {
      const bool bit = (outcome >> (A - j)) & 1U;
      h += (bit ? -0.5 : 0.5) * block_y(j);
    }
    return h;
  }

  ComplexVector ancilla_state() const {
    return ComplexVector::Constant(ancilla_dim(), Complex(1.0 / std::sqrt(static_cast<double>(ancilla_dim()))));
  }

  /// Averaged map: attach |+...+>, apply exp(-i eps H_M), measure Z on every
  /// ancilla, apply exp(+i delta H_C(m)). The correction sign is the one that
  /// reproduces the weight-update rules (see README).
  ComplexMatrix step(const ComplexMatrix& rho, double delta) const {
    const Eigen::Index D = system_dim(), M = ancilla_dim();
    if (rho.rows() != D || rho.cols() != D) throw DimensionError("oreshkov step: state dimension mismatch");
    const ComplexMatrix u = matrix_exp(measurement_ham(), -epsilon_);
    const ComplexVector a0 = ancilla_state();
    ComplexMatrix out = ComplexMatrix::Zero(D, D);
    for (Eigen::Index m = 0; m < M; ++m) {
      // V_m = (I (x) <m|) U (I (x) |A0>)
      ComplexMatrix v(D, D);
      for (Eigen::Index r = 0; r < D; ++r)
        for (Eigen::Index c = 0; c < D; ++c) v(r, c) = (u.block(r * M + m, c * M, 1, M) * a0)(0);
      const ComplexMatrix corr = matrix_exp(correction_ham(static_cast<std::uint64_t>(m)), delta);
      const ComplexMatrix kraus = corr * v;
      out += kraus * rho * kraus.adjoint();
    }
    return out;
  }

 private:
  ComplexMatrix lift(const ComplexMatrix& m) const { return tensor(identity(pow2(k_)), m); }

  int n_, k_;
  double epsilon_;
  DeltaPolicy policy_;
};

/// Averaged Oreshkov step for `code` on a corrected-basis state.
inline ComplexMatrix oreshkov_full_step(const StabilizerCode& code, const ComplexMatrix& rho, double epsilon,
                                        double delta) {
  return OreshkovProtocol(code.n(), code.k(), epsilon).step(rho, delta);
}

/// Corrected-basis class states of the 3-qubit model for info state |0>:
/// class c holds info bit (c >= 2) and syndrome 0 for c in {0,3}, uniform
/// over syndromes 1..3 otherwise.
inline ComplexMatrix weight_class_state(const WeightVector& w) {
  ComplexMatrix rho = ComplexMatrix::Zero(8, 8);
  rho(0, 0) = w[0];
  rho(4, 4) = w[3];
  for (Eigen::Index s = 1; s < 4; ++s) {
    rho(s, s) = w[1] / 3.0;
    rho(4 + s, 4 + s) = w[2] / 3.0;
  }
  return rho;
}

inline WeightVector class_weights(const ComplexMatrix& rho) {
  if (rho.rows() != 8) throw DimensionError("class_weights: expects the 3-qubit corrected basis");
  WeightVector w;
  w[0] = rho(0, 0).real();
  w[3] = rho(4, 4).real();
  w[1] = w[2] = 0.0;
  for (Eigen::Index s = 1; s < 4; ++s) {
    w[1] += rho(s, s).real();
    w[2] += rho(4 + s, 4 + s).real();
  }
  return w;
}

// ---- ADL averaged map ---------------------------------------------------

struct ADLMap {
  double kappa2 = 1.0;
  double gamma2 = 2.0;
  std::array<int, 3> signs{1, 1, 1};
  StabilizerCode code = builtin_code(BuiltinCode::three_qubit_bit_flip);
};

/// G = kappa2 (L(g1) + L(g2) + L(g1 g2)) - gamma2 i[F, .], F = sum_j s_j E_j,
/// in the physical basis, with L(g) rho = g rho g^dagger - {g^dagger g, rho}/2.
inline SuperoperatorGenerator adl_generator(const ADLMap& map) {
  const auto& code = map.code;
  if (code.n() != 3 || code.k() != 1) throw CodeError("adl_generator: requires a 3-qubit, 1-logical code");
  std::vector<PauliOperator> errors;
  for (const auto& e : code.correctable_errors())
    if (!e.is_identity_up_to_phase()) errors.push_back(e);
  if (errors.size() != 3) throw CodeError("adl_generator: requires exactly three non-identity correctable errors");
  for (int s : map.signs)
    if (s != 1 && s != -1) throw std::invalid_argument("adl_generator: signs must be +1 or -1");

  const auto& g = code.generators();
  ComplexMatrix s = dissipator_superop(g[0].matrix()) + dissipator_superop(g[1].matrix()) +
                    dissipator_superop((g[0] * g[1]).matrix());
  s *= map.kappa2;
  ComplexMatrix f = ComplexMatrix::Zero(8, 8);
  for (std::size_t j = 0; j < 3; ++j) f += static_cast<double>(map.signs[j]) * errors[j].matrix();
  s += map.gamma2 * hamiltonian_superop(f);
  return SuperoperatorGenerator(8, s);
}

struct Calibration {
  double adl_norm = 0.0;   ///< ||G_ADL|| (per unit time)
  double kappa = 0.0;      ///< rate giving the minimal protocol the same strength
  double ratio = 0.0;      ///< kappa / kappa2
};

/// kappa with ||kappa (R - I)|| = 2 kappa matched to ||G_ADL||.
inline Calibration calibrate_kappa(const ADLMap& map, const DiamondNormOptions& opt = {}) {
  if (!(map.kappa2 > 0.0) || !(map.gamma2 > 0.0)) throw std::invalid_argument("calibrate: rates must be positive");
  Calibration c;
  c.adl_norm = diamond_norm(adl_generator(map), opt);
  c.kappa = c.adl_norm / 2.0;
  c.ratio = c.kappa / map.kappa2;
  return c;
}

}  // namespace ctqec

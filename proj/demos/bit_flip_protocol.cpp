// Builds the minimal protocol for the three-qubit bit-flip code, checks the
// dilation, then runs a short corrected evolution against bit-flip noise.

#include "ctqec/ctqec.hpp"

#include <cstdio>

int main() {
  using namespace ctqec;
  const auto code = builtin_code(BuiltinCode::three_qubit_bit_flip);
  const double eps = 0.05;
  const auto p = build_protocol(code.n(), code.k(), eps);
  std::printf("code %s: %d ancilla qubits, %lld outcomes\n", code.name().c_str(), p.ancilla_qubits(),
              static_cast<long long>(p.outcome_count()));

  const auto rep = verify_dilation(p, 8, 1);
  std::printf("dilation residual %.3e, order conditions %.1e\n", rep.residual, rep.order_conditions.max());
  std::printf("choi distance to target %.3e\n", choi_distance(effective_channel(p), target_map(3, 1, eps)));

  StepOptions opt;
  opt.samples_per_unit = 2;
  const NoiseModel noise{NoiseKind::bit_flip, 1.0, 3};
  const auto none = simulate_code(code, noise, 0.0, DeltaPolicy::constant, 2.0, 1e-3, opt);
  const auto fixed = simulate_code(code, noise, 100.0, DeltaPolicy::constant, 2.0, 1e-3, opt);
  std::printf("%6s %14s %14s %14s\n", "t", "F(no corr.)", "F(kappa=100)", "overlap");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    std::printf("%6.2f %14.8f %14.8f %14.8f\n", fixed.times[i], none.codeword_fidelity[i], fixed.codeword_fidelity[i],
                fixed.correctable_overlap[i]);
}

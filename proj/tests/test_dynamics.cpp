#include "ctqec/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace ctqec;

const StabilizerCode& bit_flip() {
  static const StabilizerCode code = builtin_code(BuiltinCode::three_qubit_bit_flip);
  return code;
}

NoiseModel flips(double rate) { return {NoiseKind::bit_flip, rate, 3}; }

TEST(Lindblad, ZeroRate) {
  EXPECT_EQ(max_abs(lindblad_generator(flips(0.0), bit_flip(), Basis::corrected).matrix()), 0.0);
}

TEST(Lindblad, PolarizationDecay) {
  const auto g = lindblad_generator(flips(0.7), bit_flip(), Basis::physical);
  const ComplexMatrix z1 = PauliOperator::parse("ZII").matrix();
  const ComplexMatrix rho = outer_basis(8, 0, 0);
  EXPECT_NEAR((z1 * g.apply(rho)).trace().real(), -2 * 0.7, 1e-14);
}

TEST(Lindblad, ClassTransferRate) {
  const auto g = lindblad_generator(flips(1.0), bit_flip(), Basis::corrected);
  const auto w = class_weights(g.apply(logical_zero(bit_flip())));
  EXPECT_NEAR(w[0], -3.0, 1e-14);
  EXPECT_NEAR(w[1], 3.0, 1e-14);
  EXPECT_NEAR(w[2], 0.0, 1e-14);
  EXPECT_NEAR(w[3], 0.0, 1e-14);
}

TEST(Lindblad, DepolarizingNormalization) {
  const auto code = builtin_code(BuiltinCode::five_qubit_perfect);
  NoiseModel m{NoiseKind::depolarizing, 1.0, 5};
  const auto full = lindblad_generator(m, code, Basis::physical);
  m.depolarizing = DepolarizingRate::split;
  EXPECT_LT(max_abs(full.matrix() - 3.0 * lindblad_generator(m, code, Basis::physical).matrix()), 1e-12);
}

TEST(Recovery, PhysicalAndCorrectedAgree) {
  const auto& code = bit_flip();
  const auto gc = recovery_generator(code, 2.0, Basis::corrected);
  const auto gp = recovery_generator(code, 2.0, Basis::physical);
  WeightVector w;
  w.w = {0.6, 0.25, 0.1, 0.05};
  const ComplexMatrix rho = from_corrected(code, weight_class_state(w));
  EXPECT_LT(max_abs(to_corrected(code, gp.apply(rho)) - gc.apply(to_corrected(code, rho))), 1e-12);
}

TEST(Observables, ClassStates) {
  const auto& code = bit_flip();
  const ComplexMatrix psi0 = logical_zero(code);
  auto at = [&](double a, double b, double c, double d) {
    WeightVector w;
    w.w = {a, b, c, d};
    return observables(code, weight_class_state(w), psi0);
  };
  const auto o0 = at(1, 0, 0, 0), o1 = at(0, 1, 0, 0), o2 = at(0, 0, 1, 0);
  EXPECT_NEAR(o0.fidelity, 1.0, 1e-15);
  EXPECT_NEAR(o0.overlap, 1.0, 1e-15);
  EXPECT_NEAR(o1.fidelity, 0.0, 1e-15);
  EXPECT_NEAR(o1.overlap, 1.0, 1e-15);
  EXPECT_NEAR(o2.fidelity, 0.0, 1e-15);
  EXPECT_NEAR(o2.overlap, 0.0, 1e-15);
}

TEST(Master, StaticWithoutNoiseOrCorrection) {
  const auto& code = bit_flip();
  const ComplexMatrix rho0 = logical_zero(code);
  const auto z = SuperoperatorGenerator::zero(8);
  const auto tr = integrate_master(z, z, rho0, 1.0, 0.01, code);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(tr.codeword_fidelity[i], 1.0);
}

TEST(Master, NoCorrectionMatchesAnalytic) {
  const auto& code = bit_flip();
  StepOptions opt;
  opt.track_weights = true;
  const auto full = integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected),
                                     recovery_generator(code, 0.0, Basis::corrected), logical_zero(code), 2.0, 1e-3,
                                     code, opt);
  const auto weights = integrate_weights(1.0, 0.0, DeltaPolicy::constant, 2.0, 1e-3);
  ASSERT_EQ(full.size(), weights.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    const double p = (1 + std::exp(-2 * full.times[i])) / 2;
    EXPECT_NEAR(full.codeword_fidelity[i], p * p * p, 1e-9);
    EXPECT_NEAR(weights.codeword_fidelity[i], p * p * p, 1e-9);
    EXPECT_NEAR(full.weights[i][1], weights.weights[i][1], 1e-9);
  }
}

double endpoint(double dt) {
  const auto& code = bit_flip();
  return integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected),
                          recovery_generator(code, 100.0, Basis::corrected), logical_zero(code), 0.05, dt, code)
      .codeword_fidelity.back();
}

TEST(Master, FourthOrderConvergence) {
  // short horizon so the fast correction transient still dominates the error
  const double ref = endpoint(1e-5);
  const double e1 = std::abs(endpoint(2e-3) - ref), e2 = std::abs(endpoint(1e-3) - ref);
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
}

TEST(Master, FullSpaceMatchesWeightModel) {
  const auto& code = bit_flip();
  StepOptions opt;
  opt.samples_per_unit = 10;
  const auto full = integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected),
                                     recovery_generator(code, 100.0, Basis::corrected), logical_zero(code), 2.0, 1e-4,
                                     code, opt);
  const auto w = integrate_weights(1.0, 100.0, DeltaPolicy::constant, 2.0, 1e-4, opt);
  ASSERT_EQ(full.size(), w.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    EXPECT_NEAR(full.codeword_fidelity[i], w.codeword_fidelity[i], 1e-6);
    EXPECT_NEAR(full.correctable_overlap[i], w.correctable_overlap[i], 1e-6);
    EXPECT_GE(full.correctable_overlap[i], full.codeword_fidelity[i] - 1e-9);
  }
}

TEST(Master, OptimalFullSpaceFollowsOptimalWeights) {
  const auto& code = bit_flip();
  StepOptions opt;
  opt.samples_per_unit = 10;
  const auto full = simulate_code(code, flips(1.0), 100.0, DeltaPolicy::optimal, 1.0, 1e-4, opt);
  const auto w = integrate_weights(1.0, 100.0, DeltaPolicy::optimal, 1.0, 1e-4, opt);
  for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(full.codeword_fidelity[i], w.codeword_fidelity[i], 1e-4);
}

TEST(Master, MonotoneCorrectionWithoutNoise) {
  const auto& code = bit_flip();
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  ComplexMatrix a(8, 8);
  for (Eigen::Index r = 0; r < 8; ++r)
    for (Eigen::Index c = 0; c < 8; ++c) a(r, c) = Complex(g(rng), g(rng));
  const ComplexMatrix rho0 = a * a.adjoint() / (a * a.adjoint()).trace();
  const ComplexMatrix psi0 = logical_zero(code);
  const auto tr = integrate_master(
      lindblad_generator(flips(0.0), code, Basis::corrected), recovery_generator(code, 10.0, Basis::corrected), rho0,
      1.0, 1e-3, [&](const ComplexMatrix& rho) { return observables(code, rho, psi0); });
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GE(tr.codeword_fidelity[i], tr.codeword_fidelity[i - 1] - 1e-12);
}

TEST(Master, RejectsInvalidInitialState) {
  const auto z = SuperoperatorGenerator::zero(8);
  EXPECT_THROW(integrate_master(z, z, 2.0 * logical_zero(bit_flip()), 1.0, 0.1, bit_flip()), std::invalid_argument);
}

TEST(Master, UnstableStepAborts) {
  const auto& code = bit_flip();
  // RK4 with kappa dt = 5 is outside the stability region
  try {
    integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected),
                     recovery_generator(code, 5000.0, Basis::corrected), logical_zero(code), 1.0, 1e-3, code);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_FALSE(e.partial().complete);
    EXPECT_GE(e.partial().size(), 1u);
  }
}

TEST(Weights, Examples) {
  const auto still = integrate_weights(0.0, 100.0, DeltaPolicy::optimal, 1.0, 1e-3);
  EXPECT_EQ(still.codeword_fidelity.back(), 1.0);
  for (auto policy : {DeltaPolicy::constant, DeltaPolicy::optimal}) {
    const auto tr = integrate_weights(1.0, 100.0, policy, 5.0, 1e-4);
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      EXPECT_NEAR(tr.weights[i].sum(), 1.0, 1e-8);
      worst_ratio = std::max(worst_ratio, tr.weights[i][1] / tr.weights[i][0]);
    }
    EXPECT_LE(worst_ratio, 0.05);
  }
}

TEST(Weights, OptimalGainIsSmall) {
  const auto c = integrate_weights(1.0, 100.0, DeltaPolicy::constant, 5.0, 1e-4);
  const auto o = integrate_weights(1.0, 100.0, DeltaPolicy::optimal, 5.0, 1e-4);
  double gap = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    gap = std::max(gap, std::abs(c.weights[i][0] - o.weights[i][0]));
    EXPECT_GE(o.codeword_fidelity[i], c.codeword_fidelity[i] - 1e-9);
  }
  EXPECT_LE(gap, 0.01);
  // frozen from the implementation's own run
  EXPECT_NEAR(c.codeword_fidelity.back(), 0.764604588, 1e-8);
  EXPECT_NEAR(gap, 0.001563884, 1e-8);
}

TEST(Discrete, NoCorrectionMatchesNoiseOnly) {
  const auto& code = bit_flip();
  const ComplexMatrix rho0 = logical_zero(code);
  const auto d = discrete_step_simulate(build_protocol(3, 1, 0.0), flips(1.0), code, rho0, 1000, 1e-3, 10);
  const auto m = integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected), SuperoperatorGenerator::zero(8),
                                  rho0, 1.0, 1e-3, code);
  ASSERT_EQ(d.size(), m.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d.codeword_fidelity[i], m.codeword_fidelity[i], 1e-8);
}

double discrete_endpoint(double dt) {
  const auto& code = bit_flip();
  const long long steps = std::llround(1.0 / dt);
  return discrete_step_simulate(build_protocol(3, 1, std::sqrt(100.0 * dt)), flips(1.0), code, logical_zero(code),
                                steps, dt, steps)
      .codeword_fidelity.back();
}

TEST(Discrete, ConvergesToMaster) {
  const auto& code = bit_flip();
  const double exact = integrate_master(lindblad_generator(flips(1.0), code, Basis::corrected),
                                        recovery_generator(code, 100.0, Basis::corrected), logical_zero(code), 1.0,
                                        1e-4, code)
                           .codeword_fidelity.back();
  EXPECT_NEAR(exact, 0.9209544653, 1e-8);
  const double e1 = std::abs(discrete_endpoint(4e-4) - exact);
  const double e2 = std::abs(discrete_endpoint(2e-4) - exact);
  EXPECT_LE(std::abs(discrete_endpoint(1e-4) - exact), 2e-3);
  EXPECT_GE(e1 / e2, 3.0);
  EXPECT_LE(e1 / e2, 5.0);
  EXPECT_THROW(discrete_endpoint(1e-3), ProtocolError);
}

TEST(Discrete, OreshkovStepAgreesWithMinimalStep) {
  const auto& code = bit_flip();
  WeightVector w;
  w.w = {0.7, 0.2, 0.06, 0.04};
  const ComplexMatrix rho = weight_class_state(w);
  auto diff = [&](double e) {
    const ComplexMatrix ours = effective_channel(build_protocol(3, 1, e)).apply(rho);
    return trace_norm(ours - oreshkov_full_step(code, rho, e, e));
  };
  // eps^2 = kappa dt, so eps^4 is O(dt^2)
  EXPECT_GE(diff(0.1) / diff(0.05), 12.0);
}

TEST(FiveQubit, OptimalPolicyGainIsSmall) {
  const auto code = builtin_code(BuiltinCode::five_qubit_perfect);
  const NoiseModel m{NoiseKind::depolarizing, 1.0, 5};
  StepOptions opt;
  opt.samples_per_unit = 10;
  const auto c = simulate_code(code, m, 100.0, DeltaPolicy::constant, 0.5, 1e-3, opt);
  const auto o = simulate_code(code, m, 100.0, DeltaPolicy::optimal, 0.5, 1e-3, opt);
  ASSERT_EQ(c.size(), o.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LE(std::abs(c.codeword_fidelity[i] - o.codeword_fidelity[i]), 0.01);
    EXPECT_GE(c.correctable_overlap[i], c.codeword_fidelity[i] - 1e-9);
  }
  EXPECT_LT(c.codeword_fidelity.back(), 1.0);
}

TEST(Compare, OursBeatsAdlReconstruction) {
  ADLMap adl;
  adl.kappa2 = 64.0;
  adl.gamma2 = 128.0;
  StepOptions opt;
  opt.samples_per_unit = 100;
  const auto tr = compare_with_adl(adl, 1.0, 7.6847 * 64.0, 0.1, 1e-5, opt);
  EXPECT_EQ(tr.ours.codeword_fidelity.front(), 1.0);
  EXPECT_NEAR(tr.adl.codeword_fidelity.front(), 1.0, 1e-12);
  EXPECT_GT(tr.ours.codeword_fidelity.back(), tr.adl.codeword_fidelity.back());
  EXPECT_GT(tr.ours.correctable_overlap.back(), tr.adl.correctable_overlap.back());
}

}  // namespace

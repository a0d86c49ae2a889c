#pragma once

// Time evolution: Lindblad noise plus continuous correction, integrated with
// fixed-step RK4 on the column-stacked density matrix, the 3-qubit weight
// model, and the discrete weak-step protocol.

#include "ctqec/baselines.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace ctqec {

enum class NoiseKind { bit_flip, depolarizing };

/// Rate carried by each Pauli channel under depolarizing noise.
enum class DepolarizingRate { per_pauli, split };

struct NoiseModel {
  NoiseKind kind = NoiseKind::bit_flip;
  double rate = 1.0;
  int qubits = 3;
  DepolarizingRate depolarizing = DepolarizingRate::per_pauli;
};

inline NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "bit_flip") return NoiseKind::bit_flip;
  if (s == "depolarizing") return NoiseKind::depolarizing;
  throw std::invalid_argument("unknown noise kind '" + s + "' (expected bit_flip or depolarizing)");
}

inline const char* to_string(NoiseKind k) { return k == NoiseKind::bit_flip ? "bit_flip" : "depolarizing"; }

enum class Basis { physical, corrected };

/// Sum of lambda D[P_q] over the model's Pauli channels; H = 0.
inline SuperoperatorGenerator lindblad_generator(const NoiseModel& model, const StabilizerCode& code, Basis basis) {
  if (!(model.rate >= 0.0)) throw std::invalid_argument("lindblad_generator: rate must be non-negative");
  if (model.qubits != code.n()) throw DimensionError("lindblad_generator: noise and code qubit counts differ");
  const Eigen::Index d = code.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  if (model.rate == 0.0) return SuperoperatorGenerator(d, s);
  std::vector<PauliLetter> letters{PauliLetter::X};
  double per = model.rate;
  if (model.kind == NoiseKind::depolarizing) {
    letters = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
    if (model.depolarizing == DepolarizingRate::split) per = model.rate / 3.0;
  }
  for (int q = 0; q < code.n(); ++q) {
    for (auto letter : letters) {
      ComplexMatrix l = PauliOperator::single(code.n(), q, letter).matrix();
      if (basis == Basis::corrected) l = to_corrected(code, l);
      s += per * dissipator_superop(l);
    }
  }
  return SuperoperatorGenerator(d, s);
}

/// kappa (R - I) with R the strong correction map.
inline SuperoperatorGenerator recovery_generator(const StabilizerCode& code, double kappa, Basis basis) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("recovery_generator: kappa must be non-negative");
  ComplexMatrix r = superop_of(strong_correction_map(code.n(), code.k()));
  if (basis == Basis::physical) {
    const ComplexMatrix t = code.corrected_frame();
    r = sandwich_superop(t.adjoint(), t) * r * sandwich_superop(t, t.adjoint());
  }
  return kappa * (SuperoperatorGenerator(code.dim(), r) - SuperoperatorGenerator::identity_map(code.dim()));
}

struct Observables {
  double fidelity = 0.0;
  double overlap = 0.0;
};

/// Corrected-basis state |0_info, 0_syndrome><...|, the image of |0_L>.
inline ComplexMatrix logical_zero(const StabilizerCode& code) { return outer_basis(code.dim(), 0, 0); }

/// Codeword fidelity <psi0|rho|psi0> and correctable overlap
/// <psi0|R(rho)|psi0>, both for corrected-basis rho and pure psi0.
inline Observables observables(const StabilizerCode& code, const ComplexMatrix& rho, const ComplexMatrix& psi0) {
  detail::require_code_dim(code, rho, "observables");
  detail::require_code_dim(code, psi0, "observables");
  const ComplexMatrix recovered = strong_correction_map(code.n(), code.k()).apply(rho);
  return {(psi0 * rho).trace().real(), (psi0 * recovered).trace().real()};
}

struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> codeword_fidelity;
  std::vector<double> correctable_overlap;
  std::vector<WeightVector> weights;  ///< empty unless the run tracks class weights
  bool complete = true;
  std::string diagnostic;

  void push(double t, double f, double o) {
    times.push_back(t);
    codeword_fidelity.push_back(f);
    correctable_overlap.push_back(o);
  }
  std::size_t size() const { return times.size(); }
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, SimulationTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SimulationTrace& partial() const { return partial_; }

 private:
  SimulationTrace partial_;
};

struct StepOptions {
  double samples_per_unit = 100.0;  ///< observable samples per unit time
  double drift_limit = 1e-6;        ///< trace or positivity violation that aborts the run
  bool track_weights = false;       ///< 3-qubit corrected basis only
};

namespace detail {

struct StepGrid {
  long long steps;
  double dt;
  long long stride;
};

inline StepGrid make_grid(double t_end, double dt, double samples_per_unit) {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw std::invalid_argument("integration: t_end and dt must be positive");
  if (!(samples_per_unit > 0.0)) throw std::invalid_argument("integration: samples_per_unit must be positive");
  const long long steps = std::max(1LL, std::llround(t_end / dt));
  const double h = t_end / static_cast<double>(steps);
  const long long stride = std::max(1LL, std::llround(1.0 / (samples_per_unit * h)));
  return {steps, h, stride};
}

inline void check_density(const ComplexMatrix& rho0) {
  if (std::abs(rho0.trace().real() - 1.0) > 1e-10 || std::abs(rho0.trace().imag()) > 1e-10)
    throw std::invalid_argument("integration: initial state must have unit trace");
  if (hermiticity_residual(rho0) > 1e-10) throw std::invalid_argument("integration: initial state must be Hermitian");
  if (hermitian_eigenvalues(rho0).minCoeff() < -1e-10)
    throw std::invalid_argument("integration: initial state must be positive semidefinite");
}

using Sparse = Eigen::SparseMatrix<Complex>;

inline Sparse sparse_of(const ComplexMatrix& m) { return m.sparseView(); }

class Recorder {
 public:
  Recorder(std::function<Observables(const ComplexMatrix&)> observe, const StepOptions& opt, Eigen::Index dim)
      : observe_(std::move(observe)), opt_(opt), dim_(dim) {}

  void sample(double t, const ComplexVector& v) {
    const ComplexMatrix rho = unvec(v, dim_);
    const double tr_err = std::abs(rho.trace() - Complex(1.0));
    const double min_ev = hermitian_eigenvalues(rho).minCoeff();
    if (!std::isfinite(tr_err) || tr_err > opt_.drift_limit || min_ev < -opt_.drift_limit) {
      trace.complete = false;
      trace.diagnostic = "t=" + std::to_string(t) + ": trace error " + std::to_string(tr_err) +
                         ", min eigenvalue " + std::to_string(min_ev);
      throw IntegrationError("integration unstable at " + trace.diagnostic, trace);
    }
    const auto o = observe_(rho);
    trace.push(t, o.fidelity, o.overlap);
    if (opt_.track_weights) trace.weights.push_back(class_weights(rho));
  }

  SimulationTrace trace;

 private:
  std::function<Observables(const ComplexMatrix&)> observe_;
  StepOptions opt_;
  Eigen::Index dim_;
};

/// Classic RK4 with a right-hand side that may be re-chosen at each step.
template <class Rhs, class Prepare>
SimulationTrace rk4_run(Rhs&& rhs, Prepare&& prepare, const ComplexMatrix& rho0, double t_end, double dt,
                        std::function<Observables(const ComplexMatrix&)> observe, const StepOptions& opt) {
  check_density(rho0);
  const auto grid = make_grid(t_end, dt, opt.samples_per_unit);
  Recorder rec(std::move(observe), opt, rho0.rows());
  ComplexVector v = vec(rho0);
  rec.sample(0.0, v);
  const double h = grid.dt;
  for (long long i = 1; i <= grid.steps; ++i) {
    prepare(v);
    const ComplexVector k1 = rhs(v);
    const ComplexVector k2 = rhs(v + (h / 2) * k1);
    const ComplexVector k3 = rhs(v + (h / 2) * k2);
    const ComplexVector k4 = rhs(v + h * k3);
    v += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (i % grid.stride == 0 || i == grid.steps) rec.sample(static_cast<double>(i) * h, v);
  }
  return std::move(rec.trace);
}

}  // namespace detail

/// Integrates d rho/dt = (G_noise + G_correct) rho from rho0 over [0, t_end].
inline SimulationTrace integrate_master(const SuperoperatorGenerator& gen_noise,
                                        const SuperoperatorGenerator& gen_correct, const ComplexMatrix& rho0,
                                        double t_end, double dt,
                                        std::function<Observables(const ComplexMatrix&)> observe,
                                        const StepOptions& opt = {}) {
  if (gen_noise.dim() != gen_correct.dim() || gen_noise.dim() != rho0.rows())
    throw DimensionError("integrate_master: dimension mismatch");
  const detail::Sparse l = detail::sparse_of((gen_noise + gen_correct).matrix());
  return detail::rk4_run([&](const ComplexVector& x) -> ComplexVector { return l * x; },
                         [](const ComplexVector&) {}, rho0, t_end, dt, std::move(observe), opt);
}

/// Corrected-basis convenience: observables against the pure initial state.
inline SimulationTrace integrate_master(const SuperoperatorGenerator& gen_noise,
                                        const SuperoperatorGenerator& gen_correct, const ComplexMatrix& rho0,
                                        double t_end, double dt, const StabilizerCode& code,
                                        const StepOptions& opt = {}) {
  return integrate_master(
      gen_noise, gen_correct, rho0, t_end, dt,
      [&code, psi0 = ComplexMatrix(rho0)](const ComplexMatrix& rho) { return observables(code, rho, psi0); }, opt);
}

/// Optimal-policy correction: at each step pick r = delta/eps maximising the
/// rate of change of <psi0|rho|psi0> under
/// kappa sum_j D[((1+r)/2) A_j + ((1-r)/2) A_j^dagger], A_j = I (x) |0><j|.
class OptimalCorrection {
 public:
  OptimalCorrection(const StabilizerCode& code, double kappa, const ComplexMatrix& psi0)
      : kappa_(kappa), psi0_(vec(psi0.transpose())) {
    const Eigen::Index N = code.syndrome_dim(), A = code.info_dim(), d = code.dim();
    ComplexMatrix sa = ComplexMatrix::Zero(d * d, d * d), sb = sa, sx = sa;
    for (Eigen::Index j = 1; j < N; ++j) {
      const ComplexMatrix a = tensor(identity(A), outer_basis(N, 0, j));
      const ComplexMatrix ad = a.adjoint();
      sa += dissipator_superop(a);
      sb += dissipator_superop(ad);
      // cross terms of D[alpha a + beta a^dagger]; a^2 = 0 for j != 0
      sx += sandwich_superop(a, a) + sandwich_superop(ad, ad);
    }
    sa_ = detail::sparse_of(sa);
    sb_ = detail::sparse_of(sb);
    sx_ = detail::sparse_of(sx);
  }

  /// Vertex of the quadratic objective fitted at r in {-1, 0, 1}; falls back
  /// to r = 1 when the fit has no interior maximum.
  double choose(const ComplexVector& v) const {
    // tr(P X) = vec(P^T) . vec(X), no conjugation
    auto value = [&](const detail::Sparse& s) { return psi0_.cwiseProduct(s * v).sum().real(); };
    const double ua = value(sa_), ub = value(sb_), ux = value(sx_);
    const double f1 = ua, fm1 = ub, f0 = (ua + ub + ux) / 4.0;
    const double quad = (f1 + fm1) / 2.0 - f0, lin = (f1 - fm1) / 2.0;
    if (!(quad < 0.0)) return 1.0;
    return -lin / (2.0 * quad);
  }

  ComplexVector apply(const ComplexVector& v, double r) const {
    const double a = (1 + r) / 2, b = (1 - r) / 2;
    return kappa_ * (a * a * (sa_ * v) + b * b * (sb_ * v) + a * b * (sx_ * v));
  }

 private:
  double kappa_;
  ComplexVector psi0_;
  detail::Sparse sa_, sb_, sx_;
};

/// Full-space simulation of the code under `noise` with correction rate
/// kappa; rho0 is the corrected-basis |0_L>. Constant policy uses
/// kappa (R - I); optimal uses OptimalCorrection.
inline SimulationTrace simulate_code(const StabilizerCode& code, const NoiseModel& noise, double kappa,
                                     DeltaPolicy policy, double t_end, double dt, const StepOptions& opt = {}) {
  const ComplexMatrix rho0 = logical_zero(code);
  const auto gn = lindblad_generator(noise, code, Basis::corrected);
  auto observe = [&code, &rho0](const ComplexMatrix& rho) { return observables(code, rho, rho0); };
  if (policy == DeltaPolicy::constant) {
    return integrate_master(gn, recovery_generator(code, kappa, Basis::corrected), rho0, t_end, dt, observe, opt);
  }
  const OptimalCorrection corr(code, kappa, rho0);
  const detail::Sparse ln = detail::sparse_of(gn.matrix());
  double r = 1.0;
  return detail::rk4_run([&](const ComplexVector& x) -> ComplexVector { return ln * x + corr.apply(x, r); },
                         [&](const ComplexVector& x) { r = corr.choose(x); }, rho0, t_end, dt, observe, opt);
}

/// RK4 on the four class weights starting from (1, 0, 0, 0).
inline SimulationTrace integrate_weights(double lambda, double kappa, DeltaPolicy policy, double t_end, double dt,
                                         const StepOptions& opt = {}) {
  if (!(lambda >= 0.0) || !(kappa >= 0.0)) throw std::invalid_argument("integrate_weights: rates must be non-negative");
  const auto grid = detail::make_grid(t_end, dt, opt.samples_per_unit);
  const double h = grid.dt;
  WeightVector w;
  SimulationTrace trace;
  auto record = [&](double t) {
    if (std::abs(w.sum() - 1.0) > opt.drift_limit) {
      trace.complete = false;
      trace.diagnostic = "weight sum drifted to " + std::to_string(w.sum());
      throw IntegrationError("integrate_weights: " + trace.diagnostic, trace);
    }
    trace.push(t, w[0], w[0] + w[1]);
    trace.weights.push_back(w);
  };
  auto f = [&](const WeightVector& x) { return oreshkov_ode_rhs(x, lambda, kappa, policy); };
  record(0.0);
  for (long long i = 1; i <= grid.steps; ++i) {
    try {
      const WeightVector k1 = f(w);
      const WeightVector k2 = f(w + (h / 2) * k1);
      const WeightVector k3 = f(w + (h / 2) * k2);
      const WeightVector k4 = f(w + h * k3);
      w += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DegenerateWeightsError& e) {
      trace.complete = false;
      trace.diagnostic = e.what();
      throw IntegrationError(std::string("integrate_weights: ") + e.what(), trace);
    }
    if (i % grid.stride == 0 || i == grid.steps) record(static_cast<double>(i) * h);
  }
  return trace;
}

/// Alternates exp(L dt) noise with the protocol's composed channel at
/// epsilon = p.epsilon() (so kappa = epsilon^2 / dt), recording observables
/// every `stride` steps (and after the last).
inline SimulationTrace discrete_step_simulate(const WeakProtocol& p, const NoiseModel& model,
                                              const StabilizerCode& code, const ComplexMatrix& rho0, long long steps,
                                              double dt, long long stride = 1) {
  if (!(p.epsilon() < 0.3)) throw ProtocolError("discrete_step_simulate: epsilon = sqrt(kappa dt) must be below 0.3");
  if (p.n() != code.n() || p.k() != code.k()) throw DimensionError("discrete_step_simulate: protocol/code mismatch");
  if (steps < 1 || !(dt > 0.0) || stride < 1) throw std::invalid_argument("discrete_step_simulate: bad step grid");
  detail::check_density(rho0);
  const Eigen::Index d = code.dim();
  const ComplexMatrix noise = matrix_exp(lindblad_generator(model, code, Basis::corrected).matrix(), dt, ExpMode::generator);
  const ComplexMatrix step = superop_of(effective_channel(p)) * noise;
  StepOptions opt;
  detail::Recorder rec([&](const ComplexMatrix& rho) { return observables(code, rho, rho0); }, opt, d);
  ComplexVector v = vec(rho0);
  rec.sample(0.0, v);
  for (long long i = 1; i <= steps; ++i) {
    v = step * v;
    if (i % stride == 0 || i == steps) rec.sample(static_cast<double>(i) * dt, v);
  }
  return std::move(rec.trace);
}

/// Minimal protocol at kappa next to the ADL averaged map, both for the
/// 3-qubit bit-flip code from |000>. ADL runs in the physical basis and is
/// observed through the corrected frame.
struct ComparisonTraces {
  SimulationTrace ours;
  SimulationTrace adl;
};

inline ComparisonTraces compare_with_adl(const ADLMap& adl, double lambda, double kappa, double t_end, double dt,
                                         const StepOptions& opt = {}) {
  const auto& code = adl.code;
  const NoiseModel noise{NoiseKind::bit_flip, lambda, code.n()};
  const ComplexMatrix psi0 = logical_zero(code);
  ComparisonTraces out;
  out.ours = simulate_code(code, noise, kappa, DeltaPolicy::constant, t_end, dt, opt);
  const ComplexMatrix phys0 = from_corrected(code, psi0);
  out.adl = integrate_master(
      lindblad_generator(noise, code, Basis::physical), adl_generator(adl), phys0, t_end, dt,
      [&](const ComplexMatrix& rho) { return observables(code, to_corrected(code, rho), psi0); }, opt);
  return out;
}

}  // namespace ctqec

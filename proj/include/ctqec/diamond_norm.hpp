#pragma once

// Diamond norm of Hermiticity-preserving maps by multi-start alternating
// ascent on  max_psi || (Phi (x) id)(|psi><psi|) ||_1 .
//
// For a fixed input the best observable is W = sign(X) with X the output;
// for a fixed W the objective is a Hermitian form psi^dagger Q psi whose top
// eigenvector is the next input. Each step cannot decrease the objective, so
// every restart yields a certified lower bound.

#include "ctqec/channels.hpp"
#include "ctqec/parallel.hpp"

#include <cstdint>
#include <random>

namespace ctqec {

struct DiamondNormOptions {
  int restarts = 32;
  std::uint64_t seed = 20240601;
  double tolerance = 1e-9;  ///< stop when a step improves the objective by less than this (relative)
  int max_iterations = 2000;
};

struct DiamondNormResult {
  double value = 0.0;
  bool converged = false;  ///< the restart achieving `value` met the tolerance
  int best_restart = -1;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_lower_bound)
      : std::runtime_error(what), best_lower_bound_(best_lower_bound) {}
  double best_lower_bound() const { return best_lower_bound_; }

 private:
  double best_lower_bound_;
};

namespace detail {

/// One ascent from a random d x r input Psi (system index x, reference y).
/// J is the Choi matrix, J[(a,x),(b,x')] = Phi(|x><x'|)[a,b].
inline std::pair<double, bool> ascend(const ComplexMatrix& choi, Eigen::Index d, Eigen::Index r,
                                      std::uint64_t seed, const DiamondNormOptions& opt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexVector psi(d * r);  // psi(x*r + y)
  for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = Complex(gauss(rng), gauss(rng));
  psi.normalize();

  // Jr[(x,x'),(a,b)] = J[(a,x),(b,x')], reused by every Q update
  ComplexMatrix jr(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index xx = 0; xx < d; ++xx)
        for (Eigen::Index xp = 0; xp < d; ++xp) jr(xx * d + xp, a * d + b) = choi(a * d + xx, b * d + xp);

  double previous = -1.0;
  ComplexMatrix lift = ComplexMatrix::Zero(d * r, d * d);  // I_d (x) Psi^T
  ComplexMatrix wr(d * d, r * r);
  ComplexMatrix q(d * r, d * r);
  for (int it = 0; it < opt.max_iterations; ++it) {
    // X[(a,y),(b,y')] = sum_{x,x'} Psi[x,y] conj(Psi[x',y']) J[(a,x),(b,x')]
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index y = 0; y < r; ++y)
        for (Eigen::Index xx = 0; xx < d; ++xx) lift(a * r + y, a * d + xx) = psi(xx * r + y);
    const ComplexMatrix x = lift * choi * lift.adjoint();
    const auto eig = hermitian_eigen(x);
    const double value = eig.values.cwiseAbs().sum();
    if (previous >= 0.0 && value - previous <= opt.tolerance * std::max(1.0, value)) return {value, true};
    previous = value;

    RealVector signs = eig.values.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
    const ComplexMatrix w = eig.vectors * signs.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
    // Q[(x',y'),(x,y)] = sum_{a,b} W[(b,y'),(a,y)] J[(a,x),(b,x')]
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index y = 0; y < r; ++y)
          for (Eigen::Index yp = 0; yp < r; ++yp) wr(a * d + b, y * r + yp) = w(b * r + yp, a * r + y);
    const ComplexMatrix t = jr * wr;
    for (Eigen::Index xx = 0; xx < d; ++xx)
      for (Eigen::Index xp = 0; xp < d; ++xp)
        for (Eigen::Index y = 0; y < r; ++y)
          for (Eigen::Index yp = 0; yp < r; ++yp) q(xp * r + yp, xx * r + y) = t(xx * d + xp, y * r + yp);
    const auto qe = hermitian_eigen(q);
    psi = qe.vectors.col(qe.values.size() - 1);
    if (value == 0.0 && qe.values.maxCoeff() <= 0.0) return {0.0, true};
  }
  return {previous, false};
}

inline DiamondNormResult maximize_output_norm(const ComplexMatrix& choi, Eigen::Index d, Eigen::Index r,
                                              const DiamondNormOptions& opt) {
  if (opt.restarts < 1) throw std::invalid_argument("diamond norm: need at least one restart");
  std::vector<std::pair<double, bool>> results(static_cast<std::size_t>(opt.restarts));
  parallel_for(opt.restarts, [&](int i) {
    results[static_cast<std::size_t>(i)] = ascend(choi, d, r, mix_seed(opt.seed, static_cast<std::uint64_t>(i)), opt);
  });
  // reduce in restart-index order so the answer does not depend on scheduling
  DiamondNormResult best;
  for (int i = 0; i < opt.restarts; ++i) {
    const auto& [v, ok] = results[static_cast<std::size_t>(i)];
    if (best.best_restart < 0 || v > best.value) {
      best.value = v;
      best.converged = ok;
      best.best_restart = i;
    }
  }
  return best;
}

}  // namespace detail

/// Diamond norm with a full-dimension reference system. Never throws on
/// slow convergence; inspect `converged`.
inline DiamondNormResult diamond_norm_search(const SuperoperatorGenerator& g, const DiamondNormOptions& opt = {}) {
  const ComplexMatrix choi = choi_matrix(g);
  if (hermiticity_residual(choi) > 1e-10 * std::max(1.0, max_abs(choi))) {
    throw ChannelError("diamond_norm: map is not Hermiticity-preserving");
  }
  return detail::maximize_output_norm(hermitian_part(choi), g.dim(), g.dim(), opt);
}

/// Diamond norm value; throws ConvergenceError (carrying the best lower
/// bound) if no restart converged within the iteration budget.
inline double diamond_norm(const SuperoperatorGenerator& g, const DiamondNormOptions& opt = {}) {
  const auto res = diamond_norm_search(g, opt);
  if (!res.converged) throw ConvergenceError("diamond_norm: ascent did not converge", res.value);
  return res.value;
}

/// max over pure inputs on the system alone of ||g(|psi><psi|)||_1; a lower
/// bound for the diamond norm.
inline double induced_trace_norm(const SuperoperatorGenerator& g, const DiamondNormOptions& opt = {}) {
  const ComplexMatrix choi = hermitian_part(choi_matrix(g));
  return detail::maximize_output_norm(choi, g.dim(), 1, opt).value;
}

}  // namespace ctqec

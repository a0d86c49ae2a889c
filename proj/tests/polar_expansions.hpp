#pragma once

#include "ctqec/protocol_minimal.hpp"

namespace ctqec::testing {

// Second-order forms of the polar factors for the syndrome factor.
struct Expansions {
  std::vector<ComplexMatrix> m, u, h;
};

inline Expansions second_order_forms(int nk, double e) {
  const Eigen::Index N = pow2(nk);
  const double Nd = static_cast<double>(N);
  const double pre = 1.0 / std::sqrt(2.0 * Nd);
  const ComplexMatrix I = identity(N), P0 = outer_basis(N, 0, 0);
  Expansions x;
  x.m.resize(2 * N);
  x.u.resize(2 * N);
  x.h.resize(2 * N);
  for (int sign : {1, -1}) {
    const Eigen::Index off = sign > 0 ? 0 : N;
    x.m[off] = pre * ((1 - e * e / 2) * I + (Nd / 2) * e * e * P0);
    x.u[off] = I + (static_cast<double>(sign) * kI * std::sqrt(Nd) * e - (Nd / 2) * e * e) * P0;
    for (Eigen::Index j = 1; j < N; ++j) {
      const ComplexMatrix Pj = outer_basis(N, j, j);
      const ComplexMatrix a = outer_basis(N, 0, j) - outer_basis(N, j, 0);
      const ComplexMatrix s = outer_basis(N, 0, j) + outer_basis(N, j, 0);
      x.m[off + j] = pre * ((1 - e * e / 2) * I - (Nd / 8) * e * e * P0 + 3 * (Nd / 8) * e * e * Pj +
                            static_cast<double>(sign) * kI * std::sqrt(Nd / 4) * e * a);
      x.u[off + j] = I - (Nd / 8) * e * e * (P0 + Pj) + static_cast<double>(sign) * kI * std::sqrt(Nd / 4) * e * s;
    }
    for (Eigen::Index j = 0; j < N; ++j) {
      x.h[off + j] = sign * (std::sqrt(Nd) / 2) * (outer_basis(N, 0, j) + outer_basis(N, j, 0));
    }
  }
  return x;
}

struct ExpansionErrors {
  double m = 0, u = 0, exp_h = 0;
};

inline ExpansionErrors expansion_errors(int nk, double e) {
  const auto p = build_protocol(nk + 1, 1, e);
  const auto x = second_order_forms(nk, e);
  ExpansionErrors r;
  for (std::size_t j = 0; j < x.m.size(); ++j) {
    r.m = std::max(r.m, max_abs(p.povm_factor()[j] - x.m[j]));
    r.u = std::max(r.u, max_abs(p.corrections_factor()[j] - x.u[j]));
    r.exp_h = std::max(r.exp_h, max_abs(p.corrections_factor()[j] - matrix_exp(x.h[j], e)));
  }
  return r;
}

}  // namespace ctqec::testing

#include "ctqec/diamond_norm.hpp"
#include "ctqec/pauli.hpp"
#include "ctqec/protocol_minimal.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace ctqec;

ComplexMatrix random_matrix(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

// K_j = G_j S^{-1/2} with S = sum G^dagger G
KrausChannel random_channel(Eigen::Index d, int count, std::mt19937_64& rng) {
  std::vector<ComplexMatrix> g;
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < count; ++i) {
    g.push_back(random_matrix(d, rng));
    s += g.back().adjoint() * g.back();
  }
  const auto e = hermitian_eigen(s);
  const ComplexMatrix inv_sqrt =
      e.vectors * e.values.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * e.vectors.adjoint();
  for (auto& k : g) k = k * inv_sqrt;
  return KrausChannel(std::move(g));
}

int matrix_rank(const ComplexMatrix& h) {
  const RealVector ev = hermitian_eigenvalues(h);
  return static_cast<int>((ev.array() > 1e-10 * ev.cwiseAbs().maxCoeff()).count());
}

TEST(Choi, IdentityAndDepolarizing) {
  const ComplexMatrix j = choi_matrix(KrausChannel::identity_channel(2));
  EXPECT_NEAR(j.trace().real(), 2.0, 1e-14);
  EXPECT_EQ(matrix_rank(j), 1);
  std::vector<ComplexMatrix> ops;
  for (const char* p : {"I", "X", "Y", "Z"}) ops.push_back(0.5 * PauliOperator::parse(p).matrix());
  EXPECT_LT(max_abs(choi_matrix(KrausChannel(ops)) - 0.5 * identity(4)), 1e-14);
}

TEST(Choi, TargetMapTraceAndPositivity) {
  const auto ch = target_map(3, 1, 0.1);
  const ComplexMatrix j = choi_matrix(ch);
  EXPECT_NEAR(j.trace().real(), 8.0, 1e-12);
  EXPECT_GE(hermitian_eigenvalues(j).minCoeff(), -1e-12);
}

TEST(Choi, SuperoperatorRouteAgrees) {
  std::mt19937_64 rng(7);
  const auto ch = random_channel(3, 2, rng);
  const auto g = SuperoperatorGenerator::from_channel(ch);
  EXPECT_LT(max_abs(choi_matrix(g) - choi_matrix(ch)), 1e-12);
  const ComplexMatrix rho = hermitian_part(random_matrix(3, rng));
  EXPECT_LT(max_abs(g.apply(rho) - ch.apply(rho)), 1e-12);
}

TEST(Superop, LindbladPieces) {
  const ComplexMatrix x = PauliOperator::parse("X").matrix();
  const ComplexMatrix rho = outer_basis(2, 0, 0);
  const ComplexMatrix d = unvec(dissipator_superop(x) * vec(rho), 2);
  EXPECT_LT(max_abs(d - (x * rho * x - rho)), 1e-14);
  const ComplexMatrix c = unvec(hamiltonian_superop(x) * vec(rho), 2);
  EXPECT_LT(max_abs(c - (-kI * (x * rho - rho * x))), 1e-14);
}

TEST(Channel, RejectsIncompleteSets) {
  EXPECT_THROW(KrausChannel({0.5 * identity(2)}), ChannelError);
  EXPECT_NO_THROW(KrausChannel({0.5 * identity(2)}, false));
  EXPECT_THROW(KrausChannel({identity(2), identity(3)}, false), DimensionError);
}

TEST(KrausEquivalence, Trivial) {
  const auto u = kraus_equivalence(KrausChannel::identity_channel(2), KrausChannel::identity_channel(2));
  ASSERT_TRUE(u.has_value());
  ASSERT_EQ(u->rows(), 1);
  EXPECT_NEAR(std::abs((*u)(0, 0) - Complex(1.0)), 0.0, 1e-12);
}

void expect_reconstructs(const KrausChannel& a, const KrausChannel& b) {
  const auto u = kraus_equivalence(a, b);
  ASSERT_TRUE(u.has_value());
  EXPECT_LT(unitarity_residual(*u), 1e-10);
  const auto m = static_cast<Eigen::Index>(std::max(a.size(), b.size()));
  for (Eigen::Index j = 0; j < m; ++j) {
    ComplexMatrix acc = ComplexMatrix::Zero(a.dim_out(), a.dim_in());
    for (std::size_t l = 0; l < b.size(); ++l) acc += (*u)(j, static_cast<Eigen::Index>(l)) * b.operators()[l];
    const ComplexMatrix aj = j < static_cast<Eigen::Index>(a.size()) ? a.operators()[static_cast<std::size_t>(j)]
                                                                      : ComplexMatrix::Zero(a.dim_out(), a.dim_in());
    EXPECT_LT(max_abs(aj - acc), 1e-8);
  }
}

TEST(KrausEquivalence, FamilyVersusTarget) {
  expect_reconstructs(KrausChannel(build_kraus_family(2, 1, 0.1)), target_map(2, 1, 0.1));
  expect_reconstructs(KrausChannel(build_kraus_family(3, 1, 0.05)), target_map(3, 1, 0.05));
  expect_reconstructs(target_map(3, 1, 0.05), KrausChannel(build_kraus_family(3, 1, 0.05)));
}

TEST(KrausEquivalence, UnequalMaps) {
  const double p = 0.1;
  const KrausChannel flip({std::sqrt(1 - p) * identity(2), std::sqrt(p) * PauliOperator::parse("X").matrix()});
  EXPECT_FALSE(kraus_equivalence(KrausChannel::identity_channel(2), flip).has_value());
  EXPECT_THROW(kraus_equivalence(KrausChannel::identity_channel(2), KrausChannel::identity_channel(4)),
               DimensionError);
}

TEST(KrausRank, Examples) {
  EXPECT_EQ(kraus_rank(target_map(3, 1, 0.1)), 5);
  EXPECT_EQ(kraus_rank(KrausChannel::identity_channel(3)), 1);
  const KrausChannel family(build_kraus_family(3, 1, 0.1));
  EXPECT_EQ(family.size(), 8u);
  EXPECT_EQ(kraus_rank(family), 5);
}

TEST(KrausRank, MatchesChoiRankForRandomChannels) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + t % 7;
    const int count = 1 + t % 4;
    // duplicate one operator direction to make the set dependent
    auto ch = random_channel(d, count, rng);
    std::vector<ComplexMatrix> ops = ch.operators();
    ops[0] *= std::sqrt(0.5);
    ops.push_back(ops[0]);
    const KrausChannel dup(std::move(ops));
    EXPECT_EQ(kraus_rank(dup), matrix_rank(choi_matrix(dup)));
    EXPECT_EQ(kraus_rank(dup), count);
  }
}

TEST(DiamondNorm, ZeroAndHomogeneity) {
  EXPECT_EQ(diamond_norm(SuperoperatorGenerator::zero(2)), 0.0);
  std::mt19937_64 rng(3);
  const auto a = SuperoperatorGenerator::from_channel(random_channel(2, 2, rng));
  const auto b = SuperoperatorGenerator::from_channel(random_channel(2, 3, rng));
  const auto g = a - b;
  const double base = diamond_norm(g);
  for (double c : {0.5, 2.0}) EXPECT_NEAR(diamond_norm(c * g), c * base, 1e-6 * base);
}

TEST(DiamondNorm, BoundsForChannelDifferences) {
  std::mt19937_64 rng(5);
  DiamondNormOptions opt;
  opt.restarts = 8;
  const double rel = 1e-7;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 2 + t % 2;
    const auto g = SuperoperatorGenerator::from_channel(random_channel(d, 1 + t % 3, rng)) -
                   SuperoperatorGenerator::from_channel(random_channel(d, 1 + (t + 1) % 3, rng));
    const double dn = diamond_norm_search(g, opt).value;
    EXPECT_GE(dn, induced_trace_norm(g, opt) * (1 - rel));
    EXPECT_GE(dn, 0.0);
    EXPECT_LE(dn, 2.0 + 1e-9);
  }
}

TEST(DiamondNorm, IdentityMinusUnitaryKnownValue) {
  // ||id - Z.Z|| = 2 (orthogonal outputs for |+>)
  const ComplexMatrix z = PauliOperator::parse("Z").matrix();
  const auto g = SuperoperatorGenerator::identity_map(2) - SuperoperatorGenerator(2, conjugation_superop(z));
  EXPECT_NEAR(diamond_norm(g), 2.0, 1e-8);
}

TEST(DiamondNorm, StrongCorrectionMinusIdentity) {
  // slow ascent here (~500 steps per restart), so fewer restarts
  DiamondNormOptions opt;
  opt.restarts = 2;
  const auto r = SuperoperatorGenerator::from_channel(strong_correction_map(3, 1));
  EXPECT_NEAR(diamond_norm(r - SuperoperatorGenerator::identity_map(8), opt), 2.0, 1e-2);
}

TEST(DiamondNorm, RejectsNonHermiticityPreserving) {
  ComplexMatrix s = ComplexMatrix::Zero(4, 4);
  s(0, 1) = 1.0;
  EXPECT_THROW(diamond_norm(SuperoperatorGenerator(2, s)), ChannelError);
}

TEST(DiamondNorm, DeterministicForSeed) {
  std::mt19937_64 rng(9);
  const auto g = SuperoperatorGenerator::from_channel(random_channel(3, 2, rng)) - SuperoperatorGenerator::identity_map(3);
  EXPECT_EQ(diamond_norm(g), diamond_norm(g));
}

}  // namespace

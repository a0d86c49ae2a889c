#include "ctqec/stabilizer.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace {

using namespace ctqec;
using P = PauliOperator;

ComplexMatrix op(const char* s) { return P::parse(s).matrix(); }

TEST(Pauli, ProductPhases) {
  EXPECT_EQ(P::parse("X") * P::parse("Y"), P::parse("iZ"));
  EXPECT_EQ(P::parse("Y") * P::parse("X"), P::parse("-iZ"));
  EXPECT_EQ(P::parse("ZX") * P::parse("XZ"), P::parse("YY"));
  EXPECT_EQ((P::parse("XZ") * P::parse("YI")).matrix(), P::parse("XZ").matrix() * P::parse("YI").matrix());
}

TEST(Pauli, CommutationMatchesMatrices) {
  const char* all[] = {"IX", "XY", "ZZ", "YI", "XX", "ZY"};
  for (auto a : all) {
    for (auto b : all) {
      const auto pa = P::parse(a), pb = P::parse(b);
      const ComplexMatrix comm = pa.matrix() * pb.matrix() - pb.matrix() * pa.matrix();
      EXPECT_EQ(pa.commutes_with(pb), max_abs(comm) < 1e-12) << a << " " << b;
      EXPECT_EQ(pa.commutes_with(pb), pb.commutes_with(pa));
    }
  }
}

TEST(Pauli, ParseErrors) {
  EXPECT_THROW(P::parse("XQZ"), std::invalid_argument);
  EXPECT_THROW(P::parse(""), std::invalid_argument);
  EXPECT_EQ(P::parse("-iXY").to_string(), "-iXY");
}

TEST(BitFlip, GeneratorsAndUnitaries) {
  const auto code = builtin_code(BuiltinCode::three_qubit_bit_flip);
  ASSERT_EQ(code.generators().size(), 2u);
  EXPECT_EQ(code.generators()[0], P::parse("ZZI"));
  EXPECT_EQ(code.generators()[1], P::parse("ZIZ"));

  // U_G = I (x) (P0 + P1 + P2) + X (x) P3 in the encoded basis
  ComplexMatrix proj012 = outer_basis(4, 0, 0) + outer_basis(4, 1, 1) + outer_basis(4, 2, 2);
  const ComplexMatrix expected = tensor(identity(2), proj012) + tensor(op("X"), outer_basis(4, 3, 3));
  EXPECT_LT(max_abs(code.correcting_unitary() - expected), 1e-12);
}

TEST(BitFlip, Syndromes) {
  const auto code = builtin_code("three_qubit_bit_flip");
  EXPECT_EQ(syndrome_of(code, P::parse("III")).value, 0u);
  EXPECT_EQ(syndrome_of(code, P::parse("XII")).value, 3u);
  EXPECT_EQ(syndrome_of(code, P::parse("IXI")).value, 1u);
  EXPECT_EQ(syndrome_of(code, P::parse("IIX")).value, 2u);
  EXPECT_THROW(syndrome_of(code, P::parse("XX")), DimensionError);
}

TEST(BitFlip, EncodedBasis) {
  const auto code = builtin_code(BuiltinCode::three_qubit_bit_flip);
  EXPECT_LT(max_abs(to_encoded(code, op("ZZI")) - op("IZI")), 1e-12);
  EXPECT_LT(max_abs(to_encoded(code, op("XII")) - op("XXX")), 1e-12);
  EXPECT_LT(max_abs(to_encoded(code, identity(8)) - identity(8)), 1e-12);
  EXPECT_THROW(to_encoded(code, identity(4)), DimensionError);
}

TEST(BitFlip, CorrectedBasisOfThirdError) {
  const auto code = builtin_code(BuiltinCode::three_qubit_bit_flip);
  const ComplexMatrix expected = tensor(identity(2), outer_basis(4, 0, 1) + outer_basis(4, 1, 0)) +
                                 tensor(op("X"), outer_basis(4, 2, 3) + outer_basis(4, 3, 2));
  EXPECT_LT(max_abs(to_corrected(code, op("IIX")) - expected), 1e-12);
  EXPECT_LT(max_abs(to_corrected(code, identity(8)) - identity(8)), 1e-12);
  const ComplexMatrix back = from_corrected(code, to_corrected(code, op("XYZ")));
  EXPECT_LT(max_abs(back - op("XYZ")), 1e-12);
}

// Every correctable error maps |a, 0> to |a, j> with identity action on a.
void expect_corrected_structure(const StabilizerCode& code) {
  const Eigen::Index N = code.syndrome_dim(), A = code.info_dim();
  for (const auto& e : code.correctable_errors()) {
    const ComplexMatrix c = to_corrected(code, e.matrix());
    Eigen::Index target = -1;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (std::abs(c(j, 0)) > 0.5) target = j;
    }
    ASSERT_GE(target, 0) << e.to_string();
    for (Eigen::Index a = 0; a < A; ++a) {
      for (Eigen::Index b = 0; b < A; ++b) {
        for (Eigen::Index j = 0; j < N; ++j) {
          const Complex expected = (a == b && j == target) ? Complex(1.0) : Complex(0.0);
          EXPECT_LT(std::abs(c(a * N + j, b * N) - expected), 1e-10) << code.name() << " " << e.to_string();
        }
      }
    }
  }
}

void expect_codespace(const StabilizerCode& code) {
  const ComplexMatrix pi = code.codespace_projector();
  const Eigen::Index N = code.syndrome_dim();
  for (Eigen::Index a = 0; a < code.info_dim(); ++a) {
    const ComplexVector v = code.encoding_unitary().col(a * N);
    EXPECT_LT((pi * v - v).norm(), 1e-10) << code.name();
  }
}

TEST(Builtins, StructuralInvariants) {
  for (const auto& name : builtin_code_names()) {
    const auto code = builtin_code(name);
    expect_corrected_structure(code);
    expect_codespace(code);
    EXPECT_LT(unitarity_residual(code.encoding_unitary()), 1e-10);
  }
}

TEST(Builtins, FiveQubitCounts) {
  const auto code = builtin_code(BuiltinCode::five_qubit_perfect);
  EXPECT_EQ(code.n() - code.k(), 4);
  EXPECT_EQ(code.correctable_errors().size(), 16u);
  EXPECT_THROW(builtin_code("seven_qubit_steane"), CodeError);
}

TEST(Builtins, SyndromeIsHomomorphism) {
  const auto code = builtin_code(BuiltinCode::five_qubit_perfect);
  const auto paulis = detail::paulis_of_weight(5, 2);
  for (std::size_t i = 0; i < paulis.size(); i += 7) {
    for (std::size_t j = 3; j < paulis.size(); j += 11) {
      EXPECT_EQ(syndrome_of(code, paulis[i] * paulis[j]).value,
                syndrome_of(code, paulis[i]).value ^ syndrome_of(code, paulis[j]).value);
    }
  }
}

TEST(FromGenerators, MatchesBitFlipCodespace) {
  const auto built = build_code_from_generators(3, 1, {P::parse("ZZI"), P::parse("ZIZ")});
  const auto ref = builtin_code(BuiltinCode::three_qubit_bit_flip);
  EXPECT_LT(max_abs(built.codespace_projector() - ref.codespace_projector()), 1e-10);
  expect_corrected_structure(built);
  // register label equals the generator syndrome for synthesized encoders
  for (const auto& e : built.correctable_errors()) {
    const auto reg = register_of(3, 1, built.encoding_unitary(), e);
    ASSERT_TRUE(reg.has_value());
    EXPECT_EQ(static_cast<std::uint32_t>(*reg), syndrome_of(built, e).value);
  }
}

TEST(FromGenerators, TrivialCode) {
  const auto code = build_code_from_generators(1, 1, {});
  EXPECT_LT(max_abs(code.encoding_unitary() - identity(2)), 1e-14);
  EXPECT_LT(max_abs(code.correcting_unitary() - identity(2)), 1e-14);
}

TEST(FromGenerators, AlternativeGenerators) {
  const auto code = build_code_from_generators(3, 1, {P::parse("ZZI"), P::parse("IZZ")});
  EXPECT_EQ(syndrome_of(code, P::parse("XII")).value, 1u);
  expect_corrected_structure(code);
  expect_codespace(code);
}

TEST(FromGenerators, FiveQubitAndSteaneLike) {
  const auto five = build_code_from_generators(
      5, 1, {P::parse("XZZXI"), P::parse("IXZZX"), P::parse("XIXZZ"), P::parse("ZXIXZ")});
  EXPECT_EQ(five.correctable_errors().size(), 16u);
  for (const auto& e : five.correctable_errors()) EXPECT_LE(e.weight(), 1);
  expect_corrected_structure(five);
  expect_codespace(five);

  // [[4,2,2]]: k = 2 exercises multiple logical pairs
  const auto c422 = build_code_from_generators(4, 2, {P::parse("XXXX"), P::parse("ZZZZ")});
  expect_codespace(c422);
  expect_corrected_structure(c422);
}

TEST(FromGenerators, RejectsInvalidSets) {
  EXPECT_THROW(build_code_from_generators(2, 0, {P::parse("XI"), P::parse("ZI")}), CodeError);
  EXPECT_THROW(build_code_from_generators(3, 1, {P::parse("ZZI"), P::parse("ZZI")}), CodeError);
  EXPECT_THROW(build_code_from_generators(3, 1, {P::parse("ZZI")}), CodeError);
  EXPECT_THROW(build_code_from_generators(2, 1, {P::parse("iZZ")}), CodeError);
  // -I generated: ZZ and -ZZ are dependent
  EXPECT_THROW(build_code_from_generators(2, 0, {P::parse("ZZ"), P::parse("-ZZ")}), CodeError);
}

TEST(CodeFile, ParsesCommentsAndHeader) {
  std::istringstream in("# bit flip\n3 1\nZZI  # g1\n\nZIZ\n");
  const auto def = parse_code_definition(in);
  EXPECT_EQ(def.n, 3);
  EXPECT_EQ(def.k, 1);
  ASSERT_EQ(def.generators.size(), 2u);
  EXPECT_EQ(def.generators[1], P::parse("ZIZ"));
}

TEST(CodeFile, ErrorsNameTheLine) {
  std::istringstream bad_letter("3 1\nZZI\nZQZ\n");
  try {
    parse_code_definition(bad_letter);
    FAIL();
  } catch (const CodeFileError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream bad_len("3 1\nZZ\nZIZ\n");
  EXPECT_THROW(parse_code_definition(bad_len), CodeFileError);
  std::istringstream bad_header("three one\nZZI\n");
  EXPECT_THROW(parse_code_definition(bad_header), CodeFileError);
  std::istringstream too_few("3 1\nZZI\n");
  EXPECT_THROW(parse_code_definition(too_few), CodeFileError);
}

TEST(CodeFile, LoadsSampleFiles) {
  const auto code = load_code_file(std::string(CTQEC_DATA_DIR) + "/codes/bit_flip.code");
  EXPECT_EQ(code.n(), 3);
  const auto five = resolve_code(std::string(CTQEC_DATA_DIR) + "/codes/five_qubit.code");
  EXPECT_EQ(five.correctable_errors().size(), 16u);
}

}  // namespace

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "hyerslab/algebra.hpp"
#include "hyerslab/error.hpp"
#include "hyerslab/random.hpp"

using namespace hyerslab;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

IntMatrix random_int_matrix(SplitMix64& rng, int dim) {
  IntMatrix m(dim, dim);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = static_cast<std::int64_t>(rng() % 7) - 3;
  return m;
}

Matrix to_complex(const IntMatrix& m) { return m.cast<double>().cast<Scalar>(); }

}  // namespace

TEST(SplitMix64, MatchesPublishedReferenceOutput) {
  // reference values of the SplitMix64 generator for seed 1234567
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng(), 6457827717110365317ULL);
  EXPECT_EQ(rng(), 3203168211198807973ULL);
  EXPECT_EQ(rng(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformStaysInRange) {
  SplitMix64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.0, 5.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 5.0);
  }
}

TEST(OddPoly, RejectsEvenDegreesAndDropsZeros) {
  EXPECT_THROW(OddPoly({{2, 1.0}}), Error);
  EXPECT_THROW(OddPoly({{-1, 1.0}}), Error);
  EXPECT_THROW(OddPoly({{1, std::nan("")}}), Error);
  const OddPoly p({{1, 0.0}, {3, 2.0}});
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.coeff(3), Scalar(2.0));
  EXPECT_EQ(p.coeff(1), Scalar(0.0));
}

TEST(TernaryProduct, MatrixExamples) {
  const auto ctx = AlgebraContext::matrix(2);
  const Element I = identity(ctx);
  EXPECT_EQ(std::get<Matrix>(ternary_product(ctx, I, I, I)), Matrix::Identity(2, 2));
  const Element d = diag({2, 3});
  EXPECT_EQ(std::get<Matrix>(ternary_product(ctx, d, d, d)), diag({8, 27}));
}

TEST(TernaryProduct, PolynomialMonomials) {
  const auto ctx = AlgebraContext::odd_polynomial();
  const Element x = OddPoly::monomial(1);
  const auto cube = std::get<OddPoly>(ternary_product(ctx, x, x, x));
  EXPECT_EQ(cube, OddPoly::monomial(3));
}

TEST(TernaryProduct, PolynomialConvolutionAgainstDenseOracle) {
  const auto ctx = AlgebraContext::odd_polynomial();
  SplitMix64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Element e[3];
    for (auto& v : e) v = random_element(ctx, rng, {.real_only = false, .scale = 1.0, .max_poly_terms = 5});
    std::vector<Scalar> dense(40, 0.0);
    for (const auto& [da, ca] : std::get<OddPoly>(e[0]).terms()) {
      for (const auto& [db, cb] : std::get<OddPoly>(e[1]).terms()) {
        for (const auto& [dc, cc] : std::get<OddPoly>(e[2]).terms()) dense[da + db + dc] += ca * cb * cc;
      }
    }
    const auto got = std::get<OddPoly>(ternary_product(ctx, e[0], e[1], e[2]));
    for (std::size_t d = 0; d < dense.size(); ++d) {
      EXPECT_NEAR(std::abs(got.coeff(static_cast<std::int64_t>(d)) - dense[d]), 0.0, 1e-12);
    }
    for (const auto& [d, c] : got.terms()) EXPECT_EQ(d % 2, 1);
  }
}

TEST(TernaryProduct, DegreeCapRaisesDegreeOverflow) {
  const auto ctx = AlgebraContext::odd_polynomial(3);
  const Element p = OddPoly({{1, 1.0}, {3, 1.0}});
  try {
    ternary_product(ctx, p, p, p);
    FAIL() << "expected DegreeOverflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegreeOverflow);
  }
}

TEST(TernaryProduct, ShapeMismatchIsContextMismatch) {
  const auto ctx = AlgebraContext::matrix(2);
  const Element big = Matrix(Matrix::Identity(3, 3));
  try {
    ternary_product(ctx, big, big, big);
    FAIL() << "expected ContextMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContextMismatch);
  }
  EXPECT_THROW(norm(ctx, OddPoly::monomial(1)), Error);
}

TEST(Norm, Examples) {
  const auto m = AlgebraContext::matrix(2);
  EXPECT_NEAR(norm(m, identity(m)), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(norm(m, diag({3, 4})), 5.0);
  const auto p = AlgebraContext::odd_polynomial();
  EXPECT_DOUBLE_EQ(norm(p, OddPoly({{1, 1.0}, {3, 2.0}})), 3.0);
  EXPECT_DOUBLE_EQ(norm(p, OddPoly({{1, Scalar(3.0, 4.0)}})), 5.0);
}

TEST(LinearOps, Examples) {
  const auto ctx = AlgebraContext::matrix(2);
  SplitMix64 rng(5);
  const Element a = random_element(ctx, rng);
  const Element b = random_element(ctx, rng);
  EXPECT_TRUE(is_zero(scalar_mul(ctx, 0.0, a)));
  EXPECT_EQ(std::get<Matrix>(add(ctx, a, sub(ctx, b, b))), std::get<Matrix>(a));
  const Matrix iI = std::get<Matrix>(scalar_mul(ctx, Scalar(0.0, 1.0), identity(ctx)));
  EXPECT_EQ(iI(0, 0), Scalar(0.0, 1.0));
  EXPECT_EQ(iI(1, 1), Scalar(0.0, 1.0));
  EXPECT_EQ(iI(0, 1), Scalar(0.0));
}

TEST(Associativity, ExamplesAndExactIntegerOracle) {
  const auto ctx = AlgebraContext::matrix(2);
  const Element I = identity(ctx);
  EXPECT_EQ(check_ternary_associativity(ctx, I, I, I, I, I), 0.0);

  const auto poly = AlgebraContext::odd_polynomial();
  const Element x = OddPoly::monomial(1);
  const Element x3 = OddPoly::monomial(3);
  EXPECT_EQ(check_ternary_associativity(poly, x, x, x3, x, x), 0.0);

  // Small integer matrices: the floating-point products are exact, so they
  // must reproduce the int64 products bit for bit.
  const auto ctx3 = AlgebraContext::matrix(3);
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    IntMatrix m[5];
    for (auto& v : m) v = random_int_matrix(rng, 3);
    const IntMatrix exact = m[0] * m[1] * m[2] * m[3] * m[4];
    Element e[5];
    for (int k = 0; k < 5; ++k) e[k] = to_complex(m[k]);
    const Element left = ternary_product(ctx3, ternary_product(ctx3, e[0], e[1], e[2]), e[3], e[4]);
    EXPECT_EQ(std::get<Matrix>(left), to_complex(exact));
    EXPECT_EQ(check_ternary_associativity(ctx3, e[0], e[1], e[2], e[3], e[4]), 0.0);
  }
}

TEST(Associativity, RandomUnitMatricesWithinRounding) {
  const auto ctx = AlgebraContext::matrix(3);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Element e[5];
    for (auto& v : e) {
      v = random_element(ctx, rng);
      v = scalar_mul(ctx, 1.0 / norm(ctx, v), v);
    }
    EXPECT_LE(check_ternary_associativity(ctx, e[0], e[1], e[2], e[3], e[4]), 1e-12);
  }
}

class AlgebraInvariants : public ::testing::TestWithParam<bool> {
 protected:
  AlgebraContext ctx() const { return GetParam() ? AlgebraContext::matrix(3) : AlgebraContext::odd_polynomial(); }
};

TEST_P(AlgebraInvariants, SubmultiplicativeOnTenThousandTriples) {
  const auto c = ctx();
  SplitMix64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const Element a = random_element(c, rng);
    const Element b = random_element(c, rng);
    const Element d = random_element(c, rng);
    ASSERT_LE(norm(c, ternary_product(c, a, b, d)), norm(c, a) * norm(c, b) * norm(c, d) * (1.0 + 1e-12)) << i;
  }
}

TEST_P(AlgebraInvariants, AssociativeOnTenThousandTuples) {
  const auto c = ctx();
  SplitMix64 rng(4048);
  for (int i = 0; i < 10000; ++i) {
    Element e[5];
    double scale = 1.0;
    for (auto& v : e) {
      v = random_element(c, rng);
      scale *= norm(c, v);
    }
    ASSERT_LE(check_ternary_associativity(c, e[0], e[1], e[2], e[3], e[4]), 1e-10 * scale) << i;
  }
}

TEST_P(AlgebraInvariants, ProductIsAdditiveInEachSlot) {
  const auto c = ctx();
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Element v[4];
    for (auto& e : v) e = random_element(c, rng);
    const Element abc = ternary_product(c, v[0], v[1], v[2]);
    const double scale = (norm(c, v[0]) + norm(c, v[3])) * norm(c, v[1]) * norm(c, v[2]);
    const Element lhs = ternary_product(c, add(c, v[0], v[3]), v[1], v[2]);
    const Element rhs = add(c, abc, ternary_product(c, v[3], v[1], v[2]));
    ASSERT_LE(distance(c, lhs, rhs), 1e-10 * scale);
    const Element mid = ternary_product(c, v[0], add(c, v[1], v[3]), v[2]);
    ASSERT_LE(distance(c, mid, add(c, abc, ternary_product(c, v[0], v[3], v[2]))),
              1e-10 * norm(c, v[0]) * (norm(c, v[1]) + norm(c, v[3])) * norm(c, v[2]));
  }
}

INSTANTIATE_TEST_SUITE_P(BothAlgebras, AlgebraInvariants, ::testing::Values(true, false),
                         [](const auto& info) { return info.param ? "Matrix" : "OddPolynomial"; });

TEST(OddPolynomial, ProductsKeepOddDegrees) {
  const auto ctx = AlgebraContext::odd_polynomial();
  SplitMix64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const auto prod = std::get<OddPoly>(
        ternary_product(ctx, random_element(ctx, rng), random_element(ctx, rng), random_element(ctx, rng)));
    for (const auto& [d, c] : prod.terms()) ASSERT_EQ(d % 2, 1);
  }
}

TEST(Bridge, IdentityInducesMatrixProduct) {
  const auto ctx = AlgebraContext::matrix(2);
  const Element I = identity(ctx);
  EXPECT_EQ(std::get<Matrix>(binary_from_identity(ctx, I, diag({1, 2}), diag({3, 4}))), diag({3, 8}));
  EXPECT_EQ(std::get<Matrix>(binary_from_identity(ctx, I, I, I)), Matrix::Identity(2, 2));

  SplitMix64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Element a = random_element(ctx, rng);
    const Element b = random_element(ctx, rng);
    const Element c = random_element(ctx, rng);
    const Matrix plain = std::get<Matrix>(a) * std::get<Matrix>(b);
    const Matrix bridged = std::get<Matrix>(binary_from_identity(ctx, I, a, b));
    ASSERT_LE((bridged - plain).cwiseAbs().maxCoeff(), 1e-14 * (1.0 + plain.cwiseAbs().maxCoeff()));
    ASSERT_LE(check_identity(ctx, I, a), 1e-14 * (1.0 + norm(ctx, a)));
    ASSERT_LE(check_binary_bridge(ctx, I, a, b, c), 1e-12 * (1.0 + norm(ctx, a) * norm(ctx, b) * norm(ctx, c)));
  }
}

TEST(Bridge, NonIdentityIsRejected) {
  const auto ctx = AlgebraContext::matrix(2);
  const Element e = diag({2, 1});
  const Element a = diag({1, 1});
  try {
    binary_from_identity(ctx, e, a, a);
    FAIL() << "expected IdentityViolation";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::IdentityViolation);
  }
  const auto poly = AlgebraContext::odd_polynomial();
  EXPECT_THROW(identity(poly), Error);
}

TEST(Json, RoundTripsBothAlgebras) {
  SplitMix64 rng(21);
  for (const auto& ctx : {AlgebraContext::matrix(3), AlgebraContext::odd_polynomial()}) {
    for (int i = 0; i < 20; ++i) {
      const Element a = random_element(ctx, rng);
      const Element back = element_from_json(ctx, nlohmann::json::parse(to_json(a).dump()));
      EXPECT_EQ(distance(ctx, a, back), 0.0);
    }
  }
  const auto m = AlgebraContext::matrix(2);
  const auto j = to_json(Element(diag({1, 2})));
  EXPECT_EQ(j[1][1][0].get<double>(), 2.0);
  EXPECT_THROW(element_from_json(m, nlohmann::json::parse("[[1]]")), Error);
  const auto p = AlgebraContext::odd_polynomial();
  EXPECT_THROW(element_from_json(p, nlohmann::json::parse(R"({"2": [1, 0]})")), Error);
}

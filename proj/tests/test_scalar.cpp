#include <gtest/gtest.h>

#include <random>

#include "polymoments/scalar.hpp"

using namespace polymoments;

namespace {

ComplexRational random_complex(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-1000, 1000), den(1, 97);
  return {make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng))};
}

}  // namespace

TEST(Scalar, NormSqExamples) {
  EXPECT_EQ(norm_sq(ComplexRational()), 0);
  EXPECT_EQ(norm_sq(ComplexRational(BigRational(1, 4), BigRational(1))), BigRational(17, 16));
  EXPECT_EQ(norm_sq(ComplexRational(BigRational(3, 5), BigRational(4, 5))), 1);
}

TEST(Scalar, ToFloatExamples) {
  EXPECT_EQ(to_float(ComplexRational(BigRational(1, 2))), ComplexFloat(0.5, 0.0));
  EXPECT_EQ(to_float(ComplexRational(BigRational(1, 3))).real(), 1.0 / 3.0);
  EXPECT_EQ(to_float(ComplexRational(BigRational(17, 16))).real(), 1.0625);
}

TEST(Scalar, ToDoubleRoundsTiesToEven) {
  const BigInt two53 = BigInt(1) << 53;
  // 2^53 + 1 is halfway between 2^53 and 2^53 + 2: even mantissa wins.
  EXPECT_EQ(to_double(BigRational(two53 + 1)), 9007199254740992.0);
  EXPECT_EQ(to_double(BigRational(two53 + 3)), 9007199254740996.0);
  // Smallest subnormal and half of it (tie rounds to zero, the even side).
  const BigRational tiny = make_rational(1, BigInt(1) << 1074);
  EXPECT_EQ(to_double(tiny), std::numeric_limits<double>::denorm_min());
  EXPECT_EQ(to_double(tiny / 2), 0.0);
  EXPECT_EQ(to_double(tiny * 3 / 2), 2 * std::numeric_limits<double>::denorm_min());
}

TEST(Scalar, ToDoubleOverflowIsAnError) {
  const BigRational huge(BigInt(1) << 1100);
  EXPECT_THROW(to_double(huge), OverflowError);
  EXPECT_THROW(to_float(ComplexRational(BigRational(1), -huge)), OverflowError);
}

TEST(Scalar, CanonicalFormAfterConstruction) {
  const BigRational q = make_rational(6, -4);
  EXPECT_EQ(q.get_num(), -3);
  EXPECT_EQ(q.get_den(), 2);
  EXPECT_THROW(make_rational(1, 0), DomainError);
}

TEST(Scalar, FieldAxiomsOnRandomTriples) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const auto a = random_complex(rng), b = random_complex(rng), c = random_complex(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(norm_sq(a * b), norm_sq(a) * norm_sq(b));
    // Every result stays canonical.
    const auto prod = a * b;
    EXPECT_GT(sgn(prod.re.get_den()), 0);
    EXPECT_EQ(gcd(prod.re.get_num(), prod.re.get_den()), 1);
  }
}

TEST(Scalar, DyadicRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 500; ++k) {
    const ComplexFloat x(u(rng), std::ldexp(u(rng), -300));
    EXPECT_EQ(to_float(from_float(x)), x);
  }
  EXPECT_THROW(from_double(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(Scalar, ParseRational) {
  EXPECT_EQ(parse_rational("3/4"), BigRational(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), BigRational(-3, 4));
  EXPECT_EQ(parse_rational("0.25"), BigRational(1, 4));
  EXPECT_EQ(parse_rational("-1.5"), BigRational(-3, 2));
  EXPECT_EQ(parse_rational(" 17 "), 17);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational("1/2/3"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
}

TEST(Scalar, ParseAndFormatComplex) {
  EXPECT_EQ(parse_complex("1/4+1i"), ComplexRational(BigRational(1, 4), BigRational(1)));
  EXPECT_EQ(parse_complex("1/4-i"), ComplexRational(BigRational(1, 4), BigRational(-1)));
  EXPECT_EQ(parse_complex("-1i"), ComplexRational(BigRational(0), BigRational(-1)));
  EXPECT_EQ(parse_complex("i"), ComplexRational::i());
  EXPECT_EQ(parse_complex("-3"), ComplexRational(-3));
  EXPECT_EQ(parse_complex("-1/2+3/7 i"), ComplexRational(BigRational(-1, 2), BigRational(3, 7)));
  EXPECT_EQ(format_complex(ComplexRational(BigRational(1, 4), BigRational(-1))), "1/4-1i");
  EXPECT_EQ(format_complex(ComplexRational(BigRational(0), BigRational(5, 2))), "5/2i");
  EXPECT_EQ(format_complex(ComplexRational(BigRational(-7))), "-7");
  EXPECT_THROW(parse_complex("1+xi"), ParseError);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const auto z = random_complex(rng);
    EXPECT_EQ(parse_complex(format_complex(z)), z);
  }
}

TEST(Scalar, JsonEncoding) {
  const ComplexRational z(BigRational(-3, 4), BigRational(5));
  const auto j = to_json(z);
  EXPECT_EQ(j["re"]["num"], "-3");
  EXPECT_EQ(j["re"]["den"], "4");
  EXPECT_EQ(j["im"]["num"], "5");
  EXPECT_EQ(j["im"]["den"], "1");
  EXPECT_EQ(complex_from_json(j), z);
}

TEST(Scalar, LogRationalBeyondDoubleRange) {
  const BigRational big(BigInt(3) * (BigInt(1) << 3000));
  EXPECT_NEAR(log_rational(big), std::log(3.0) + 3000 * std::log(2.0), 1e-12);
  EXPECT_THROW(log_rational(BigRational(0)), DomainError);
}

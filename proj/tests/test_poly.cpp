#include <gtest/gtest.h>

#include <random>

#include "polymoments/poly.hpp"
#include "polymoments/reference.hpp"

using namespace polymoments;

namespace {

BigRational rat(long n, long d = 1) { return make_rational(n, d); }

ComplexRational random_complex(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 12);
  return {rat(num(rng), den(rng)), rat(num(rng), den(rng))};
}

Poly random_poly(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::vector<ComplexRational> c(deg(rng) + 1);
  for (auto& x : c) x = random_complex(rng);
  return Poly(std::move(c));
}

}  // namespace

TEST(Poly, NormalizationStripsTrailingZeros) {
  const Poly f({ComplexRational(1), ComplexRational(0), ComplexRational(0)});
  EXPECT_EQ(f.degree(), 0);
  EXPECT_TRUE(Poly({ComplexRational(0)}).is_zero());
  EXPECT_EQ(Poly().degree(), -1);
  EXPECT_TRUE((f - f).is_zero());
}

TEST(Poly, EvalExamples) {
  const Poly f1 = reference::prop1_polynomial();
  const Poly f2 = reference::prop2_polynomial();
  EXPECT_EQ(eval(f1, ComplexRational(-1)), ComplexRational(4));
  EXPECT_EQ(eval(f2, ComplexRational(0)), ComplexRational(rat(5, 4)));
  EXPECT_EQ(eval(f2, ComplexRational(1)), ComplexRational(rat(1, 4), rat(-1)));
  EXPECT_EQ(eval(f2, ComplexRational(-1)), ComplexRational(rat(1, 4), rat(1)));
}

TEST(Poly, TextFormMatchesExpandedForms) {
  // 4 - (x+1)^2 and 1 - (x + i/2)^2 built from their factored forms.
  const Poly xp1{ComplexRational(1), ComplexRational(1)};
  EXPECT_EQ(Poly::constant(4) - xp1 * xp1, parse_poly("3,-2,-1"));
  const Poly xpi{ComplexRational(rat(0), rat(1, 2)), ComplexRational(1)};
  EXPECT_EQ(Poly::constant(1) - xpi * xpi, parse_poly("5/4,-1i,-1"));
  EXPECT_EQ(Poly::constant(1) - xpi * xpi, reference::prop2_polynomial());
}

TEST(Poly, ParseErrorsNameTheToken) {
  try {
    parse_poly("1,2/x,3");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.token, "2/x");
  }
  EXPECT_THROW(parse_poly(""), ParseError);
  EXPECT_THROW(parse_poly("1,,2"), ParseError);
}

TEST(Poly, DerivativeExamples) {
  EXPECT_EQ(derivative(reference::prop1_polynomial()), parse_poly("-2,-2"));
  EXPECT_TRUE(derivative(Poly::constant(ComplexRational(rat(7, 3)))).is_zero());
  EXPECT_EQ(derivative(Poly::monomial(3)), Poly::monomial(2, ComplexRational(3)));
}

TEST(Poly, MulAndPowExamples) {
  const Poly x = Poly::monomial(1);
  EXPECT_EQ(mul(x, x), Poly::monomial(2));
  EXPECT_EQ(pow(parse_poly("1,1"), 2), parse_poly("1,2,1"));
  const Poly f = reference::prop2_polynomial();
  const Poly f2 = pow(f, 2);
  const ComplexRational f0 = eval(f, ComplexRational(0));
  EXPECT_EQ(f2[0], f0 * f0);
  EXPECT_EQ(f2[0], ComplexRational(rat(25, 16)));
  EXPECT_THROW(pow(f, 0), DomainError);
}

TEST(Poly, AffinePullbackExamples) {
  const Interval unit(0, 1), sym(-1, 1);
  EXPECT_EQ(affine_pullback(Poly::monomial(1), unit, sym), parse_poly("1/2,1/2"));
  const Poly f = reference::prop1_polynomial();
  EXPECT_EQ(affine_pullback(f, unit, unit), f);
}

TEST(Poly, AbsSqRealExamples) {
  EXPECT_EQ(abs_sq_real(reference::prop2_polynomial()),
            RealPoly({rat(25, 16), rat(0), rat(-3, 2), rat(0), rat(1)}));
  const Poly real = reference::prop1_polynomial();
  EXPECT_EQ(to_complex(abs_sq_real(real)), real * real);
  EXPECT_EQ(abs_sq_real(Poly::constant(ComplexRational::i())), RealPoly({rat(1)}));
}

TEST(Poly, IntervalValidation) {
  EXPECT_THROW(Interval(1, 1), DomainError);
  EXPECT_THROW(Interval(2, 1), DomainError);
  EXPECT_EQ(parse_interval("-1,1"), Interval(-1, 1));
  EXPECT_EQ(parse_interval("1/4, 3/2"), Interval(rat(1, 4), rat(3, 2)));
  EXPECT_THROW(parse_interval("1"), ParseError);
}

TEST(PolyProperties, EvalIsARingHomomorphism) {
  std::mt19937_64 rng(101);
  for (int k = 0; k < 100; ++k) {
    const Poly f = random_poly(rng, 6), g = random_poly(rng, 6);
    const ComplexRational z = random_complex(rng);
    EXPECT_EQ(eval(mul(f, g), z), eval(f, z) * eval(g, z));
    EXPECT_EQ(eval(f + g, z), eval(f, z) + eval(g, z));
  }
}

TEST(PolyProperties, DerivativeIsLinearAndObeysProductRule) {
  std::mt19937_64 rng(202);
  for (int k = 0; k < 100; ++k) {
    const Poly f = random_poly(rng, 6), g = random_poly(rng, 6);
    const ComplexRational s = random_complex(rng);
    EXPECT_EQ(derivative(f * s + g), derivative(f) * s + derivative(g));
    EXPECT_EQ(derivative(f * g), derivative(f) * g + f * derivative(g));
  }
}

TEST(PolyProperties, AbsSqRealMatchesNormSqAtRealPoints) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<long> num(-40, 40), den(1, 17);
  for (int k = 0; k < 100; ++k) {
    const Poly f = random_poly(rng, 6);
    const BigRational x = rat(num(rng), den(rng));
    EXPECT_EQ(eval(abs_sq_real(f), x), norm_sq(eval(f, ComplexRational(x))));
  }
}

TEST(PolyProperties, AffinePullbackRoundTripIsIdentity) {
  std::mt19937_64 rng(404);
  const Interval unit(0, 1), sym(-1, 1), odd(rat(-2, 3), rat(5, 7));
  for (int k = 0; k < 50; ++k) {
    const Poly f = random_poly(rng, 6);
    EXPECT_EQ(affine_pullback(affine_pullback(f, unit, sym), sym, unit), f);
    EXPECT_EQ(affine_pullback(affine_pullback(f, odd, unit), unit, odd), f);
    // g(t) = f(l(t)) pointwise.
    const Poly g = affine_pullback(f, unit, sym);
    EXPECT_EQ(eval(g, ComplexRational(rat(1, 3))), eval(f, ComplexRational(rat(2, 3))));
  }
}

TEST(PolyProperties, TextRoundTrip) {
  std::mt19937_64 rng(505);
  for (int k = 0; k < 50; ++k) {
    const Poly f = random_poly(rng, 8);
    if (f.is_zero()) continue;
    EXPECT_EQ(parse_poly(format_poly(f)), f);
  }
}

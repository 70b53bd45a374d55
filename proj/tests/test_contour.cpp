#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "polymoments/contour.hpp"
#include "polymoments/kappa.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/reference.hpp"

using namespace polymoments;

namespace {

BigRational rat(long n, long d = 1) { return make_rational(n, d); }

ComplexFloat exact_moment(const Poly& f, const Interval& I, unsigned p) { return to_float(moment_exact(f, I, p)); }

}  // namespace

TEST(BranchSqrt, Examples) {
  EXPECT_NEAR(std::abs(branch_sqrt(-1.0) - ComplexFloat(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(branch_sqrt(-4.0) - ComplexFloat(0, 2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(branch_sqrt(ComplexFloat(0, 2)) - ComplexFloat(1, 1)), 0.0, 1e-15);
  // Just below the cut the value flips to the lower edge of the upper half plane.
  EXPECT_NEAR(std::abs(branch_sqrt(ComplexFloat(4, -1e-9)) + 2.0), 0.0, 1e-9);
  EXPECT_THROW(branch_sqrt(4.0), BranchCutError);
  EXPECT_THROW(branch_sqrt(0.0), BranchCutError);
  EXPECT_THROW(branch_sqrt(ComplexFloat(1, 1e-13)), BranchCutError);
  EXPECT_NO_THROW(branch_sqrt(ComplexFloat(1, 1e-10)));
}

TEST(BranchSqrt, SquaresBackAndStaysInTheUpperHalfPlane) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 1000; ++k) {
    const ComplexFloat z(u(rng), u(rng));
    if (distance_to_nonnegative_axis(z) < 1e-6) continue;
    const ComplexFloat s = branch_sqrt(z);
    EXPECT_LE(std::abs(s * s - z), 1e-12 * std::abs(z));
    EXPECT_GT(s.imag(), 0.0);
  }
}

TEST(Paths, ReferenceGeometry) {
  const Path P = reference::image_parabola(), C = reference::deformed_circle();
  const ComplexFloat a(0.25, 1.0), b(0.25, -1.0);
  EXPECT_NEAR(std::abs(start_point(P) - a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(end_point(P) - b), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(start_point(C) - a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(end_point(C) - b), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(point_at(C, 0.5) - std::sqrt(17.0) / 4.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(point_at(P, 0.5) - 1.25), 0.0, 1e-15);
  // Closed form against a fine polygonal approximation.
  for (const Path& path : {P, C}) {
    double len = 0.0;
    for (int k = 0; k < 100000; ++k) len += std::abs(point_at(path, (k + 1) / 1e5) - point_at(path, k / 1e5));
    EXPECT_NEAR(arc_length(path), len, 1e-8);
  }
  EXPECT_DOUBLE_EQ(arc_length(reference::l_shaped_path()), 3.0);
}

TEST(Quadrature, ImageIntegralsMatchExactMoments) {
  const Poly f = reference::prop2_polynomial();
  const Interval I = reference::prop2_interval();
  for (unsigned p : {1u, 5u, 10u, 20u}) {
    const ComplexFloat exact = exact_moment(f, I, p);
    const ComplexFloat onP = integrate(reference::image_parabola(), WPower{p}, 1e-13);
    const ComplexFloat onC = integrate(reference::deformed_circle(), WPower{p}, 1e-13);
    EXPECT_LE(std::abs(onP - exact), 1e-10 * std::max(1.0, std::abs(exact))) << "p=" << p;
    EXPECT_LE(std::abs(onC - exact), 1e-10 * std::max(1.0, std::abs(exact))) << "p=" << p;
  }
  EXPECT_NEAR(std::abs(exact_moment(f, I, 1) - 11.0 / 6.0), 0.0, 1e-15);
}

TEST(Quadrature, SegmentIntegralIsTheMoment) {
  const Poly f = reference::prop1_polynomial();
  for (unsigned p : {1u, 2u, 7u, 30u}) {
    const ComplexFloat q = integrate(reference::segment(0.0, 1.0), ZPower(f, p), 1e-13);
    const ComplexFloat exact = exact_moment(f, Interval(0, 1), p);
    EXPECT_LE(std::abs(q - exact), 1e-11 * std::abs(exact)) << "p=" << p;
  }
}

TEST(Quadrature, MatchesExactMomentsOnRandomInputs) {
  std::mt19937_64 rng(777);
  for (int k = 0; k < 40; ++k) {
    const Poly f = random_polynomial(1 + k % 5, rat(2), rng);
    const unsigned p = 1 + rng() % 50;
    const ComplexFloat exact = exact_moment(f, Interval(-1, 1), p);
    const auto r = integrate_detailed(reference::segment(-1.0, 1.0), ZPower(f, p), 1e-13);
    // Heavy cancellation is limited by rounding of int |f|^p, sampled here.
    const auto c = to_float_coeffs(f);
    double scale = 0.0;
    for (int j = 0; j <= 2000; ++j) scale += std::pow(std::abs(eval_float(c, ComplexFloat(-1.0 + j / 1000.0))), p) / 1000.0;
    EXPECT_LE(std::abs(r.value - exact), 1e-11 * std::max({1.0, std::abs(exact), scale}))
        << format_poly(f) << " p=" << p;
  }
}

TEST(Quadrature, HalvingToleranceChangesLittle) {
  for (unsigned p : {3u, 12u, 25u}) {
    const auto coarse = integrate(reference::image_parabola(), WPower{p}, 1e-8);
    const auto fine = integrate(reference::image_parabola(), WPower{p}, 5e-9);
    EXPECT_LE(std::abs(coarse - fine), 2e-8 * (1 + std::abs(fine)));
  }
  EXPECT_THROW(integrate(reference::segment(-1.0, 1.0), ZPower(Poly::monomial(1), 1), 0.0), DomainError);
}

TEST(Quadrature, CutCrossingPathRaises) {
  // The left arc of the same circle passes through -sqrt(17)/4 on the cut.
  const double angle = std::atan2(1.0, 0.25);
  const CircleArc left{0.0, std::sqrt(17.0) / 4.0, angle, 2.0 * std::numbers::pi - angle};
  EXPECT_THROW(integrate(left, WPower{3}, 1e-12), BranchCutError);
}

TEST(Deformation, Examples) {
  for (unsigned p : {1u, 5u, 10u, 20u}) {
    const auto r = deformation_check(WPower{p}, reference::image_parabola(), reference::deformed_circle(), 1e-10);
    EXPECT_TRUE(r.pass) << "p=" << p << " diff=" << r.difference;
  }
  const Poly f = reference::prop2_polynomial();
  for (unsigned p : {1u, 4u, 9u}) {
    const auto r = deformation_check(ZPower(f, p), reference::segment(-1.0, 1.0), reference::l_shaped_path(), 1e-10);
    EXPECT_TRUE(r.pass) << "p=" << p;
    EXPECT_LE(std::abs(r.value1 - exact_moment(f, Interval(-1, 1), p)), 1e-11 * std::max(1.0, std::abs(r.value1)));
  }
  const auto same = deformation_check(WPower{7}, reference::image_parabola(), reference::image_parabola(), 1e-14);
  EXPECT_TRUE(same.pass);
  EXPECT_EQ(same.difference, 0.0);

  EXPECT_THROW(deformation_check(WPower{1}, reference::image_parabola(), reference::segment(0.0, 1.0), 1e-10),
               DomainError);
}

TEST(MLBoundTest, Examples) {
  const auto circle = ml_bound(reference::deformed_circle(), WPower{1});
  EXPECT_NEAR(circle.r, std::sqrt(17.0) / 4.0, 1e-12);
  EXPECT_NEAR(circle.K, 7.79, 5e-3);

  const auto seg = ml_bound(reference::segment(0.0, 1.0), ZPower(reference::prop1_polynomial(), 1));
  EXPECT_NEAR(seg.r, 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(seg.length, 1.0);

  const auto c = ml_bound(reference::segment(-1.0, 1.0), ZPower(Poly::constant(ComplexRational(rat(3, 2))), 1));
  EXPECT_DOUBLE_EQ(c.r, 1.5);
  EXPECT_DOUBLE_EQ(c.K, 2.0);
  EXPECT_DOUBLE_EQ(c.at(3), 2.0 * 3.375);
}

TEST(MLBoundTest, BoundsTheExactMoments) {
  const auto circle = ml_bound(reference::deformed_circle(), WPower{1});
  const auto series = moment_series(reference::prop2_polynomial(), reference::prop2_interval(), 50);
  for (unsigned p = 1; p <= 50; ++p) {
    const double m = std::abs(to_float(series.at(p)));
    EXPECT_LE(m, circle.at(p) * (1 + 1e-12)) << "p=" << p;
  }
}

TEST(PathCsv, Format) {
  std::ostringstream os;
  write_path_csv(os, reference::segment(0.0, ComplexFloat(1.0, 2.0)), 3);
  EXPECT_EQ(os.str(), "t,re,im\n0,0,0\n0.5,0.5,1\n1,1,2\n");
  EXPECT_THROW(write_path_csv(os, reference::image_parabola(), 1), DomainError);
}

#include <gtest/gtest.h>

#include <random>

#include "polymoments/kappa.hpp"
#include "polymoments/pathopt.hpp"
#include "polymoments/reference.hpp"

using namespace polymoments;

namespace {

BigRational rat(long n, long d = 1) { return make_rational(n, d); }

double path_max_sampled(const Poly& f, const Polyline& path, int per_segment = 64) {
  const auto c = to_float_coeffs(f);
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k)
    for (int j = 0; j <= per_segment; ++j) {
      const ComplexFloat z = path.points[k] + (double(j) / per_segment) * (path.points[k + 1] - path.points[k]);
      best = std::max(best, std::abs(eval_float(c, z)));
    }
  return best;
}

}  // namespace

TEST(MinimaxPath, ComplexReferenceApproachesTheCriticalValue) {
  const Poly f = reference::prop2_polynomial();
  const auto pb = minimax_path(f, reference::prop2_interval());
  EXPECT_GE(pb.bound, 1.0307);
  EXPECT_LE(pb.bound, 1.04);
  EXPECT_GE(pb.certified_bound, pb.bound);
  EXPECT_EQ(pb.path.points.front(), ComplexFloat(-1.0, 0.0));
  EXPECT_EQ(pb.path.points.back(), ComplexFloat(1.0, 0.0));
  // The certified value really dominates |f| along the polyline.
  EXPECT_LE(path_max_sampled(f, pb.path), pb.certified_bound);
  // Well below the sup-norm 5/4 on the interval itself.
  EXPECT_LT(pb.bound / 1.25, 0.83);
}

TEST(MinimaxPath, RealReferenceStaysAtTheSupNorm) {
  const auto pb = minimax_path(reference::prop1_polynomial(), reference::prop1_interval());
  EXPECT_NEAR(pb.bound, 3.0, 0.01 * 3.0);
  EXPECT_GE(pb.bound, 3.0);
  EXPECT_LE(pb.certified_bound, 3.0 * 1.02);
}

TEST(MinimaxPath, ConstantPolynomial) {
  const Poly c = Poly::constant(ComplexRational(rat(3, 5), rat(-4, 5)));
  const auto pb = minimax_path(c, Interval(-1, 1), 32, 32, 1);
  EXPECT_NEAR(pb.bound, 1.0, 1e-15);
  EXPECT_NEAR(pb.certified_bound, 1.0, 1e-15);
}

TEST(MinimaxPath, InputValidation) {
  const Poly f = reference::prop2_polynomial();
  const GridSpec box{-0.5, 0.5, -0.5, 0.5, 64, 64};
  EXPECT_THROW(minimax_path(f, ComplexFloat(-1.0), ComplexFloat(1.0), box), DomainError);
  const GridSpec tiny{-2, 2, -2, 2, 8, 8};
  EXPECT_THROW(minimax_path(f, ComplexFloat(-1.0), ComplexFloat(1.0), tiny), DomainError);
  EXPECT_THROW(minimax_path(f, ComplexFloat(0.5), ComplexFloat(0.5), GridSpec{}), DomainError);
}

TEST(MinimaxPath, LevelsAreMonotoneAndJsonIsComplete) {
  const auto pb = minimax_path(reference::prop2_polynomial(), reference::prop2_interval(), 64, 64, 4);
  ASSERT_EQ(pb.level_bounds.size(), 5u);
  for (std::size_t k = 1; k < pb.level_bounds.size(); ++k) EXPECT_LE(pb.level_bounds[k], pb.level_bounds[k - 1]);
  const auto j = to_json(pb);
  EXPECT_EQ(j["levels"], 4);
  EXPECT_EQ(j["path_points"].size(), pb.path.points.size());
  EXPECT_DOUBLE_EQ(j["bound"].get<double>(), pb.bound);
}

TEST(MinimaxPathProperties, BoundDominatesEndpointsAndStaysBelowSupNorm) {
  std::mt19937_64 rng(67);
  for (int k = 0; k < 100; ++k) {
    const Poly f = random_polynomial(1 + k % 5, rat(4), rng);
    const Interval I(-1, 1);
    const auto pb = minimax_path(f, I, 48, 48, 1);
    const double ea = std::abs(eval_float(to_float_coeffs(f), ComplexFloat(-1.0)));
    const double eb = std::abs(eval_float(to_float_coeffs(f), ComplexFloat(1.0)));
    EXPECT_GE(pb.bound, std::max(ea, eb));
    EXPECT_LE(pb.bound, sup_norm(f, I).value * (1 + 1e-6)) << format_poly(f);
    EXPECT_LE(path_max_sampled(f, pb.path, 16), pb.certified_bound * (1 + 1e-12));
  }
}

TEST(MinimaxPathProperties, RealCoefficientsStayWithinTwoPercentOfSupNorm) {
  std::mt19937_64 rng(71);
  for (int k = 0; k < 10; ++k) {
    const Poly f = random_polynomial(1 + k % 6, rat(4), rng, true);
    const double sup = sup_norm(f, Interval(-1, 1)).value;
    const auto pb = minimax_path(f, Interval(-1, 1), 128, 128, 2);
    EXPECT_LE(std::abs(pb.bound - sup) / sup, 0.02) << format_poly(f);
  }
}

TEST(MinimaxPathProperties, MlEstimateOnThePathBoundsEveryMoment) {
  // |M_p| <= length * certified^p on the deformed path.
  std::mt19937_64 rng(73);
  std::vector<Poly> polys{reference::prop2_polynomial(), reference::prop1_polynomial()};
  for (int k = 0; k < 6; ++k) polys.push_back(random_polynomial(2 + k % 4, rat(3), rng));
  for (const Poly& f : polys) {
    const Interval I = f == reference::prop1_polynomial() ? Interval(0, 1) : Interval(-1, 1);
    const auto pb = minimax_path(f, I, 128, 128, 2);
    const double log_len = std::log(arc_length(pb.path));
    const auto roots = abs_roots(moment_series(f, I, 400));
    for (unsigned p = 1; p <= 400; ++p) {
      if (roots[p - 1].zero) continue;
      EXPECT_LE(roots[p - 1].log_abs, log_len + p * std::log(pb.certified_bound) + 1e-9)
          << format_poly(f) << " p=" << p;
    }
  }
}

TEST(BoundReport, ReferencePolynomials) {
  {
    const Poly f = reference::prop2_polynomial();
    const Interval I = reference::prop2_interval();
    const auto series = moment_series(f, I, 400);
    const auto r = bound_report(f, I, minimax_path(f, I), series);
    EXPECT_TRUE(r.consistent);
    EXPECT_LE(r.tail_max, r.certified_bound + 1e-6);
    // Stated form inside the tail window.
    const auto roots = abs_roots(series);
    for (unsigned p = 200; p <= 400; ++p) EXPECT_LE(roots[p - 1].value, r.certified_bound + 1e-6);
  }
  {
    const Poly f = reference::prop1_polynomial();
    const Interval I = reference::prop1_interval();
    const auto r = bound_report(f, I, minimax_path(f, I), moment_series(f, I, 400));
    EXPECT_TRUE(r.consistent);
    EXPECT_NEAR(r.bound, 3.0, 1e-12);
    const auto j = to_json(r);
    EXPECT_TRUE(j["consistent"].get<bool>());
  }
  EXPECT_THROW(bound_report(Poly::monomial(1), Interval(0, 1), PathBound{},
                            moment_series(Poly::monomial(1), Interval(-1, 1), 8)),
               DomainError);
}

TEST(DefaultGrid, ContainsEndpointsAndCriticalPoints) {
  const Poly f = reference::prop2_polynomial();
  const auto g = default_grid(f, -1.0, 1.0);
  EXPECT_LT(g.x_lo, -1.0);
  EXPECT_GT(g.x_hi, 1.0);
  EXPECT_LT(g.y_lo, -0.5);
  EXPECT_GT(g.y_hi, 0.0);
  // Real critical points leave a collinear set; the box still has height.
  const auto r = default_grid(reference::prop1_polynomial(), 0.0, 1.0);
  EXPECT_GT(r.y_hi - r.y_lo, 0.0);
  EXPECT_LE(r.x_lo, -1.0);
}

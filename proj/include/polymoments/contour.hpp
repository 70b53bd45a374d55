#pragma once

// Parametric contours in the complex plane, the square root with its cut on
// the non-negative real axis, adaptive Gauss-Legendre contour integration,
// deformation checks and ML-inequality bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <variant>
#include <vector>

#include <json.hpp>

#include "polymoments/poly.hpp"

namespace polymoments {

inline constexpr double kBranchSqrtCutTolerance = 1e-12;
inline constexpr double kIntegrandCutTolerance = 1e-9;

/// Distance from zeta to the ray [0, inf).
inline double distance_to_nonnegative_axis(ComplexFloat zeta) {
  return zeta.real() >= 0.0 ? std::abs(zeta.imag()) : std::abs(zeta);
}

/// r e^{i theta} -> sqrt(r) e^{i theta / 2} with theta in (0, 2 pi); the
/// result lies in the open upper half plane.
inline ComplexFloat branch_sqrt(ComplexFloat zeta) {
  if (distance_to_nonnegative_axis(zeta) <= kBranchSqrtCutTolerance)
    throw BranchCutError("branch_sqrt evaluated on its cut at (" + std::to_string(zeta.real()) + ", " +
                         std::to_string(zeta.imag()) + ")");
  double theta = std::atan2(zeta.imag(), zeta.real());
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  return std::polar(std::sqrt(std::abs(zeta)), theta / 2.0);
}

// ---------------------------------------------------------------------------
// Paths, each parameterized on t in [0, 1].

struct Polyline {
  std::vector<ComplexFloat> points;
};

struct CircleArc {
  ComplexFloat center;
  double radius = 1.0;
  double angle_start = 0.0;
  double angle_end = 0.0;
};

/// The arc of x = c - y^2 traced from y = y_start to y = y_end.
struct ParabolaArc {
  double c = 0.0;
  double y_start = 0.0;
  double y_end = 0.0;
};

using Path = std::variant<Polyline, CircleArc, ParabolaArc>;

namespace detail {

inline std::pair<std::size_t, double> polyline_segment(const Polyline& pl, double t) {
  const std::size_t nseg = pl.points.size() - 1;
  const double s = std::clamp(t, 0.0, 1.0) * nseg;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(s), nseg - 1);
  return {k, s - k};
}

inline void check_polyline(const Polyline& pl) {
  if (pl.points.size() < 2) throw DomainError("polyline needs at least two points");
}

}  // namespace detail

inline ComplexFloat point_at(const Path& path, double t) {
  return std::visit(
      [t](const auto& p) -> ComplexFloat {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polyline>) {
          detail::check_polyline(p);
          auto [k, u] = detail::polyline_segment(p, t);
          return p.points[k] + u * (p.points[k + 1] - p.points[k]);
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          return p.center + std::polar(p.radius, p.angle_start + t * (p.angle_end - p.angle_start));
        } else {
          const double y = p.y_start + t * (p.y_end - p.y_start);
          return {p.c - y * y, y};
        }
      },
      path);
}

inline ComplexFloat tangent_at(const Path& path, double t) {
  return std::visit(
      [t](const auto& p) -> ComplexFloat {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polyline>) {
          detail::check_polyline(p);
          auto [k, u] = detail::polyline_segment(p, t);
          return static_cast<double>(p.points.size() - 1) * (p.points[k + 1] - p.points[k]);
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          const double span = p.angle_end - p.angle_start;
          const double angle = p.angle_start + t * span;
          return ComplexFloat(0.0, span) * std::polar(p.radius, angle);
        } else {
          const double dy = p.y_end - p.y_start;
          const double y = p.y_start + t * dy;
          return {-2.0 * y * dy, dy};
        }
      },
      path);
}

inline ComplexFloat start_point(const Path& path) { return point_at(path, 0.0); }
inline ComplexFloat end_point(const Path& path) { return point_at(path, 1.0); }

/// Closed-form arc length.
inline double arc_length(const Path& path) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polyline>) {
          detail::check_polyline(p);
          double len = 0.0;
          for (std::size_t k = 0; k + 1 < p.points.size(); ++k) len += std::abs(p.points[k + 1] - p.points[k]);
          return len;
        } else if constexpr (std::is_same_v<T, CircleArc>) {
          return p.radius * std::abs(p.angle_end - p.angle_start);
        } else {
          // int sqrt(1 + 4 y^2) dy = y sqrt(1 + 4y^2) / 2 + asinh(2y) / 4
          auto F = [](double y) { return 0.5 * y * std::sqrt(1.0 + 4.0 * y * y) + 0.25 * std::asinh(2.0 * y); };
          return std::abs(F(p.y_end) - F(p.y_start));
        }
      },
      path);
}

/// Parameter breakpoints where the path may have a corner.
inline std::vector<double> path_breaks(const Path& path) {
  if (const auto* pl = std::get_if<Polyline>(&path)) {
    detail::check_polyline(*pl);
    std::vector<double> b;
    const std::size_t nseg = pl->points.size() - 1;
    for (std::size_t k = 0; k <= nseg; ++k) b.push_back(static_cast<double>(k) / nseg);
    return b;
  }
  return {0.0, 1.0};
}

/// (t, re, im) rows at `samples` evenly spaced parameters.
inline void write_path_csv(std::ostream& os, const Path& path, std::size_t samples) {
  if (samples < 2) throw DomainError("path CSV needs at least two samples");
  os << "t,re,im\n";
  char buf[96];
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const ComplexFloat z = point_at(path, t);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, z.real(), z.imag());
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Integrands

/// f(z)^p; entire.
struct ZPower {
  std::vector<ComplexFloat> coeffs;
  unsigned p = 1;

  ZPower(const Poly& f, unsigned power) : coeffs(to_float_coeffs(f)), p(power) {}
};

/// w^p / (-2 branch_sqrt(1 - w)); holomorphic off w in (-inf, 1].
struct WPower {
  unsigned p = 1;
};

using Integrand = std::variant<ZPower, WPower>;

inline ComplexFloat evaluate(const Integrand& g, ComplexFloat w) {
  return std::visit(
      [w](const auto& ig) -> ComplexFloat {
        using T = std::decay_t<decltype(ig)>;
        if constexpr (std::is_same_v<T, ZPower>) {
          return std::pow(eval_float(ig.coeffs, w), static_cast<int>(ig.p));
        } else {
          const ComplexFloat zeta = 1.0 - w;
          if (distance_to_nonnegative_axis(zeta) <= kIntegrandCutTolerance)
            throw BranchCutError("integrand evaluated within " + std::to_string(kIntegrandCutTolerance) +
                                 " of the cut (-inf, 1] at w = (" + std::to_string(w.real()) + ", " +
                                 std::to_string(w.imag()) + ")");
          return std::pow(w, static_cast<int>(ig.p)) / (-2.0 * branch_sqrt(zeta));
        }
      },
      g);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Legendre quadrature

namespace detail {

template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

inline const GaussLegendre<15>& gl15() {
  static const GaussLegendre<15> rule;
  return rule;
}

// Neumaier-compensated complex sum.
class CompensatedSum {
 public:
  void add(ComplexFloat x) {
    add_part(sum_re_, comp_re_, x.real());
    add_part(sum_im_, comp_im_, x.imag());
  }
  ComplexFloat value() const { return {sum_re_ + comp_re_, sum_im_ + comp_im_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double sum_re_ = 0.0, comp_re_ = 0.0, sum_im_ = 0.0, comp_im_ = 0.0;
};

struct PanelValue {
  ComplexFloat value;
  double magnitude = 0.0;  ///< same rule applied to |g gamma'|
};

inline PanelValue gl15_panel(const Path& path, const Integrand& g, double t0, double t1) {
  const auto& rule = gl15();
  const double half = 0.5 * (t1 - t0), mid = 0.5 * (t1 + t0);
  CompensatedSum acc;
  double mag = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double t = mid + half * rule.nodes[i];
    const ComplexFloat term = rule.weights[i] * evaluate(g, point_at(path, t)) * tangent_at(path, t);
    acc.add(term);
    mag += std::abs(term);
  }
  return {half * acc.value(), std::abs(half) * mag};
}

}  // namespace detail

struct QuadratureResult {
  ComplexFloat value;
  double error_estimate = 0.0;
  int panels = 0;
};

inline constexpr int kMaxQuadratureDepth = 40;
inline constexpr int kMaxQuadraturePanels = 1 << 20;

/// int_0^1 g(gamma(t)) gamma'(t) dt with estimated absolute error at most
/// tol * (1 + |result|). Panels split at polyline corners. A panel is also
/// accepted once its refinement difference is at the rounding floor of
/// int |g gamma'| over the panel, so cancellation cannot force endless
/// bisection.
inline QuadratureResult integrate_detailed(const Path& path, const Integrand& g, double tol) {
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  const auto breaks = path_breaks(path);
  constexpr double kNoise = 64.0 * std::numeric_limits<double>::epsilon();

  // Coarse whole-path estimate sets the absolute target.
  ComplexFloat coarse = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    coarse += detail::gl15_panel(path, g, breaks[k], breaks[k + 1]).value;
  const double target = tol * (1.0 + std::abs(coarse));

  detail::CompensatedSum total;
  double error = 0.0;
  int panels = 0;
  bool failed = false;

  struct Panel {
    double t0, t1;
    ComplexFloat whole;
    int depth;
  };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    std::vector<Panel> stack{{breaks[k], breaks[k + 1], detail::gl15_panel(path, g, breaks[k], breaks[k + 1]).value, 0}};
    while (!stack.empty()) {
      Panel pn = stack.back();
      stack.pop_back();
      const double mid = 0.5 * (pn.t0 + pn.t1);
      const auto left = detail::gl15_panel(path, g, pn.t0, mid);
      const auto right = detail::gl15_panel(path, g, mid, pn.t1);
      const double diff = std::abs(left.value + right.value - pn.whole);
      const double local_target = target * (pn.t1 - pn.t0);
      const double floor = kNoise * (left.magnitude + right.magnitude);
      const bool converged = diff <= local_target || diff <= floor;
      if (converged || pn.depth >= kMaxQuadratureDepth || panels >= kMaxQuadraturePanels) {
        if (!converged) failed = true;
        total.add(left.value);
        total.add(right.value);
        error += diff;
        panels += 2;
        continue;
      }
      stack.push_back({mid, pn.t1, right.value, pn.depth + 1});
      stack.push_back({pn.t0, mid, left.value, pn.depth + 1});
    }
  }
  if (failed)
    throw QuadratureError("adaptive quadrature hit its depth or panel limit before reaching tolerance", error);
  return {total.value(), error, panels};
}

inline ComplexFloat integrate(const Path& path, const Integrand& g, double tol) {
  return integrate_detailed(path, g, tol).value;
}

// ---------------------------------------------------------------------------
// Deformation and ML bounds

struct DeformationReport {
  ComplexFloat value1;
  ComplexFloat value2;
  double difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kEndpointMatchTolerance = 1e-12;

/// Integrates g over both paths; they must share endpoints. Passes when
/// |I1 - I2| <= tol * max(1, |I1|, |I2|).
inline DeformationReport deformation_check(const Integrand& g, const Path& path1, const Path& path2, double tol) {
  if (std::abs(start_point(path1) - start_point(path2)) > kEndpointMatchTolerance ||
      std::abs(end_point(path1) - end_point(path2)) > kEndpointMatchTolerance)
    throw DomainError("deformation check requires paths with shared endpoints");
  const double quad_tol = std::min(1e-12, tol * 1e-3);
  DeformationReport r;
  r.value1 = integrate(path1, g, quad_tol);
  r.value2 = integrate(path2, g, quad_tol);
  r.difference = std::abs(r.value1 - r.value2);
  r.tolerance = tol;
  r.pass = r.difference <= tol * std::max({1.0, std::abs(r.value1), std::abs(r.value2)});
  return r;
}

/// |int_path g| <= K r^p with K = length * sup_factor.
struct MLBound {
  double length = 0.0;
  double sup_factor = 0.0;  ///< sup of the p-independent factor on the path
  double r = 0.0;           ///< sup of the geometric base on the path
  double K = 0.0;

  double at(unsigned p) const { return K * std::pow(r, static_cast<double>(p)); }
};

namespace detail {

// Max of phi(gamma(t)) over t in [0,1]: dense samples, then golden-section
// search on the bracket around the best sample.
template <class Fn>
double maximize_on_path(const Path& path, Fn&& phi, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 3);
  double best = -INFINITY, best_t = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) / (samples - 1);
    const double v = phi(point_at(path, t));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  const double h = 1.0 / (samples - 1);
  double lo = std::max(0.0, best_t - h), hi = std::min(1.0, best_t + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = phi(point_at(path, x1)), f2 = phi(point_at(path, x2));
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = phi(point_at(path, x2));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = phi(point_at(path, x1));
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace detail

inline MLBound ml_bound(const Path& path, const Integrand& g, std::size_t samples = 20001) {
  MLBound b;
  b.length = arc_length(path);
  std::visit(
      [&](const auto& ig) {
        using T = std::decay_t<decltype(ig)>;
        if constexpr (std::is_same_v<T, ZPower>) {
          b.sup_factor = 1.0;
          b.r = detail::maximize_on_path(path, [&](ComplexFloat z) { return std::abs(eval_float(ig.coeffs, z)); },
                                         samples);
        } else {
          b.sup_factor = detail::maximize_on_path(
              path,
              [](ComplexFloat w) {
                const ComplexFloat zeta = 1.0 - w;
                if (distance_to_nonnegative_axis(zeta) <= kIntegrandCutTolerance)
                  throw BranchCutError("ML bound path touches the cut (-inf, 1]");
                return 0.5 / std::abs(branch_sqrt(zeta));
              },
              samples);
          b.r = detail::maximize_on_path(path, [](ComplexFloat w) { return std::abs(w); }, samples);
        }
      },
      g);
  b.K = b.length * b.sup_factor;
  return b;
}

inline nlohmann::json to_json(const MLBound& b) {
  return {{"length", b.length}, {"sup_factor", b.sup_factor}, {"r", b.r}, {"K", b.K}};
}

inline nlohmann::json to_json(const DeformationReport& r) {
  return {{"value1", {{"re", r.value1.real()}, {"im", r.value1.imag()}}},
          {"value2", {{"re", r.value2.real()}, {"im", r.value2.imag()}}},
          {"difference", r.difference},
          {"tolerance", r.tolerance},
          {"pass", r.pass}};
}

}  // namespace polymoments

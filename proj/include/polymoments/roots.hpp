#pragma once

// Complex roots (Aberth-Ehrlich + Newton polish), critical sets, exact
// real-root isolation by Sturm sequences, and certified sup-norms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymoments/poly.hpp"

namespace polymoments {

struct RootOptions {
  int max_iterations = 200;
  /// Relative step size at which Newton polishing stops.
  double polish_tolerance = 1e-13;
  /// Roots closer than this (relative to the root scale) count as one root
  /// of higher multiplicity.
  double cluster_tolerance = 1e-6;
};

struct ComplexRoot {
  ComplexFloat root;
  double residual = 0.0;  ///< |g(root)|
  int multiplicity = 1;
};

namespace detail {

inline double abs_eval_bound(const std::vector<ComplexFloat>& c, double r) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

// Value and derivative by Horner.
inline std::pair<ComplexFloat, ComplexFloat> eval_with_derivative(const std::vector<ComplexFloat>& c,
                                                                  ComplexFloat z) {
  ComplexFloat p = 0.0, dp = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

}  // namespace detail

/// All deg(g) roots with multiplicity. Throws ConvergenceError naming the
/// polynomial when Aberth iteration exceeds the cap.
inline std::vector<ComplexRoot> complex_roots(const Poly& g, const RootOptions& opts = {}) {
  const int n = g.degree();
  if (n < 1) throw DomainError("complex_roots needs degree >= 1");
  const auto c = to_float_coeffs(g);
  const double eps = std::numeric_limits<double>::epsilon();

  // Start on a circle whose radius is the geometric mean of the root moduli,
  // with an angular offset that breaks symmetry with real-axis structure.
  double radius = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / n);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    radius = 0.0;
    for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(c[k] / c[n]), 1.0 / (n - k)));
    if (!(radius > 0.0)) radius = 1.0;
  }
  std::vector<ComplexFloat> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = std::polar(radius, 2.0 * std::numbers::pi * k / n + 0.4) + ComplexFloat(0.0, 1e-3 * radius);

  std::vector<bool> done(n, false);
  int remaining = n;
  for (int iter = 0; iter < opts.max_iterations && remaining > 0; ++iter) {
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      auto [p, dp] = detail::eval_with_derivative(c, z[i]);
      // Backward-error stop: |p(z)| is at rounding level for this z.
      if (std::abs(p) <= 8.0 * n * eps * detail::abs_eval_bound(c, std::abs(z[i]))) {
        done[i] = true;
        --remaining;
        continue;
      }
      const ComplexFloat ratio = p / dp;
      ComplexFloat sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const ComplexFloat step = ratio / (1.0 - ratio * sum);
      z[i] -= step;
      if (std::abs(step) <= eps * std::abs(z[i])) {
        done[i] = true;
        --remaining;
      }
    }
  }
  if (remaining > 0)
    throw ConvergenceError("Aberth iteration did not converge in " + std::to_string(opts.max_iterations) +
                           " iterations for polynomial " + format_poly(g));

  // Multiplicity by clustering.
  const double scale = std::max(1.0, radius);
  std::vector<int> mult(n, 1);
  for (int i = 0; i < n; ++i) {
    mult[i] = 0;
    for (int j = 0; j < n; ++j)
      if (std::abs(z[i] - z[j]) <= opts.cluster_tolerance * scale) ++mult[i];
  }

  std::vector<ComplexRoot> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    ComplexFloat r = z[i];
    if (mult[i] == 1) {
      for (int k = 0; k < 8; ++k) {
        auto [p, dp] = detail::eval_with_derivative(c, r);
        if (dp == 0.0) break;
        const ComplexFloat step = p / dp;
        const ComplexFloat next = r - step;
        if (std::abs(eval_float(c, next)) > std::abs(p)) break;
        r = next;
        if (std::abs(step) <= opts.polish_tolerance * std::max(1.0, std::abs(r))) break;
      }
    }
    out.push_back({r, std::abs(eval_float(c, r)), mult[i]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Critical set S = { f(z) : f'(z) = 0 } and the endpoint values f(a), f(b).

struct CriticalSet {
  std::vector<ComplexRoot> critical_points;  ///< residual is |f'(root)|
  std::vector<ComplexFloat> values;          ///< f at each critical point
  ComplexRational endpoint_a;
  ComplexRational endpoint_b;
  double max_abs = 0.0;
};

inline CriticalSet critical_set(const Poly& f, const Interval& I, const RootOptions& opts = {}) {
  if (f.degree() < 1) throw DomainError("critical set of a constant polynomial");
  CriticalSet s;
  s.endpoint_a = eval(f, ComplexRational(I.a));
  s.endpoint_b = eval(f, ComplexRational(I.b));
  s.max_abs = std::max(std::abs(to_float(s.endpoint_a)), std::abs(to_float(s.endpoint_b)));
  if (f.degree() >= 2) {
    const auto fc = to_float_coeffs(f);
    s.critical_points = complex_roots(derivative(f), opts);
    for (const auto& cp : s.critical_points) {
      s.values.push_back(eval_float(fc, cp.root));
      s.max_abs = std::max(s.max_abs, std::abs(s.values.back()));
    }
  }
  return s;
}

inline nlohmann::json complex_float_json(ComplexFloat z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline nlohmann::json exact_value_json(const ComplexRational& z) {
  const ComplexFloat x = to_float(z);
  return {{"exact", format_complex(z)}, {"re", x.real()}, {"im", x.imag()}};
}

inline nlohmann::json to_json(const CriticalSet& s) {
  nlohmann::json pts = nlohmann::json::array(), vals = nlohmann::json::array();
  for (const auto& cp : s.critical_points)
    pts.push_back({{"re", cp.root.real()}, {"im", cp.root.imag()}, {"residual", cp.residual},
                   {"multiplicity", cp.multiplicity}});
  for (const auto& v : s.values) vals.push_back(complex_float_json(v));
  return {{"critical_points", pts},
          {"values", vals},
          {"endpoint_values", {exact_value_json(s.endpoint_a), exact_value_json(s.endpoint_b)}},
          {"max_abs", s.max_abs}};
}

// ---------------------------------------------------------------------------
// Exact real roots

namespace detail {

/// Remainder of a / b over Q.
inline RealPoly poly_rem(RealPoly a, const RealPoly& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  const int db = b.degree();
  while (!a.is_zero() && a.degree() >= db) {
    const BigRational factor = a.leading() / b.leading();
    a -= RealPoly::monomial(static_cast<std::size_t>(a.degree() - db), factor) * b;
  }
  return a;
}

inline RealPoly poly_quo(RealPoly a, const RealPoly& b) {
  const int db = b.degree();
  RealPoly q;
  while (!a.is_zero() && a.degree() >= db) {
    const auto mono = RealPoly::monomial(static_cast<std::size_t>(a.degree() - db), a.leading() / b.leading());
    q += mono;
    a -= mono * b;
  }
  return q;
}

inline RealPoly monic(const RealPoly& a) { return a * BigRational(1 / a.leading()); }

inline RealPoly poly_gcd(RealPoly a, RealPoly b) {
  while (!b.is_zero()) {
    RealPoly r = poly_rem(a, b);
    a = std::move(b);
    b = r.is_zero() ? r : monic(r);
  }
  return a.is_zero() ? a : monic(a);
}

// Positive rescaling keeps signs and bounds coefficient growth.
inline RealPoly normalized(const RealPoly& a) { return a * BigRational(1 / abs(a.leading())); }

inline int sign_of(const BigRational& q) { return sgn(q) > 0 ? 1 : (sgn(q) < 0 ? -1 : 0); }

}  // namespace detail

/// Square-free part g / gcd(g, g').
inline RealPoly square_free_part(const RealPoly& g) {
  const RealPoly d = derivative(g);
  if (d.is_zero()) return g;
  return detail::poly_quo(g, detail::poly_gcd(g, d));
}

/// Sturm sequence of the square-free part of g.
inline std::vector<RealPoly> sturm_sequence(const RealPoly& g) {
  if (g.is_zero()) throw DomainError("Sturm sequence of the zero polynomial");
  std::vector<RealPoly> seq{detail::normalized(square_free_part(g))};
  RealPoly d = derivative(seq[0]);
  if (d.is_zero()) return seq;
  seq.push_back(detail::normalized(d));
  while (true) {
    RealPoly r = -detail::poly_rem(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    seq.push_back(detail::normalized(r));
  }
  return seq;
}

/// Sign variations of the sequence at x, zeros skipped.
inline int sign_variations(const std::vector<RealPoly>& seq, const BigRational& x) {
  int count = 0, last = 0;
  for (const auto& s : seq) {
    const int sg = detail::sign_of(eval(s, x));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++count;
    last = sg;
  }
  return count;
}

/// Distinct real roots in (lo, hi].
inline int sturm_count(const std::vector<RealPoly>& seq, const BigRational& lo, const BigRational& hi) {
  return sign_variations(seq, lo) - sign_variations(seq, hi);
}

struct IsolatingInterval {
  BigRational lo;
  BigRational hi;
  bool exact = false;  ///< lo == hi is the root itself

  double midpoint() const { return to_double((lo + hi) / 2); }
};

/// Width 2^-60.
inline BigRational default_isolation_width() {
  BigRational w(1);
  mpz_mul_2exp(w.get_den_mpz_t(), w.get_den_mpz_t(), 60);
  return w;
}

/// Disjoint rational intervals, each holding exactly one distinct real root
/// of g in [I.a, I.b], sorted ascending and bisected to width <= eps.
inline std::vector<IsolatingInterval> real_roots_in_interval(const RealPoly& g, const Interval& I,
                                                             const BigRational& eps = default_isolation_width()) {
  if (g.is_zero()) throw DomainError("real roots of the zero polynomial");
  const auto seq = sturm_sequence(g);
  const RealPoly& s = seq[0];
  std::vector<IsolatingInterval> out;
  if (sgn(eval(s, I.a)) == 0) out.push_back({I.a, I.a, true});

  // Work stack of (lo, hi] with known root counts.
  struct Piece {
    BigRational lo, hi;
    int count;
  };
  std::vector<Piece> stack{{I.a, I.b, sturm_count(seq, I.a, I.b)}};
  std::vector<IsolatingInterval> found;
  while (!stack.empty()) {
    Piece piece = std::move(stack.back());
    stack.pop_back();
    if (piece.count == 0) continue;
    if (piece.count == 1) {
      if (sgn(eval(s, piece.hi)) == 0) {
        found.push_back({piece.hi, piece.hi, true});
        continue;
      }
      bool exact = false;
      while (piece.hi - piece.lo > eps) {
        BigRational mid = (piece.lo + piece.hi) / 2;
        if (sgn(eval(s, mid)) == 0) {
          found.push_back({mid, mid, true});
          exact = true;
          break;
        }
        if (sturm_count(seq, piece.lo, mid) == 1)
          piece.hi = std::move(mid);
        else
          piece.lo = std::move(mid);
      }
      if (!exact) found.push_back({piece.lo, piece.hi, false});
      continue;
    }
    BigRational mid = (piece.lo + piece.hi) / 2;
    const int left = sturm_count(seq, piece.lo, mid);
    stack.push_back({mid, piece.hi, piece.count - left});
    stack.push_back({piece.lo, std::move(mid), left});
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
  out.insert(out.end(), found.begin(), found.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sup-norm on a real interval.

struct SupNorm {
  /// Enclosure of max |f|^2; value_sq_lo == value_sq_hi when exact.
  BigRational value_sq_lo;
  BigRational value_sq_hi;
  bool exact = false;
  double value = 0.0;
  double argmax = 0.0;
  double lo = 0.0;  ///< certified lower bound of the sup-norm
  double hi = 0.0;  ///< certified upper bound of the sup-norm

  const BigRational& value_sq() const { return value_sq_lo; }
};

namespace detail {

// Upper bound of |h'| on [-R, R] from the coefficients.
inline BigRational derivative_bound(const RealPoly& h, const BigRational& R) {
  BigRational acc, rpow(1);
  for (std::size_t k = 1; k < h.size(); ++k) {
    acc += abs(h.coeffs()[k]) * BigRational(static_cast<unsigned long>(k)) * rpow;
    rpow *= R;
  }
  return acc;
}

inline double sqrt_down(const BigRational& q) {
  const double d = std::sqrt(std::max(0.0, to_double(q)));
  return std::nextafter(std::nextafter(d, 0.0), 0.0);
}

inline double sqrt_up(const BigRational& q) {
  const double d = std::sqrt(std::max(0.0, to_double(q)));
  return std::nextafter(std::nextafter(d, INFINITY), INFINITY);
}

}  // namespace detail

/// Max of |f| on I from the endpoints and the real critical points of |f|^2.
inline SupNorm sup_norm(const Poly& f, const Interval& I) {
  if (f.is_zero()) throw DomainError("sup-norm of the zero polynomial");
  const RealPoly h = abs_sq_real(f);
  const RealPoly dh = derivative(h);

  struct Candidate {
    BigRational lo_sq, hi_sq, at;
    bool exact;
  };
  std::vector<Candidate> cands;
  auto add_exact = [&](const BigRational& x) {
    const BigRational v = eval(h, x);
    cands.push_back({v, v, x, true});
  };
  add_exact(I.a);
  add_exact(I.b);
  if (!dh.is_zero()) {
    for (const auto& r : real_roots_in_interval(dh, I)) {
      if (r.exact) {
        add_exact(r.lo);
        continue;
      }
      // |h(x) - h(mid)| <= (width / 2) * max |h'| on the piece.
      const BigRational mid = (r.lo + r.hi) / 2;
      const BigRational R = std::max(BigRational(abs(r.lo)), BigRational(abs(r.hi)));
      const BigRational slack = (r.hi - r.lo) / 2 * detail::derivative_bound(h, R);
      const BigRational v = eval(h, mid);
      cands.push_back({v - slack, v + slack, mid, false});
    }
  }
  const auto best = std::max_element(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
    return x.hi_sq < y.hi_sq || (x.hi_sq == y.hi_sq && !x.exact && y.exact);
  });
  BigRational lo_sq = best->lo_sq;
  for (const auto& c : cands) lo_sq = std::max(lo_sq, c.lo_sq);

  SupNorm out;
  out.value_sq_lo = lo_sq;
  out.value_sq_hi = best->hi_sq;
  out.exact = best->exact && lo_sq == best->hi_sq;
  out.value = std::sqrt(to_double((lo_sq + best->hi_sq) / 2));
  out.argmax = to_double(best->at);
  out.lo = detail::sqrt_down(std::max(BigRational(0), lo_sq));
  out.hi = detail::sqrt_up(best->hi_sq);
  return out;
}

inline nlohmann::json to_json(const SupNorm& s) {
  nlohmann::json j{{"value", s.value},
                   {"argmax", s.argmax},
                   {"certified_interval", {s.lo, s.hi}},
                   {"exact", s.exact}};
  if (s.exact)
    j["value_sq"] = format_rational(s.value_sq_lo);
  else
    j["value_sq_enclosure"] = {format_rational(s.value_sq_lo), format_rational(s.value_sq_hi)};
  return j;
}

}  // namespace polymoments

#pragma once

// Exact moments M_p = int_a^b f(x)^p dx and the finite-tail estimate of
// limsup |M_p|^{1/p}.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "polymoments/poly.hpp"

namespace polymoments {

struct MomentOptions {
  /// Largest allowed bit length of any numerator or denominator in f^p.
  std::size_t bit_budget = 1'000'000;
};

/// Exact M_p through the antiderivative of f^p.
inline ComplexRational moment_exact(const Poly& f, const Interval& I, unsigned p) {
  if (f.is_zero()) throw DomainError("moment of the zero polynomial");
  if (p == 0) throw DomainError("moment order must be >= 1");
  const Poly F = antiderivative(pow(f, p));
  return eval(F, ComplexRational(I.b)) - eval(F, ComplexRational(I.a));
}

struct MomentSeries {
  Poly f;
  Interval interval;
  /// values[p - 1] = M_p.
  std::vector<ComplexRational> values;

  unsigned max_order() const { return static_cast<unsigned>(values.size()); }
  const ComplexRational& at(unsigned p) const { return values.at(p - 1); }
};

namespace detail {

struct GaussInt {
  BigInt re;
  BigInt im;
};

// f = g / den with g over the Gaussian integers.
struct ScaledPoly {
  std::vector<GaussInt> g;
  BigInt den{1};
  bool real = true;
};

inline ScaledPoly scale_to_integers(const Poly& f) {
  ScaledPoly out;
  for (const auto& c : f.coeffs()) {
    mpz_lcm(out.den.get_mpz_t(), out.den.get_mpz_t(), c.re.get_den_mpz_t());
    mpz_lcm(out.den.get_mpz_t(), out.den.get_mpz_t(), c.im.get_den_mpz_t());
  }
  for (const auto& c : f.coeffs()) {
    BigRational r = c.re * out.den, i = c.im * out.den;
    out.g.push_back({r.get_num(), i.get_num()});
    if (sgn(i) != 0) out.real = false;
  }
  return out;
}

// w_k = (b^{k+1} - a^{k+1}) / (k+1) = num[k] / den for k = 0..n.
struct MomentWeights {
  std::vector<BigInt> num;
  BigInt den{1};
};

inline MomentWeights moment_weights(const Interval& I, std::size_t n) {
  std::vector<BigRational> w;
  w.reserve(n + 1);
  BigRational apow = I.a, bpow = I.b;
  for (std::size_t k = 0; k <= n; ++k) {
    w.push_back((bpow - apow) / BigRational(static_cast<unsigned long>(k + 1)));
    apow *= I.a;
    bpow *= I.b;
  }
  MomentWeights out;
  for (const auto& q : w) mpz_lcm(out.den.get_mpz_t(), out.den.get_mpz_t(), q.get_den_mpz_t());
  out.num.reserve(w.size());
  for (const auto& q : w) out.num.push_back(BigRational(q * out.den).get_num());
  return out;
}

inline std::vector<GaussInt> multiply(const std::vector<GaussInt>& a, const std::vector<GaussInt>& b, bool real) {
  std::vector<GaussInt> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      GaussInt& o = out[i + j];
      mpz_addmul(o.re.get_mpz_t(), a[i].re.get_mpz_t(), b[j].re.get_mpz_t());
      if (real) continue;
      mpz_submul(o.re.get_mpz_t(), a[i].im.get_mpz_t(), b[j].im.get_mpz_t());
      mpz_addmul(o.im.get_mpz_t(), a[i].re.get_mpz_t(), b[j].im.get_mpz_t());
      mpz_addmul(o.im.get_mpz_t(), a[i].im.get_mpz_t(), b[j].re.get_mpz_t());
    }
  }
  return out;
}

inline std::size_t bit_length(const BigInt& z) { return sgn(z) == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2); }

}  // namespace detail

/// M_1..M_P from incremental powers. Internally works on the integer
/// polynomial g = D f so the convolution never touches a gcd; each M_p is
/// canonicalized once.
inline MomentSeries moment_series(const Poly& f, const Interval& I, unsigned P, const MomentOptions& opts = {}) {
  if (f.is_zero()) throw DomainError("moment series of the zero polynomial");
  if (P == 0) throw DomainError("moment series requires P >= 1");
  const detail::ScaledPoly scaled = detail::scale_to_integers(f);
  const std::size_t n = static_cast<std::size_t>(f.degree());
  const detail::MomentWeights w = detail::moment_weights(I, n * P);

  MomentSeries out{f, I, {}};
  out.values.reserve(P);
  std::vector<detail::GaussInt> power = scaled.g;
  BigInt den_pow = scaled.den;
  for (unsigned p = 1; p <= P; ++p) {
    if (p > 1) {
      power = detail::multiply(power, scaled.g, scaled.real);
      den_pow *= scaled.den;
    }
    std::size_t bits = detail::bit_length(den_pow);
    for (const auto& c : power) bits = std::max({bits, detail::bit_length(c.re), detail::bit_length(c.im)});
    if (bits > opts.bit_budget)
      throw SizeError("coefficient of f^" + std::to_string(p) + " needs " + std::to_string(bits) +
                      " bits, budget is " + std::to_string(opts.bit_budget));

    BigInt sum_re, sum_im;
    for (std::size_t k = 0; k < power.size(); ++k) {
      if (sgn(w.num[k]) == 0) continue;
      mpz_addmul(sum_re.get_mpz_t(), power[k].re.get_mpz_t(), w.num[k].get_mpz_t());
      if (!scaled.real) mpz_addmul(sum_im.get_mpz_t(), power[k].im.get_mpz_t(), w.num[k].get_mpz_t());
    }
    const BigInt den = w.den * den_pow;
    out.values.emplace_back(make_rational(sum_re, den), make_rational(sum_im, den));
  }
  return out;
}

struct AbsRoot {
  double value = 0.0;  ///< |M_p|^{1/p}
  bool zero = false;   ///< M_p == 0 exactly
  double log_abs = -std::numeric_limits<double>::infinity();  ///< log |M_p|
};

/// |M_p|^{1/p} = exp(log(norm_sq(M_p)) / 2p), with the log taken at 128 bits
/// so moments far outside binary64 range stay usable.
inline AbsRoot abs_root(const ComplexRational& m, unsigned p) {
  if (m.is_zero()) return {0.0, true, -std::numeric_limits<double>::infinity()};
  const double log_abs = 0.5 * log_rational(norm_sq(m));
  return {std::exp(log_abs / p), false, log_abs};
}

inline std::vector<AbsRoot> abs_roots(const MomentSeries& s) {
  std::vector<AbsRoot> out;
  out.reserve(s.values.size());
  for (unsigned p = 1; p <= s.max_order(); ++p) out.push_back(abs_root(s.at(p), p));
  return out;
}

/// Finite-tail surrogate for limsup |M_p|^{1/p}. This is an estimate, not
/// a bound.
struct LimitEstimate {
  double tail_max = 0.0;
  unsigned p_lo = 0;
  unsigned p_hi = 0;
  unsigned argmax_p = 0;
  double trend_slope = 0.0;  ///< least-squares slope of log|M_p| against p
  unsigned zeros_skipped = 0;
};

inline LimitEstimate limsup_estimate(const std::vector<AbsRoot>& roots) {
  const auto P = static_cast<unsigned>(roots.size());
  if (P < 8) throw DomainError("limsup estimate needs at least 8 moments, got " + std::to_string(P));
  auto scan = [&](unsigned lo, unsigned hi) {
    LimitEstimate e;
    e.p_lo = lo;
    e.p_hi = hi;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    unsigned count = 0;
    for (unsigned p = lo; p <= hi; ++p) {
      const AbsRoot& r = roots[p - 1];
      if (r.zero) {
        ++e.zeros_skipped;
        continue;
      }
      if (count == 0 || r.value > e.tail_max) {
        e.tail_max = r.value;
        e.argmax_p = p;
      }
      ++count;
      sx += p;
      sy += r.log_abs;
      sxx += double(p) * p;
      sxy += p * r.log_abs;
    }
    if (count >= 2) e.trend_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return std::pair{e, count};
  };
  auto [est, count] = scan((P + 1) / 2, P);
  if (count == 0) {
    std::tie(est, count) = scan(1, P);
    if (count == 0) throw DomainError("every moment in the series is zero");
  }
  return est;
}

inline LimitEstimate limsup_estimate(const MomentSeries& s) { return limsup_estimate(abs_roots(s)); }

/// Exact check of M_p over `from` = (|from|/|to|) * M_p(pullback) over `to`
/// for every p <= P.
inline bool affine_scaling_check(const Poly& f, const Interval& from, const Interval& to, unsigned P) {
  const Poly g = affine_pullback(f, from, to);
  const MomentSeries direct = moment_series(f, from, P);
  const MomentSeries pulled = moment_series(g, to, P);
  const ComplexRational ratio(from.length() / to.length());
  for (unsigned p = 1; p <= P; ++p)
    if (direct.at(p) != ratio * pulled.at(p)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Columns: p, re(M_p), im(M_p), abs_root, flagged_zero.
inline void write_moments_csv(std::ostream& os, const MomentSeries& s) {
  os << "p,re,im,abs_root,flagged_zero\n";
  const auto roots = abs_roots(s);
  for (unsigned p = 1; p <= s.max_order(); ++p) {
    const auto& m = s.at(p);
    os << p << ',' << format_rational(m.re) << ',' << format_rational(m.im) << ','
       << format_double(roots[p - 1].value) << ',' << (roots[p - 1].zero ? 1 : 0) << '\n';
  }
}

inline nlohmann::json to_json(const LimitEstimate& e) {
  return {{"tail_max", e.tail_max},
          {"window", {e.p_lo, e.p_hi}},
          {"argmax_p", e.argmax_p},
          {"trend_slope", e.trend_slope},
          {"zeros_skipped", e.zeros_skipped},
          {"kind", "finite-tail estimate"}};
}

inline nlohmann::json to_json(const MomentSeries& s) {
  nlohmann::json moments = nlohmann::json::array(), roots = nlohmann::json::array(), flags = nlohmann::json::array();
  for (const auto& r : abs_roots(s)) {
    roots.push_back(r.value);
    flags.push_back(r.zero);
  }
  for (const auto& m : s.values) moments.push_back(format_complex(m));
  return {{"poly", format_poly(s.f)},
          {"interval", {format_rational(s.interval.a), format_rational(s.interval.b)}},
          {"moments", moments},
          {"abs_roots", roots},
          {"flagged_zero", flags}};
}

}  // namespace polymoments

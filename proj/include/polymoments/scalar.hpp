#pragma once

// Exact rational and Gaussian-rational scalars.
//
// BigRational is GMP's mpq_class. Every arithmetic operator of mpq_class
// returns a canonical value (reduced, positive denominator); values built
// from raw parts go through make_rational(), which canonicalizes.

#include <gmpxx.h>
#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "polymoments/errors.hpp"

namespace polymoments {

using BigInt = mpz_class;
using BigRational = mpq_class;
using ComplexFloat = std::complex<double>;

inline BigRational make_rational(const BigInt& num, const BigInt& den) {
  if (sgn(den) == 0) throw DomainError("rational with zero denominator");
  BigRational q;
  mpz_set(q.get_num_mpz_t(), num.get_mpz_t());
  mpz_set(q.get_den_mpz_t(), den.get_mpz_t());
  q.canonicalize();
  return q;
}

struct ComplexRational {
  BigRational re;
  BigRational im;

  ComplexRational() = default;
  ComplexRational(BigRational r) : re(std::move(r)) {}
  ComplexRational(BigRational r, BigRational i) : re(std::move(r)), im(std::move(i)) {}
  ComplexRational(long r) : re(r) {}
  ComplexRational(int r) : re(r) {}

  static ComplexRational i() { return {BigRational(0), BigRational(1)}; }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  ComplexRational conj() const { return {re, -im}; }

  ComplexRational& operator+=(const ComplexRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  ComplexRational& operator*=(const ComplexRational& o) {
    BigRational r = re * o.re - im * o.im;
    BigRational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const ComplexRational& a, const ComplexRational& b) { return !(a == b); }
};

/// Exact |z|^2.
inline BigRational norm_sq(const ComplexRational& z) { return z.re * z.re + z.im * z.im; }

namespace detail {

// Scoped MPFR variable.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace detail

/// Nearest binary64, ties to even, including the subnormal range.
/// Throws OverflowError when |q| rounds past DBL_MAX.
inline double to_double(const BigRational& q) {
  const mpfr_exp_t old_emin = mpfr_get_emin();
  const mpfr_exp_t old_emax = mpfr_get_emax();
  mpfr_set_emin(-1073);
  mpfr_set_emax(1024);
  detail::Mpfr x(53);
  int ternary = mpfr_set_q(x.get(), q.get_mpq_t(), MPFR_RNDN);
  mpfr_subnormalize(x.get(), ternary, MPFR_RNDN);
  const bool overflow = mpfr_inf_p(x.get()) != 0;
  const double d = mpfr_get_d(x.get(), MPFR_RNDN);
  mpfr_set_emin(old_emin);
  mpfr_set_emax(old_emax);
  if (overflow) throw OverflowError("rational magnitude exceeds binary64 range");
  return d;
}

inline ComplexFloat to_float(const ComplexRational& z) { return {to_double(z.re), to_double(z.im)}; }

/// Exact conversion; every finite double is a dyadic rational.
inline BigRational from_double(double d) {
  if (!std::isfinite(d)) throw DomainError("non-finite value has no rational form");
  return BigRational(d);
}

inline ComplexRational from_float(ComplexFloat z) {
  return {from_double(z.real()), from_double(z.imag())};
}

/// Natural log of a positive rational, evaluated at `prec` bits.
inline double log_rational(const BigRational& q, mpfr_prec_t prec = 128) {
  if (sgn(q) <= 0) throw DomainError("log of a non-positive rational");
  detail::Mpfr num(prec), den(prec);
  mpfr_set_z(num.get(), q.get_num_mpz_t(), MPFR_RNDN);
  mpfr_set_z(den.get(), q.get_den_mpz_t(), MPFR_RNDN);
  mpfr_log(num.get(), num.get(), MPFR_RNDN);
  mpfr_log(den.get(), den.get(), MPFR_RNDN);
  mpfr_sub(num.get(), num.get(), den.get(), MPFR_RNDN);
  return mpfr_get_d(num.get(), MPFR_RNDN);
}

// ---------------------------------------------------------------------------
// Text forms

namespace detail {

inline std::string trim(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

/// Parses "n", "n/d" or a plain decimal "d.ddd" (optional sign).
inline BigRational parse_rational(std::string_view text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ParseError("empty rational", std::string(text));
  std::size_t pos = 0;
  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  const std::string body = s.substr(pos);
  BigRational q;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    const std::string n = body.substr(0, slash), d = body.substr(slash + 1);
    if (!detail::all_digits(n) || !detail::all_digits(d)) throw ParseError("malformed rational", s);
    BigInt den(d);
    if (sgn(den) == 0) throw ParseError("zero denominator", s);
    q = make_rational(BigInt(n), den);
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    const std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !detail::all_digits(ip)) ||
        (!fp.empty() && !detail::all_digits(fp)))
      throw ParseError("malformed decimal", s);
    BigInt den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    q = make_rational(BigInt(ip.empty() ? "0" : ip) * den + BigInt(fp.empty() ? "0" : fp), den);
  } else {
    if (!detail::all_digits(body)) throw ParseError("malformed rational", s);
    q = BigRational(BigInt(body));
  }
  return negative ? BigRational(-q) : q;
}

inline std::string format_rational(const BigRational& q) { return q.get_str(); }

/// Parses "a", "bi", "a+bi", "a-bi" where a and b are rationals in any
/// parse_rational form; "i" and "-i" denote +-1i.
inline ComplexRational parse_complex(std::string_view text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ParseError("empty complex value", std::string(text));
  if (s.back() != 'i') return {parse_rational(s), BigRational(0)};

  const std::string body = s.substr(0, s.size() - 1);
  // The real/imaginary split is the last sign that is not in leading position.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if (body[k] == '+' || body[k] == '-') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& t) -> BigRational {
    if (t.empty() || t == "+") return 1;
    if (t == "-") return -1;
    return parse_rational(t);
  };
  if (split == std::string::npos) return {BigRational(0), imag_part(body)};
  return {parse_rational(body.substr(0, split)), imag_part(body.substr(split))};
}

inline std::string format_complex(const ComplexRational& z) {
  if (z.is_real()) return format_rational(z.re);
  if (sgn(z.re) == 0) return format_rational(z.im) + "i";
  std::string out = format_rational(z.re);
  if (sgn(z.im) > 0) out += '+';
  return out + format_rational(z.im) + "i";
}

// ---------------------------------------------------------------------------
// JSON: {re: {num, den}, im: {num, den}} with integers as decimal strings.

inline nlohmann::json rational_to_json(const BigRational& q) {
  return {{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

inline BigRational rational_from_json(const nlohmann::json& j) {
  const auto num = j.at("num").get<std::string>();
  const auto den = j.at("den").get<std::string>();
  const std::string_view digits = (!num.empty() && num[0] == '-') ? std::string_view(num).substr(1) : num;
  if (!detail::all_digits(digits) || !detail::all_digits(den)) throw ParseError("malformed rational JSON", num + "/" + den);
  return make_rational(BigInt(num), BigInt(den));
}

inline nlohmann::json to_json(const ComplexRational& z) {
  return {{"re", rational_to_json(z.re)}, {"im", rational_to_json(z.im)}};
}

inline ComplexRational complex_from_json(const nlohmann::json& j) {
  return {rational_from_json(j.at("re")), rational_from_json(j.at("im"))};
}

}  // namespace polymoments

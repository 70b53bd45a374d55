#pragma once

// Dense polynomials over exact scalars. Coefficient k multiplies x^k; the
// trailing coefficient is nonzero, the zero polynomial is the empty vector.

#include <algorithm>
#include <complex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polymoments/scalar.hpp"

namespace polymoments {

namespace detail {
inline bool is_zero_value(const BigRational& q) { return sgn(q) == 0; }
inline bool is_zero_value(const ComplexRational& z) { return z.is_zero(); }
}  // namespace detail

template <class T>
class DensePoly {
 public:
  using value_type = T;

  DensePoly() = default;
  explicit DensePoly(std::vector<T> coeffs) : c_(std::move(coeffs)) { normalize(); }
  DensePoly(std::initializer_list<T> coeffs) : c_(coeffs) { normalize(); }

  static DensePoly constant(T value) { return DensePoly(std::vector<T>{std::move(value)}); }
  static DensePoly monomial(std::size_t k, T value = T(1)) {
    std::vector<T> c(k + 1);
    c[k] = std::move(value);
    return DensePoly(std::move(c));
  }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  std::size_t size() const { return c_.size(); }

  const std::vector<T>& coeffs() const { return c_; }
  /// Coefficient of x^k, zero past the degree.
  T operator[](std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
  const T& leading() const { return c_.back(); }

  DensePoly& operator+=(const DensePoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    normalize();
    return *this;
  }
  DensePoly& operator-=(const DensePoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    normalize();
    return *this;
  }
  DensePoly& operator*=(const T& s) {
    for (auto& x : c_) x *= s;
    normalize();
    return *this;
  }

  friend DensePoly operator+(DensePoly a, const DensePoly& b) { return a += b; }
  friend DensePoly operator-(DensePoly a, const DensePoly& b) { return a -= b; }
  friend DensePoly operator-(DensePoly a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend DensePoly operator*(DensePoly a, const T& s) { return a *= s; }
  friend DensePoly operator*(const T& s, DensePoly a) { return a *= s; }

  // Schoolbook convolution; this is the hot spot of moment computation.
  friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (detail::is_zero_value(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return DensePoly(std::move(out));
  }

  friend bool operator==(const DensePoly& a, const DensePoly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const DensePoly& a, const DensePoly& b) { return !(a == b); }

 private:
  void normalize() {
    while (!c_.empty() && detail::is_zero_value(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
};

using Poly = DensePoly<ComplexRational>;
using RealPoly = DensePoly<BigRational>;

/// Closed real interval [a, b] with a < b.
struct Interval {
  BigRational a;
  BigRational b;

  Interval(BigRational lo, BigRational hi) : a(std::move(lo)), b(std::move(hi)) {
    if (!(a < b)) throw DomainError("interval requires a < b, got [" + a.get_str() + ", " + b.get_str() + "]");
  }

  BigRational length() const { return b - a; }

  friend bool operator==(const Interval& x, const Interval& y) { return x.a == y.a && x.b == y.b; }
};

/// Parses "a,b" with each endpoint in any rational form.
inline Interval parse_interval(std::string_view text) {
  const std::string s = detail::trim(text);
  const auto comma = s.find(',');
  if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
    throw ParseError("interval must be 'a,b'", s);
  return Interval(parse_rational(s.substr(0, comma)), parse_rational(s.substr(comma + 1)));
}

inline std::string format_interval(const Interval& I) {
  return format_rational(I.a) + "," + format_rational(I.b);
}

// ---------------------------------------------------------------------------
// Algebra

/// Horner evaluation, exact.
template <class T, class U>
U eval(const DensePoly<T>& f, const U& z) {
  U acc(0);
  for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) {
    acc *= z;
    acc += *it;
  }
  return acc;
}

template <class T>
DensePoly<T> derivative(const DensePoly<T>& f) {
  if (f.degree() < 1) return {};
  std::vector<T> d(f.size() - 1);
  for (std::size_t k = 1; k < f.size(); ++k) d[k - 1] = f.coeffs()[k] * T(static_cast<long>(k));
  return DensePoly<T>(std::move(d));
}

/// Antiderivative with zero constant term.
template <class T>
DensePoly<T> antiderivative(const DensePoly<T>& f) {
  if (f.is_zero()) return {};
  std::vector<T> d(f.size() + 1);
  for (std::size_t k = 0; k < f.size(); ++k)
    d[k + 1] = f.coeffs()[k] * T(BigRational(1, static_cast<unsigned long>(k + 1)));
  return DensePoly<T>(std::move(d));
}

template <class T>
DensePoly<T> mul(const DensePoly<T>& f, const DensePoly<T>& g) {
  return f * g;
}

/// f^p by repeated multiplication, p >= 1.
template <class T>
DensePoly<T> pow(const DensePoly<T>& f, unsigned p) {
  if (p == 0) throw DomainError("pow requires p >= 1");
  DensePoly<T> out = f;
  for (unsigned k = 1; k < p; ++k) out = out * f;
  return out;
}

/// f(alpha*t + beta) by Horner in the polynomial ring.
template <class T>
DensePoly<T> compose_affine(const DensePoly<T>& f, const T& alpha, const T& beta) {
  const DensePoly<T> lin{beta, alpha};
  DensePoly<T> acc;
  for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) {
    acc = acc * lin;
    acc += DensePoly<T>::constant(*it);
  }
  return acc;
}

/// g(t) = f(l(t)) where l is the increasing affine bijection `to` -> `from`.
template <class T>
DensePoly<T> affine_pullback(const DensePoly<T>& f, const Interval& from, const Interval& to) {
  const BigRational alpha = from.length() / to.length();
  const BigRational beta = from.a - alpha * to.a;
  return compose_affine(f, T(alpha), T(beta));
}

/// u^2 + v^2 where f = u + i v splits the coefficients; equals |f(x)|^2 for real x.
inline RealPoly abs_sq_real(const Poly& f) {
  std::vector<BigRational> u, v;
  for (const auto& c : f.coeffs()) {
    u.push_back(c.re);
    v.push_back(c.im);
  }
  const RealPoly pu(std::move(u)), pv(std::move(v));
  return pu * pu + pv * pv;
}

inline bool is_real(const Poly& f) {
  return std::all_of(f.coeffs().begin(), f.coeffs().end(), [](const auto& c) { return c.is_real(); });
}

inline Poly to_complex(const RealPoly& f) {
  std::vector<ComplexRational> c;
  for (const auto& q : f.coeffs()) c.emplace_back(q);
  return Poly(std::move(c));
}

// ---------------------------------------------------------------------------
// Float views

inline std::vector<ComplexFloat> to_float_coeffs(const Poly& f) {
  std::vector<ComplexFloat> out;
  out.reserve(f.size());
  for (const auto& c : f.coeffs()) out.push_back(to_float(c));
  return out;
}

inline ComplexFloat eval_float(const std::vector<ComplexFloat>& coeffs, ComplexFloat z) {
  ComplexFloat acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

// ---------------------------------------------------------------------------
// Text form: comma-separated coefficients, lowest degree first.

inline Poly parse_poly(std::string_view text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ParseError("empty polynomial", std::string(text));
  std::vector<ComplexRational> coeffs;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const std::string token = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      coeffs.push_back(parse_complex(token));
    } catch (const ParseError&) {
      throw ParseError("malformed polynomial coefficient", token);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Poly(std::move(coeffs));
}

inline std::string format_poly(const Poly& f) {
  if (f.is_zero()) return "0";
  std::string out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (k) out += ',';
    out += format_complex(f.coeffs()[k]);
  }
  return out;
}

}  // namespace polymoments

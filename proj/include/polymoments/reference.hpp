#pragma once

// The two reference polynomials and the contours used to analyse the
// complex one.

#include <cmath>

#include "polymoments/contour.hpp"
#include "polymoments/poly.hpp"

namespace polymoments::reference {

/// 4 - (x+1)^2 = 3 - 2x - x^2, studied on [0, 1].
inline Poly prop1_polynomial() { return parse_poly("3,-2,-1"); }
inline Interval prop1_interval() { return {0, 1}; }

/// 1 - (x + i/2)^2 = 5/4 - i x - x^2, studied on [-1, 1].
inline Poly prop2_polynomial() { return parse_poly("5/4,-1i,-1"); }
inline Interval prop2_interval() { return {-1, 1}; }

/// f_t(x) = 1 - (x + i t)^2 = (1 + t^2) - 2 i t x - x^2.
inline Poly tilted_quadratic(const BigRational& t) {
  return Poly({ComplexRational(1 + t * t), ComplexRational(BigRational(0), BigRational(-2 * t)), ComplexRational(-1)});
}

/// Image of [-1, 1] under the complex reference polynomial: the arc of
/// x = 5/4 - y^2 from 1/4 + i (image of -1) to 1/4 - i (image of +1).
inline ParabolaArc image_parabola() { return {1.25, 1.0, -1.0}; }

/// Arc of |w| = sqrt(17)/4 between the same endpoints, passing through
/// +sqrt(17)/4. The left-hand arc would cross the cut (-inf, 1].
inline CircleArc deformed_circle() {
  const double angle = std::atan2(1.0, 0.25);
  return {ComplexFloat(0.0, 0.0), std::sqrt(17.0) / 4.0, angle, -angle};
}

/// -1 -> -1 - i/2 -> 1 - i/2 -> 1, along which |f| <= sqrt(17)/4 for the
/// complex reference polynomial.
inline Polyline l_shaped_path() {
  return {{ComplexFloat(-1.0, 0.0), ComplexFloat(-1.0, -0.5), ComplexFloat(1.0, -0.5), ComplexFloat(1.0, 0.0)}};
}

inline Polyline segment(ComplexFloat a, ComplexFloat b) { return {{a, b}}; }

}  // namespace polymoments::reference

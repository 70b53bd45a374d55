#pragma once

#include "polymoments/errors.hpp"
#include "polymoments/scalar.hpp"
#include "polymoments/poly.hpp"
#include "polymoments/moments.hpp"
#include "polymoments/roots.hpp"
#include "polymoments/contour.hpp"
#include "polymoments/pathopt.hpp"
#include "polymoments/reference.hpp"
#include "polymoments/kappa.hpp"

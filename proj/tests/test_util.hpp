#pragma once

#include <cmath>

// Absolute-tolerance comparison; reference values are quoted to 6 decimals.
inline bool near(double a, double b, double tol = 1e-6) { return std::fabs(a - b) <= tol; }

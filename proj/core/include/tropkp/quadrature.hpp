#pragma once

#include "tropkp/series.hpp"

#include <functional>

namespace tropkp {

struct QuadratureResult {
  Complex value;
  double error = 0.0;  // Gauss-Kronrod error estimate
  std::size_t evaluations = 0;
};

// Integral of f(zeta) dzeta along the straight segment from a to b, by
// globally adaptive 7/15-point Gauss-Kronrod bisection. Stops when the
// summed error estimate is below tol * max(1, |integral|). Throws
// PrecisionError if that is not reached within the subdivision budget.
QuadratureResult integrate_segment(const std::function<Complex(Complex)>& f, Complex a, Complex b,
                                   double tol = 1e-12, std::size_t max_intervals = 4000);

}  // namespace tropkp

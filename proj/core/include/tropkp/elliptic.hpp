#pragma once

#include "tropkp/series.hpp"

namespace tropkp {

// Jacobi theta_1(u | tau) = 2 sum_{n >= 0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi u),
// q = exp(pi i tau). Odd, with simple zeros at the lattice Z + tau Z and
// theta_1(u + 1) = -theta_1(u).
Complex jacobi_theta1(Complex u, Complex tau, int derivative = 0);

// Taylor series of theta_1 at u in one variable, to the given degree.
Series jacobi_theta1_series(Complex u, Complex tau, int degree);

// (d/du)^k log theta_1(u), k >= 1, at a point off the lattice.
Complex log_theta1_derivative(Complex u, Complex tau, int k);

// Coefficients L_1..L_degree of log(theta_1(w) / (theta_1'(0) w)) = sum L_j w^j.
std::vector<Complex> log_theta1_regular_part(Complex tau, int degree);

}  // namespace tropkp

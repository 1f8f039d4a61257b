#include "tropkp/elliptic.hpp"

#include "tropkp/errors.hpp"

#include <cmath>
#include <numbers>

namespace tropkp {
namespace {

constexpr double kPi = std::numbers::pi;

void check_tau(Complex tau) {
  if (!(tau.imag() > 0.0)) throw ValidationError("tau", "imaginary part must be positive");
}

}  // namespace

Complex jacobi_theta1(Complex u, Complex tau, int derivative) {
  check_tau(tau);
  if (derivative < 0) throw ValidationError("derivative", "negative order");
  const Complex i(0.0, 1.0);
  Complex sum = 0.0;
  double previous = INFINITY;
  for (int n = 0; n < 10000; ++n) {
    const double a = (2 * n + 1) * kPi;
    const double nh = n + 0.5;
    const Complex weight = std::exp(i * kPi * tau * nh * nh);
    // d^k/du^k sin(a u) = a^k sin(a u + k pi / 2)
    const Complex term = (n % 2 == 0 ? 2.0 : -2.0) * weight * std::pow(a, derivative) *
                         std::sin(a * u + derivative * kPi / 2);
    sum += term;
    const double size = std::abs(term);
    // Terms decay super-exponentially once past their peak.
    if (size < previous && size <= 1e-18 * std::abs(sum)) return sum;
    if (size == 0.0 && n > 0) return sum;
    previous = size;
  }
  throw PrecisionError("theta_1 series did not converge (u too far from the real axis)");
}

Series jacobi_theta1_series(Complex u, Complex tau, int degree) {
  Series s(1, degree);
  double factorial = 1.0;
  for (int k = 0; k <= degree; ++k) {
    if (k > 0) factorial *= k;
    s[static_cast<std::size_t>(k)] = jacobi_theta1(u, tau, k) / factorial;
  }
  return s;
}

Complex log_theta1_derivative(Complex u, Complex tau, int k) {
  if (k < 1) throw ValidationError("k", "order must be at least 1");
  const Series log_series = jacobi_theta1_series(u, tau, k).log();
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  return log_series[static_cast<std::size_t>(k)] * factorial;
}

std::vector<Complex> log_theta1_regular_part(Complex tau, int degree) {
  // theta_1(w) / w = sum_k theta_1^{(k+1)}(0) w^k / (k+1)!
  Series s(1, degree);
  double factorial = 1.0;
  for (int k = 0; k <= degree; ++k) {
    factorial *= (k + 1);
    s[static_cast<std::size_t>(k)] = jacobi_theta1(0.0, tau, k + 1) / factorial;
  }
  const Complex lead = s[0];
  s *= 1.0 / lead;
  const Series l = s.log();
  std::vector<Complex> out(static_cast<std::size_t>(degree));
  for (int j = 1; j <= degree; ++j) out[static_cast<std::size_t>(j - 1)] = l[static_cast<std::size_t>(j)];
  return out;
}

}  // namespace tropkp

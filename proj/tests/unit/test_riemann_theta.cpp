#include "support.hpp"

#include "tropkp/checks/oracles.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/riemann_theta.hpp"

#include <doctest.h>

using namespace tropkp;
using namespace tropkp::test;

namespace {

SiegelMatrix one_by_one(Complex tau) {
  ComplexMatrix z(1, 1);
  z(0, 0) = tau;
  return SiegelMatrix(z);
}

ComplexVector vec(std::initializer_list<Complex> items) {
  ComplexVector out(static_cast<Eigen::Index>(items.size()));
  Eigen::Index i = 0;
  for (const auto& v : items) out(i++) = v;
  return out;
}

ComplexVector random_z(checks::Rng& rng, int g, double im = 0.5) {
  ComplexVector z(g);
  std::uniform_real_distribution<double> re(-1.0, 1.0), ims(-im, im);
  for (int i = 0; i < g; ++i) z(i) = Complex(re(rng), ims(rng));
  return z;
}

}  // namespace

TEST_CASE("theta: classical value") {
  const auto v = theta(one_by_one(kI), vec({0.0}));
  CHECK(std::abs(v.value - 1.08643481121331) < 1e-12);
  CHECK(v.bound < 1e-14);
  CHECK(std::abs(v.value - checks::theta_box_sum(one_by_one(kI).matrix(), vec({0.0}), 30)) < 1e-14);
}

TEST_CASE("theta: block diagonal factorisation") {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = kI;
  z(1, 1) = 2.0 * kI;
  const auto zero = vec({0.0, 0.0});
  const Complex product = theta(one_by_one(kI), vec({0.0})).value * theta(one_by_one(2.0 * kI), vec({0.0})).value;
  CHECK(std::abs(theta(SiegelMatrix(z), zero).value - product) < 1e-13);

  const auto w = vec({Complex(0.2, 0.1), Complex(-0.3, 0.05)});
  const Complex factored =
      theta(one_by_one(kI), vec({w(0)})).value * theta(one_by_one(2.0 * kI), vec({w(1)})).value;
  CHECK(std::abs(theta(SiegelMatrix(z), w).value - factored) < 1e-13);
}

TEST_CASE("siegel matrix validation") {
  ComplexMatrix bad(2, 2);
  bad << kI, 0.3, 0.1, kI;
  CHECK_THROWS_AS(SiegelMatrix{bad}, ValidationError);
  ComplexMatrix indefinite(2, 2);
  indefinite << kI, 2.0 * kI, 2.0 * kI, kI;
  CHECK_THROWS_AS(SiegelMatrix{indefinite}, ValidationError);
  CHECK_THROWS_AS(one_by_one(Complex(0.5, -1.0)), ValidationError);
  CHECK_THROWS_AS(SiegelMatrix{ComplexMatrix::Zero(2, 3)}, ValidationError);
}

TEST_CASE("theta derivatives: parity and direct sums") {
  const auto z = one_by_one(Complex(0.2, 1.1));
  const std::vector<int> first{1}, second{2}, third{3};
  const auto zero = vec({0.0});
  CHECK(std::abs(theta_derivative(z, zero, first).value) < 1e-12);
  CHECK(std::abs(theta_derivative(z, zero, third).value) < 1e-10);

  const auto w = vec({Complex(0.31, -0.2)});
  Complex direct = 0.0;
  for (int u = -30; u <= 30; ++u) {
    const Complex factor = 2.0 * kPi * kI * static_cast<double>(u);
    direct += factor * factor * std::exp(kPi * kI * (z.matrix()(0, 0) * double(u * u) + 2.0 * w(0) * double(u)));
  }
  const auto d2 = theta_derivative(z, w, second);
  CHECK(std::abs(d2.value - direct) < 1e-12 * std::abs(direct));
}

TEST_CASE("property: theta derivatives match central differences") {
  checks::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 3;
    const SiegelMatrix z(checks::random_siegel(rng, g));
    const ComplexVector w = random_z(rng, g);
    for (int i = 0; i < g; ++i) {
      std::vector<int> order(static_cast<std::size_t>(g), 0);
      order[static_cast<std::size_t>(i)] = 1;
      const Complex analytic = theta_derivative(z, w, order).value;
      const double h = 1e-5;
      ComplexVector plus = w, minus = w;
      plus(i) += h;
      minus(i) -= h;
      const Complex fd = (theta(z, plus).value - theta(z, minus).value) / (2.0 * h);
      const double scale = std::max(std::abs(analytic), std::abs(theta(z, w).value));
      CHECK(std::abs(fd - analytic) < 1e-8 * scale);

      // second order against differences of the first derivative
      order[static_cast<std::size_t>(i)] = 2;
      const Complex second = theta_derivative(z, w, order).value;
      order[static_cast<std::size_t>(i)] = 1;
      const double h2 = 1e-4;
      ComplexVector p2 = w, m2 = w, p1 = w, m1 = w;
      p2(i) += 2.0 * h2;
      m2(i) -= 2.0 * h2;
      p1(i) += h2;
      m1(i) -= h2;
      const auto d1 = [&](const ComplexVector& at) { return theta_derivative(z, at, order).value; };
      const Complex coarse = (d1(p2) - d1(m2)) / (4.0 * h2);
      const Complex fine = (d1(p1) - d1(m1)) / (2.0 * h2);
      const Complex richardson = (4.0 * fine - coarse) / 3.0;
      const double scale2 = std::max(std::abs(second), std::abs(d1(w)));
      CHECK(std::abs(richardson - second) < 1e-7 * std::max(scale2, std::abs(theta(z, w).value)));
    }
  }
}

TEST_CASE("quasi-periodicity examples") {
  CHECK(quasi_periodicity_residual(one_by_one(kI), vec({Complex(0.3, 0.2)}), 0) < 1e-10);
  checks::Rng rng(3);
  const SiegelMatrix z(checks::random_siegel(rng, 2));
  const auto w = random_z(rng, 2);
  CHECK(quasi_periodicity_residual(z, w, 0) < 1e-10);
  CHECK(quasi_periodicity_residual(z, w, 1) < 1e-10);
}

TEST_CASE("property: evenness, periodicity and quasi-periodicity") {
  checks::Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const int g = 1 + trial % 4;
    const SiegelMatrix z(checks::random_siegel(rng, g));
    const ComplexVector w = random_z(rng, g);
    const auto v = theta(z, w);
    const auto minus = theta(z, ComplexVector(-w));
    CHECK(std::abs(v.value - minus.value) < 1e-12 * std::exp(v.log_scale));
    for (int i = 0; i < g; ++i) {
      ComplexVector shifted = w;
      shifted(i) += 1.0;
      CHECK(std::abs(theta(z, shifted).value - v.value) < 1e-12 * std::exp(v.log_scale));
      CHECK(quasi_periodicity_residual(z, w, static_cast<std::size_t>(i)) < 1e-10);
    }
  }
}

TEST_CASE("property: halving the tolerance stays within the bound") {
  checks::Rng rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 3;
    const SiegelMatrix z(checks::random_siegel(rng, g));
    const ComplexVector w = random_z(rng, g);
    double tol = 1e-4;
    auto previous = theta(z, w, tol);
    for (int k = 0; k < 6; ++k) {
      tol /= 2.0;
      const auto next = theta(z, w, tol);
      const double scale = std::exp(previous.log_scale);
      CHECK(std::abs(next.value - previous.value) <= previous.bound * scale + 1e-15 * scale);
      CHECK(next.bound < tol);
      previous = next;
    }
  }
}

TEST_CASE("theta series matches derivatives") {
  checks::Rng rng(97);
  const SiegelMatrix z(checks::random_siegel(rng, 2));
  const ComplexVector w = random_z(rng, 2);
  // displacement d_i(t) = t * e_i in one variable
  std::vector<Series> d;
  for (int i = 0; i < 2; ++i) {
    Series s(1, 3);
    if (i == 0) s[1] = 1.0;
    d.push_back(s);
  }
  const auto series = theta_series(z, w, d);
  const double scale = std::exp(series.log_scale);
  for (int k = 0; k <= 3; ++k) {
    const std::vector<int> order{k, 0};
    const std::vector<int> exponent{k};
    double factorial = 1.0;
    for (int j = 2; j <= k; ++j) factorial *= j;
    const Complex expected = theta_derivative(z, w, order).value / factorial;
    CHECK(std::abs(series.scaled.coefficient(exponent) * scale - expected) < 1e-11 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("degenerate imaginary parts stay finite") {
  ComplexMatrix m(2, 2);
  m << Complex(0.1, 40.0), Complex(0.0, 1.0), Complex(0.0, 1.0), Complex(0.2, 0.5);
  const SiegelMatrix z(m);
  const auto v = theta(z, vec({Complex(0.0, -40.0), Complex(0.1, 0.0)}));
  CHECK(std::isfinite(v.log_scale));
  CHECK(v.log_scale > 10.0);
  CHECK(std::abs(v.scaled) > 0.1);
}

TEST_CASE("lattice gaussian tail decreases with the radius") {
  double previous = lattice_gaussian_tail(2, 1.0, 1.0, 1.0, 0.0, 0);
  for (double r = 2.0; r < 8.0; r += 1.0) {
    const double next = lattice_gaussian_tail(2, 1.0, r, 1.0, 0.0, 0);
    CHECK(next < previous);
    previous = next;
  }
  CHECK(previous < 1e-14);
}

TEST_CASE("property: lattice gaussian tail bounds the integer lattice sum") {
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    for (double r = 1.0; r <= 4.0; r += 0.5) {
      for (int k = 0; k <= 2; ++k) {
        const double a = 1.5, c = 2.0;
        double sum = 0.0;
        const int n = 12;
        std::vector<int> u(dim, -n);
        while (true) {
          double norm2 = 0.0;
          for (int x : u) norm2 += double(x) * x;
          const double norm = std::sqrt(norm2);
          if (norm >= r) sum += std::exp(-norm2) * std::pow(a + c * norm, k);
          std::size_t i = 0;
          while (i < dim && u[i] == n) u[i++] = -n;
          if (i == dim) break;
          ++u[i];
        }
        CHECK(sum <= lattice_gaussian_tail(dim, 1.0, r, a, c, k));
      }
    }
  }
}

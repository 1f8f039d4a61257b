#include "support.hpp"

#include "tropkp/errors.hpp"

#include <doctest.h>

using namespace tropkp;
using namespace tropkp::test;

namespace {

DenseMatrix<Rational> multiply(const DenseMatrix<Rational>& a, const DenseMatrix<Rational>& b) {
  DenseMatrix<Rational> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
    }
  }
  return out;
}

DenseMatrix<Rational> transpose(const DenseMatrix<Rational>& a) {
  DenseMatrix<Rational> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

// Product of random elementary row operations: det = +-1.
DenseMatrix<Rational> random_unimodular(checks::Rng& rng, std::size_t n) {
  DenseMatrix<Rational> u(n, n);
  for (std::size_t i = 0; i < n; ++i) u(i, i) = 1;
  std::uniform_int_distribution<std::size_t> index(0, n - 1);
  std::uniform_int_distribution<int> factor(-2, 2);
  for (int step = 0; step < 8; ++step) {
    const std::size_t i = index(rng), j = index(rng);
    if (i == j) continue;
    const int f = factor(rng);
    for (std::size_t k = 0; k < n; ++k) u(i, k) += f * u(j, k);
  }
  return u;
}

}  // namespace

TEST_CASE("period matrix: examples") {
  const auto loop = single_loop("7/2");
  const auto b = period_matrix(loop, cycle_basis(loop));
  REQUIRE(b.dimension() == 1);
  CHECK(b(0, 0) == Rational(7, 2));

  const auto theta = theta_graph("1", "2", "3");
  const auto bt = period_matrix(theta, cycle_basis(theta));
  CHECK(bt(0, 0) == 3);
  CHECK(bt(0, 1) == 1);
  CHECK(bt(1, 0) == 1);
  CHECK(bt(1, 1) == 4);
  CHECK(determinant(bt.entries()) == 1 * 2 + 2 * 3 + 3 * 1);

  const auto tree = make_curve({{"a", 0}, {"b", 0}}, {{"e", "a", "b", "1"}});
  CHECK(period_matrix(tree, cycle_basis(tree)).dimension() == 0);
}

TEST_CASE("period matrix: basis from another curve is rejected") {
  const auto theta = theta_graph();
  CHECK_THROWS_AS(period_matrix(single_loop(), cycle_basis(theta)), ValidationError);
}

TEST_CASE("tropical period matrix must be positive definite") {
  DenseMatrix<Rational> m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 2;
  m(1, 1) = 1;
  CHECK_THROWS_AS(TropicalPeriodMatrix{m}, ValidationError);
  m(0, 1) = 0;
  CHECK_THROWS_AS(TropicalPeriodMatrix{m}, ValidationError);
}

TEST_CASE("symbolic period matrix: examples") {
  const auto theta = theta_graph();
  const auto s = symbolic_period_matrix(cycle_basis(theta));
  CHECK(s(0, 0) == LinearForm(rationals({"1", "1", "0"})));
  CHECK(s(0, 1) == LinearForm(rationals({"1", "0", "0"})));
  CHECK(s(1, 1) == LinearForm(rationals({"1", "0", "1"})));

  const auto loop = single_loop();
  const auto sl = symbolic_period_matrix(cycle_basis(loop));
  CHECK(sl(0, 0) == LinearForm::variable(1, 0));
}

TEST_CASE("quadratic form: examples") {
  const auto loop = single_loop("4");
  const auto b = period_matrix(loop, cycle_basis(loop));
  const RationalVector one{1}, zero{0};
  CHECK(quadratic_form(b, one, one) == 4);
  CHECK(quadratic_form(b, zero, zero) == 0);

  const auto theta = theta_graph();
  const auto s = symbolic_period_matrix(cycle_basis(theta));
  const RationalVector x{1, 0};
  CHECK(quadratic_form(s, x, x) == LinearForm(rationals({"1", "1", "0"})));
}

TEST_CASE("property: random curves") {
  checks::Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto curve = checks::random_curve(rng);
    const auto basis = cycle_basis(curve);
    const auto b = period_matrix(curve, basis);
    const auto s = symbolic_period_matrix(basis);
    const std::size_t n = b.dimension();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(b(i, j) == b(j, i));
        CHECK(s(i, j) == s(j, i));
      }
    }
    LdlFactors f;
    CHECK(ldl_decompose(b.entries(), f));
    for (const auto& p : f.pivots) CHECK(p > 0);
    CHECK(specialize(s, curve.lengths()) == b);

    // x B_Delta x^T has nonnegative coefficients, positive on the edges used.
    for (int k = 0; k < 5; ++k) {
      LatticePoint x(n);
      bool nonzero = false;
      std::uniform_int_distribution<int> coord(-3, 3);
      for (auto& xi : x) {
        xi = coord(rng);
        nonzero = nonzero || xi != 0;
      }
      if (!nonzero) continue;
      const auto xr = to_rationals(x);
      const LinearForm form = quadratic_form(s, xr, xr);
      bool positive = false;
      for (std::size_t e = 0; e < form.size(); ++e) {
        CHECK(form[e] >= 0);
        positive = positive || form[e] > 0;
        std::int64_t used = 0;
        for (std::size_t j = 0; j < n; ++j) used += x[j] * basis.matrix(j, e);
        CHECK(form[e] == Rational(used * used));
      }
      CHECK(positive);
      CHECK(form.evaluate(curve.lengths()) == quadratic_form(b, xr, xr));
    }

    // det(U B U^T) = det(B)
    const auto u = random_unimodular(rng, n);
    CHECK(determinant(multiply(multiply(u, b.entries()), transpose(u))) == determinant(b.entries()));
  }
}

TEST_CASE("linear form arithmetic and json") {
  const auto theta = theta_graph();
  LinearForm a(rationals({"1/2", "0", "-3"}));
  LinearForm b(rationals({"1/2", "1", "3"}));
  CHECK(a + b == LinearForm(rationals({"1", "1", "0"})));
  CHECK(Rational(2) * a == LinearForm(rationals({"1", "0", "-6"})));
  CHECK(linear_form_from_json(to_json(a, theta), theta) == a);
  CHECK(LinearForm(rationals({"0", "1", "1"})).dominated_by(b));
  CHECK_FALSE(a.dominated_by(LinearForm(3)));
}

TEST_CASE("exact inverse") {
  const auto b = rational_matrix({{3, 1}, {1, 4}});
  const auto inv = inverse(b.entries());
  const auto prod = multiply(b.entries(), inv);
  CHECK(prod(0, 0) == 1);
  CHECK(prod(0, 1) == 0);
  CHECK(prod(1, 0) == 0);
  CHECK(prod(1, 1) == 1);
}

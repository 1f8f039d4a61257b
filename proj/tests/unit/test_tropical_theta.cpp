#include "support.hpp"

#include "tropkp/checks/oracles.hpp"
#include "tropkp/tropical_theta.hpp"

#include <doctest.h>

#include <algorithm>

using namespace tropkp;
using namespace tropkp::test;

namespace {

using Points = std::vector<LatticePoint>;

RationalVector shifted(const RationalVector& alpha, const LatticePoint& lambda) {
  RationalVector out = alpha;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += lambda[i];
  return out;
}

}  // namespace

TEST_CASE("tropical theta: one dimensional examples") {
  const auto b4 = rational_matrix({{4}});
  const RationalVector zero{0};
  CHECK(tropical_theta(b4, zero) == 0);
  CHECK(delaunay_set(b4, zero).points == Points{{0}});

  const auto quarter = rationals({"1/4"});
  CHECK(tropical_theta(b4, quarter) == 0);
  CHECK(delaunay_set(b4, quarter).points == Points{{0}});

  const auto half = rationals({"1/2"});
  CHECK(tropical_theta(b4, half) == 0);
  CHECK(delaunay_set(b4, half).points == Points{{0}, {1}});

  const auto b7 = rational_matrix({{7}});
  CHECK(delaunay_set(b7, half).points == Points{{0}, {1}});
}

TEST_CASE("delaunay set: two dimensional ties") {
  const auto half = rationals({"1/2", "1/2"});
  // Positive off-diagonal: the short diagonal of the fundamental cell is (1,-1).
  const auto plus = rational_matrix({{2, 1}, {1, 2}});
  const auto d_plus = delaunay_set(plus, half);
  CHECK(d_plus.points == Points{{0, 1}, {1, 0}});
  const auto oracle_plus = checks::exhaustive_delaunay(plus, half, 10);
  CHECK(oracle_plus.points == d_plus.points);
  CHECK(oracle_plus.value == d_plus.value);

  const auto minus = rational_matrix({{2, -1}, {-1, 2}});
  const auto d_minus = delaunay_set(minus, half);
  CHECK(d_minus.points == Points{{0, 0}, {1, 1}});
  CHECK(checks::exhaustive_delaunay(minus, half, 10).points == d_minus.points);
}

TEST_CASE("delaunay set: integer alpha is its own closest point") {
  const auto b = rational_matrix({{3, 1}, {1, 4}});
  const RationalVector alpha{2, -1};
  const auto d = delaunay_set(b, alpha);
  CHECK(d.points == Points{{2, -1}});
  CHECK(d.value == quadratic_form(b, alpha, alpha) / 2);
}

TEST_CASE("tree graph has theta 0") {
  const auto tree = make_curve({{"a", 0}, {"b", 0}}, {{"e", "a", "b", "1"}});
  const auto basis = cycle_basis(tree);
  const auto b = period_matrix(tree, basis);
  const RationalVector empty;
  CHECK(tropical_theta(b, empty) == 0);
  const auto report = verify_decomposition(symbolic_period_matrix(basis), tree.lengths(), empty);
  CHECK(report.passed());
  CHECK(report.theta == 0);
}

TEST_CASE("maximal forms at a length function") {
  const auto loop = single_loop("5");
  const auto s = symbolic_period_matrix(cycle_basis(loop));
  const auto forms = maximal_forms_at(s, loop.lengths(), rationals({"1/2"}));
  REQUIRE(forms.size() == 1);
  CHECK(forms[0].form.is_zero());
  CHECK(forms[0].witnesses == Points{{0}, {1}});

  const auto zero = maximal_forms_at(s, loop.lengths(), rationals({"0"}));
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].form.is_zero());
  CHECK(zero[0].witnesses == Points{{0}});

  const auto theta = theta_graph("1", "1", "1");
  const auto st = symbolic_period_matrix(cycle_basis(theta));
  const auto alpha = rationals({"1/2", "0"});
  const auto tforms = maximal_forms_at(st, theta.lengths(), alpha);
  const auto oracle = checks::exhaustive_delaunay(period_matrix(theta, cycle_basis(theta)), alpha, 10);
  Points witnesses;
  for (const auto& f : tforms) {
    for (const auto& x : f.witnesses) {
      CHECK(tropical_objective(st, alpha, x) == f.form);
      witnesses.push_back(x);
    }
  }
  std::sort(witnesses.begin(), witnesses.end());
  CHECK(witnesses == oracle.points);
}

TEST_CASE("maximal elements: single loop") {
  const auto loop = single_loop("5");
  const auto s = symbolic_period_matrix(cycle_basis(loop));

  const auto quarter = maximal_elements(s, rationals({"1/4"}));
  REQUIRE(quarter.forms.size() == 1);
  CHECK(quarter.forms[0].form.is_zero());
  CHECK(quarter.stable);

  const auto three_quarters = maximal_elements(s, rationals({"3/4"}));
  REQUIRE(three_quarters.forms.size() == 1);
  CHECK(three_quarters.forms[0].form == LinearForm(rationals({"1/4"})));
  CHECK(three_quarters.forms[0].witnesses == Points{{1}});

  const auto zero = maximal_elements(s, rationals({"0"}));
  REQUIRE(zero.forms.size() == 1);
  CHECK(zero.forms[0].form.is_zero());
}

TEST_CASE("maximal elements are pairwise incomparable") {
  const auto theta = theta_graph();
  const auto s = symbolic_period_matrix(cycle_basis(theta));
  const auto result = maximal_elements(s, rationals({"1/3", "2/3"}));
  for (std::size_t i = 0; i < result.forms.size(); ++i) {
    for (std::size_t j = 0; j < result.forms.size(); ++j) {
      if (i != j) CHECK_FALSE(result.forms[i].form.dominated_by(result.forms[j].form));
    }
  }
}

TEST_CASE("property: decomposition holds on random curves") {
  checks::Rng rng(31);
  checks::RandomCurveOptions options;
  options.max_h1 = 3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto curve = checks::random_curve(rng, options);
    const auto basis = cycle_basis(curve);
    const auto alpha = checks::random_alpha(rng, basis.rank());
    const auto report = verify_decomposition(symbolic_period_matrix(basis), curve.lengths(), alpha);
    CHECK(report.passed());
    CHECK(report.theta == tropical_theta(period_matrix(curve, basis), alpha));
  }
}

TEST_CASE("property: quasi-periodicity, lower bounds and duality") {
  checks::Rng rng(41);
  checks::RandomCurveOptions options;
  options.max_h1 = 4;
  std::uniform_int_distribution<int> coord(-4, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto curve = checks::random_curve(rng, options);
    const auto b = period_matrix(curve, cycle_basis(curve));
    const std::size_t n = b.dimension();
    const auto alpha = checks::random_alpha(rng, n);
    const auto d = delaunay_set(b, alpha);
    CHECK_FALSE(d.points.empty());
    for (const auto& x : d.points) CHECK(tropical_objective(b, alpha, x) == d.value);
    CHECK(d.value >= 0);

    LatticePoint lambda(n);
    for (auto& l : lambda) l = coord(rng);
    const auto lr = to_rationals(lambda);
    const auto moved = delaunay_set(b, shifted(alpha, lambda));
    CHECK(moved.value == d.value + quadratic_form(b, alpha, lr) + quadratic_form(b, lr, lr) / 2);
    Points expected;
    for (auto x : d.points) {
      for (std::size_t i = 0; i < n; ++i) x[i] += lambda[i];
      expected.push_back(x);
    }
    std::sort(expected.begin(), expected.end());
    CHECK(moved.points == expected);

    for (int k = 0; k < 1000 / 30; ++k) {
      LatticePoint x(n);
      for (auto& xi : x) xi = coord(rng);
      CHECK(d.value >= tropical_objective(b, alpha, x));
    }

    const auto cv = closest_vectors(b, alpha);
    CHECK(d.value == quadratic_form(b, alpha, alpha) / 2 - cv.distance2 / 2);
    CHECK(cv.points == d.points);
  }
}

TEST_CASE("property: sphere decoding matches the exhaustive box") {
  checks::Rng rng(53);
  checks::RandomCurveOptions options;
  options.max_h1 = 3;
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto curve = checks::random_curve(rng, options);
    const auto b = period_matrix(curve, cycle_basis(curve));
    const auto alpha = checks::random_alpha(rng, b.dimension());
    if (!checks::box_contains_optimum(b, alpha, 12)) continue;
    const auto oracle = checks::exhaustive_delaunay(b, alpha, 12);
    const auto d = delaunay_set(b, alpha);
    CHECK(d.points == oracle.points);
    CHECK(d.value == oracle.value);
    ++compared;
  }
  CHECK(compared >= 20);
}

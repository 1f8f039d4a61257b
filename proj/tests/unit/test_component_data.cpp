#include "support.hpp"

#include "tropkp/checks/oracles.hpp"
#include "tropkp/component_data.hpp"
#include "tropkp/elliptic.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"
#include "tropkp/quadrature.hpp"

#include <doctest.h>

using namespace tropkp;
using namespace tropkp::test;
using nlohmann::json;

namespace {

json marked(const std::string& base, json vertices, int order = 4) {
  return {{"kind", "marked"}, {"order", order}, {"base_vertex", base}, {"vertices", std::move(vertices)}};
}

ComponentData data_for(const TropicalCurve& curve, const json& components) {
  return checks::build_pipeline(curve, components).data;
}

std::string error_of(const TropicalCurve& curve, const json& components) {
  try {
    data_for(curve, components);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "no error";
}

// log theta_1(u - x) continued along the straight segment; returns end - start.
Complex continued_log_change(Complex x, Complex from, Complex to, Complex tau) {
  const int steps = 4000;
  Complex acc = 0.0;
  Complex prev = jacobi_theta1(from - x, tau);
  for (int k = 1; k <= steps; ++k) {
    const Complex u = from + (to - from) * (static_cast<double>(k) / steps);
    const Complex next = jacobi_theta1(u - x, tau);
    acc += std::log(next / prev);
    prev = next;
  }
  return acc;
}

}  // namespace

TEST_CASE("single loop: soliton parameters") {
  const Complex kappa(0.7, 0.2), lambda(-1.3, 0.0);
  const auto curve = single_loop("2");
  const json components = marked("v", {{"v", {{"genus", 0},
                                               {"nodes", {{"e+", to_json(kappa)}, {"e-", to_json(lambda)}}},
                                               {"base_point", "inf"}}}});
  const auto data = data_for(curve, components);
  REQUIRE(data.r_trop.size() == 4);
  for (int m = 1; m <= 4; ++m) {
    const Complex expected = -(std::pow(kappa, m) - std::pow(lambda, m)) / (2.0 * kPi * kI);
    CHECK(std::abs(data.r_trop[m - 1](0) - expected) < 1e-14);
  }
  CHECK(data.q.cwiseAbs().maxCoeff() == 0.0);

  const auto oracle = checks::contour_r_trop(curve, cycle_basis(curve), marked_curve_from_json(components, curve));
  for (int m = 1; m <= 4; ++m) CHECK(std::abs(oracle[m - 1](0) - data.r_trop[m - 1](0)) < 1e-9);
}

TEST_CASE("two loops: cross-ratio phase") {
  const Complex k1(1.0, 0.3), l1(2.0, -0.1), k2(-1.0, 0.2), l2(-2.5, 0.0);
  const auto curve = make_curve({{"v", 0}}, {{"e1", "v", "v", "2"}, {"e2", "v", "v", "3"}});
  const json components =
      marked("v", {{"v", {{"genus", 0},
                          {"nodes", {{"e1+", to_json(k1)}, {"e1-", to_json(l1)}, {"e2+", to_json(k2)}, {"e2-", to_json(l2)}}},
                          {"base_point", "inf"}}}});
  const auto data = data_for(curve, components);
  const Complex expected = std::log(((k1 - k2) * (l1 - l2)) / ((k1 - l2) * (l1 - k2))) / (2.0 * kPi * kI);
  CHECK(std::abs(data.b0(0, 1) - expected) < 1e-13);
  CHECK(data.b0(0, 1) == data.b0(1, 0));

  const auto raw = checks::path_b0_raw(curve, cycle_basis(curve), marked_curve_from_json(components, curve));
  for (int j = 0; j < 2; ++j) {
    for (int k = j; k < 2; ++k) CHECK(std::abs(raw(j, k) - data.b0(j, k)) < 1e-9);
  }
}

TEST_CASE("default chart: omega^(n) has no expansion terms") {
  const auto example = checks::bundled_example("two_loops");
  const auto data = checks::build_pipeline(example, 6).data;
  CHECK(data.q.rows() == 6);
  CHECK(data.q.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("finite base point with charts") {
  const auto curve = theta_graph("1", "2", "3");
  auto vertices = json{{"a", {{"genus", 0}, {"nodes", {{"e1+", 0.0}, {"e2+", 1.0}, {"e3+", "0.5+1i"}}}, {"base_point", "2i"}}},
                       {"b", {{"genus", 0}, {"nodes", {{"e1-", 0.0}, {"e2-", 2.0}, {"e3-", -1.0}}}}}};

  // Mobius chart z = w / (1 - a w), expanded far beyond the order used.
  const Complex a(0.3, -0.2);
  json mobius = json::array();
  for (int k = 0; k < 24; ++k) mobius.push_back(to_json(std::pow(a, k)));
  vertices["a"]["chart"] = mobius;
  const auto moeb = data_for(curve, marked("a", vertices));
  CHECK(moeb.q.cwiseAbs().maxCoeff() < 1e-10);

  // Polynomial chart: q is nonzero and symmetric.
  vertices["a"]["chart"] = json::array({1.0, "0.4-0.3i", 0.25});
  const auto poly = data_for(curve, marked("a", vertices, 5));
  CHECK(poly.q.cwiseAbs().maxCoeff() > 1e-3);
  CHECK((poly.q - poly.q.transpose()).cwiseAbs().maxCoeff() < 1e-9);

  const auto mc = marked_curve_from_json(marked("a", vertices, 5), curve);
  const auto oracle = checks::contour_r_trop(curve, cycle_basis(curve), mc);
  for (std::size_t m = 0; m < oracle.size(); ++m) {
    CHECK((oracle[m] - poly.r_trop[m]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("residues: normalisation and the residue theorem per component") {
  const auto curve = theta_graph("1", "2", "3");
  const auto basis = cycle_basis(curve);
  const std::map<std::string, Complex> nodes{{"e1+", 0.0}, {"e2+", 1.0}, {"e3+", Complex(0.5, 1.0)},
                                             {"e1-", 0.0}, {"e2-", 2.0}, {"e3-", -1.0}};
  for (std::size_t v = 0; v < 2; ++v) {
    for (std::size_t j = 0; j < basis.rank(); ++j) {
      // omega_j on this component: sum sigma M(j,e) / (2 pi i) / (zeta - x_h)
      std::vector<std::pair<Complex, Complex>> poles;
      for (std::size_t e = 0; e < curve.edge_count(); ++e) {
        const auto& edge = curve.edges()[e];
        if (edge.tail == v) poles.push_back({nodes.at(edge.id + "+"), double(basis.matrix(j, e)) / (2.0 * kPi * kI)});
        if (edge.head == v) poles.push_back({nodes.at(edge.id + "-"), -double(basis.matrix(j, e)) / (2.0 * kPi * kI)});
      }
      const auto omega = [&](Complex z) {
        Complex sum = 0.0;
        for (const auto& [x, rho] : poles) sum += rho / (z - x);
        return sum;
      };
      const auto contour = [&](Complex centre, double r) {
        const Complex corners[4] = {centre + Complex(r, r), centre + Complex(-r, r), centre + Complex(-r, -r),
                                    centre + Complex(r, -r)};
        Complex total = 0.0;
        for (int k = 0; k < 4; ++k) total += integrate_segment(omega, corners[k], corners[(k + 1) % 4], 1e-13).value;
        return total;
      };
      // big contour: residues sum to zero
      CHECK(std::abs(contour(0.0, 10.0)) < 1e-12);
      // small contour around the node of each cycle edge: period delta_jk
      for (std::size_t k = 0; k < basis.rank(); ++k) {
        const auto& edge = curve.edges()[basis.cycle_edges[k]];
        const std::string label = edge.id + (edge.tail == v ? "+" : "-");
        const double sign = edge.tail == v ? 1.0 : -1.0;
        const Complex period = contour(nodes.at(label), 0.2);
        CHECK(std::abs(period - sign * (j == k ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("elliptic component: coupling along a passage") {
  const auto curve = single_loop("2", 1);
  const json components = marked("v", {{"v", {{"genus", 1}, {"tau", "i"},
                                               {"nodes", {{"e+", "0.4+0.5i"}, {"e-", "0.1+0.5i"}}},
                                               {"base_point", "0.2+0.2i"}}}});
  const auto data = data_for(curve, components);
  REQUIRE(data.vertices[0].genus == 1);
  CHECK(std::abs(data.vertices[0].period(0, 0) - kI) < 1e-15);
  CHECK(std::abs(data.vertices[0].coupling(0, 0) - 0.3) < 1e-14);
  CHECK(std::abs(data.b0(0, 0) - data.b0.transpose()(0, 0)) == 0.0);
}

TEST_CASE("elliptic component: cycles that miss it couple with 0") {
  const auto curve = make_curve({{"a", 1}, {"b", 0}},
                                {{"e1", "b", "b", "1"}, {"e2", "a", "b", "1"}, {"e3", "a", "a", "2"}});
  const json components =
      marked("b", {{"a", {{"genus", 1}, {"tau", "0.1+1.2i"}, {"nodes", {{"e2+", "0.5+0.3i"}, {"e3+", "0.2+0.6i"},
                                                                          {"e3-", "0.7+0.9i"}}}}},
                   {"b", {{"genus", 0}, {"nodes", {{"e1+", 1.0}, {"e1-", -1.0}, {"e2-", "2i"}}}, {"base_point", "inf"}}}});
  const auto data = data_for(curve, components);
  const auto basis = cycle_basis(curve);
  const auto& a = data.vertices[0];
  for (std::size_t j = 0; j < basis.rank(); ++j) {
    bool touches = false;
    for (const auto& step : basis.walks[j]) {
      const auto& e = curve.edges()[step.edge];
      touches = touches || e.tail == 0 || e.head == 0;
    }
    if (!touches) CHECK(a.coupling(0, static_cast<Eigen::Index>(j)) == Complex(0.0));
    else CHECK(std::abs(a.coupling(0, static_cast<Eigen::Index>(j))) > 0.0);
  }
  CHECK((data.b0 - data.b0.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("elliptic segment integral against log theta continuation") {
  const Complex tau(0.0, 1.0);
  const std::vector<Complex> nodes{Complex(0.2, 0.3), Complex(0.7, 0.6), Complex(0.5, 0.85), Complex(0.1, 0.7)};
  const std::vector<Complex> residues{0.4, -0.7, 0.5, -0.2};
  const Complex p = nodes[0], q = nodes[1];
  const Complex d = (q - p) / std::abs(q - p);
  const double eps = 1e-7;
  Complex expected = 0.0;
  // endpoint P: integrate from P + eps d, add back log(eps d)
  expected += residues[0] * (continued_log_change(p, p + eps * d, q, tau) + std::log(eps * d));
  // endpoint Q: integrate to Q - eps d, drop log(-eps d)
  expected += residues[1] * (continued_log_change(q, p, q - eps * d, tau) - std::log(-eps * d));
  for (std::size_t h = 2; h < nodes.size(); ++h) expected += residues[h] * continued_log_change(nodes[h], p, q, tau);
  const Complex computed = elliptic_segment_integral(nodes, residues, 0, 1, tau);
  CHECK(std::abs(computed - expected) < 1e-9);
}

TEST_CASE("jacobi theta_1 identities") {
  const Complex tau(0.2, 0.9);
  const Complex u(0.31, 0.17);
  CHECK(std::abs(jacobi_theta1(-u, tau) + jacobi_theta1(u, tau)) < 1e-14);
  CHECK(std::abs(jacobi_theta1(u + 1.0, tau) + jacobi_theta1(u, tau)) < 1e-14);
  const Complex quasi = -std::exp(-kI * kPi * tau - 2.0 * kI * kPi * u) * jacobi_theta1(u, tau);
  CHECK(std::abs(jacobi_theta1(u + tau, tau) - quasi) < 1e-13);
  const double h = 1e-5;
  const Complex fd = (std::log(jacobi_theta1(u + h, tau)) - std::log(jacobi_theta1(u - h, tau))) / (2.0 * h);
  CHECK(std::abs(log_theta1_derivative(u, tau, 1) - fd) < 1e-8);
}

TEST_CASE("marked components are validated") {
  const auto curve = single_loop("2");
  auto nodes = json{{"e+", 1.0}, {"e-", 1.0}};
  CHECK(error_of(curve, marked("v", {{"v", {{"genus", 0}, {"nodes", nodes}}}})).find("v") != std::string::npos);
  nodes = json{{"e+", 1.0}, {"e-", -1.0}};
  const auto collide = error_of(curve, marked("v", {{"v", {{"genus", 0}, {"nodes", nodes}, {"base_point", 1.0}}}}));
  CHECK(collide.find("base_point") != std::string::npos);
  const auto missing = error_of(curve, marked("v", {{"v", {{"genus", 0}, {"nodes", {{"e+", 1.0}}}}}}));
  CHECK(missing.find("e-") != std::string::npos);
  CHECK(error_of(curve, marked("v", {{"v", {{"genus", 0}, {"nodes", nodes}}}}, 3)) != "no error");
  const auto torus = single_loop("2", 1);
  CHECK(error_of(torus, marked("v", {{"v", {{"genus", 1}, {"tau", "-i"}, {"nodes", nodes}}}})) != "no error");
}

TEST_CASE("load component data: round trip and rejections") {
  const auto data = checks::build_pipeline(checks::bundled_example("elliptic_loop")).data;
  const json doc = to_json(data);
  const auto loaded = load_component_data(doc);
  CHECK(to_json(loaded) == doc);
  CHECK(loaded.b0 == data.b0);
  CHECK(loaded.q == data.q);

  json bad_period = doc;
  bad_period["vertices"][0]["B_v"] = json::array({json::array({json::array({0.0, -1.0})})});
  try {
    load_component_data(bad_period);
    FAIL("accepted a B_v with negative imaginary part");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("B_v") != std::string::npos);
  }

  const auto two = checks::build_pipeline(checks::bundled_example("two_loops")).data;
  json asymmetric = to_json(two);
  asymmetric["B0"][0][1] = json::array({0.5, 0.0});
  try {
    load_component_data(asymmetric);
    FAIL("accepted an asymmetric B0");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("B0") != std::string::npos);
  }

  json small_order = to_json(two);
  small_order["order"] = 2;
  CHECK_THROWS_AS(load_component_data(small_order), ValidationError);

  const auto curve = checks::bundled_example("two_loops").curve;
  CHECK_NOTHROW(check_compatible(two, curve));
  CHECK_THROWS_AS(check_compatible(data, curve), ValidationError);
}

#include "support.hpp"

#include "tropkp/errors.hpp"
#include "tropkp/tau.hpp"

#include <doctest.h>

using namespace tropkp;
using namespace tropkp::test;

namespace {

// tau(t) * exp(a + b t_1); u and the KP residual must not change.
class GaugedTau : public TauFunction {
 public:
  GaugedTau(const TauFunction& inner, Complex a, Complex b) : inner_(inner), a_(a), b_(b) {}

  std::size_t times() const override { return inner_.times(); }

  TauExpansion expand(std::span<const Complex> t0, const std::vector<Series>& displacement) const override {
    TauExpansion e = inner_.expand(t0, displacement);
    const Complex c0 = a_ + b_ * t0[0];
    Series gauge = (b_ * displacement[0]).exp();
    gauge *= std::exp(Complex(0.0, c0.imag()));
    e.scaled = e.scaled * gauge;
    e.log_scale += c0.real();
    return e;
  }

 private:
  const TauFunction& inner_;
  Complex a_, b_;
};

checks::Pipeline pipeline(const char* name) { return checks::build_pipeline(checks::bundled_example(name)); }

std::vector<Complex> times(std::initializer_list<Complex> t, std::size_t m = 4) {
  std::vector<Complex> out(t);
  out.resize(m, 0.0);
  return out;
}

// Exponent of the x = 1 term of the single loop tau.
Complex soliton_exponent(const checks::Pipeline& p, const ComplexVector& c, std::span<const Complex> t) {
  Complex e = kPi * kI * (p.data.b0(0, 0) + 2.0 * c(0));
  for (std::size_t m = 0; m < t.size(); ++m) e += 2.0 * kPi * kI * p.data.r_trop[m](0) * t[m];
  return e;
}

}  // namespace

TEST_CASE("family tau at t = 0 is theta") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  const auto family = assemble_family(p.bc, p.data);
  const FamilyTau tau(family, p.data, ex.c, 1e-3);
  const auto t = times({});
  const Complex expected = theta(family.siegel_at(1e-3), ex.c).value;
  CHECK(std::abs(tau.value(t) - expected) < 1e-14 * std::abs(expected));
}

TEST_CASE("family tau matches theta with the time shift") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  const auto family = assemble_family(p.bc, p.data);
  const FamilyTau tau(family, p.data, ex.c, 1e-3);
  const auto t = times({0.3, -0.2, 0.1, 0.05});
  ComplexVector shifted = ex.c;
  for (std::size_t m = 0; m < 4; ++m) shifted += p.data.r_trop[m] * t[m];
  const Complex expected = theta(family.siegel_at(1e-3), shifted).value;  // q == 0
  CHECK(std::abs(tau.value(t) - expected) < 1e-13 * std::abs(expected));
}

TEST_CASE("family tau with quadratic prefactor") {
  const auto p = pipeline("elliptic_loop");
  const auto ex = checks::bundled_example("elliptic_loop");
  const auto family = assemble_family(p.bc, p.data);
  const FamilyTau tau(family, p.data, ex.c, 1e-2);
  const auto t = times({0.2, 0.1, -0.1, 0.05});
  ComplexVector shifted = ex.c;
  Complex quad = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    shifted(0) += p.data.r_vertex[m](0) * t[m];
    shifted(1) += p.data.r_trop[m](0) * t[m];
    for (std::size_t n = 0; n < 4; ++n) quad += 0.5 * p.data.q(n, m) * t[n] * t[m];
  }
  const Complex expected = std::exp(quad) * theta(family.siegel_at(1e-2), shifted).value;
  CHECK(std::abs(tau.value(t) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("family tau rejects a vanishing theta") {
  const auto p = pipeline("single_loop");
  const auto family = assemble_family(p.bc, p.data);
  // theta(Z, z) vanishes at z = (1 + Z) / 2
  ComplexVector c(1);
  c(0) = 0.5 * (1.0 + family.matrix_at(1e-2)(0, 0));
  CHECK_THROWS_AS(FamilyTau(family, p.data, c, 1e-2), ValidationError);
}

TEST_CASE("genus zero: tau is identically 1") {
  const auto curve = make_curve({{"v", 0}}, {});
  const nlohmann::json comp{{"kind", "marked"}, {"base_vertex", "v"},
                            {"vertices", {{"v", {{"genus", 0}, {"nodes", nlohmann::json::object()}, {"base_point", "inf"}}}}}};
  const auto p = checks::build_pipeline(curve, comp);
  const auto family = assemble_family(p.bc, p.data);
  const FamilyTau family_tau(family, p.data, ComplexVector(0), 0.5);
  const LimitTau limit_tau(p.bc, p.data, RationalVector{}, ComplexVector(0));
  const auto t = times({0.4, 1.0, -2.0});
  CHECK(family_tau.value(t) == Complex(1.0));
  CHECK(limit_tau.value(t) == Complex(1.0));
  CHECK(u_from_tau(limit_tau, 0.3, 0.1, 0.2) == Complex(0.0));
  for (const auto& w : wavefunction_coeffs(limit_tau, t, 3)) CHECK(w == Complex(0.0));
}

TEST_CASE("limit tau: 1-soliton") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  CHECK(tau.points().size() == 2);
  for (double x : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
    const auto t = times({x, 0.3, -0.4});
    const Complex e = soliton_exponent(p, ex.c, t);
    CHECK(std::abs(tau.value(t) - (1.0 + std::exp(e))) < 1e-13 * std::abs(1.0 + std::exp(e)));
    // nodes 1, -1: exponent -(kappa^m - lambda^m) t_m
    const Complex e_closed = soliton_exponent(p, ex.c, times({})) - 2.0 * t[0] - 2.0 * t[2];
    CHECK(std::abs(e - e_closed) < 1e-14);

    // u = a1^2 e / (1 + e)^2
    const Complex a1 = -2.0;
    const Complex ee = std::exp(e);
    const Complex u = a1 * a1 * ee / ((1.0 + ee) * (1.0 + ee));
    CHECK(std::abs(u_from_tau(tau, x, 0.3, -0.4) - u) < 1e-12);
    CHECK(std::abs(u.imag()) < 1e-14);
  }
  // peak height (kappa - lambda)^2 / 4 = 1 where the exponent vanishes
  const double x_peak = soliton_exponent(p, ex.c, times({})).real() / 2.0;
  CHECK(std::abs(u_from_tau(tau, x_peak, 0.0, 0.0) - 1.0) < 1e-12);
}

TEST_CASE("limit tau: 2-soliton has four terms") {
  const auto p = pipeline("two_loops");
  const auto ex = checks::bundled_example("two_loops");
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  REQUIRE(tau.points().size() == 4);
  const auto t = times({0.3, -0.1, 0.2, 0.1});
  Complex expected = 0.0;
  for (int x1 : {0, 1}) {
    for (int x2 : {0, 1}) {
      const double x[2] = {double(x1), double(x2)};
      Complex e = 0.0;
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) e += kPi * kI * x[j] * p.data.b0(j, k) * x[k];
        Complex z = ex.c(j);
        for (std::size_t m = 0; m < 4; ++m) z += p.data.r_trop[m](j) * t[m];
        e += 2.0 * kPi * kI * z * x[j];
      }
      expected += std::exp(e);
    }
  }
  CHECK(std::abs(tau.value(t) - expected) < 1e-13 * std::abs(expected));
}

TEST_CASE("limit tau: soliton on an elliptic background") {
  const auto p = pipeline("elliptic_loop");
  const auto ex = checks::bundled_example("elliptic_loop");
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  const auto t = times({0.4, -0.3, 0.2, 0.1});
  ComplexMatrix bv(1, 1);
  bv(0, 0) = p.data.vertices[0].period(0, 0);
  Complex quad = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    for (std::size_t m = 0; m < 4; ++m) quad += 0.5 * p.data.q(n, m) * t[n] * t[m];
  }
  Complex expected = 0.0;
  for (int x : {0, 1}) {
    Complex z = ex.c(1), zv = ex.c(0) + p.data.vertices[0].coupling(0, 0) * double(x);
    for (std::size_t m = 0; m < 4; ++m) {
      z += p.data.r_trop[m](0) * t[m];
      zv += p.data.r_vertex[m](0) * t[m];
    }
    ComplexVector zvv(1);
    zvv(0) = zv;
    expected += std::exp(kPi * kI * (double(x * x) * p.data.b0(0, 0) + 2.0 * z * double(x))) *
                theta(SiegelMatrix(bv), zvv).value;
  }
  expected *= std::exp(quad);
  CHECK(std::abs(tau.value(t) - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("component taus partition the limit tau") {
  for (const char* name : {"single_loop", "two_loops", "theta_graph", "elliptic_loop"}) {
    const auto p = pipeline(name);
    const auto ex = checks::bundled_example(name);
    const LimitTau limit(p.bc, p.data, ex.alpha, ex.c);
    const auto forms = maximal_forms_at(symbolic_period_matrix(p.basis), p.curve.lengths(), ex.alpha);
    const auto t = times({0.2, 0.1, -0.3, 0.05});
    Complex sum = 0.0;
    std::size_t witnesses = 0;
    for (const auto& f : forms) {
      const auto comp = LimitTau::component(p.bc, p.data, ex.alpha, ex.c, f);
      sum += comp.value(t);
      witnesses += f.witnesses.size();
      if (f.witnesses.size() == limit.points().size()) CHECK(comp.value(t) == limit.value(t));
    }
    CHECK(witnesses == limit.points().size());
    CHECK(std::abs(sum - limit.value(t)) < 1e-13 * std::abs(limit.value(t)));
  }
}

TEST_CASE("single-witness component is one exponential") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  MaximalForm form{LinearForm(1), {{1}}};
  const auto comp = LimitTau::component(p.bc, p.data, ex.alpha, ex.c, form);
  const auto t = times({0.7, 0.2});
  CHECK(std::abs(comp.value(t) - std::exp(soliton_exponent(p, ex.c, t))) < 1e-13);
  CHECK(std::abs(u_from_tau(comp, 0.7, 0.2, 0.0)) < 1e-13);
}

TEST_CASE("kp residual: solitons and a corrupted control") {
  const Grid grid = parse_grid("x:-2:2:11,t2:-2:2:11,t3:-2:2:11");
  {
    const auto p = pipeline("single_loop");
    const auto ex = checks::bundled_example("single_loop");
    const auto r = kp_residual(LimitTau(p.bc, p.data, ex.alpha, ex.c), grid);
    CHECK(r.evaluated == 1331);
    CHECK(r.relative < 1e-10);
    CHECK(r.relative == doctest::Approx(r.max_residual / r.scale));
    CHECK(r.fd_samples > 0);
    CHECK(r.fd_max_deviation < 1e-6);
  }
  const auto p = pipeline("two_loops");
  const auto ex = checks::bundled_example("two_loops");
  const auto r = kp_residual(LimitTau(p.bc, p.data, ex.alpha, ex.c), grid);
  CHECK(r.relative < 1e-8);
  CHECK(r.fd_max_deviation < 1e-6);

  auto corrupted = p.data;
  corrupted.b0(0, 1) += 0.3;
  corrupted.b0(1, 0) += 0.3;
  const auto bad = kp_residual(LimitTau(p.bc, corrupted, ex.alpha, ex.c), grid);
  CHECK(bad.relative > 1e-2);
}

TEST_CASE("kp residual: finite differences on a unit box") {
  const Grid grid = parse_grid("x:-1:1:7,t2:-1:1:7,t3:-1:1:7");
  for (const char* name : {"single_loop", "two_loops", "elliptic_loop", "theta_graph"}) {
    const auto p = pipeline(name);
    const auto ex = checks::bundled_example(name);
    const auto r = kp_residual(LimitTau(p.bc, p.data, ex.alpha, ex.c), grid);
    CHECK(r.fd_samples >= 10);
    CHECK(r.fd_max_deviation < 1e-7);
  }
}

TEST_CASE("kp residual: elliptic background") {
  const auto p = pipeline("elliptic_loop");
  const auto ex = checks::bundled_example("elliptic_loop");
  const auto r = kp_residual(LimitTau(p.bc, p.data, ex.alpha, ex.c), parse_grid("x:-2:2:5,t2:-2:2:5,t3:-2:2:5"));
  CHECK(r.excluded == 0);
  CHECK(r.relative < 1e-8);
  CHECK(r.fd_max_deviation < 1e-6);
}

TEST_CASE("u is real on real grids for real data") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  for (const auto& point : u_grid(tau, parse_grid("x:-2:2:5,t2:-2:2:3,t3:-2:2:3"))) {
    CHECK_FALSE(point.excluded);
    CHECK(std::abs(point.u.imag()) < 1e-12);
  }
}

TEST_CASE("gauge invariance of u and the residual") {
  const Grid grid = parse_grid("x:-2:2:5,t2:-1:1:3,t3:-1:1:3");
  for (const char* name : {"two_loops", "elliptic_loop"}) {
    const auto p = pipeline(name);
    const auto ex = checks::bundled_example(name);
    const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
    const GaugedTau gauged(tau, Complex(0.7, -0.4), Complex(-1.3, 0.6));
    const auto plain = u_grid(tau, grid);
    const auto moved = u_grid(gauged, grid);
    REQUIRE(plain.size() == moved.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
      CHECK(std::abs(plain[i].u - moved[i].u) < 1e-12 * std::max(1.0, std::abs(plain[i].u)));
    }
    const auto a = kp_residual(tau, grid);
    const auto b = kp_residual(gauged, grid);
    CHECK(a.relative < 1e-8);
    CHECK(b.relative < 1e-8);
  }
}

TEST_CASE("s-consistency of the regularised family tau") {
  checks::Rng rng(131);
  for (const char* name : {"single_loop", "two_loops"}) {
    const auto p = pipeline(name);
    const auto ex = checks::bundled_example(name);
    const LimitTau limit(p.bc, p.data, ex.alpha, ex.c);
    const auto family =
        FamilyTau::regularized(assemble_family(p.bc, p.data), p.data, ex.alpha, ex.c, 1e-5);
    for (int k = 0; k < 5; ++k) {
      std::vector<Complex> t(4);
      for (auto& ti : t) ti = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      const Complex a = family.value(t), b = limit.value(t);
      CHECK(std::abs(a - b) < 1e-5 * std::abs(b));
    }
  }
}

TEST_CASE("wavefunction coefficients of the 1-soliton") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  const auto t = times({0.3, -0.2, 0.4});
  const auto w = wavefunction_coeffs(tau, t, 2);
  REQUIRE(w.size() == 2);
  const Complex ee = std::exp(soliton_exponent(p, ex.c, t));
  const Complex ratio = ee / (1.0 + ee);
  std::vector<Complex> a(4);
  for (std::size_t m = 0; m < 4; ++m) a[m] = 2.0 * kPi * kI * p.data.r_trop[m](0);
  CHECK(std::abs(w[0] - (-a[0] * ratio)) < 1e-12);
  CHECK(std::abs(w[1] - ratio * (a[0] * a[0] / 2.0 - a[1] / 2.0)) < 1e-12);

  // w_1 = -d/dt1 log tau; its x-derivative is -u
  const double h = 1e-4;
  const auto w_at = [&](double x) { return wavefunction_coeffs(tau, times({x, -0.2, 0.4}), 1)[0]; };
  const Complex dw = (w_at(0.3 + h) - w_at(0.3 - h)) / (2.0 * h);
  CHECK(std::abs(dw + u_from_tau(tau, 0.3, -0.2, 0.4)) < 1e-7);
}

TEST_CASE("grid parsing") {
  const Grid g = parse_grid("x:-1:1:3,t2:0:2:2");
  CHECK(g.x.count == 3);
  CHECK(g.t2.lo == 0.0);
  CHECK(g.t3.count == 11);
  CHECK(g.size() == 3 * 2 * 11);
  CHECK_THROWS_AS(parse_grid("x:-1:1:1"), ValidationError);
  CHECK_THROWS_AS(parse_grid("x:1:-1:3"), ValidationError);
  CHECK_THROWS_AS(parse_grid("q:0:1:3"), ValidationError);
  CHECK_THROWS_AS(parse_grid("x:0:1"), ValidationError);
}

TEST_CASE("tau settings are validated") {
  const auto p = pipeline("single_loop");
  const auto ex = checks::bundled_example("single_loop");
  CHECK_THROWS_AS(LimitTau(p.bc, p.data, ex.alpha, ex.c, TauSettings{2, 1e-14}), ValidationError);
  CHECK_THROWS_AS(LimitTau(p.bc, p.data, ex.alpha, ex.c, TauSettings{5, 1e-14}), ValidationError);
}

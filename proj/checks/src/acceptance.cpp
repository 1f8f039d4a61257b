#include "tropkp/checks/acceptance.hpp"

#include "tropkp/checks/bundled.hpp"
#include "tropkp/checks/oracles.hpp"
#include "tropkp/checks/random_instances.hpp"
#include "tropkp/degeneration.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/tau.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace tropkp::checks {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(2) << std::scientific << v;
  return s.str();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

// Random curve and alpha whose maximisers provably lie in the box.
std::pair<TropicalCurve, RationalVector> certified_instance(Rng& rng, int box) {
  for (;;) {
    TropicalCurve curve = random_curve(rng);
    const auto basis = cycle_basis(curve);
    const auto bc = period_matrix(curve, basis);
    for (int attempt = 0; attempt < 20; ++attempt) {
      RationalVector alpha = random_alpha(rng, bc.dimension());
      if (box_contains_optimum(bc, alpha, box)) return {std::move(curve), std::move(alpha)};
    }
  }
}

Outcome criterion_1(const AcceptanceOptions& options) {
  Rng rng(options.seed + 1);
  constexpr int kInstances = 50, kBox = 12;
  int mismatches = 0, max_h1 = 0;
  std::size_t visited = 0, decoder_nodes = 0;
  for (int i = 0; i < kInstances; ++i) {
    const auto [curve, alpha] = certified_instance(rng, kBox);
    const auto basis = cycle_basis(curve);
    const auto bc = period_matrix(curve, basis);
    max_h1 = std::max(max_h1, static_cast<int>(bc.dimension()));
    const DelaunaySet d = delaunay_set(bc, alpha);
    const BoxSearch oracle = exhaustive_delaunay(bc, alpha, kBox);
    visited += oracle.visited;
    decoder_nodes += closest_vectors(bc, alpha).nodes_visited;
    if (d.value != oracle.value || d.points != oracle.points || tropical_theta(bc, alpha) != oracle.value) ++mismatches;
  }
  Outcome out;
  out.ok = mismatches == 0;
  out.detail = std::to_string(kInstances - mismatches) + "/" + std::to_string(kInstances) +
               " exact matches vs exhaustive box 12 (max h1 " + std::to_string(max_h1) + ")";
  out.metrics = {{"instances", kInstances}, {"mismatches", mismatches}, {"max_h1", max_h1},
                 {"oracle_points", visited}, {"decoder_nodes", decoder_nodes}};
  return out;
}

Outcome criterion_2(const AcceptanceOptions& options) {
  Rng rng(options.seed + 2);
  constexpr int kInstances = 20, kBox = 12;
  int failures = 0, unstable = 0;
  for (int i = 0; i < kInstances; ++i) {
    const auto [curve, alpha] = certified_instance(rng, kBox);
    const auto basis = cycle_basis(curve);
    const auto bsym = symbolic_period_matrix(basis);
    const RationalVector l = curve.lengths();
    const DecompositionReport report = verify_decomposition(bsym, l, alpha);
    const BoxSearch oracle = exhaustive_delaunay(specialize(bsym, l), alpha, kBox);

    // Global maximal elements on a box holding D: the forms achieving the
    // maximum at l must reproduce Theta and partition D.
    std::int64_t reach = 0;
    for (const auto& x : oracle.points) {
      for (auto xi : x) reach = std::max(reach, xi < 0 ? -xi : xi);
    }
    const int radius = std::max<int>(1, static_cast<int>((reach + 1) / 2));
    const MaximalElements global = maximal_elements(bsym, alpha, radius);
    if (!global.stable) ++unstable;
    Rational best;
    bool first = true;
    for (const auto& f : global.forms) {
      const Rational v = f.form.evaluate(l);
      if (first || v > best) best = v;
      first = false;
    }
    std::vector<LatticePoint> covered;
    for (const auto& f : global.forms) {
      if (f.form.evaluate(l) == best) covered.insert(covered.end(), f.witnesses.begin(), f.witnesses.end());
    }
    std::sort(covered.begin(), covered.end());
    const bool global_ok = best == oracle.value && covered == oracle.points;
    if (!report.passed() || report.theta != oracle.value || !global_ok) ++failures;
  }
  Outcome out;
  out.ok = failures == 0;
  out.detail = std::to_string(kInstances - failures) + "/" + std::to_string(kInstances) +
               " exact (Theta = max form value, witnesses partition D)";
  out.metrics = {{"instances", kInstances}, {"failures", failures}, {"unstable_maximal_sets", unstable}};
  return out;
}

Outcome criterion_3(const AcceptanceOptions& options) {
  Rng rng(options.seed + 3);
  constexpr int kInstances = 100;
  double worst_qp = 0.0, worst_even = 0.0, worst_literal = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    const int g = 1 + i % 4;
    const SiegelMatrix z(random_siegel(rng, g));
    ComplexVector v(g);
    Eigen::VectorXd shift(g);
    for (int k = 0; k < g; ++k) shift(k) = random_complex(rng, -0.5, 0.5).real();
    const Eigen::VectorXd im = z.imag() * shift;
    for (int k = 0; k < g; ++k) v(k) = Complex(random_complex(rng, -0.5, 0.5).real(), im(k));
    for (int k = 0; k < g; ++k) {
      const double r = quasi_periodicity_residual(z, v, static_cast<std::size_t>(k));
      worst_qp = std::max(worst_qp, r);
      const double f = std::exp(std::numbers::pi * (z.imag()(k, k) + 2.0 * v(k).imag()));
      worst_literal = std::max(worst_literal, r * f);
    }
    const ThetaValue plus = theta(z, v);
    const ThetaValue minus = theta(z, -v);
    const double even = std::abs(plus.scaled - minus.scaled * std::exp(minus.log_scale - plus.log_scale)) / std::abs(plus.scaled);
    worst_even = std::max(worst_even, even);
  }
  const ComplexMatrix zi = ComplexMatrix::Constant(1, 1, Complex(0.0, 1.0));
  const Complex lib = theta(SiegelMatrix(zi), ComplexVector::Zero(1)).value;
  const Complex direct = theta_box_sum(zi, ComplexVector::Zero(1), 30);
  const double value_error = std::abs(lib - direct);
  Outcome out;
  out.ok = worst_qp < 1e-10 && worst_even < 1e-12 && value_error < 1e-12;
  out.detail = "quasi-periodicity " + sci(worst_qp) + " (<1e-10), evenness " + sci(worst_even) +
               " (<1e-12), theta([i],0) vs direct sum " + sci(value_error) + " (<1e-12)";
  out.metrics = {{"instances", kInstances}, {"max_quasi_periodicity_residual", worst_qp},
                 {"max_residual_over_theta_z", worst_literal},
                 {"max_evenness_residual", worst_even}, {"theta_i_0", lib.real()}, {"direct_sum_error", value_error}};
  return out;
}

Outcome criterion_4(const AcceptanceOptions&) {
  const std::vector<double> s_list{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  Outcome out;
  out.ok = true;
  for (const char* name : {"single_loop", "elliptic_loop"}) {
    const Example ex = bundled_example(name);
    const Pipeline p = build_pipeline(ex);
    const DegenerationFamily family = assemble_family(p.bc, p.data);
    const ConvergenceReport report = convergence_report(family, p.data, ex.alpha, ex.c, s_list);
    const double last = report.rows.back().rel_error;
    const bool ok = report.monotone && last < 1e-6;
    out.ok = out.ok && ok;
    out.detail += std::string(out.detail.empty() ? "" : "; ") + name + (report.monotone ? " monotone" : " NOT monotone") +
                  ", rel err at 1e-5 " + sci(last);
    out.metrics[name] = to_json(report);
  }
  return out;
}

double residual_of(const Pipeline& p, const Example& ex, const Grid& grid) {
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  return kp_residual(tau, grid).relative;
}

Outcome criterion_5(const AcceptanceOptions&) {
  const Grid grid = parse_grid("x:-2:2:11,t2:-2:2:11,t3:-2:2:11");
  const Example one = bundled_example("single_loop");
  const Example two = bundled_example("two_loops");
  const Pipeline p1 = build_pipeline(one);
  Pipeline p2 = build_pipeline(two);
  const double r1 = residual_of(p1, one, grid);
  const double r2 = residual_of(p2, two, grid);
  p2.data.b0(0, 1) += 0.3;
  p2.data.b0(1, 0) += 0.3;
  const double bad = residual_of(p2, two, grid);
  Outcome out;
  out.ok = r1 < 1e-10 && r2 < 1e-8 && bad > 1e-2;
  out.detail = "1-soliton " + sci(r1) + " (<1e-10), 2-soliton " + sci(r2) + " (<1e-8), corrupted B0 " + sci(bad) +
               " (>1e-2)";
  out.metrics = {{"one_soliton", r1}, {"two_soliton", r2}, {"corrupted", bad}};
  return out;
}

Outcome criterion_6(const AcceptanceOptions&) {
  const Grid grid = parse_grid("x:-2:2:11,t2:-2:2:11,t3:-2:2:11");
  const Example ex = bundled_example("elliptic_loop");
  const Pipeline p = build_pipeline(ex);
  const LimitTau tau(p.bc, p.data, ex.alpha, ex.c);
  const ResidualReport report = kp_residual(tau, grid);
  Outcome out;
  out.ok = report.relative < 1e-6;
  out.detail = "relative residual " + sci(report.relative) + " (<1e-6), " + std::to_string(report.excluded) +
               " points excluded";
  out.metrics = to_json(report);
  return out;
}

Outcome criterion_7(const AcceptanceOptions& options) {
  Rng rng(options.seed + 7);
  constexpr double kS = 1e-5;
  // The remainder is C(t) s^2 with C(t) growing exponentially in the soliton
  // phases; t is sampled in [-1/2, 1/2]^M and [-1, 1]^M is reported only.
  double worst = 0.0, worst_wide = 0.0;
  nlohmann::json per_example = nlohmann::json::object();
  for (const char* name : {"single_loop", "two_loops", "elliptic_loop"}) {
    const Example ex = bundled_example(name);
    const Pipeline p = build_pipeline(ex);
    const LimitTau limit(p.bc, p.data, ex.alpha, ex.c);
    const FamilyTau family = FamilyTau::regularized(assemble_family(p.bc, p.data), p.data, ex.alpha, ex.c, kS);
    auto sample = [&](double half_width) {
      double w = 0.0;
      for (int i = 0; i < 5; ++i) {
        std::vector<Complex> t(limit.times());
        for (auto& ti : t) ti = random_complex(rng, -half_width, half_width).real();
        const Complex a = family.value(t);
        const Complex b = limit.value(t);
        w = std::max(w, std::abs(a - b) / std::abs(b));
      }
      return w;
    };
    const double narrow = sample(0.5);
    const double wide = sample(1.0);
    per_example[name] = {{"max_relative_error", narrow}, {"max_relative_error_wide", wide}};
    worst = std::max(worst, narrow);
    worst_wide = std::max(worst_wide, wide);
  }
  Outcome out;
  out.ok = worst < 1e-5;
  out.detail = "max relative error at s=1e-5, 5 random t in [-1/2,1/2]^4 per example: " + sci(worst) +
               " (<1e-5); t in [-1,1]^4: " + sci(worst_wide);
  out.metrics = {{"max_relative_error", worst}, {"max_relative_error_wide", worst_wide}, {"examples", per_example}};
  return out;
}

// Random marked curve on the two-loop or theta graph with a random base
// point and polynomial chart.
MarkedCurve random_marking(Rng& rng, const TropicalCurve& curve, bool finite_base) {
  MarkedCurve marked;
  marked.order = 4;
  marked.base_vertex = curve.vertices().front().id;
  auto far_enough = [](const std::vector<Complex>& pts, Complex z) {
    return std::all_of(pts.begin(), pts.end(), [&](Complex q) { return std::abs(q - z) >= 0.4; });
  };
  for (std::size_t v = 0; v < curve.vertex_count(); ++v) {
    MarkedComponent comp;
    comp.vertex = curve.vertices()[v].id;
    std::vector<Complex> used;
    for (std::size_t e = 0; e < curve.edge_count(); ++e) {
      for (int sign : {1, -1}) {
        const std::size_t end = sign > 0 ? curve.edges()[e].tail : curve.edges()[e].head;
        if (end != v) continue;
        Complex z;
        do {
          z = random_complex(rng, -2.0, 2.0);
        } while (!far_enough(used, z));
        used.push_back(z);
        comp.nodes[half_edge_label(curve, {e, sign})] = z;
      }
    }
    if (v == 0 && finite_base) {
      Complex p;
      do {
        p = random_complex(rng, -2.0, 2.0);
      } while (!far_enough(used, p));
      marked.base_point = p;
    }
    marked.components.push_back(std::move(comp));
  }
  const double modulus = std::uniform_real_distribution<double>(0.5, 1.5)(rng);
  const double angle = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
  marked.chart.coeffs = {std::polar(modulus, angle), random_complex(rng, -0.4, 0.4), random_complex(rng, -0.4, 0.4)};
  return marked;
}

Outcome criterion_8(const AcceptanceOptions& options) {
  Rng rng(options.seed + 8);
  constexpr int kConfigs = 20;
  const TropicalCurve curves[2] = {bundled_example("two_loops").curve, bundled_example("theta_graph").curve};
  double worst_b0 = 0.0, worst_r = 0.0, worst_q = 0.0, worst_asym = 0.0;
  for (int i = 0; i < kConfigs; ++i) {
    const TropicalCurve& curve = curves[i % 2];
    const CycleBasis basis = cycle_basis(curve);
    const MarkedCurve marked = random_marking(rng, curve, (i / 2) % 2 == 1);
    const ComponentData data = rational_component_data(curve, basis, marked);
    const ComplexMatrix raw = path_b0_raw(curve, basis, marked);
    for (Eigen::Index j = 0; j < raw.rows(); ++j) {
      for (Eigen::Index k = j; k < raw.cols(); ++k) {
        worst_b0 = std::max(worst_b0, std::abs(data.b0(j, k) - raw(j, k)) / std::max(1.0, std::abs(raw(j, k))));
        worst_asym = std::max(worst_asym, std::abs(data.b0_asymmetry(j, k) - (raw(k, j) - raw(j, k))));
      }
    }
    const auto r = contour_r_trop(curve, basis, marked);
    for (std::size_t m = 0; m < r.size(); ++m) {
      for (Eigen::Index j = 0; j < r[m].size(); ++j) {
        worst_r = std::max(worst_r, std::abs(data.r_trop[m](j) - r[m](j)) / std::max(1.0, std::abs(r[m](j))));
      }
    }
    worst_q = std::max(worst_q, max_abs_diff(data.q, data.q.transpose()));
  }
  Outcome out;
  out.ok = worst_b0 < 1e-9 && worst_r < 1e-9 && worst_q < 1e-9 && worst_asym < 1e-9;
  out.detail = "B0 vs path quadrature " + sci(worst_b0) + ", r_trop vs contour " + sci(worst_r) +
               ", |q - q^T| " + sci(worst_q) + " (all <1e-9)";
  out.metrics = {{"configurations", kConfigs}, {"max_b0_error", worst_b0}, {"max_b0_asymmetry_error", worst_asym},
                 {"max_r_trop_error", worst_r}, {"max_q_asymmetry", worst_q}};
  return out;
}

struct CriterionSpec {
  const char* title;
  double time_limit;
  Outcome (*run)(const AcceptanceOptions&);
};

const CriterionSpec kCriteria[kCriterionCount] = {
    {"tropical theta / Delaunay vs exhaustive search", 10.0, criterion_1},
    {"tropical theta decomposition into maximal forms", 5.0, criterion_2},
    {"riemann theta quasi-periodicity, evenness, direct sum", 10.0, criterion_3},
    {"regularized tropical limit convergence", 30.0, criterion_4},
    {"KP residual for 1- and 2-soliton limits", 30.0, criterion_5},
    {"KP residual for the elliptic-background limit", 60.0, criterion_6},
    {"s-consistency of the family tau with the limit tau", 30.0, criterion_7},
    {"component data vs contour and path quadrature", 30.0, criterion_8},
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > kCriterionCount) throw ValidationError("criterion", "expected 1.." + std::to_string(kCriterionCount));
  const CriterionSpec& spec = kCriteria[id - 1];
  CriterionResult result;
  result.id = id;
  result.title = spec.title;
  result.time_limit = spec.time_limit;
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = spec.run(options);
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.passed = outcome.ok && result.seconds < result.time_limit;
  result.detail = std::move(outcome.detail);
  result.metrics = std::move(outcome.metrics);
  return result;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << " (" << std::fixed
    << std::setprecision(2) << r.seconds << " s / " << std::setprecision(0) << r.time_limit << " s)";
  return s.str();
}

nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id},           {"title", r.title},           {"passed", r.passed},   {"seconds", r.seconds},
          {"time_limit", r.time_limit}, {"detail", r.detail}, {"metrics", r.metrics}};
}

}  // namespace tropkp::checks

#include "tropkp/checks/acceptance.hpp"
#include "tropkp/checks/bundled.hpp"
#include "tropkp/degeneration.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"
#include "tropkp/tau.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace tropkp;
using nlohmann::json;

enum Exit { kOk = 0, kValidation = 1, kPrecision = 2, kInconsistency = 3 };

struct Config {
  std::string input;
  std::string example;
  std::string components;
  std::string alpha;
  std::string c;
  std::string z;
  std::string s_list;
  double s = 1e-3;
  double tol = 1e-10;
  int order = 4;
  int times = 4;
  std::string grid = "x:-2:2:11,t2:-2:2:11,t3:-2:2:11";
  std::string out;
  std::string format = "json";
  // tau
  std::string kind = "limit";
  std::string t;
  int form = -1;
  int wk = 0;
  bool regularized = false;
  // maximal
  int radius = 2;
  // theta
  std::string theta_matrix;
  std::string derivative;
  // verify
  std::uint64_t seed = checks::AcceptanceOptions{}.seed;
};

std::vector<Complex> parse_complex_list(const std::string& text, const std::string& flag) {
  std::vector<Complex> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(parse_complex(item));
    } catch (const ValidationError& e) {
      throw ValidationError(flag, e.what());
    }
  }
  return out;
}

ComplexVector to_vector(const std::vector<Complex>& v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// Curve, components, alpha and c from --example / --input and overrides.
struct Context {
  checks::Example example;
  bool has_components = false;
};

Context load(const Config& cfg, bool need_components) {
  if (cfg.input.empty() == cfg.example.empty()) {
    throw ValidationError("--input", "give exactly one of --input FILE or --example NAME");
  }
  const json doc = cfg.example.empty() ? read_json_file(cfg.input) : checks::bundled_document(cfg.example);
  const bool bundle = doc.is_object() && doc.contains("curve");
  Context ctx{bundle ? checks::example_from_json(doc)
                     : checks::Example{cfg.input, "", tropical_curve_from_json(doc), json{}, {}, {}},
              bundle};
  const Genus g = genus(ctx.example.curve);
  if (!bundle) {
    ctx.example.alpha.assign(static_cast<std::size_t>(g.h1), Rational(0));
    ctx.example.c = ComplexVector::Zero(g.g);
  }
  if (!cfg.components.empty()) {
    ctx.example.components = read_json_file(cfg.components);
    ctx.has_components = true;
  }
  if (need_components && !ctx.has_components) throw ValidationError("--components", "a components document is required");
  if (!cfg.alpha.empty()) {
    ctx.example.alpha = parse_rational_list(cfg.alpha);
    if (ctx.example.alpha.size() != static_cast<std::size_t>(g.h1)) {
      throw ValidationError("--alpha", "expected " + std::to_string(g.h1) + " entries");
    }
  }
  if (!cfg.c.empty()) {
    ctx.example.c = to_vector(parse_complex_list(cfg.c, "--c"));
    if (ctx.example.c.size() != g.g) throw ValidationError("--c", "expected " + std::to_string(g.g) + " entries");
  }
  return ctx;
}

checks::Pipeline pipeline(const Context& ctx, const Config& cfg) {
  return checks::build_pipeline(ctx.example, cfg.order);
}

std::vector<double> s_values(const Config& cfg) {
  if (cfg.s_list.empty()) return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> out;
  std::stringstream in(cfg.s_list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("--s", "bad number '" + item + "'");
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0 && out[i] < 1.0)) throw ValidationError("--s", "values must lie in (0, 1)");
    if (i > 0 && !(out[i] < out[i - 1])) throw ValidationError("--s", "values must be strictly decreasing");
  }
  return out;
}

TauSettings tau_settings(const Config& cfg) {
  if (cfg.times < 3) throw ValidationError("--times", "at least 3 times are needed");
  return {static_cast<std::size_t>(cfg.times), std::min(cfg.tol, 1e-14)};
}

// Returns the tau function selected by --kind.
std::unique_ptr<TauFunction> make_tau(const Context& ctx, const checks::Pipeline& p, const Config& cfg) {
  const TauSettings settings = tau_settings(cfg);
  const auto& ex = ctx.example;
  if (cfg.kind == "limit") return std::make_unique<LimitTau>(p.bc, p.data, ex.alpha, ex.c, settings);
  if (cfg.kind == "family") {
    DegenerationFamily family = assemble_family(p.bc, p.data);
    if (cfg.regularized) {
      return std::make_unique<FamilyTau>(FamilyTau::regularized(std::move(family), p.data, ex.alpha, ex.c, cfg.s, settings));
    }
    return std::make_unique<FamilyTau>(std::move(family), p.data, ex.c, cfg.s, settings);
  }
  if (cfg.kind == "component") {
    const auto forms = maximal_forms_at(symbolic_period_matrix(p.basis), p.curve.lengths(), ex.alpha);
    if (cfg.form < 0 || static_cast<std::size_t>(cfg.form) >= forms.size()) {
      throw ValidationError("--form", "expected an index below " + std::to_string(forms.size()));
    }
    return std::make_unique<LimitTau>(
        LimitTau::component(p.bc, p.data, ex.alpha, ex.c, forms[static_cast<std::size_t>(cfg.form)], settings));
  }
  throw ValidationError("--kind", "expected limit, family or component");
}

std::vector<Complex> time_vector(const Config& cfg) {
  std::vector<Complex> t = cfg.t.empty() ? std::vector<Complex>{} : parse_complex_list(cfg.t, "--t");
  if (t.size() > static_cast<std::size_t>(cfg.times)) throw ValidationError("--t", "more values than --times");
  t.resize(static_cast<std::size_t>(cfg.times), 0.0);
  return t;
}

json cmd_analyze(const Config& cfg) {
  const Context ctx = load(cfg, false);
  const auto& curve = ctx.example.curve;
  const Genus g = genus(curve);
  const CycleBasis basis = cycle_basis(curve);
  json out{{"genus", {{"h1", g.h1}, {"g", g.g}}},
           {"basis", to_json(basis, curve)},
           {"period_matrix", to_json(period_matrix(curve, basis))},
           {"symbolic_period_matrix", to_json(symbolic_period_matrix(basis), curve)},
           {"curve", to_json(curve)}};
  if (ctx.has_components) out["component_data"] = to_json(pipeline(ctx, cfg).data);
  return out;
}

json cmd_troptheta(const Config& cfg) {
  const Context ctx = load(cfg, false);
  const auto basis = cycle_basis(ctx.example.curve);
  const auto bc = period_matrix(ctx.example.curve, basis);
  json alpha = json::array();
  for (const auto& a : ctx.example.alpha) alpha.push_back(to_string(a));
  return {{"alpha", alpha}, {"value", to_string(tropical_theta(bc, ctx.example.alpha))},
          {"basis", to_json(basis, ctx.example.curve)}};
}

json cmd_delaunay(const Config& cfg) {
  const Context ctx = load(cfg, false);
  const auto basis = cycle_basis(ctx.example.curve);
  const auto bc = period_matrix(ctx.example.curve, basis);
  json out = to_json(delaunay_set(bc, ctx.example.alpha));
  out["basis"] = to_json(basis, ctx.example.curve);
  return out;
}

json cmd_maximal(const Config& cfg) {
  const Context ctx = load(cfg, false);
  const auto& curve = ctx.example.curve;
  const auto basis = cycle_basis(curve);
  const auto bsym = symbolic_period_matrix(basis);
  const auto l = curve.lengths();
  json at = json::array();
  for (const auto& f : maximal_forms_at(bsym, l, ctx.example.alpha)) at.push_back(to_json(f, curve));
  return {{"at_lengths", at},
          {"global", to_json(maximal_elements(bsym, ctx.example.alpha, cfg.radius), curve)},
          {"decomposition", to_json(verify_decomposition(bsym, l, ctx.example.alpha))},
          {"basis", to_json(basis, curve)}};
}

json cmd_limit_theta(const Config& cfg, std::string& csv) {
  const Context ctx = load(cfg, true);
  const auto p = pipeline(ctx, cfg);
  const DegenerationFamily family = assemble_family(p.bc, p.data);
  ComplexVector zbar = ctx.example.c;
  if (!cfg.z.empty()) {
    zbar = to_vector(parse_complex_list(cfg.z, "--z"));
    if (zbar.size() != static_cast<Eigen::Index>(family.genus())) {
      throw ValidationError("--z", "expected " + std::to_string(family.genus()) + " entries");
    }
  }
  const auto s = s_values(cfg);
  const ConvergenceReport report = convergence_report(family, p.data, ctx.example.alpha, zbar, s, std::min(cfg.tol, 1e-14));
  std::ostringstream rows;
  rows << std::setprecision(17) << "s,lhs_re,lhs_im,rhs_re,rhs_im,abs_error,rel_error,order,bound,monotone\n";
  for (const auto& r : report.rows) {
    rows << r.s << ',' << r.lhs.real() << ',' << r.lhs.imag() << ',' << r.rhs.real() << ',' << r.rhs.imag() << ','
         << r.abs_error << ',' << r.rel_error << ',';
    if (r.order) rows << *r.order;
    rows << ',' << r.bound << ',' << (r.monotone ? 1 : 0) << '\n';
  }
  csv = rows.str();
  return to_json(report);
}

json cmd_tau(const Config& cfg) {
  const Context ctx = load(cfg, true);
  const auto p = pipeline(ctx, cfg);
  const auto tau = make_tau(ctx, p, cfg);
  const auto t = time_vector(cfg);
  const TauExpansion e = tau->at(t);
  json times = json::array();
  for (const auto& ti : t) times.push_back(to_json(ti));
  json out{{"kind", cfg.kind},
           {"t", times},
           {"value", to_json(tau->value(t))},
           {"scaled", to_json(e.scaled[0])},
           {"log_scale", e.log_scale},
           {"u", to_json(u_from_tau(*tau, t[0].real(), t[1].real(), t[2].real()))}};
  if (cfg.kind == "family") out["s"] = cfg.s;
  if (cfg.kind == "component") {
    const auto forms = maximal_forms_at(symbolic_period_matrix(p.basis), p.curve.lengths(), ctx.example.alpha);
    out["form"] = to_json(forms[static_cast<std::size_t>(cfg.form)], p.curve);
  }
  if (cfg.wk > 0) {
    json w = json::array();
    for (const auto& v : wavefunction_coeffs(*tau, t, cfg.wk)) w.push_back(to_json(v));
    out["w"] = w;
  }
  return out;
}

json cmd_u_grid(const Config& cfg, std::string& csv) {
  const Context ctx = load(cfg, true);
  const auto p = pipeline(ctx, cfg);
  const auto tau = make_tau(ctx, p, cfg);
  const Grid grid = parse_grid(cfg.grid);
  const auto points = u_grid(*tau, grid);
  std::ostringstream rows;
  rows << std::setprecision(17) << "x,t2,t3,u_re,u_im,residual_re,residual_im,log_abs_tau,excluded\n";
  json arr = json::array();
  for (const auto& q : points) {
    rows << q.x << ',' << q.t2 << ',' << q.t3 << ',';
    if (q.excluded) {
      rows << ",,,,";
    } else {
      rows << q.u.real() << ',' << q.u.imag() << ',' << q.residual.real() << ',' << q.residual.imag() << ',';
    }
    rows << q.log_abs_tau << ',' << (q.excluded ? 1 : 0) << '\n';
    json entry{{"x", q.x}, {"t2", q.t2}, {"t3", q.t3}, {"excluded", q.excluded}, {"log_abs_tau", q.log_abs_tau}};
    if (!q.excluded) {
      entry["u"] = to_json(q.u);
      entry["residual"] = to_json(q.residual);
    }
    arr.push_back(entry);
  }
  csv = rows.str();
  return {{"grid", to_json(grid)}, {"points", arr}, {"kind", cfg.kind}};
}

json cmd_kp_residual(const Config& cfg) {
  const Context ctx = load(cfg, true);
  const auto p = pipeline(ctx, cfg);
  const auto tau = make_tau(ctx, p, cfg);
  json out = to_json(kp_residual(*tau, parse_grid(cfg.grid)));
  out["kind"] = cfg.kind;
  return out;
}

json cmd_theta(const Config& cfg) {
  if (cfg.theta_matrix.empty()) throw ValidationError("--Z", "a period matrix is required");
  json zdoc;
  try {
    zdoc = json::parse(cfg.theta_matrix);
  } catch (const json::parse_error& e) {
    throw ValidationError("--Z", e.what());
  }
  const SiegelMatrix zm(complex_matrix_from_json(zdoc, "--Z"));
  ComplexVector z = ComplexVector::Zero(static_cast<Eigen::Index>(zm.genus()));
  if (!cfg.z.empty()) {
    z = to_vector(parse_complex_list(cfg.z, "--z"));
    if (z.size() != static_cast<Eigen::Index>(zm.genus())) throw ValidationError("--z", "dimension mismatch");
  }
  const double tol = cfg.tol;
  ThetaValue v;
  if (cfg.derivative.empty()) {
    v = theta(zm, z, tol);
  } else {
    std::vector<int> order;
    std::stringstream in(cfg.derivative);
    std::string item;
    while (std::getline(in, item, ',')) order.push_back(std::stoi(item));
    if (order.size() != zm.genus()) throw ValidationError("--derivative", "one order per coordinate");
    v = theta_derivative(zm, z, order, tol);
  }
  return {{"value", to_json(v.value)}, {"scaled", to_json(v.scaled)}, {"log_scale", v.log_scale},
          {"truncation_radius", v.radius}, {"bound", v.bound}, {"terms", v.terms}};
}

json cmd_verify(const Config& cfg, std::string& text, bool& passed) {
  checks::AcceptanceOptions options;
  options.seed = cfg.seed;
  json arr = json::array();
  passed = true;
  for (int id = 1; id <= checks::kCriterionCount; ++id) {
    const auto r = checks::run_criterion(id, options);
    text += checks::format_line(r) + "\n";
    std::cerr << checks::format_line(r) << std::endl;
    passed = passed && r.passed;
    arr.push_back(checks::to_json(r));
  }
  return {{"criteria", arr}, {"passed", passed}, {"seed", cfg.seed}};
}

void emit(const Config& cfg, const std::string& body) {
  if (cfg.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw ValidationError("--out", "cannot write '" + cfg.out + "'");
  file << body;
}

void add_input(CLI::App* sub, Config& cfg) {
  sub->add_option("--input", cfg.input, "Curve document, or example document with curve + components");
  sub->add_option("--example", cfg.example, "Bundled example: elliptic_loop, single_loop, theta_graph, two_loops");
  sub->add_option("--alpha", cfg.alpha, "Rational vector, e.g. 1/2,0");
}

void add_components(CLI::App* sub, Config& cfg) {
  sub->add_option("--components", cfg.components, "Components document (marked or component_data)");
  sub->add_option("--c", cfg.c, "Complex vector ((c_v)_v, c), e.g. 0.1,0.25+0.1i");
  sub->add_option("--order", cfg.order, "Expansion order M_order (>= 4)")->check(CLI::Range(4, 32));
  sub->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
}

void add_tau(CLI::App* sub, Config& cfg) {
  sub->add_option("--kind", cfg.kind, "limit | family | component")->check(CLI::IsMember({"limit", "family", "component"}));
  sub->add_option("--s", cfg.s, "Degeneration parameter for --kind family")->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--regularized", cfg.regularized, "Family tau with s^Theta and the shifted argument");
  sub->add_option("--form", cfg.form, "Index of the maximal form for --kind component");
  sub->add_option("--times", cfg.times, "Number of active times M (>= 3)")->check(CLI::Range(3, 32));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tropical curves, degenerating theta functions and KP solutions"};
  app.require_subcommand(1);
  Config cfg;

  auto* analyze = app.add_subcommand("analyze", "Genus, cycle basis, B_C and B_Delta");
  add_input(analyze, cfg);
  analyze->add_option("--components", cfg.components, "Also report component data");
  analyze->add_option("--order", cfg.order, "Expansion order")->check(CLI::Range(4, 32));

  auto* troptheta = app.add_subcommand("troptheta", "Tropical theta value");
  add_input(troptheta, cfg);
  auto* delaunay = app.add_subcommand("delaunay", "Delaunay set");
  add_input(delaunay, cfg);
  auto* maximal = app.add_subcommand("maximal", "Maximal forms at the curve lengths and globally");
  add_input(maximal, cfg);
  maximal->add_option("--radius", cfg.radius, "Box radius of the first enumeration pass")->check(CLI::Range(1, 64));

  auto* limit = app.add_subcommand("limit-theta", "Convergence table of the regularized tropical limit");
  add_input(limit, cfg);
  add_components(limit, cfg);
  limit->add_option("--z", cfg.z, "zbar = ((z_v)_v, z); defaults to c");
  limit->add_option("--s", cfg.s_list, "Strictly decreasing s values, e.g. 1e-1,1e-2");

  auto* tau = app.add_subcommand("tau", "Tau function value, u and w_k at a time vector");
  add_input(tau, cfg);
  add_components(tau, cfg);
  add_tau(tau, cfg);
  tau->add_option("--t", cfg.t, "Times t_1,t_2,...; missing entries are 0");
  tau->add_option("--wk", cfg.wk, "Number of w_k coefficients")->check(CLI::Range(0, 32));

  auto* ugrid = app.add_subcommand("u-grid", "u = d^2 log tau / dx^2 on a grid");
  add_input(ugrid, cfg);
  add_components(ugrid, cfg);
  add_tau(ugrid, cfg);
  ugrid->add_option("--grid", cfg.grid, "x:lo:hi:n,t2:lo:hi:n,t3:lo:hi:n");

  auto* residual = app.add_subcommand("kp-residual", "KP residual report on a grid");
  add_input(residual, cfg);
  add_components(residual, cfg);
  add_tau(residual, cfg);
  residual->add_option("--grid", cfg.grid, "x:lo:hi:n,t2:lo:hi:n,t3:lo:hi:n");

  auto* theta_cmd = app.add_subcommand("theta", "Riemann theta value or derivative");
  theta_cmd->add_option("--Z", cfg.theta_matrix, "Period matrix as JSON, e.g. '[[\"i\"]]'");
  theta_cmd->add_option("--z", cfg.z, "Argument, e.g. 0.3+0.2i");
  theta_cmd->add_option("--derivative", cfg.derivative, "Derivative order per coordinate, e.g. 1,0");
  theta_cmd->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("--seed", cfg.seed, "Random seed");

  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    std::string csv;
    json result;
    bool passed = true;
    std::string text;
    if (command == "analyze") result = cmd_analyze(cfg);
    if (command == "troptheta") result = cmd_troptheta(cfg);
    if (command == "delaunay") result = cmd_delaunay(cfg);
    if (command == "maximal") result = cmd_maximal(cfg);
    if (command == "limit-theta") result = cmd_limit_theta(cfg, csv);
    if (command == "tau") result = cmd_tau(cfg);
    if (command == "u-grid") result = cmd_u_grid(cfg, csv);
    if (command == "kp-residual") result = cmd_kp_residual(cfg);
    if (command == "theta") result = cmd_theta(cfg);
    if (command == "verify") result = cmd_verify(cfg, text, passed);
    if (cfg.format == "csv") {
      if (csv.empty()) throw ValidationError("--format", "csv output is available for u-grid and limit-theta");
      emit(cfg, csv);
    } else {
      emit(cfg, result.dump(2) + "\n");
    }
    return passed ? kOk : kInconsistency;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kValidation;
  } catch (const PrecisionError& e) {
    std::cerr << "precision: " << e.what() << std::endl;
    return kPrecision;
  } catch (const InconsistencyError& e) {
    std::cerr << "inconsistency: " << e.what() << std::endl;
    return kInconsistency;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return kInconsistency;
  }
}

#include "tropkp/tau.hpp"

#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"
#include "tropkp/parallel.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tropkp {
namespace {

const Complex kTwoPiI(0.0, 2.0 * std::numbers::pi);
const Complex kPiI(0.0, std::numbers::pi);

// Sum of series given in log-scaled form.
class ScaledSum {
 public:
  explicit ScaledSum(const SeriesLayout& layout) : sum_(layout) {}

  void add(const Series& term, double log_scale) {
    if (empty_) {
      sum_ = term;
      log_scale_ = log_scale;
      empty_ = false;
    } else if (log_scale > log_scale_) {
      sum_ *= std::exp(log_scale_ - log_scale);
      sum_ += term;
      log_scale_ = log_scale;
    } else {
      sum_.add_scaled(term, std::exp(log_scale - log_scale_));
    }
  }

  TauExpansion result() && { return {std::move(sum_), empty_ ? 0.0 : log_scale_}; }

 private:
  Series sum_;
  double log_scale_ = 0.0;
  bool empty_ = true;
};

void check_times(std::size_t times, const ComponentData& data) {
  if (times < 3) throw ValidationError("times", "at least t1, t2, t3 are needed");
  if (times > static_cast<std::size_t>(data.order)) {
    throw ValidationError("times", "component data only has expansions up to order " + std::to_string(data.order));
  }
}

const SeriesLayout& check_displacement(std::size_t times, std::span<const Complex> t0, const std::vector<Series>& d) {
  if (t0.size() != times || d.size() != times) {
    throw ValidationError("t", "expected " + std::to_string(times) + " time values");
  }
  const SeriesLayout& layout = d.front().layout();
  for (const auto& s : d) {
    if (&s.layout() != &layout) throw ValidationError("displacement", "mismatched layouts");
  }
  return layout;
}

// sum_m a_m d_m as a series, constant term c0.
Series combine(const SeriesLayout& layout, Complex c0, std::span<const Complex> a, const std::vector<Series>& d) {
  Series out(layout);
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] != Complex{}) out.add_scaled(d[m], a[m]);
  }
  out[0] += c0;
  return out;
}

bool all_linear(const std::vector<Series>& d) {
  return std::all_of(d.begin(), d.end(), [](const Series& s) { return s.is_linear(); });
}

// exp(c0 + sum_m a_m d_m), using the closed form when d is linear.
Series exp_combination(const SeriesLayout& layout, Complex c0, std::span<const Complex> a, const std::vector<Series>& d,
                       bool linear) {
  if (!linear) return combine(layout, c0, a, d).exp();
  std::vector<Complex> lin(layout.vars(), 0.0);
  for (std::size_t k = 1; k < layout.size() && layout.degree_of(k) == 1; ++k) {
    const std::size_t v = layout.parent_var(k);
    for (std::size_t m = 0; m < a.size(); ++m) lin[v] += a[m] * d[m][k];
  }
  return Series::exp_linear(layout, c0, lin);
}

// Multiplies by exp(1/2 sum_{n,m <= M} q_{nm} (t0 + d)_n (t0 + d)_m).
void apply_prefactor(TauExpansion& tau, const ComplexMatrix& q, std::span<const Complex> t0,
                     const std::vector<Series>& d) {
  const std::size_t times = t0.size();
  if (q.topLeftCorner(static_cast<Eigen::Index>(times), static_cast<Eigen::Index>(times)).cwiseAbs().maxCoeff() == 0.0) {
    return;
  }
  const SeriesLayout& layout = tau.scaled.layout();
  std::vector<Series> shifted;
  for (std::size_t m = 0; m < times; ++m) {
    Series s = d[m];
    s[0] += t0[m];
    shifted.push_back(std::move(s));
  }
  Series quad(layout);
  for (std::size_t n = 0; n < times; ++n) {
    Series row(layout);
    for (std::size_t m = 0; m < times; ++m) {
      const Complex qnm = q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
      if (qnm != Complex{}) row.add_scaled(shifted[m], qnm);
    }
    quad += shifted[n] * row;
  }
  quad *= 0.5;
  const Complex q0 = quad[0];
  quad[0] = 0.0;
  tau.scaled = tau.scaled * quad.exp();
  tau.scaled *= std::exp(Complex(0.0, q0.imag()));
  tau.log_scale += q0.real();
}

ComplexVector to_complex(const LatticePoint& x) {
  ComplexVector out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]);
  return out;
}

std::vector<std::optional<std::size_t>> block_offsets(const ComponentData& data) {
  std::vector<std::optional<std::size_t>> out;
  std::size_t offset = 0;
  for (const auto& v : data.vertices) {
    if (v.genus > 0) {
      out.emplace_back(offset);
      offset += static_cast<std::size_t>(v.genus);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace

TauExpansion TauFunction::at(std::span<const Complex> t) const {
  std::vector<Series> zero(times(), Series(0, 0));
  return expand(t, zero);
}

Complex TauFunction::value(std::span<const Complex> t) const {
  const auto e = at(t);
  return e.scaled[0] * std::exp(e.log_scale);
}

LimitTau::LimitTau(ComponentData data, RationalVector alpha, ComplexVector c, std::vector<LatticePoint> points,
                   TauSettings settings)
    : data_(std::move(data)),
      alpha_(std::move(alpha)),
      c_(std::move(c)),
      points_(std::move(points)),
      offsets_(block_offsets(data_)),
      settings_(settings) {
  check_times(settings_.times, data_);
  const std::size_t g = static_cast<std::size_t>(data_.total_weight()) + data_.h1;
  if (static_cast<std::size_t>(c_.size()) != g) throw ValidationError("c", "expected " + std::to_string(g) + " entries");
  if (points_.empty()) throw ValidationError("witnesses", "empty witness set");
}

LimitTau::LimitTau(const TropicalPeriodMatrix& bc, ComponentData data, RationalVector alpha, ComplexVector c,
                   TauSettings settings)
    : LimitTau(std::move(data), alpha, std::move(c), delaunay_set(bc, alpha).points, settings) {
  if (bc.dimension() != data_.h1) throw ValidationError("component_data", "h1 does not match the period matrix");
}

LimitTau LimitTau::component(const TropicalPeriodMatrix& bc, ComponentData data, RationalVector alpha,
                             ComplexVector c, const MaximalForm& form, TauSettings settings) {
  if (bc.dimension() != data.h1) throw ValidationError("component_data", "h1 does not match the period matrix");
  return LimitTau(std::move(data), std::move(alpha), std::move(c), form.witnesses, settings);
}

TauExpansion LimitTau::expand(std::span<const Complex> t0, const std::vector<Series>& d) const {
  const SeriesLayout& layout = check_displacement(settings_.times, t0, d);
  const bool linear = all_linear(d);
  const std::size_t times = settings_.times;
  const auto hd = static_cast<Eigen::Index>(data_.h1);
  const std::size_t base = data_.base_index();
  const ComplexVector c_trop = c_.tail(hd);

  ScaledSum sum(layout);
  std::vector<Complex> a(times);
  for (const auto& xp : points_) {
    const ComplexVector x = to_complex(xp);
    Complex c0 = kPiI * (x.dot(data_.b0 * x) + 2.0 * x.dot(c_trop));
    for (std::size_t m = 0; m < times; ++m) {
      a[m] = kTwoPiI * x.dot(data_.r_trop[m]);
      c0 += a[m] * t0[m];
    }
    double log_scale = c0.real();
    Series term = exp_combination(layout, Complex(0.0, c0.imag()), a, d, linear);
    for (std::size_t v = 0; v < data_.vertices.size(); ++v) {
      if (!offsets_[v]) continue;
      const auto& vd = data_.vertices[v];
      const auto w = static_cast<Eigen::Index>(vd.genus);
      ComplexVector arg = c_.segment(static_cast<Eigen::Index>(*offsets_[v]), w) + vd.coupling * x;
      const SiegelMatrix bv(vd.period);
      if (v != base) {
        const ThetaValue th = theta(bv, arg, settings_.tol);
        term *= th.scaled;
        log_scale += th.log_scale;
        continue;
      }
      std::vector<Series> disp;
      for (Eigen::Index i = 0; i < w; ++i) {
        std::vector<Complex> coeffs(times);
        for (std::size_t m = 0; m < times; ++m) {
          coeffs[m] = data_.r_vertex[m](i);
          arg(i) += coeffs[m] * t0[m];
        }
        disp.push_back(combine(layout, 0.0, coeffs, d));
      }
      const ThetaSeries ts = theta_series(bv, arg, disp, settings_.tol);
      term = term * ts.scaled;
      log_scale += ts.log_scale;
    }
    sum.add(term, log_scale);
  }
  TauExpansion out = std::move(sum).result();
  apply_prefactor(out, data_.q, t0, d);
  return out;
}

FamilyTau::FamilyTau(DegenerationFamily family, ComponentData data, ComplexVector c, double s, TauSettings settings)
    : family_(std::move(family)), data_(std::move(data)), c_(std::move(c)), settings_(settings) {
  check_times(settings_.times, data_);
  if (static_cast<std::size_t>(c_.size()) != family_.genus()) {
    throw ValidationError("c", "expected " + std::to_string(family_.genus()) + " entries");
  }
  z_ = family_.siegel_at(s);
  if (family_.genus() > 0 && std::abs(theta(z_, c_, settings_.tol).scaled) < 1e-12) {
    throw ValidationError("c", "theta(Z(s), c) vanishes at the base point");
  }
  const auto g = static_cast<Eigen::Index>(family_.genus());
  const auto hd = static_cast<Eigen::Index>(family_.h1());
  const auto base_offset = family_.block_offset(data_.base_index());
  for (std::size_t m = 0; m < settings_.times; ++m) {
    ComplexVector r = ComplexVector::Zero(g);
    r.tail(hd) = data_.r_trop[m];
    if (base_offset) r.segment(static_cast<Eigen::Index>(*base_offset), data_.r_vertex[m].size()) = data_.r_vertex[m];
    r_.push_back(std::move(r));
  }
}

FamilyTau FamilyTau::regularized(DegenerationFamily family, ComponentData data, std::span<const Rational> alpha,
                                 ComplexVector c, double s, TauSettings settings) {
  const ComplexVector shifted = c + family.shift(alpha, s);
  const Rational theta_trop = tropical_theta(family.tropical_matrix(), alpha);
  FamilyTau out(std::move(family), std::move(data), shifted, s, settings);
  out.log_prefactor_ = theta_trop.get_d() * std::log(s);
  return out;
}

TauExpansion FamilyTau::expand(std::span<const Complex> t0, const std::vector<Series>& d) const {
  const SeriesLayout& layout = check_displacement(settings_.times, t0, d);
  const std::size_t g = family_.genus();
  TauExpansion out{Series::constant(layout.vars(), layout.degree(), 1.0), log_prefactor_};
  if (g > 0) {
    ComplexVector arg = c_;
    std::vector<Series> disp;
    for (std::size_t i = 0; i < g; ++i) {
      std::vector<Complex> coeffs(settings_.times);
      for (std::size_t m = 0; m < settings_.times; ++m) {
        coeffs[m] = r_[m](static_cast<Eigen::Index>(i));
        arg(static_cast<Eigen::Index>(i)) += coeffs[m] * t0[m];
      }
      disp.push_back(combine(layout, 0.0, coeffs, d));
    }
    ThetaSeries ts = theta_series(z_, arg, disp, settings_.tol);
    out.scaled = std::move(ts.scaled);
    out.log_scale += ts.log_scale;
  }
  apply_prefactor(out, data_.q, t0, d);
  return out;
}

Complex KpJet::residual() const {
  return 0.75 * u_22 - u_13 + 0.25 * u_1111 + 3.0 * u_1 * u_1 + 3.0 * u * u_11;
}

KpJet kp_jet(const TauFunction& tau, double x, double t2, double t3) {
  const std::size_t times = tau.times();
  std::vector<Complex> t0(times, 0.0);
  t0[0] = x;
  t0[1] = t2;
  t0[2] = t3;
  std::vector<Series> d;
  for (std::size_t m = 0; m < times; ++m) {
    d.push_back(m < 3 ? Series::variable(3, 6, m) : Series(3, 6));
  }
  const TauExpansion e = tau.expand(t0, d);
  const Complex tau0 = e.scaled[0];
  if (tau0 == Complex{}) throw PrecisionError("tau vanishes at the evaluation point");
  const Series log_tau = e.scaled.log();
  auto der = [&](int a, int b, int c) {
    const std::array<int, 3> order{a, b, c};
    return log_tau.derivative(order);
  };
  KpJet jet;
  jet.x = x;
  jet.t2 = t2;
  jet.t3 = t3;
  jet.u = der(2, 0, 0);
  jet.u_1 = der(3, 0, 0);
  jet.u_11 = der(4, 0, 0);
  jet.u_1111 = der(6, 0, 0);
  jet.u_13 = der(3, 0, 1);
  jet.u_22 = der(2, 2, 0);
  jet.log_abs_tau = std::log(std::abs(tau0)) + e.log_scale;
  jet.cancellation = std::abs(tau0);
  return jet;
}

Complex u_from_tau(const TauFunction& tau, double x, double t2, double t3) { return kp_jet(tau, x, t2, t3).u; }

double GridAxis::at(std::size_t i) const {
  return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void Grid::point(std::size_t index, double& xv, double& t2v, double& t3v) const {
  const std::size_t k3 = index % t3.count;
  const std::size_t k2 = (index / t3.count) % t2.count;
  const std::size_t k1 = index / (t3.count * t2.count);
  xv = x.at(k1);
  t2v = t2.at(k2);
  t3v = t3.at(k3);
}

Grid parse_grid(std::string_view text) {
  Grid grid;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream fields(item);
    std::string f;
    while (std::getline(fields, f, ':')) parts.push_back(f);
    if (parts.size() != 4) throw ValidationError("--grid", "expected name:lo:hi:count, got '" + item + "'");
    GridAxis* axis = nullptr;
    if (parts[0] == "x" || parts[0] == "t1") axis = &grid.x;
    if (parts[0] == "t2" || parts[0] == "y") axis = &grid.t2;
    if (parts[0] == "t3" || parts[0] == "t") axis = &grid.t3;
    if (!axis) throw ValidationError("--grid", "unknown axis '" + parts[0] + "'");
    try {
      std::size_t used = 0;
      axis->lo = std::stod(parts[1], &used);
      if (used != parts[1].size()) throw std::invalid_argument("lo");
      axis->hi = std::stod(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("hi");
      const long n = std::stol(parts[3], &used);
      if (used != parts[3].size() || n < 2) throw std::invalid_argument("count");
      axis->count = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw ValidationError("--grid", "bad axis '" + item + "' (count must be an integer >= 2)");
    }
    if (!(axis->hi > axis->lo)) throw ValidationError("--grid", "axis '" + item + "' needs lo < hi");
  }
  return grid;
}

namespace {

std::vector<KpJet> evaluate_grid(const TauFunction& tau, const Grid& grid) {
  std::vector<KpJet> jets(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    double x, t2, t3;
    grid.point(i, x, t2, t3);
    try {
      jets[i] = kp_jet(tau, x, t2, t3);
    } catch (const PrecisionError&) {
      jets[i].x = x;
      jets[i].t2 = t2;
      jets[i].t3 = t3;
      jets[i].log_abs_tau = -INFINITY;
      jets[i].cancellation = 0.0;
    }
  });
  return jets;
}

std::vector<bool> exclusion_mask(const std::vector<KpJet>& jets, double exclusion) {
  std::vector<bool> out(jets.size());
  for (std::size_t i = 0; i < jets.size(); ++i) out[i] = !(jets[i].cancellation >= exclusion);
  return out;
}

// log tau(t1 + h) - log tau(t1) without branch jumps.
Complex log_ratio(const TauFunction& tau, std::span<const Complex> t, double h, const TauExpansion& base) {
  std::vector<Complex> shifted(t.begin(), t.end());
  shifted[0] += h;
  const TauExpansion e = tau.at(shifted);
  return std::log(e.scaled[0] / base.scaled[0]) + (e.log_scale - base.log_scale);
}

Complex finite_difference_u(const TauFunction& tau, double x, double t2, double t3, double h) {
  std::vector<Complex> t(tau.times(), 0.0);
  t[0] = x;
  t[1] = t2;
  t[2] = t3;
  const TauExpansion base = tau.at(t);
  auto second = [&](double step) {
    return (log_ratio(tau, t, step, base) + log_ratio(tau, t, -step, base)) / (step * step);
  };
  return (4.0 * second(h) - second(2.0 * h)) / 3.0;
}

}  // namespace

std::vector<GridPoint> u_grid(const TauFunction& tau, const Grid& grid, double exclusion) {
  const auto jets = evaluate_grid(tau, grid);
  const auto mask = exclusion_mask(jets, exclusion);
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const auto& j = jets[i];
    GridPoint p{j.x, j.t2, j.t3, j.u, mask[i] ? Complex{} : j.residual(), j.log_abs_tau, mask[i]};
    if (mask[i]) p.u = Complex(NAN, NAN);
    out.push_back(p);
  }
  return out;
}

ResidualReport kp_residual(const TauFunction& tau, const Grid& grid, double exclusion) {
  ResidualReport report;
  report.grid = grid;
  const auto jets = evaluate_grid(tau, grid);
  const auto mask = exclusion_mask(jets, exclusion);
  double max_u = 0.0;
  for (std::size_t i = 0; i < jets.size(); ++i) {
    if (mask[i]) {
      ++report.excluded;
      continue;
    }
    ++report.evaluated;
    report.max_residual = std::max(report.max_residual, std::abs(jets[i].residual()));
    report.scale = std::max(report.scale, std::abs(jets[i].u_13));
    max_u = std::max(max_u, std::abs(jets[i].u));
  }
  report.relative = report.scale > 0.0 ? report.max_residual / report.scale : report.max_residual;

  // Finite-difference cross-check on about 16 evenly spaced points.
  const std::size_t stride = std::max<std::size_t>(1, jets.size() / 16);
  std::vector<std::size_t> sample;
  for (std::size_t i = stride / 2; i < jets.size(); i += stride) {
    if (!mask[i]) sample.push_back(i);
  }
  std::vector<double> deviation(sample.size(), 0.0);
  parallel_for(sample.size(), [&](std::size_t k) {
    const auto& j = jets[sample[k]];
    const Complex fd = finite_difference_u(tau, j.x, j.t2, j.t3, 1e-4);
    deviation[k] = std::abs(fd - j.u) / std::max(max_u, 1.0);
  });
  report.fd_samples = sample.size();
  for (double d : deviation) report.fd_max_deviation = std::max(report.fd_max_deviation, d);
  return report;
}

std::vector<Complex> wavefunction_coeffs(const TauFunction& tau, std::span<const Complex> t, int k) {
  if (k < 1) throw ValidationError("k", "order must be at least 1");
  const std::size_t times = tau.times();
  if (t.size() != times) throw ValidationError("t", "expected " + std::to_string(times) + " time values");
  // [a] = (a, a^2/2, a^3/3, ...), truncated to the active times.
  std::vector<Series> d;
  for (std::size_t m = 1; m <= times; ++m) {
    Series s(1, k);
    if (static_cast<int>(m) <= k) s[m] = -1.0 / static_cast<double>(m);
    d.push_back(std::move(s));
  }
  const TauExpansion e = tau.expand(t, d);
  const Complex tau0 = e.scaled[0];
  double mass = 0.0;
  for (std::size_t i = 0; i < e.scaled.size(); ++i) mass = std::max(mass, std::abs(e.scaled[i]));
  if (std::abs(tau0) <= 1e-12 * std::max(mass, 1.0)) throw PrecisionError("tau(t) vanishes; w_k undefined");
  std::vector<Complex> out;
  for (int j = 1; j <= k; ++j) out.push_back(e.scaled[static_cast<std::size_t>(j)] / tau0);
  return out;
}

nlohmann::json to_json(const Grid& grid) {
  auto axis = [](const GridAxis& a) { return nlohmann::json{{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}}; };
  return {{"x", axis(grid.x)}, {"t2", axis(grid.t2)}, {"t3", axis(grid.t3)}};
}

nlohmann::json to_json(const ResidualReport& r) {
  return {{"grid", to_json(r.grid)},
          {"max_residual", r.max_residual},
          {"scale", r.scale},
          {"relative_residual", r.relative},
          {"evaluated", r.evaluated},
          {"excluded", r.excluded},
          {"fd_samples", r.fd_samples},
          {"fd_max_deviation", r.fd_max_deviation}};
}

}  // namespace tropkp

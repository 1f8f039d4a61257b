#pragma once

#include "tropkp/degeneration.hpp"

#include <memory>
#include <string_view>

namespace tropkp {

// tau(t0 + d) as a power series in the variables of the displacement d;
// the value is scaled * exp(log_scale). exp(log_scale) is the size of the
// largest summand of tau, so |scaled[0]| << 1 means cancellation (tau close
// to a zero).
struct TauExpansion {
  Series scaled;
  double log_scale = 0.0;
};

class TauFunction {
 public:
  virtual ~TauFunction() = default;

  // Number of active times t_1..t_M.
  virtual std::size_t times() const = 0;

  // `t0` has times() entries and `displacement` has times() series with a
  // common layout.
  virtual TauExpansion expand(std::span<const Complex> t0, const std::vector<Series>& displacement) const = 0;

  // tau(t) in log-scaled form (degree 0 expansion).
  TauExpansion at(std::span<const Complex> t) const;
  Complex value(std::span<const Complex> t) const;
};

struct TauSettings {
  std::size_t times = 4;  // M >= 3
  double tol = 1e-14;     // theta truncation tolerance
};

// sum_{x in D} exp(pi i (x B0 x + 2 (c + sum_m r_m t_m) x)) tau_{v0}(t, c'_{v0})
// prod_{v != v0} theta(B_v, c'_v), with c'_v = c_v + C_v x. `c` uses the
// layout ((c_v)_v, c) of the degeneration family.
class LimitTau : public TauFunction {
 public:
  LimitTau(const TropicalPeriodMatrix& bc, ComponentData data, RationalVector alpha, ComplexVector c,
           TauSettings settings = {});
  // The same sum restricted to the witnesses of one maximal form.
  static LimitTau component(const TropicalPeriodMatrix& bc, ComponentData data, RationalVector alpha, ComplexVector c,
                            const MaximalForm& form, TauSettings settings = {});

  std::size_t times() const override { return settings_.times; }
  TauExpansion expand(std::span<const Complex> t0, const std::vector<Series>& displacement) const override;

  const std::vector<LatticePoint>& points() const noexcept { return points_; }
  const ComponentData& data() const noexcept { return data_; }

 private:
  LimitTau(ComponentData data, RationalVector alpha, ComplexVector c, std::vector<LatticePoint> points,
           TauSettings settings);

  ComponentData data_;
  RationalVector alpha_;
  ComplexVector c_;
  std::vector<LatticePoint> points_;
  std::vector<std::optional<std::size_t>> offsets_;
  TauSettings settings_;
};

// exp(1/2 sum q t t) theta(Z(s), c + sum_m r_m t_m) for the degeneration
// family, with r_m stacking r^(v0)_m in the base block and r^trop_m in the
// tropical block.
class FamilyTau : public TauFunction {
 public:
  FamilyTau(DegenerationFamily family, ComponentData data, ComplexVector c, double s, TauSettings settings = {});

  // s^Theta(alpha) tau(t) at c' = c - log s * alpha_bar * Bbar, the
  // normalisation whose s -> 0 limit is LimitTau.
  static FamilyTau regularized(DegenerationFamily family, ComponentData data, std::span<const Rational> alpha,
                               ComplexVector c, double s, TauSettings settings = {});

  std::size_t times() const override { return settings_.times; }
  TauExpansion expand(std::span<const Complex> t0, const std::vector<Series>& displacement) const override;

 private:
  DegenerationFamily family_;
  ComponentData data_;
  ComplexVector c_;
  SiegelMatrix z_;
  std::vector<ComplexVector> r_;
  double log_prefactor_ = 0.0;
  TauSettings settings_;
};

// Derivatives of u = d^2/dt1^2 log tau at (x, t2, t3, 0, ...), taken from the
// degree-6 Taylor expansion of log tau.
struct KpJet {
  double x = 0.0, t2 = 0.0, t3 = 0.0;
  Complex u, u_1, u_11, u_1111, u_13, u_22;
  double log_abs_tau = 0.0;
  double cancellation = 0.0;  // |tau| over its largest summand

  // 3/4 u_22 - (u_13 - 1/4 u_1111 - 3 u u_1)_1
  Complex residual() const;
};

KpJet kp_jet(const TauFunction& tau, double x, double t2, double t3);
Complex u_from_tau(const TauFunction& tau, double x, double t2, double t3);

struct GridAxis {
  std::string name;
  double lo = -2.0, hi = 2.0;
  std::size_t count = 11;

  double at(std::size_t i) const;
};

// Axes x, t2, t3; x varies slowest.
struct Grid {
  GridAxis x{"x"}, t2{"t2"}, t3{"t3"};

  std::size_t size() const noexcept { return x.count * t2.count * t3.count; }
  void point(std::size_t index, double& xv, double& t2v, double& t3v) const;
};

// "x:-2:2:11,t2:-2:2:11,t3:-2:2:11"; axes not mentioned keep the default
// [-2, 2] with 11 points. Every axis needs at least 2 points.
Grid parse_grid(std::string_view text);

struct GridPoint {
  double x = 0.0, t2 = 0.0, t3 = 0.0;
  Complex u;
  Complex residual;
  double log_abs_tau = 0.0;
  bool excluded = false;  // tau below the exclusion threshold
};

// Points where |tau| < exclusion * (largest summand of tau at that point)
// are flagged. The quadratic prefactor can change |tau| by many orders of
// magnitude across a grid, so the comparison is local.
std::vector<GridPoint> u_grid(const TauFunction& tau, const Grid& grid, double exclusion = 1e-8);

struct ResidualReport {
  Grid grid;
  double max_residual = 0.0;
  double scale = 0.0;  // max |u_13| over the evaluated points
  double relative = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  // Central second differences of log tau in t1 (Richardson once) against
  // the analytic u on a subsample, relative to max(max |u|, 1).
  std::size_t fd_samples = 0;
  double fd_max_deviation = 0.0;
};

ResidualReport kp_residual(const TauFunction& tau, const Grid& grid, double exclusion = 1e-8);

// w_1..w_k with tau(t - [a]) / tau(t) = 1 + sum w_j a^j, using only the
// active times. Throws PrecisionError if tau(t) vanishes.
std::vector<Complex> wavefunction_coeffs(const TauFunction& tau, std::span<const Complex> t, int k);

nlohmann::json to_json(const Grid& grid);
nlohmann::json to_json(const ResidualReport& report);

}  // namespace tropkp

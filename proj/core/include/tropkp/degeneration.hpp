#pragma once

#include "tropkp/component_data.hpp"
#include "tropkp/tropical_theta.hpp"

#include <functional>
#include <optional>

namespace tropkp {

// Z(s) = log s * Bbar + L0 + E(s) in the layout [vertex blocks in vertex
// order (weight > 0 only)] followed by the h1 tropical coordinates.
//
// The family is the asymptotic form of the period matrices of the plumbed
// curves with y_e = s^{l(e)}, not the period matrices themselves; E(s) is
// an optional perturbation that must tend to 0.
class DegenerationFamily {
 public:
  DegenerationFamily(TropicalPeriodMatrix bc, const ComponentData& data);

  std::size_t genus() const noexcept { return static_cast<std::size_t>(bbar_.rows()); }
  std::size_t h1() const noexcept { return h1_; }
  std::size_t tropical_offset() const noexcept { return genus() - h1_; }
  // Offset of a vertex block, or nullopt for weight 0 vertices.
  std::optional<std::size_t> block_offset(std::size_t vertex) const { return offsets_.at(vertex); }

  const TropicalPeriodMatrix& tropical_matrix() const noexcept { return bc_; }
  const ComplexMatrix& bbar() const noexcept { return bbar_; }
  const ComplexMatrix& l0() const noexcept { return l0_; }

  void set_perturbation(std::function<ComplexMatrix(double)> e) { perturbation_ = std::move(e); }

  ComplexMatrix matrix_at(double s) const;
  // Throws ValidationError if s is outside (0, 1) or Z(s) is not Siegel.
  SiegelMatrix siegel_at(double s) const;

  // alpha_bar = ((0)_v, alpha).
  ComplexVector embed_alpha(std::span<const Rational> alpha) const;
  // -log s * alpha_bar * Bbar, the argument shift of the regularised limit.
  ComplexVector shift(std::span<const Rational> alpha, double s) const;

 private:
  TropicalPeriodMatrix bc_;
  std::size_t h1_ = 0;
  std::vector<std::optional<std::size_t>> offsets_;
  ComplexMatrix bbar_;
  ComplexMatrix l0_;
  std::function<ComplexMatrix(double)> perturbation_;
};

DegenerationFamily assemble_family(const TropicalPeriodMatrix& bc, const ComponentData& data);

struct LimitValue {
  Complex value;
  double bound = 0.0;  // absolute truncation bound
  Rational tropical_theta;
};

// s^Theta(alpha) * theta(Z(s), zbar - log s * alpha_bar * Bbar).
LimitValue limit_lhs(const DegenerationFamily& family, std::span<const Rational> alpha, const ComplexVector& zbar,
                     double s, double tol = 1e-14);

// sum_{x in D} exp(pi i (x B0 x + 2 z x)) prod_v theta(B_v, z_v + C_v x).
LimitValue mixture_rhs(const DegenerationFamily& family, const ComponentData& data, std::span<const Rational> alpha,
                       const ComplexVector& zbar, double tol = 1e-14);

struct ConvergenceRow {
  double s = 0.0;
  Complex lhs;
  Complex rhs;
  double abs_error = 0.0;
  double rel_error = 0.0;
  std::optional<double> order;  // log(err_i / err_{i-1}) / log(s_i / s_{i-1})
  double bound = 0.0;
  bool monotone = true;  // error did not increase from the previous row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  Rational tropical_theta;
  bool monotone = true;
};

// s_list strictly decreasing in (0, 1).
ConvergenceReport convergence_report(const DegenerationFamily& family, const ComponentData& data,
                                     std::span<const Rational> alpha, const ComplexVector& zbar,
                                     std::span<const double> s_list, double tol = 1e-14);

nlohmann::json to_json(const ConvergenceReport& report);

}  // namespace tropkp

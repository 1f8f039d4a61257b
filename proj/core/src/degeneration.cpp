#include "tropkp/degeneration.hpp"

#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"
#include "tropkp/parallel.hpp"

#include <cmath>
#include <numbers>

namespace tropkp {
namespace {

const Complex kTwoPiI(0.0, 2.0 * std::numbers::pi);
const Complex kPiI(0.0, std::numbers::pi);

ComplexVector lattice_vector(const LatticePoint& x) {
  ComplexVector out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]);
  return out;
}

}  // namespace

DegenerationFamily::DegenerationFamily(TropicalPeriodMatrix bc, const ComponentData& data)
    : bc_(std::move(bc)), h1_(bc_.dimension()) {
  if (data.h1 != h1_) {
    throw ValidationError("component_data", "h1 = " + std::to_string(data.h1) + " but the period matrix has size " +
                                                std::to_string(h1_));
  }
  std::size_t offset = 0;
  for (const auto& v : data.vertices) {
    if (v.genus > 0) {
      offsets_.emplace_back(offset);
      offset += static_cast<std::size_t>(v.genus);
    } else {
      offsets_.emplace_back(std::nullopt);
    }
  }
  const auto g = static_cast<Eigen::Index>(offset + h1_);
  const auto t0 = static_cast<Eigen::Index>(offset);
  const auto hd = static_cast<Eigen::Index>(h1_);
  bbar_ = ComplexMatrix::Zero(g, g);
  l0_ = ComplexMatrix::Zero(g, g);
  for (Eigen::Index i = 0; i < hd; ++i) {
    for (Eigen::Index j = 0; j < hd; ++j) {
      bbar_(t0 + i, t0 + j) = bc_(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d() / kTwoPiI;
    }
  }
  if (data.b0.rows() != hd || data.b0.cols() != hd) throw ValidationError("component_data.B0", "dimension mismatch");
  l0_.block(t0, t0, hd, hd) = data.b0;
  for (std::size_t v = 0; v < data.vertices.size(); ++v) {
    if (!offsets_[v]) continue;
    const auto& vd = data.vertices[v];
    const auto o = static_cast<Eigen::Index>(*offsets_[v]);
    const auto w = static_cast<Eigen::Index>(vd.genus);
    if (vd.period.rows() != w || vd.coupling.rows() != w || vd.coupling.cols() != hd) {
      throw ValidationError("component_data.vertices." + vd.id, "dimension mismatch");
    }
    l0_.block(o, o, w, w) = vd.period;
    l0_.block(o, t0, w, hd) = vd.coupling;
    l0_.block(t0, o, hd, w) = vd.coupling.transpose();
  }
}

DegenerationFamily assemble_family(const TropicalPeriodMatrix& bc, const ComponentData& data) {
  return DegenerationFamily(bc, data);
}

ComplexMatrix DegenerationFamily::matrix_at(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("s", "must lie in (0, 1)");
  ComplexMatrix z = std::log(s) * bbar_ + l0_;
  if (perturbation_) {
    const ComplexMatrix e = perturbation_(s);
    if (e.rows() != z.rows() || e.cols() != z.cols()) throw ValidationError("perturbation", "dimension mismatch");
    z += e;
  }
  return z;
}

SiegelMatrix DegenerationFamily::siegel_at(double s) const {
  try {
    return SiegelMatrix(matrix_at(s));
  } catch (const ValidationError& e) {
    throw ValidationError("Z(s)", "at s = " + std::to_string(s) + ": " + e.what());
  }
}

ComplexVector DegenerationFamily::embed_alpha(std::span<const Rational> alpha) const {
  if (alpha.size() != h1_) throw ValidationError("alpha", "expected " + std::to_string(h1_) + " entries");
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(genus()));
  for (std::size_t i = 0; i < h1_; ++i) out(static_cast<Eigen::Index>(tropical_offset() + i)) = alpha[i].get_d();
  return out;
}

ComplexVector DegenerationFamily::shift(std::span<const Rational> alpha, double s) const {
  return -std::log(s) * (bbar_.transpose() * embed_alpha(alpha));
}

LimitValue limit_lhs(const DegenerationFamily& family, std::span<const Rational> alpha, const ComplexVector& zbar,
                     double s, double tol) {
  if (static_cast<std::size_t>(zbar.size()) != family.genus()) throw ValidationError("z", "expected g coordinates");
  const Rational theta_trop = tropical_theta(family.tropical_matrix(), alpha);
  const SiegelMatrix z = family.siegel_at(s);
  const ThetaValue th = theta(z, zbar + family.shift(alpha, s), tol);
  const double log_factor = theta_trop.get_d() * std::log(s) + th.log_scale;
  return {th.scaled * std::exp(log_factor), th.bound * std::exp(log_factor), theta_trop};
}

LimitValue mixture_rhs(const DegenerationFamily& family, const ComponentData& data, std::span<const Rational> alpha,
                       const ComplexVector& zbar, double tol) {
  if (static_cast<std::size_t>(zbar.size()) != family.genus()) throw ValidationError("z", "expected g coordinates");
  const DelaunaySet d = delaunay_set(family.tropical_matrix(), alpha);
  const auto hd = static_cast<Eigen::Index>(family.h1());
  const ComplexVector z = zbar.tail(hd);
  LimitValue out{0.0, 0.0, d.value};
  for (const auto& xp : d.points) {
    const ComplexVector x = lattice_vector(xp);
    Complex term = std::exp(kPiI * (x.dot(data.b0 * x) + 2.0 * x.dot(z)));
    double bound_factor = 0.0;
    for (std::size_t v = 0; v < data.vertices.size(); ++v) {
      const auto offset = family.block_offset(v);
      if (!offset) continue;
      const auto& vd = data.vertices[v];
      const auto w = static_cast<Eigen::Index>(vd.genus);
      const ComplexVector arg = zbar.segment(static_cast<Eigen::Index>(*offset), w) + vd.coupling * x;
      const ThetaValue th = theta(SiegelMatrix(vd.period), arg, tol);
      term *= th.value;
      bound_factor = bound_factor + th.bound * std::exp(th.log_scale) / std::max(std::abs(th.value), 1e-300);
    }
    out.value += term;
    out.bound += std::abs(term) * bound_factor;
  }
  return out;
}

ConvergenceReport convergence_report(const DegenerationFamily& family, const ComponentData& data,
                                     std::span<const Rational> alpha, const ComplexVector& zbar,
                                     std::span<const double> s_list, double tol) {
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!(s_list[i] > 0.0 && s_list[i] < 1.0)) throw ValidationError("s", "values must lie in (0, 1)");
    if (i > 0 && !(s_list[i] < s_list[i - 1])) throw ValidationError("s", "values must be strictly decreasing");
  }
  ConvergenceReport report;
  const LimitValue rhs = mixture_rhs(family, data, alpha, zbar, tol);
  report.tropical_theta = rhs.tropical_theta;
  std::vector<LimitValue> lhs(s_list.size());
  parallel_for(s_list.size(), [&](std::size_t i) { lhs[i] = limit_lhs(family, alpha, zbar, s_list[i], tol); });
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    ConvergenceRow row;
    row.s = s_list[i];
    row.lhs = lhs[i].value;
    row.rhs = rhs.value;
    row.abs_error = std::abs(row.lhs - row.rhs);
    row.rel_error = row.abs_error / std::max(std::abs(row.rhs), 1e-300);
    row.bound = lhs[i].bound + rhs.bound;
    if (i > 0) {
      const auto& prev = report.rows.back();
      if (prev.abs_error > 0.0 && row.abs_error > 0.0) {
        row.order = std::log(row.abs_error / prev.abs_error) / std::log(row.s / prev.s);
      }
      row.monotone = row.abs_error <= prev.abs_error;
      report.monotone = report.monotone && row.monotone;
    }
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"s", r.s},
                    {"lhs", to_json(r.lhs)},
                    {"rhs", to_json(r.rhs)},
                    {"abs_error", r.abs_error},
                    {"rel_error", r.rel_error},
                    {"order", r.order ? nlohmann::json(*r.order) : nlohmann::json(nullptr)},
                    {"bound", r.bound},
                    {"monotone", r.monotone}});
  }
  return {{"tropical_theta", to_string(report.tropical_theta)}, {"monotone", report.monotone}, {"rows", rows}};
}

}  // namespace tropkp

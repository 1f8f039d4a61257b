#include "tropkp/riemann_theta.hpp"

#include "tropkp/errors.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace tropkp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxTerms = 20'000'000;

}  // namespace

SiegelMatrix::SiegelMatrix(ComplexMatrix z) : z_(std::move(z)) {
  if (z_.rows() != z_.cols()) throw ValidationError("Z", "matrix is not square");
  const double scale = z_.size() ? std::max(1.0, z_.cwiseAbs().maxCoeff()) : 1.0;
  if (z_.size() && (z_ - z_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("Z", "matrix is not symmetric");
  }
  z_ = (z_ + z_.transpose()) / 2.0;
  y_ = z_.imag();
  if (z_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(y_, Eigen::EigenvaluesOnly);
    lambda_min_ = eig.eigenvalues()(0);
    if (!(lambda_min_ > 0.0)) throw ValidationError("Z", "imaginary part is not positive definite");
  }
}

double lattice_gaussian_tail(std::size_t dim, double rho, double radius, double a, double c, int k) {
  // Balls of radius rho/2 around lattice points are disjoint; bounding each
  // term by the average of a radially decreasing majorant over its ball
  // gives (dim / (rho/2)^dim) * int_{R-rho}^inf e^{-s^2} (s+rho/2)^{dim-1}
  // (a + c (s + rho))^k ds.
  if (dim == 0) return 0.0;
  if (radius < rho) throw PrecisionError("tail bound requested below the packing radius");
  const double half = rho / 2;
  const std::size_t n1 = dim - 1;
  // Coefficients of (s + half)^{n1} (a + c rho + c s)^k in powers of s.
  std::vector<double> p(n1 + 1);
  for (std::size_t j = 0; j <= n1; ++j) {
    p[j] = boost::math::binomial_coefficient<double>(static_cast<unsigned>(n1), static_cast<unsigned>(j)) *
           std::pow(half, static_cast<double>(n1 - j));
  }
  const double a1 = a + c * rho;
  for (int step = 0; step < k; ++step) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] += a1 * p[j];
      next[j + 1] += c * p[j];
    }
    p = std::move(next);
  }
  const double lower = radius - rho;
  double integral = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    integral += p[j] * 0.5 * boost::math::tgamma((static_cast<double>(j) + 1.0) / 2.0, lower * lower);
  }
  return static_cast<double>(dim) / std::pow(half, static_cast<double>(dim)) * integral;
}

namespace {

// Truncation plan for one evaluation point.
struct Plan {
  std::size_t g = 0;
  Eigen::VectorXd center;  // -Y^{-1} Im z
  Eigen::MatrixXd upper;   // L^T with pi Y = L L^T
  double radius = 0.0;
  double log_scale = 0.0;
  double bound = 0.0;
};

// The term of largest modulus sits near the centre; nearest-plane rounding
// in the enumeration order gives a good approximation of it.
double nearest_distance2(const Plan& plan) {
  const std::size_t g = plan.g;
  Eigen::VectorXd w(g);
  double total = 0.0;
  for (std::size_t ii = g; ii-- > 0;) {
    double s = 0.0;
    for (std::size_t j = ii + 1; j < g; ++j) s += plan.upper(ii, j) * w(j);
    const double target = plan.center(ii) - s / plan.upper(ii, ii);
    w(ii) = std::round(target) - plan.center(ii);
    const double comp = plan.upper(ii, ii) * w(ii) + s;
    total += comp * comp;
  }
  return total;
}

// Terms carry a polynomial weight with |weight(u)| <= (poly_a + poly_c |u|_inf)^k.
Plan make_plan(const SiegelMatrix& zm, const ComplexVector& z, double tol, double poly_a, double poly_c, int k) {
  if (!(tol > 0.0)) throw ValidationError("tol", "must be positive");
  Plan plan;
  plan.g = zm.genus();
  if (static_cast<std::size_t>(z.size()) != plan.g) {
    throw ValidationError("z", "expected " + std::to_string(plan.g) + " coordinates");
  }
  if (plan.g == 0) return plan;
  const Eigen::MatrixXd& y = zm.imag();
  Eigen::LLT<Eigen::MatrixXd> ychol(y);
  plan.center = -ychol.solve(z.imag());
  Eigen::LLT<Eigen::MatrixXd> chol(kPi * y);
  if (chol.info() != Eigen::Success) throw ValidationError("Z", "imaginary part is not positive definite");
  plan.upper = chol.matrixU();

  const double rho = std::sqrt(kPi * zm.min_imag_eigenvalue());
  const double v2 = nearest_distance2(plan);
  plan.log_scale = kPi * plan.center.dot(y * plan.center) - v2;

  // |u_i - center_i| <= |v| sqrt(((pi Y)^{-1})_ii)
  const Eigen::MatrixXd inv = chol.solve(Eigen::MatrixXd::Identity(plan.g, plan.g));
  double spread = 0.0;
  for (std::size_t i = 0; i < plan.g; ++i) spread = std::max(spread, std::sqrt(inv(i, i)));
  const double a = poly_a + poly_c * plan.center.cwiseAbs().maxCoeff();
  const double c = poly_c * spread;

  const double log_tol = std::log(tol);
  double radius = std::max(rho, std::sqrt(v2));
  const double cap = std::sqrt(v2) + 60.0;
  while (true) {
    const double tail = lattice_gaussian_tail(plan.g, rho, radius, a, c, k);
    if (tail == 0.0 || std::log(tail) + v2 <= log_tol) {
      plan.radius = radius;
      plan.bound = tail * std::exp(v2);
      break;
    }
    radius += 0.25;
    if (radius > cap) throw PrecisionError("theta truncation radius cap exceeded");
  }
  return plan;
}

template <class Visit>
std::size_t for_each_point(const Plan& plan, Visit&& visit) {
  const std::size_t g = plan.g;
  std::vector<double> offsets(g, 0.0);  // u_j - center_j for fixed coordinates
  Eigen::VectorXd u(g);
  std::size_t count = 0;
  const double r2 = plan.radius * plan.radius;
  auto recurse = [&](auto&& self, std::size_t level, double used) -> void {
    const std::size_t i = level - 1;
    double s = 0.0;
    for (std::size_t j = i + 1; j < g; ++j) s += plan.upper(i, j) * offsets[j];
    const double diag = plan.upper(i, i);
    const double half = std::sqrt(std::max(0.0, r2 - used)) / diag;
    const double mid = plan.center(i) - s / diag;
    const auto lo = static_cast<std::int64_t>(std::ceil(mid - half));
    const auto hi = static_cast<std::int64_t>(std::floor(mid + half));
    for (std::int64_t v = lo; v <= hi; ++v) {
      u(i) = static_cast<double>(v);
      offsets[i] = u(i) - plan.center(i);
      const double comp = diag * offsets[i] + s;
      const double next = used + comp * comp;
      if (next > r2) continue;
      if (i == 0) {
        if (++count > kMaxTerms) throw PrecisionError("theta summation exceeded the term cap");
        visit(u);
      } else {
        self(self, i, next);
      }
    }
  };
  if (g == 0) {
    visit(u);
    return 1;
  }
  recurse(recurse, g, 0.0);
  return count;
}

Complex term_exponent(const SiegelMatrix& zm, const ComplexVector& z, const Eigen::VectorXd& u) {
  const ComplexVector uc = u.cast<Complex>();
  const Complex quad = uc.dot(zm.matrix() * uc);  // dot conjugates the left side; u is real
  const Complex lin = uc.dot(z);
  return Complex(0.0, kPi) * (quad + 2.0 * lin);
}

ThetaValue finish(const Plan& plan, Complex scaled, std::size_t terms) {
  ThetaValue out;
  out.scaled = scaled;
  out.log_scale = plan.log_scale;
  out.value = scaled * std::exp(plan.log_scale);
  out.radius = plan.radius;
  out.bound = plan.bound;
  out.terms = terms;
  return out;
}

}  // namespace

ThetaValue theta(const SiegelMatrix& zm, const ComplexVector& z, double tol) {
  const Plan plan = make_plan(zm, z, tol, 1.0, 0.0, 0);
  Complex sum = 0.0;
  const std::size_t terms = for_each_point(plan, [&](const Eigen::VectorXd& u) {
    sum += std::exp(term_exponent(zm, z, u) - plan.log_scale);
  });
  return finish(plan, sum, terms);
}

ThetaValue theta_derivative(const SiegelMatrix& zm, const ComplexVector& z, std::span<const int> order, double tol) {
  if (order.size() != zm.genus()) throw ValidationError("order", "multi-index length must equal the genus");
  int total = 0;
  for (int k : order) {
    if (k < 0) throw ValidationError("order", "negative derivative order");
    total += k;
  }
  const Plan plan = make_plan(zm, z, tol, 0.0, 2.0 * kPi, total);
  Complex sum = 0.0;
  const Complex two_pi_i(0.0, 2.0 * kPi);
  const std::size_t terms = for_each_point(plan, [&](const Eigen::VectorXd& u) {
    Complex factor = 1.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
      for (int p = 0; p < order[j]; ++p) factor *= two_pi_i * u(static_cast<Eigen::Index>(j));
    }
    sum += factor * std::exp(term_exponent(zm, z, u) - plan.log_scale);
  });
  return finish(plan, sum, terms);
}

ThetaSeries theta_series(const SiegelMatrix& zm, const ComplexVector& z, const std::vector<Series>& displacement,
                         double tol) {
  const std::size_t g = zm.genus();
  if (displacement.size() != g) throw ValidationError("displacement", "one series per coordinate required");
  if (g == 0) throw ValidationError("displacement", "genus 0 has no theta series");
  const SeriesLayout& layout = displacement.front().layout();
  ComplexVector base = z;
  bool linear = true;
  double mass = 0.0;  // sum of |coefficients| of all displacements, constant excluded
  for (std::size_t j = 0; j < g; ++j) {
    if (&displacement[j].layout() != &layout) throw ValidationError("displacement", "mismatched layouts");
    base(static_cast<Eigen::Index>(j)) += displacement[j].constant_term();
    for (std::size_t k = 1; k < layout.size(); ++k) {
      mass += std::abs(displacement[j][k]);
      if (layout.degree_of(k) > 1 && displacement[j][k] != Complex{}) linear = false;
    }
  }
  // Each coefficient of exp(2 pi i u.d) is bounded by (1 + 2 pi mass |u|_inf)^degree.
  const Plan plan = make_plan(zm, base, tol, 1.0, 2.0 * kPi * mass, layout.degree());

  const Complex two_pi_i(0.0, 2.0 * kPi);
  Series out(layout);
  std::vector<Complex> lin(layout.vars());
  std::vector<std::size_t> linear_index(layout.vars());
  for (std::size_t v = 0; v < layout.vars(); ++v) {
    std::vector<int> e(layout.vars(), 0);
    e[v] = 1;
    linear_index[v] = layout.degree() >= 1 ? layout.index_of(e) : 0;
  }
  const std::size_t terms = for_each_point(plan, [&](const Eigen::VectorXd& u) {
    const Complex c0 = term_exponent(zm, base, u) - plan.log_scale;
    if (linear) {
      for (std::size_t v = 0; v < layout.vars(); ++v) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < g; ++j) acc += u(static_cast<Eigen::Index>(j)) * displacement[j][linear_index[v]];
        lin[v] = two_pi_i * acc;
      }
      out += Series::exp_linear(layout, c0, lin);
    } else {
      Series e(layout);
      for (std::size_t j = 0; j < g; ++j) e.add_scaled(displacement[j], two_pi_i * u(static_cast<Eigen::Index>(j)));
      e[0] = c0;
      out += e.exp();
    }
  });
  ThetaSeries result{std::move(out), plan.log_scale, plan.radius, plan.bound, terms};
  return result;
}

double quasi_periodicity_residual(const SiegelMatrix& zm, const ComplexVector& z, std::size_t i, double tol) {
  if (i >= zm.genus()) throw ValidationError("index", "coordinate out of range");
  const auto idx = static_cast<Eigen::Index>(i);
  const ThetaValue base = theta(zm, z, tol);
  if (std::abs(base.scaled) <= 1e3 * base.bound) {
    throw PrecisionError("theta vanishes at z to within its tail bound; residual undefined");
  }
  const ComplexVector shifted_z = z + zm.matrix().col(idx);
  const ThetaValue shifted = theta(zm, shifted_z, tol);
  const Complex factor = std::exp(Complex(0.0, -kPi) * zm.matrix()(idx, idx) - Complex(0.0, 2.0 * kPi) * z(idx));
  const Complex lhs = shifted.scaled * std::exp(shifted.log_scale - base.log_scale);
  return std::abs(lhs - factor * base.scaled) / std::abs(factor * base.scaled);
}

}  // namespace tropkp

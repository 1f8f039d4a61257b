#pragma once

#include "tropkp/series.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace tropkp {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Symmetric complex matrix with positive definite imaginary part.
class SiegelMatrix {
 public:
  SiegelMatrix() = default;
  // Throws ValidationError if not square, not symmetric to 1e-12 (relative
  // to the largest entry), or if Im Z is not positive definite.
  explicit SiegelMatrix(ComplexMatrix z);

  std::size_t genus() const noexcept { return static_cast<std::size_t>(z_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return z_; }
  const Eigen::MatrixXd& imag() const noexcept { return y_; }
  double min_imag_eigenvalue() const noexcept { return lambda_min_; }

 private:
  ComplexMatrix z_;
  Eigen::MatrixXd y_;
  double lambda_min_ = 0.0;
};

// value = scaled * exp(log_scale). log_scale is the log-magnitude of the
// largest term of the series; callers that multiply by tiny or huge
// prefactors should combine in log space through `scaled`.
struct ThetaValue {
  Complex value;
  Complex scaled;
  double log_scale = 0.0;
  double radius = 0.0;      // truncation radius in the sqrt(pi Im Z) metric
  double bound = 0.0;       // omitted tail, relative to exp(log_scale)
  std::size_t terms = 0;
};

// sum over u in Z^g of exp(pi i (u Z u^T + 2 z u^T)), truncated so that the
// rigorous tail bound is below tol times the largest term. Throws
// PrecisionError if that needs an unreasonable number of terms.
ThetaValue theta(const SiegelMatrix& z_matrix, const ComplexVector& z, double tol = 1e-14);

// Partial derivative of the order given per coordinate, summed term by term.
ThetaValue theta_derivative(const SiegelMatrix& z_matrix, const ComplexVector& z, std::span<const int> order,
                            double tol = 1e-14);

// theta(Z, z + d(t)) as a power series in t, where d has one series per
// coordinate (all with the same layout). Coefficients are scaled by
// exp(-log_scale) like ThetaValue::scaled; `bound` covers every
// coefficient.
struct ThetaSeries {
  Series scaled;
  double log_scale = 0.0;
  double radius = 0.0;
  double bound = 0.0;
  std::size_t terms = 0;
};

ThetaSeries theta_series(const SiegelMatrix& z_matrix, const ComplexVector& z, const std::vector<Series>& displacement,
                         double tol = 1e-14);

// |theta(z + Z e_i) - f theta(z)| / |f theta(z)| with
// f = exp(-pi i Z_ii - 2 pi i z_i). Dividing by |theta(z)| alone would carry
// the factor |f| and floor the residual at about eps |f| in double precision.
// Throws PrecisionError if theta(z) is zero to within its tail bound.
double quasi_periodicity_residual(const SiegelMatrix& z_matrix, const ComplexVector& z, std::size_t i,
                                  double tol = 1e-15);

// Rigorous bound for sum_{|v| >= radius} exp(-|v|^2) (a + c |v|)^k over a
// lattice whose nonzero vectors have length >= rho. Requires radius >= rho.
double lattice_gaussian_tail(std::size_t dim, double rho, double radius, double a, double c, int k);

}  // namespace tropkp

#pragma once

#include "tropkp/graph.hpp"
#include "tropkp/matrix.hpp"
#include "tropkp/rational.hpp"

#include <nlohmann/json.hpp>

#include <compare>
#include <span>

namespace tropkp {

// Element of the rational span of the edge variables t_e, stored densely by
// edge index. Forms over the same curve always have the same size.
class LinearForm {
 public:
  LinearForm() = default;
  explicit LinearForm(std::size_t edge_count) : coeffs_(edge_count) {}
  explicit LinearForm(RationalVector coeffs) : coeffs_(std::move(coeffs)) {}

  static LinearForm variable(std::size_t edge_count, std::size_t edge);

  std::size_t size() const noexcept { return coeffs_.size(); }
  const Rational& operator[](std::size_t e) const { return coeffs_[e]; }
  Rational& operator[](std::size_t e) { return coeffs_[e]; }
  const RationalVector& coefficients() const noexcept { return coeffs_; }

  bool is_zero() const;

  // Specialise t_e -> lengths[e].
  Rational evaluate(std::span<const Rational> lengths) const;

  // Coefficientwise partial order: a <= b iff a_e <= b_e for every e.
  bool dominated_by(const LinearForm& other) const;

  LinearForm& operator+=(const LinearForm& other);
  LinearForm& operator-=(const LinearForm& other);
  LinearForm& operator*=(const Rational& scalar);

  friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(LinearForm a, const Rational& s) { return a *= s; }
  friend LinearForm operator*(const Rational& s, LinearForm a) { return a *= s; }

  bool operator==(const LinearForm& other) const { return coeffs_ == other.coeffs_; }
  // Lexicographic; only used to give containers a deterministic order.
  bool operator<(const LinearForm& other) const;

 private:
  RationalVector coeffs_;
};

// Symmetric, positive definite rational matrix B_C = M diag(l) M^T.
class TropicalPeriodMatrix {
 public:
  TropicalPeriodMatrix() = default;
  // Throws ValidationError unless square, symmetric and positive definite
  // (checked exactly through the LDL^T pivots).
  explicit TropicalPeriodMatrix(DenseMatrix<Rational> entries);

  std::size_t dimension() const noexcept { return entries_.rows(); }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const DenseMatrix<Rational>& entries() const noexcept { return entries_; }

  bool operator==(const TropicalPeriodMatrix&) const = default;

 private:
  DenseMatrix<Rational> entries_;
};

class SymbolicPeriodMatrix {
 public:
  SymbolicPeriodMatrix() = default;
  SymbolicPeriodMatrix(DenseMatrix<LinearForm> entries, std::size_t edge_count);

  std::size_t dimension() const noexcept { return entries_.rows(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const LinearForm& operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  // Integer matrix of t_e coefficients.
  DenseMatrix<Rational> coefficient_matrix(std::size_t edge) const;

  bool operator==(const SymbolicPeriodMatrix&) const = default;

 private:
  DenseMatrix<LinearForm> entries_;
  std::size_t edge_count_ = 0;
};

// B[j][k] = sum_e l(e) M[j][e] M[k][e]. Throws ValidationError if the basis
// was not built for this curve.
TropicalPeriodMatrix period_matrix(const TropicalCurve& curve, const CycleBasis& basis);

SymbolicPeriodMatrix symbolic_period_matrix(const CycleBasis& basis);

TropicalPeriodMatrix specialize(const SymbolicPeriodMatrix& symbolic, std::span<const Rational> lengths);

Rational quadratic_form(const TropicalPeriodMatrix& b, std::span<const Rational> x, std::span<const Rational> y);
LinearForm quadratic_form(const SymbolicPeriodMatrix& b, std::span<const Rational> x, std::span<const Rational> y);

RationalVector to_rationals(const LatticePoint& x);

// Exact determinant by fraction-free elimination over Q.
Rational determinant(const DenseMatrix<Rational>& m);

// B = U D U^T with U unit upper triangular, so that
//   y B y^T = sum_s D_s (y_s + sum_{i<s} U(i,s) y_i)^2
// and the s-th square only involves coordinates 0..s. Returns false if some
// pivot is not strictly positive (matrix not positive definite).
struct LdlFactors {
  DenseMatrix<Rational> upper;  // unit upper triangular U
  RationalVector pivots;        // D
};
bool ldl_decompose(const DenseMatrix<Rational>& m, LdlFactors& out);

// Exact inverse of a nonsingular matrix.
DenseMatrix<Rational> inverse(const DenseMatrix<Rational>& m);

nlohmann::json to_json(const LinearForm& form, const TropicalCurve& curve);
LinearForm linear_form_from_json(const nlohmann::json& doc, const TropicalCurve& curve);
nlohmann::json to_json(const TropicalPeriodMatrix& b);
nlohmann::json to_json(const SymbolicPeriodMatrix& b, const TropicalCurve& curve);

}  // namespace tropkp

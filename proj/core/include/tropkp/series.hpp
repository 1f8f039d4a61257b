#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tropkp {

using Complex = std::complex<double>;

// Monomials of total degree <= degree in `vars` variables, ordered by degree
// and then reverse-lexicographically within a degree (1, t1, t2, ..., t1^2,
// t1 t2, ...). Layouts are immutable and shared.
class SeriesLayout {
 public:
  static const SeriesLayout& get(std::size_t vars, int degree);

  std::size_t vars() const noexcept { return vars_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return degrees_.size(); }

  std::span<const int> exponent(std::size_t index) const {
    return {exponents_.data() + index * vars_, vars_};
  }
  int degree_of(std::size_t index) const { return degrees_[index]; }
  // Throws std::out_of_range when the exponent is outside the layout.
  std::size_t index_of(std::span<const int> exponent) const;

  // For index > 0: a variable with positive exponent and the index of the
  // monomial divided by it.
  std::size_t parent(std::size_t index) const { return parents_[index]; }
  std::size_t parent_var(std::size_t index) const { return parent_vars_[index]; }

  struct Product {
    std::size_t lhs, rhs, out;
  };
  // All (i, j, k) with m_i m_j = m_k inside the layout, sorted by deg(m_k).
  const std::vector<Product>& products() const noexcept { return products_; }

 private:
  SeriesLayout(std::size_t vars, int degree);

  std::size_t vars_;
  int degree_;
  std::vector<int> exponents_;
  std::vector<int> degrees_;
  std::vector<std::size_t> parents_;
  std::vector<std::size_t> parent_vars_;
  std::vector<Product> products_;
};

// Truncated multivariate power series with complex coefficients.
class Series {
 public:
  Series(std::size_t vars, int degree);
  explicit Series(const SeriesLayout& layout);

  static Series constant(std::size_t vars, int degree, Complex value);
  static Series variable(std::size_t vars, int degree, std::size_t var);

  const SeriesLayout& layout() const noexcept { return *layout_; }
  std::size_t vars() const noexcept { return layout_->vars(); }
  int degree() const noexcept { return layout_->degree(); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex& operator[](std::size_t index) { return coeffs_[index]; }
  const Complex& operator[](std::size_t index) const { return coeffs_[index]; }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

  Complex constant_term() const { return coeffs_[0]; }
  Complex coefficient(std::span<const int> exponent) const;
  // Mixed partial derivative at the origin.
  Complex derivative(std::span<const int> order) const;

  // Nonzero coefficients only in degree 1.
  bool is_linear() const;

  Series& operator+=(const Series& other);
  Series& operator-=(const Series& other);
  Series& operator*=(Complex scalar);
  // out += scalar * other, without a temporary.
  void add_scaled(const Series& other, Complex scalar);

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, Complex s) { return a *= s; }
  friend Series operator*(Complex s, Series a) { return a *= s; }
  friend Series operator*(const Series& a, const Series& b);

  Series exp() const;
  // Requires a nonzero constant term; the branch of the constant is the
  // principal one.
  Series log() const;

  // exp(c0 + sum_v l_v t_v), built directly from the monomial recursion.
  static Series exp_linear(const SeriesLayout& layout, Complex c0, std::span<const Complex> linear);

 private:
  void check_same(const Series& other) const;

  const SeriesLayout* layout_;
  std::vector<Complex> coeffs_;
};

}  // namespace tropkp

#include "tropkp/period.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>

namespace tropkp {

LinearForm LinearForm::variable(std::size_t edge_count, std::size_t edge) {
  LinearForm out(edge_count);
  out.coeffs_[edge] = 1;
  return out;
}

bool LinearForm::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return sgn(c) == 0; });
}

Rational LinearForm::evaluate(std::span<const Rational> lengths) const {
  if (lengths.size() != coeffs_.size()) throw ValidationError("lengths", "dimension mismatch");
  Rational sum = 0;
  for (std::size_t e = 0; e < coeffs_.size(); ++e) sum += coeffs_[e] * lengths[e];
  return sum;
}

bool LinearForm::dominated_by(const LinearForm& other) const {
  for (std::size_t e = 0; e < coeffs_.size(); ++e) {
    if (coeffs_[e] > other.coeffs_[e]) return false;
  }
  return true;
}

LinearForm& LinearForm::operator+=(const LinearForm& other) {
  if (coeffs_.empty()) coeffs_.resize(other.size());
  for (std::size_t e = 0; e < coeffs_.size(); ++e) coeffs_[e] += other.coeffs_[e];
  return *this;
}

LinearForm& LinearForm::operator-=(const LinearForm& other) {
  if (coeffs_.empty()) coeffs_.resize(other.size());
  for (std::size_t e = 0; e < coeffs_.size(); ++e) coeffs_[e] -= other.coeffs_[e];
  return *this;
}

LinearForm& LinearForm::operator*=(const Rational& scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

bool LinearForm::operator<(const LinearForm& other) const {
  return std::lexicographical_compare(coeffs_.begin(), coeffs_.end(), other.coeffs_.begin(),
                                      other.coeffs_.end());
}

bool ldl_decompose(const DenseMatrix<Rational>& m, LdlFactors& out) {
  const std::size_t n = m.rows();
  // Eliminate from the last row/column; each step completes the square in
  // coordinate `step` against the coordinates below it.
  DenseMatrix<Rational> a = m;
  out.upper = DenseMatrix<Rational>(n, n, Rational(0));
  out.pivots.assign(n, Rational(0));
  for (std::size_t step = n; step-- > 0;) {
    const Rational pivot = a(step, step);
    if (sgn(pivot) <= 0) return false;
    out.pivots[step] = pivot;
    out.upper(step, step) = 1;
    for (std::size_t i = 0; i < step; ++i) out.upper(i, step) = a(i, step) / pivot;
    for (std::size_t i = 0; i < step; ++i) {
      for (std::size_t j = 0; j < step; ++j) a(i, j) -= out.upper(i, step) * pivot * out.upper(j, step);
    }
  }
  return true;
}

Rational determinant(const DenseMatrix<Rational>& m) {
  const std::size_t n = m.rows();
  DenseMatrix<Rational> a = m;
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a(p, c)) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(p, k), a(c, k));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(a(r, c)) == 0) continue;
      Rational f = a(r, c) / a(c, c);
      for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

DenseMatrix<Rational> inverse(const DenseMatrix<Rational>& m) {
  const std::size_t n = m.rows();
  DenseMatrix<Rational> a = m;
  DenseMatrix<Rational> inv(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a(p, c)) == 0) ++p;
    if (p == n) throw ValidationError("matrix", "singular matrix");
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a(p, k), a(c, k));
        std::swap(inv(p, k), inv(c, k));
      }
    }
    Rational d = a(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      a(c, k) /= d;
      inv(c, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(a(r, c)) == 0) continue;
      Rational f = a(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

TropicalPeriodMatrix::TropicalPeriodMatrix(DenseMatrix<Rational> entries) : entries_(std::move(entries)) {
  const std::size_t n = entries_.rows();
  if (entries_.cols() != n) throw ValidationError("period_matrix", "matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (entries_(i, j) != entries_(j, i)) throw ValidationError("period_matrix", "matrix is not symmetric");
    }
  }
  LdlFactors f;
  if (!ldl_decompose(entries_, f)) throw ValidationError("period_matrix", "matrix is not positive definite");
}

SymbolicPeriodMatrix::SymbolicPeriodMatrix(DenseMatrix<LinearForm> entries, std::size_t edge_count)
    : entries_(std::move(entries)), edge_count_(edge_count) {
  const std::size_t n = entries_.rows();
  if (entries_.cols() != n) throw ValidationError("symbolic_period_matrix", "matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (entries_(i, j).size() != edge_count_) {
        throw ValidationError("symbolic_period_matrix", "entry has the wrong number of edge variables");
      }
      if (j > i && !(entries_(i, j) == entries_(j, i))) {
        throw ValidationError("symbolic_period_matrix", "matrix is not symmetric");
      }
    }
  }
}

DenseMatrix<Rational> SymbolicPeriodMatrix::coefficient_matrix(std::size_t edge) const {
  const std::size_t n = dimension();
  DenseMatrix<Rational> out(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(i, j) = entries_(i, j)[edge];
  }
  return out;
}

TropicalPeriodMatrix period_matrix(const TropicalCurve& curve, const CycleBasis& basis) {
  if (basis.edge_count() != curve.edge_count()) {
    throw ValidationError("basis", "cycle basis does not belong to this curve");
  }
  const auto lengths = curve.lengths();
  return specialize(symbolic_period_matrix(basis), lengths);
}

SymbolicPeriodMatrix symbolic_period_matrix(const CycleBasis& basis) {
  const std::size_t n = basis.rank();
  const std::size_t ne = basis.edge_count();
  DenseMatrix<LinearForm> entries(n, n, LinearForm(ne));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t e = 0; e < ne; ++e) {
        const auto prod = basis.matrix(j, e) * basis.matrix(k, e);
        if (prod != 0) entries(j, k)[e] += Rational(static_cast<long>(prod));
      }
    }
  }
  return SymbolicPeriodMatrix(std::move(entries), ne);
}

TropicalPeriodMatrix specialize(const SymbolicPeriodMatrix& symbolic, std::span<const Rational> lengths) {
  if (lengths.size() != symbolic.edge_count()) throw ValidationError("lengths", "expected one length per edge");
  for (const auto& l : lengths) {
    if (sgn(l) <= 0) throw ValidationError("lengths", "lengths must be positive");
  }
  const std::size_t n = symbolic.dimension();
  DenseMatrix<Rational> entries(n, n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) entries(i, j) = symbolic(i, j).evaluate(lengths);
  }
  return TropicalPeriodMatrix(std::move(entries));
}

Rational quadratic_form(const TropicalPeriodMatrix& b, std::span<const Rational> x, std::span<const Rational> y) {
  const std::size_t n = b.dimension();
  if (x.size() != n || y.size() != n) throw ValidationError("quadratic_form", "dimension mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(x[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) sum += x[i] * b(i, j) * y[j];
  }
  return sum;
}

LinearForm quadratic_form(const SymbolicPeriodMatrix& b, std::span<const Rational> x, std::span<const Rational> y) {
  const std::size_t n = b.dimension();
  if (x.size() != n || y.size() != n) throw ValidationError("quadratic_form", "dimension mismatch");
  LinearForm sum(b.edge_count());
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(x[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(y[j]) == 0) continue;
      sum += b(i, j) * Rational(x[i] * y[j]);
    }
  }
  return sum;
}

RationalVector to_rationals(const LatticePoint& x) {
  RationalVector out;
  out.reserve(x.size());
  for (auto v : x) out.emplace_back(static_cast<long>(v));
  return out;
}

nlohmann::json to_json(const LinearForm& form, const TropicalCurve& curve) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t e = 0; e < form.size(); ++e) {
    if (sgn(form[e]) != 0) out["t_" + curve.edges()[e].id] = to_string(form[e]);
  }
  return out;
}

LinearForm linear_form_from_json(const nlohmann::json& doc, const TropicalCurve& curve) {
  if (!doc.is_object()) throw ValidationError("linear_form", "expected an object");
  LinearForm form(curve.edge_count());
  for (const auto& [key, value] : doc.items()) {
    if (key.rfind("t_", 0) != 0) throw ValidationError("linear_form." + key, "keys must look like t_<edge id>");
    auto e = curve.find_edge(key.substr(2));
    if (!e) throw ValidationError("linear_form." + key, "unknown edge");
    if (!value.is_string()) throw ValidationError("linear_form." + key, "coefficient must be a \"p/q\" string");
    form[*e] = parse_rational(value.get<std::string>());
  }
  return form;
}

nlohmann::json to_json(const TropicalPeriodMatrix& b) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < b.dimension(); ++j) row.push_back(to_string(b(i, j)));
    out.push_back(row);
  }
  return out;
}

nlohmann::json to_json(const SymbolicPeriodMatrix& b, const TropicalCurve& curve) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < b.dimension(); ++j) row.push_back(to_json(b(i, j), curve));
    out.push_back(row);
  }
  return out;
}

}  // namespace tropkp

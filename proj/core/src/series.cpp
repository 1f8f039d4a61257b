#include "tropkp/series.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tropkp {

const SeriesLayout& SeriesLayout::get(std::size_t vars, int degree) {
  if (degree < 0) throw ValidationError("series", "negative degree");
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<SeriesLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{vars, degree}];
  if (!slot) slot.reset(new SeriesLayout(vars, degree));
  return *slot;
}

SeriesLayout::SeriesLayout(std::size_t vars, int degree) : vars_(vars), degree_(degree) {
  std::vector<int> current(vars, 0);
  // Degree-by-degree generation; within a degree, exponents of earlier
  // variables are exhausted first.
  auto emit = [&](auto&& self, std::size_t var, int remaining, int total) -> void {
    if (var + 1 >= vars) {
      if (vars > 0) current[vars - 1] = remaining;
      if (vars == 0 && remaining != 0) return;
      exponents_.insert(exponents_.end(), current.begin(), current.end());
      degrees_.push_back(total);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[var] = e;
      self(self, var + 1, remaining - e, total);
    }
    current[var] = 0;
  };
  for (int d = 0; d <= (vars == 0 ? 0 : degree); ++d) emit(emit, 0, d, d);

  const std::size_t n = degrees_.size();
  parents_.assign(n, 0);
  parent_vars_.assign(n, 0);
  std::vector<int> tmp(vars);
  for (std::size_t k = 1; k < n; ++k) {
    auto e = exponent(k);
    std::copy(e.begin(), e.end(), tmp.begin());
    std::size_t v = 0;
    while (tmp[v] == 0) ++v;
    --tmp[v];
    parents_[k] = index_of(tmp);
    parent_vars_[k] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (degrees_[i] + degrees_[j] > degree) continue;
      for (std::size_t v = 0; v < vars; ++v) tmp[v] = exponent(i)[v] + exponent(j)[v];
      products_.push_back({i, j, index_of(tmp)});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [&](const Product& a, const Product& b) { return degrees_[a.out] < degrees_[b.out]; });
}

std::size_t SeriesLayout::index_of(std::span<const int> exponent) const {
  if (exponent.size() != vars_) throw std::out_of_range("exponent arity");
  int total = 0;
  for (int e : exponent) {
    if (e < 0) throw std::out_of_range("negative exponent");
    total += e;
  }
  if (total > degree_) throw std::out_of_range("exponent beyond truncation degree");
  // Linear scan inside the block of the right degree; layouts are small.
  auto first = std::lower_bound(degrees_.begin(), degrees_.end(), total) - degrees_.begin();
  for (std::size_t k = static_cast<std::size_t>(first); k < degrees_.size() && degrees_[k] == total; ++k) {
    if (std::equal(exponent.begin(), exponent.end(), exponents_.begin() + k * vars_)) return k;
  }
  throw std::out_of_range("exponent not found");
}

Series::Series(std::size_t vars, int degree) : Series(SeriesLayout::get(vars, degree)) {}

Series::Series(const SeriesLayout& layout) : layout_(&layout), coeffs_(layout.size()) {}

Series Series::constant(std::size_t vars, int degree, Complex value) {
  Series s(vars, degree);
  s.coeffs_[0] = value;
  return s;
}

Series Series::variable(std::size_t vars, int degree, std::size_t var) {
  Series s(vars, degree);
  if (var >= vars) throw ValidationError("series", "variable index out of range");
  if (degree >= 1) {
    std::vector<int> e(vars, 0);
    e[var] = 1;
    s.coeffs_[s.layout_->index_of(e)] = 1.0;
  }
  return s;
}

Complex Series::coefficient(std::span<const int> exponent) const {
  return coeffs_[layout_->index_of(exponent)];
}

Complex Series::derivative(std::span<const int> order) const {
  double factor = 1.0;
  for (int e : order) {
    for (int i = 2; i <= e; ++i) factor *= i;
  }
  return coefficient(order) * factor;
}

bool Series::is_linear() const {
  if (coeffs_[0] != Complex{}) return false;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    if (layout_->degree_of(k) > 1 && coeffs_[k] != Complex{}) return false;
  }
  return true;
}

void Series::check_same(const Series& other) const {
  if (layout_ != other.layout_) throw ValidationError("series", "mismatched layouts");
}

Series& Series::operator+=(const Series& other) {
  check_same(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  return *this;
}

Series& Series::operator-=(const Series& other) {
  check_same(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  return *this;
}

Series& Series::operator*=(Complex scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

void Series::add_scaled(const Series& other, Complex scalar) {
  check_same(other);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += scalar * other.coeffs_[k];
}

Series operator*(const Series& a, const Series& b) {
  a.check_same(b);
  Series out(*a.layout_);
  for (const auto& p : a.layout_->products()) out.coeffs_[p.out] += a.coeffs_[p.lhs] * b.coeffs_[p.rhs];
  return out;
}

Series Series::exp() const {
  // f = exp(g) with g(0) = 0 satisfies n f_n = sum_k k g_k f_{n-k} on
  // homogeneous parts (Euler operator), so f fills in by degree.
  Series out(*layout_);
  out.coeffs_[0] = 1.0;
  const auto& lay = *layout_;
  for (const auto& p : lay.products()) {
    const int dg = lay.degree_of(p.lhs);
    if (dg == 0) continue;
    out.coeffs_[p.out] += static_cast<double>(dg) * coeffs_[p.lhs] * out.coeffs_[p.rhs] /
                          static_cast<double>(lay.degree_of(p.out));
  }
  out *= std::exp(coeffs_[0]);
  return out;
}

Series Series::log() const {
  const Complex h0 = coeffs_[0];
  if (h0 == Complex{}) throw PrecisionError("logarithm of a series with zero constant term");
  // n h0 f_n = n h_n - sum_{1 <= k < n} k f_k h_{n-k}
  const auto& lay = *layout_;
  Series out(lay);
  std::vector<Complex> acc(coeffs_.size());
  auto finish_degree = [&](int d) {
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      if (lay.degree_of(k) == d) out.coeffs_[k] = (static_cast<double>(d) * coeffs_[k] - acc[k]) / (static_cast<double>(d) * h0);
    }
  };
  int done = 0;
  for (const auto& p : lay.products()) {
    const int dout = lay.degree_of(p.out);
    while (done < dout - 1) finish_degree(++done);
    const int di = lay.degree_of(p.lhs);
    if (di == 0 || lay.degree_of(p.rhs) == 0) continue;
    acc[p.out] += static_cast<double>(di) * out.coeffs_[p.lhs] * coeffs_[p.rhs];
  }
  while (done < lay.degree()) finish_degree(++done);
  out.coeffs_[0] = std::log(h0);
  return out;
}

Series Series::exp_linear(const SeriesLayout& layout, Complex c0, std::span<const Complex> linear) {
  if (linear.size() != layout.vars()) throw ValidationError("series", "linear coefficient count");
  Series out(layout);
  out.coeffs_[0] = std::exp(c0);
  for (std::size_t k = 1; k < out.coeffs_.size(); ++k) {
    const std::size_t v = layout.parent_var(k);
    out.coeffs_[k] = out.coeffs_[layout.parent(k)] * linear[v] / static_cast<double>(layout.exponent(k)[v]);
  }
  return out;
}

}  // namespace tropkp

#include "tropkp/tropical_theta.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace tropkp {
namespace {

__extension__ typedef __int128 Int128;

void check_dimension(const TropicalPeriodMatrix& b, std::span<const Rational> v, const char* what) {
  if (v.size() != b.dimension()) {
    throw ValidationError(what, "expected " + std::to_string(b.dimension()) + " entries, got " +
                                    std::to_string(v.size()));
  }
}

class SphereDecoder {
 public:
  SphereDecoder(const TropicalPeriodMatrix& b, std::span<const Rational> target)
      : n_(b.dimension()), target_(target.begin(), target.end()) {
    if (!ldl_decompose(b.entries(), factors_)) {
      throw ValidationError("period_matrix", "matrix is not positive definite");
    }
    x_.assign(n_, 0);
    centers_.assign(n_, Rational(0));
  }

  ClosestVectors run() {
    ClosestVectors out;
    if (n_ == 0) {
      out.distance2 = 0;
      out.points.push_back({});
      return out;
    }
    best_ = babai_distance();
    descend(0, Rational(0));
    std::sort(found_.begin(), found_.end());
    out.distance2 = best_;
    out.points = std::move(found_);
    out.nodes_visited = nodes_;
    return out;
  }

 private:
  Rational center(std::size_t s) const {
    Rational c = target_[s];
    for (std::size_t i = 0; i < s; ++i) {
      c -= factors_.upper(i, s) * (Rational(static_cast<long>(x_[i])) - target_[i]);
    }
    return c;
  }

  Rational babai_distance() {
    Rational total = 0;
    for (std::size_t s = 0; s < n_; ++s) {
      Rational c = center(s);
      x_[s] = to_int64(round_nearest(c));
      Rational d = Rational(static_cast<long>(x_[s])) - c;
      total += factors_.pivots[s] * d * d;
    }
    return total;
  }

  void visit(std::size_t s, const Rational& partial_with_term) {
    if (s + 1 == n_) {
      if (partial_with_term < best_) {
        best_ = partial_with_term;
        found_.clear();
      }
      found_.push_back(x_);
    } else {
      descend(s + 1, partial_with_term);
    }
  }

  void descend(std::size_t s, const Rational& partial) {
    ++nodes_;
    const Rational c = center(s);
    const std::int64_t start = to_int64(round_nearest(c));
    const Rational& d = factors_.pivots[s];
    auto term_at = [&](std::int64_t v) {
      Rational diff = Rational(static_cast<long>(v)) - c;
      return Rational(partial + d * diff * diff);
    };
    // Outward from the rounded centre; each direction is monotone past the
    // first step, so stop at the first point beyond the current radius.
    for (std::int64_t v = start;; ++v) {
      Rational value = term_at(v);
      if (value > best_) break;
      x_[s] = v;
      visit(s, value);
    }
    for (std::int64_t v = start - 1;; --v) {
      Rational value = term_at(v);
      if (value > best_) break;
      x_[s] = v;
      visit(s, value);
    }
  }

  std::size_t n_;
  RationalVector target_;
  LdlFactors factors_;
  LatticePoint x_;
  RationalVector centers_;
  Rational best_;
  std::vector<LatticePoint> found_;
  std::size_t nodes_ = 0;
};

}  // namespace

ClosestVectors closest_vectors(const TropicalPeriodMatrix& b, std::span<const Rational> target) {
  check_dimension(b, target, "target");
  return SphereDecoder(b, target).run();
}

Rational tropical_objective(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, const LatticePoint& x) {
  const auto xr = to_rationals(x);
  return quadratic_form(b, alpha, xr) - quadratic_form(b, xr, xr) / 2;
}

LinearForm tropical_objective(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha, const LatticePoint& x) {
  const auto xr = to_rationals(x);
  return quadratic_form(b, alpha, xr) - quadratic_form(b, xr, xr) * Rational(1, 2);
}

DelaunaySet delaunay_set(const TropicalPeriodMatrix& b, std::span<const Rational> alpha) {
  check_dimension(b, alpha, "alpha");
  auto cvp = closest_vectors(b, alpha);
  DelaunaySet out;
  // max_x alpha B x - x B x / 2 = (alpha B alpha - min (x-alpha) B (x-alpha)) / 2
  out.value = (quadratic_form(b, alpha, alpha) - cvp.distance2) / 2;
  for (const auto& x : cvp.points) {
    if (tropical_objective(b, alpha, x) != out.value) {
      throw InconsistencyError("closest-vector value disagrees with the direct tropical objective");
    }
  }
  out.points = std::move(cvp.points);
  return out;
}

Rational tropical_theta(const TropicalPeriodMatrix& b, std::span<const Rational> alpha) {
  return delaunay_set(b, alpha).value;
}

std::vector<MaximalForm> maximal_forms_at(const SymbolicPeriodMatrix& b, std::span<const Rational> lengths,
                                          std::span<const Rational> alpha) {
  const auto numeric = specialize(b, lengths);
  const auto d = delaunay_set(numeric, alpha);
  std::map<LinearForm, std::vector<LatticePoint>> groups;
  for (const auto& x : d.points) groups[tropical_objective(b, alpha, x)].push_back(x);
  std::vector<MaximalForm> out;
  for (auto& [form, witnesses] : groups) {
    if (form.evaluate(lengths) != d.value) {
      throw InconsistencyError("Delaunay point's symbolic objective does not specialise to the maximum");
    }
    out.push_back(MaximalForm{form, std::move(witnesses)});
  }
  return out;
}

namespace {

// Objective forms scaled to integers: scale * a_e(x) = lin_e . x - x quad_e x^T.
class ScaledObjective {
 public:
  ScaledObjective(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha)
      : n_(b.dimension()), ne_(b.edge_count()) {
    if (alpha.size() != n_) throw ValidationError("alpha", "dimension mismatch");
    mpz_class den = 1;
    for (const auto& a : alpha) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), a.get_den_mpz_t());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t e = 0; e < ne_; ++e) {
          mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), b(i, j)[e].get_den_mpz_t());
        }
      }
    }
    scale_ = Rational(2 * den * den);
    lin_.assign(ne_ * n_, 0);
    quad_.assign(ne_ * n_ * n_, 0);
    for (std::size_t e = 0; e < ne_; ++e) {
      for (std::size_t j = 0; j < n_; ++j) {
        Rational a = 0;
        for (std::size_t i = 0; i < n_; ++i) a += alpha[i] * b(i, j)[e];
        lin_[e * n_ + j] = exact_int(a * scale_);
        for (std::size_t i = 0; i < n_; ++i) quad_[(e * n_ + i) * n_ + j] = exact_int(b(i, j)[e] * scale_ / 2);
      }
    }
  }

  void evaluate(const LatticePoint& x, std::vector<std::int64_t>& out) const {
    out.assign(ne_, 0);
    for (std::size_t e = 0; e < ne_; ++e) {
      Int128 acc = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        acc += static_cast<Int128>(lin_[e * n_ + j]) * x[j];
        Int128 row = 0;
        for (std::size_t i = 0; i < n_; ++i) row += static_cast<Int128>(quad_[(e * n_ + i) * n_ + j]) * x[i];
        acc -= row * x[j];
      }
      if (acc > INT64_MAX || acc < INT64_MIN) throw PrecisionError("objective overflow in maximal_elements");
      out[e] = static_cast<std::int64_t>(acc);
    }
  }

  LinearForm unscale(const std::vector<std::int64_t>& v) const {
    LinearForm form(ne_);
    for (std::size_t e = 0; e < ne_; ++e) form[e] = Rational(static_cast<long>(v[e])) / scale_;
    return form;
  }

 private:
  static std::int64_t exact_int(const Rational& r) {
    if (r.get_den() != 1) throw InconsistencyError("scaled objective is not integral");
    return to_int64(r.get_num());
  }

  std::size_t n_, ne_;
  Rational scale_;
  std::vector<std::int64_t> lin_;
  std::vector<std::int64_t> quad_;
};

std::vector<MaximalForm> maximal_in_box(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha, int radius) {
  const std::size_t n = b.dimension();
  const double points = std::pow(2.0 * radius + 1.0, static_cast<double>(n));
  if (points > 5e7) {
    throw ValidationError("radius", "box of radius " + std::to_string(radius) + " in dimension " +
                                        std::to_string(n) + " is too large to enumerate");
  }
  ScaledObjective objective(b, alpha);
  std::map<std::vector<std::int64_t>, std::vector<LatticePoint>> groups;
  LatticePoint x(n, -radius);
  std::vector<std::int64_t> value;
  while (true) {
    objective.evaluate(x, value);
    groups[value].push_back(x);
    std::size_t i = 0;
    while (i < n && x[i] == radius) x[i++] = -radius;
    if (i == n) break;
    ++x[i];
  }

  // Process in decreasing coefficient sum: a dominating form has a strictly
  // larger sum, so it is already in the front when its victims arrive.
  std::vector<const std::vector<std::int64_t>*> order;
  for (const auto& [k, v] : groups) order.push_back(&k);
  auto sum_of = [](const std::vector<std::int64_t>& v) {
    return std::accumulate(v.begin(), v.end(), Int128{0});
  };
  std::stable_sort(order.begin(), order.end(), [&](auto* a, auto* c) { return sum_of(*a) > sum_of(*c); });
  std::vector<const std::vector<std::int64_t>*> front;
  for (auto* candidate : order) {
    bool dominated = std::any_of(front.begin(), front.end(), [&](auto* f) {
      for (std::size_t e = 0; e < f->size(); ++e) {
        if ((*candidate)[e] > (*f)[e]) return false;
      }
      return true;
    });
    if (!dominated) front.push_back(candidate);
  }
  std::vector<MaximalForm> out;
  for (auto* f : front) {
    auto witnesses = groups.at(*f);
    std::sort(witnesses.begin(), witnesses.end());
    out.push_back(MaximalForm{objective.unscale(*f), std::move(witnesses)});
  }
  std::sort(out.begin(), out.end(), [](const MaximalForm& a, const MaximalForm& c) { return a.form < c.form; });
  return out;
}

bool same_forms(const std::vector<MaximalForm>& a, const std::vector<MaximalForm>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].form == b[i].form) || a[i].witnesses != b[i].witnesses) return false;
  }
  return true;
}

}  // namespace

MaximalElements maximal_elements(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha, int radius) {
  if (radius < 1) throw ValidationError("radius", "must be at least 1");
  auto first = maximal_in_box(b, alpha, radius);
  auto second = maximal_in_box(b, alpha, 2 * radius);
  MaximalElements out;
  out.stable = same_forms(first, second);
  out.radius = 2 * radius;
  out.forms = std::move(second);
  return out;
}

DecompositionReport verify_decomposition(const SymbolicPeriodMatrix& b, std::span<const Rational> lengths,
                                         std::span<const Rational> alpha) {
  DecompositionReport report;
  const auto numeric = specialize(b, lengths);
  const auto d = delaunay_set(numeric, alpha);
  report.theta = d.value;
  report.delaunay_size = d.points.size();

  std::int64_t reach = 1;
  for (const auto& x : d.points) {
    for (auto v : x) reach = std::max<std::int64_t>(reach, v < 0 ? -v : v);
  }
  const auto elements = maximal_elements(b, alpha, static_cast<int>(reach));

  bool first = true;
  for (const auto& m : elements.forms) {
    Rational value = m.form.evaluate(lengths);
    if (first || value > report.best_form_value) report.best_form_value = value;
    first = false;
  }
  report.value_matches = !first && report.best_form_value == report.theta;

  std::vector<LatticePoint> covered;
  std::vector<MaximalForm> achieving;
  for (const auto& m : elements.forms) {
    if (m.form.evaluate(lengths) != report.theta) continue;
    achieving.push_back(m);
    covered.insert(covered.end(), m.witnesses.begin(), m.witnesses.end());
  }
  report.achieving_forms = achieving.size();
  std::sort(covered.begin(), covered.end());
  const bool disjoint = std::adjacent_find(covered.begin(), covered.end()) == covered.end();
  report.witnesses_partition = disjoint && covered == d.points;
  report.forms_agree = same_forms(achieving, maximal_forms_at(b, lengths, alpha));
  return report;
}

nlohmann::json to_json(const LatticePoint& x) {
  nlohmann::json out = nlohmann::json::array();
  for (auto v : x) out.push_back(v);
  return out;
}

nlohmann::json to_json(const DelaunaySet& d) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& x : d.points) points.push_back(to_json(x));
  return {{"value", to_string(d.value)}, {"points", points}};
}

nlohmann::json to_json(const MaximalForm& f, const TropicalCurve& curve) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& x : f.witnesses) witnesses.push_back(to_json(x));
  return {{"form", to_json(f.form, curve)}, {"witnesses", witnesses}};
}

nlohmann::json to_json(const MaximalElements& m, const TropicalCurve& curve) {
  nlohmann::json forms = nlohmann::json::array();
  for (const auto& f : m.forms) forms.push_back(to_json(f, curve));
  return {{"forms", forms}, {"radius", m.radius}, {"stable", m.stable}};
}

nlohmann::json to_json(const DecompositionReport& r) {
  return {{"theta", to_string(r.theta)},
          {"best_form_value", to_string(r.best_form_value)},
          {"delaunay_size", r.delaunay_size},
          {"achieving_forms", r.achieving_forms},
          {"value_matches", r.value_matches},
          {"witnesses_partition", r.witnesses_partition},
          {"forms_agree", r.forms_agree},
          {"passed", r.passed()}};
}

}  // namespace tropkp

#include "tropkp/checks/oracles.hpp"

#include "tropkp/errors.hpp"
#include "tropkp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tropkp::checks {
namespace {

const Complex kTwoPiI(0.0, 2.0 * std::numbers::pi);

std::int64_t small_int(const mpz_class& v) {
  if (!v.fits_slong_p()) throw InconsistencyError("exhaustive_delaunay: scaled entry out of range");
  return v.get_si();
}

// Odometer over the box; returns false after the last point.
bool next_point(LatticePoint& x, int box) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < box) {
      ++x[i];
      return true;
    }
    x[i] = -box;
  }
  return false;
}

Complex residue(const CycleBasis& basis, std::size_t k, HalfEdge h) {
  return static_cast<double>(h.sign * basis.matrix(k, h.edge)) / kTwoPiI;
}

std::size_t end_vertex(const TropicalCurve& curve, HalfEdge h) {
  const Edge& e = curve.edges()[h.edge];
  return h.sign > 0 ? e.tail : e.head;
}

const MarkedComponent& component_of(const TropicalCurve& curve, const MarkedCurve& marked, std::size_t v) {
  const MarkedComponent* comp = marked.find(curve.vertices()[v].id);
  if (!comp) throw ValidationError(curve.vertices()[v].id, "missing component");
  return *comp;
}

Complex node(const TropicalCurve& curve, const MarkedComponent& comp, HalfEdge h) {
  return comp.nodes.at(half_edge_label(curve, h));
}

// Half-edges at vertex v.
std::vector<HalfEdge> ends_at(const TropicalCurve& curve, std::size_t v) {
  std::vector<HalfEdge> out;
  for (std::size_t e = 0; e < curve.edge_count(); ++e) {
    if (curve.edges()[e].tail == v) out.push_back({e, 1});
    if (curve.edges()[e].head == v) out.push_back({e, -1});
  }
  return out;
}

Complex integrate(const std::function<Complex(Complex)>& f, Complex a, Complex b) {
  return integrate_segment(f, a, b, 1e-13, 20000).value;
}

}  // namespace

BoxSearch exhaustive_delaunay(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, int box) {
  const std::size_t n = b.dimension();
  if (alpha.size() != n) throw ValidationError("alpha", "dimension mismatch");
  BoxSearch out;
  if (n == 0) {
    out.value = 0;
    out.points = {LatticePoint{}};
    out.visited = 1;
    return out;
  }
  mpz_class den = 1;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), alpha[i].get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), b(i, j).get_den_mpz_t());
  }
  // 2 D^2 objective = 2 (D alpha) (D B) x - D x (D B) x.
  std::vector<std::int64_t> a(n), c(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = small_int(mpz_class(alpha[i] * den));
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = small_int(mpz_class(b(i, j) * den));
  }
  const std::int64_t d = small_int(den);
  std::vector<std::int64_t> ac(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) ac[j] += a[i] * c[i * n + j];
  }
  LatticePoint x(n, -box);
  bool first = true;
  std::int64_t best = 0;
  do {
    std::int64_t lin = 0, quad = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lin += ac[i] * x[i];
      std::int64_t row = 0;
      for (std::size_t j = 0; j < n; ++j) row += c[i * n + j] * x[j];
      quad += x[i] * row;
    }
    const std::int64_t value = 2 * lin - d * quad;
    ++out.visited;
    if (first || value > best) {
      best = value;
      out.points.clear();
      first = false;
    }
    if (value == best) out.points.push_back(x);
  } while (next_point(x, box));
  std::sort(out.points.begin(), out.points.end());
  out.value = Rational(best) / Rational(2 * den * den);
  return out;
}

bool box_contains_optimum(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, int box) {
  const std::size_t n = b.dimension();
  if (n == 0) return true;
  RationalVector diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = Rational(round_nearest(alpha[i])) - alpha[i];
  const Rational d0 = quadratic_form(b, diff, diff);
  const DenseMatrix<Rational> inv = inverse(b.entries());
  for (std::size_t i = 0; i < n; ++i) {
    const Rational room = Rational(box) - abs(alpha[i]);
    if (sgn(room) < 0 || room * room < d0 * inv(i, i)) return false;
  }
  return true;
}

Complex theta_box_sum(const ComplexMatrix& z_matrix, const ComplexVector& z, int radius) {
  const auto g = static_cast<std::size_t>(z.size());
  LatticePoint u(g, -radius);
  Complex sum = 0.0;
  do {
    Eigen::VectorXd uv(static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i) uv(static_cast<Eigen::Index>(i)) = static_cast<double>(u[i]);
    const ComplexVector uc = uv.cast<Complex>();
    const Complex q = uc.transpose() * z_matrix * uc;
    const Complex l = uc.transpose() * z;
    sum += std::exp(Complex(0.0, std::numbers::pi) * (q + 2.0 * l));
  } while (next_point(u, radius));
  return sum;
}

std::vector<std::vector<PassageSegment>> walk_passages(const TropicalCurve& curve, const CycleBasis& basis) {
  std::vector<std::vector<PassageSegment>> out;
  for (const auto& walk : basis.walks) {
    std::vector<PassageSegment> segments;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      const OrientedEdge& cur = walk[i];
      const OrientedEdge& next = walk[(i + 1) % walk.size()];
      const HalfEdge arrive{cur.edge, -cur.sign};
      const HalfEdge leave{next.edge, next.sign};
      const std::size_t v = end_vertex(curve, arrive);
      if (v != end_vertex(curve, leave)) throw InconsistencyError("walk_passages: walk is not closed");
      segments.push_back({v, arrive, leave});
    }
    out.push_back(std::move(segments));
  }
  return out;
}

ComplexMatrix path_b0_raw(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked) {
  const std::size_t h1 = basis.rank();
  const auto hd = static_cast<Eigen::Index>(h1);
  ComplexMatrix out = ComplexMatrix::Zero(hd, hd);
  const auto passages = walk_passages(curve, basis);
  for (std::size_t j = 0; j < h1; ++j) {
    for (const auto& seg : passages[j]) {
      if (curve.vertices()[seg.vertex].weight != 0) continue;
      const MarkedComponent& comp = component_of(curve, marked, seg.vertex);
      const auto ends = ends_at(curve, seg.vertex);
      const Complex p = node(curve, comp, seg.from);
      const Complex q = node(curve, comp, seg.to);
      const Complex dir = (q - p) / std::abs(q - p);
      for (std::size_t k = 0; k < h1; ++k) {
        auto omega = [&](Complex zeta) {
          Complex s = 0.0;
          for (const HalfEdge& h : ends) s += residue(basis, k, h) / (zeta - node(curve, comp, h));
          return s;
        };
        const Complex rp = residue(basis, k, seg.from);
        const Complex rq = residue(basis, k, seg.to);
        auto truncated = [&](double d) {
          return integrate(omega, p + d * dir, q - d * dir) + rp * std::log(d * dir) - rq * std::log(-d * dir);
        };
        // Error is a power series in d; Richardson table on d / 2^i.
        constexpr int kLevels = 5;
        std::array<Complex, kLevels> table;
        double d = 1e-3 * std::abs(q - p);
        for (int i = 0; i < kLevels; ++i, d /= 2) table[static_cast<std::size_t>(i)] = truncated(d);
        for (int level = 1; level < kLevels; ++level) {
          const double w = std::ldexp(1.0, level);
          for (int i = kLevels - 1; i >= level; --i) {
            auto& t = table[static_cast<std::size_t>(i)];
            t = (w * t - table[static_cast<std::size_t>(i - 1)]) / (w - 1.0);
          }
        }
        out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) += table.back();
      }
    }
  }
  return out;
}

std::vector<ComplexVector> contour_r_trop(const TropicalCurve& curve, const CycleBasis& basis,
                                          const MarkedCurve& marked) {
  const auto v0 = curve.find_vertex(marked.base_vertex);
  if (!v0 || curve.vertices()[*v0].weight != 0) {
    throw ValidationError("base_vertex", "contour oracle needs a rational base component");
  }
  const MarkedComponent& comp = component_of(curve, marked, *v0);
  const auto ends = ends_at(curve, *v0);
  const bool at_infinity = !marked.base_point;
  const Complex p = marked.base_point.value_or(0.0);
  auto zeta_of = [&](Complex w) { return at_infinity ? 1.0 / w : p + w; };
  auto dzeta = [&](Complex w) { return at_infinity ? -1.0 / (w * w) : Complex(1.0); };
  const auto& c = marked.chart.coeffs;
  auto chart = [&](Complex w) {
    Complex z = 0.0, wk = w;
    for (const Complex& ck : c) {
      z += ck * wk;
      wk *= w;
    }
    return z;
  };

  // Stay well inside the disc free of nodes and of other zeros of the chart
  // (Cauchy bound for the roots of c1 + c2 w + ...).
  double free = INFINITY;
  for (const HalfEdge& h : ends) {
    const Complex x = node(curve, comp, h);
    if (at_infinity) {
      if (std::abs(x) > 0.0) free = std::min(free, 1.0 / std::abs(x));
    } else {
      free = std::min(free, std::abs(x - p));
    }
  }
  double cmax = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) cmax = std::max(cmax, std::abs(c[k]));
  free = std::min(free, std::abs(c[0]) / (std::abs(c[0]) + cmax));
  const double rho = 0.3 * free;
  const std::array<Complex, 4> corners{Complex(rho, -rho), Complex(rho, rho), Complex(-rho, rho), Complex(-rho, -rho)};

  std::vector<ComplexVector> out(static_cast<std::size_t>(marked.order), ComplexVector::Zero(static_cast<Eigen::Index>(basis.rank())));
  for (std::size_t j = 0; j < basis.rank(); ++j) {
    for (int m = 1; m <= marked.order; ++m) {
      auto integrand = [&](Complex w) {
        const Complex zeta = zeta_of(w);
        Complex s = 0.0;
        for (const HalfEdge& h : ends) s += residue(basis, j, h) / (zeta - node(curve, comp, h));
        return s * dzeta(w) * std::pow(chart(w), -m);
      };
      Complex total = 0.0;
      for (std::size_t i = 0; i < 4; ++i) total += integrate(integrand, corners[i], corners[(i + 1) % 4]);
      out[static_cast<std::size_t>(m - 1)](static_cast<Eigen::Index>(j)) = total / kTwoPiI;
    }
  }
  return out;
}

}  // namespace tropkp::checks

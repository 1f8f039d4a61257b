#include "tropkp/checks/random_instances.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace tropkp::checks {
namespace {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

}  // namespace

Rational random_rational(Rng& rng, int lo, int hi, int max_denominator) {
  const int q = uniform_int(rng, 1, max_denominator);
  const int p = uniform_int(rng, lo * q, hi * q);
  Rational r(p, q);
  r.canonicalize();
  return r;
}

RationalVector random_alpha(Rng& rng, std::size_t n, int lo, int hi, int max_denominator) {
  RationalVector out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_rational(rng, lo, hi, max_denominator));
  return out;
}

TropicalCurve random_curve(Rng& rng, const RandomCurveOptions& o) {
  const int h1 = uniform_int(rng, o.min_h1, o.max_h1);
  // |E| = h1 + |V| - 1 <= max_edges.
  const int n = uniform_int(rng, 1, std::min(o.max_vertices, o.max_edges - h1 + 1));
  std::vector<Vertex> vertices;
  for (int i = 0; i < n; ++i) vertices.push_back({"v" + std::to_string(i), uniform_int(rng, 0, o.max_weight)});
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (int i = 1; i < n; ++i) ends.emplace_back(static_cast<std::size_t>(uniform_int(rng, 0, i - 1)), static_cast<std::size_t>(i));
  for (int k = 0; k < h1; ++k) {
    ends.emplace_back(static_cast<std::size_t>(uniform_int(rng, 0, n - 1)), static_cast<std::size_t>(uniform_int(rng, 0, n - 1)));
  }
  std::shuffle(ends.begin(), ends.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < ends.size(); ++e) {
    auto [a, b] = ends[e];
    if (uniform_int(rng, 0, 1) == 1) std::swap(a, b);
    edges.push_back({"e" + std::to_string(e), a, b, random_rational(rng, o.min_length, o.max_length, o.max_denominator)});
  }
  return TropicalCurve(std::move(vertices), std::move(edges));
}

ComplexMatrix random_siegel(Rng& rng, int genus, double min_eigenvalue, double max_eigenvalue) {
  const Eigen::Index g = genus;
  Eigen::MatrixXd m(g, g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) m(i, j) = uniform_real(rng, -1.0, 1.0);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
  Eigen::VectorXd lambda(g);
  for (Eigen::Index i = 0; i < g; ++i) lambda(i) = uniform_real(rng, min_eigenvalue, max_eigenvalue);
  Eigen::MatrixXd y = q * lambda.asDiagonal() * q.transpose();
  y = 0.5 * (y + y.transpose());
  Eigen::MatrixXd x(g, g);
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index j = i; j < g; ++j) x(i, j) = x(j, i) = uniform_real(rng, -0.5, 0.5);
  }
  ComplexMatrix out(g, g);
  out.real() = x;
  out.imag() = y;
  return out;
}

Complex random_complex(Rng& rng, double lo, double hi) { return {uniform_real(rng, lo, hi), uniform_real(rng, lo, hi)}; }

}  // namespace tropkp::checks

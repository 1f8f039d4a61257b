#pragma once

#include "tropkp/component_data.hpp"
#include "tropkp/graph.hpp"
#include "tropkp/riemann_theta.hpp"

#include <random>

namespace tropkp::checks {

using Rng = std::mt19937_64;

struct RandomCurveOptions {
  int max_vertices = 6;
  int max_edges = 9;
  int min_h1 = 1;
  int max_h1 = 4;
  int max_weight = 0;
  // Lengths p/q in [min_length, max_length] with q <= max_denominator.
  int min_length = 1;
  int max_length = 10;
  int max_denominator = 4;
};

// Connected: a random spanning tree plus extra edges (loops and parallel
// edges allowed) until h1 is reached.
TropicalCurve random_curve(Rng& rng, const RandomCurveOptions& options = {});

// Entries p/q in [lo, hi] with q <= max_denominator.
Rational random_rational(Rng& rng, int lo, int hi, int max_denominator);
RationalVector random_alpha(Rng& rng, std::size_t n, int lo = -2, int hi = 2, int max_denominator = 4);

// Re entries in [-1/2, 1/2]; Im = Q diag(lambda) Q^T with lambda in
// [min_eigenvalue, max_eigenvalue].
ComplexMatrix random_siegel(Rng& rng, int genus, double min_eigenvalue = 0.3, double max_eigenvalue = 2.0);

Complex random_complex(Rng& rng, double lo, double hi);

}  // namespace tropkp::checks

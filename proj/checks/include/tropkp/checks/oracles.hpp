#pragma once

#include "tropkp/component_data.hpp"
#include "tropkp/period.hpp"

#include <span>
#include <vector>

namespace tropkp::checks {

// Exhaustive maximisation of alpha B x^T - x B x^T / 2 over ||x||_inf <= box,
// in scaled integer arithmetic.
struct BoxSearch {
  Rational value;
  std::vector<LatticePoint> points;  // lexicographic
  std::size_t visited = 0;
};

BoxSearch exhaustive_delaunay(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, int box);

// Exact certificate that every maximiser lies in ||x||_inf <= box:
// (x_i - alpha_i)^2 <= d0 (B^-1)_ii with d0 the value at round(alpha).
bool box_contains_optimum(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, int box);

// sum over ||u||_inf <= radius of exp(pi i (u Z u^T + 2 z u^T)).
Complex theta_box_sum(const ComplexMatrix& z_matrix, const ComplexVector& z, int radius);

// One passage of walk j through a component: from the node where it
// arrives to the node where it leaves.
struct PassageSegment {
  std::size_t vertex = 0;
  HalfEdge from;
  HalfEdge to;
};

std::vector<std::vector<PassageSegment>> walk_passages(const TropicalCurve& curve, const CycleBasis& basis);

// Regularised path integrals of omega_k along the straight passages of
// walk j on rational components, as the limit of the truncated integral
// from P + d u to Q - d u plus rho_P log(d u) - rho_Q log(-d u),
// extrapolated in d. Entry (j, k); weight-1 components contribute 0.
ComplexMatrix path_b0_raw(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked);

// r^trop_m(j) = (1 / 2 pi i) \oint omega_j z^{-m} over a small square around
// the base point in the uniformizer w, with the polynomial chart evaluated
// directly. Base component must be rational.
std::vector<ComplexVector> contour_r_trop(const TropicalCurve& curve, const CycleBasis& basis,
                                          const MarkedCurve& marked);

}  // namespace tropkp::checks

#pragma once

#include "tropkp/period.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <vector>

namespace tropkp {

// All lattice points x minimising (x - target) B (x - target)^T.
struct ClosestVectors {
  Rational distance2;
  std::vector<LatticePoint> points;  // lexicographically sorted
  std::size_t nodes_visited = 0;
};

// Exact Fincke-Pohst enumeration on the rational U D U^T factor of B. The
// search radius starts at the Babai (nearest-plane) point and shrinks on
// every improvement; the comparison is non-strict, so every minimiser is
// found and the final radius certifies completeness.
ClosestVectors closest_vectors(const TropicalPeriodMatrix& b, std::span<const Rational> target);

// The argmax set D of x -> alpha B x^T - x B x^T / 2 and the attained value.
struct DelaunaySet {
  std::vector<LatticePoint> points;
  Rational value;
};

// max over x in Z^n of alpha B x^T - x B x^T / 2.
Rational tropical_theta(const TropicalPeriodMatrix& b, std::span<const Rational> alpha);
DelaunaySet delaunay_set(const TropicalPeriodMatrix& b, std::span<const Rational> alpha);

// alpha B x^T - x B x^T / 2 for a single lattice point.
Rational tropical_objective(const TropicalPeriodMatrix& b, std::span<const Rational> alpha, const LatticePoint& x);
LinearForm tropical_objective(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha, const LatticePoint& x);

struct MaximalForm {
  LinearForm form;
  std::vector<LatticePoint> witnesses;  // lexicographically sorted
};

// Delaunay set at the specialised matrix, grouped by the symbolic objective
// a(x). Each form returned is maximal in the coefficientwise order (a form
// dominating it would exceed the maximum at `lengths`).
std::vector<MaximalForm> maximal_forms_at(const SymbolicPeriodMatrix& b, std::span<const Rational> lengths,
                                          std::span<const Rational> alpha);

struct MaximalElements {
  std::vector<MaximalForm> forms;  // result of the doubled-radius pass
  int radius = 0;                  // box radius of the doubled pass
  bool stable = false;             // passes at radius and 2*radius agree
};

// Coefficientwise-maximal objective forms among x with ||x||_inf <= radius,
// recomputed at 2*radius. Completeness is not claimed; `stable` reports
// whether doubling changed anything.
MaximalElements maximal_elements(const SymbolicPeriodMatrix& b, std::span<const Rational> alpha, int radius = 2);

// Consistency of the decomposition of the tropical theta value into
// maximal forms at one length function.
struct DecompositionReport {
  Rational theta;
  Rational best_form_value;
  std::size_t delaunay_size = 0;
  std::size_t achieving_forms = 0;
  bool value_matches = false;
  bool witnesses_partition = false;
  bool forms_agree = false;  // achieving forms == maximal_forms_at

  bool passed() const noexcept { return value_matches && witnesses_partition && forms_agree; }
};

DecompositionReport verify_decomposition(const SymbolicPeriodMatrix& b, std::span<const Rational> lengths,
                                         std::span<const Rational> alpha);

nlohmann::json to_json(const LatticePoint& x);
nlohmann::json to_json(const DelaunaySet& d);
nlohmann::json to_json(const MaximalForm& f, const TropicalCurve& curve);
nlohmann::json to_json(const MaximalElements& m, const TropicalCurve& curve);
nlohmann::json to_json(const DecompositionReport& r);

}  // namespace tropkp

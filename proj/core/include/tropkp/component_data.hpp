#pragma once

#include "tropkp/graph.hpp"
#include "tropkp/riemann_theta.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tropkp {

// End of an edge: sign +1 is the tail end, -1 the head end. Labels are the
// edge id followed by '+' or '-'.
struct HalfEdge {
  std::size_t edge = 0;
  int sign = 1;

  bool operator==(const HalfEdge&) const = default;
};

std::string half_edge_label(const TropicalCurve& curve, HalfEdge h);

// z = sum_{k >= 1} coeffs[k-1] w^k in the component's uniformizer w at the
// base point: w = zeta - p, w = 1/zeta at p = infinity, w = u - p on a torus.
struct LocalChart {
  std::vector<Complex> coeffs{Complex(1.0)};

  bool is_identity() const;
};

struct MarkedComponent {
  std::string vertex;
  int genus = 0;
  // Node coordinate per half-edge label: a finite point of the projective
  // line (genus 0) or a point u of C / (Z + tau Z) with 0 < Im u < Im tau.
  std::map<std::string, Complex> nodes;
  Complex tau{0.0, 1.0};  // genus 1 only
};

struct MarkedCurve {
  std::string base_vertex;
  std::optional<Complex> base_point;  // nullopt: the point at infinity
  LocalChart chart;
  int order = 4;
  std::vector<MarkedComponent> components;

  const MarkedComponent* find(std::string_view vertex) const;
};

// {"kind":"marked","order":M,"base_vertex":id,"vertices":{id:{"genus","tau",
// "nodes":{label:coord},"base_point","chart":[...]}}}
MarkedCurve marked_curve_from_json(const nlohmann::json& document, const TropicalCurve& curve);
nlohmann::json to_json(const MarkedCurve& marked);

struct VertexData {
  std::string id;
  int genus = 0;
  ComplexMatrix period;    // B_v, genus x genus
  ComplexMatrix coupling;  // C_v, genus x h1
};

struct ComponentData {
  int order = 4;
  std::size_t h1 = 0;
  std::string base_vertex;
  std::vector<VertexData> vertices;  // curve vertex order
  ComplexMatrix b0;                  // symmetric h1 x h1
  // B0(k, j) - B0(j, k) as computed independently along both walks before
  // symmetrising; an integer matrix for rational components (branch choice).
  ComplexMatrix b0_asymmetry;
  std::vector<ComplexVector> r_trop;    // r_trop[m-1], length h1
  std::vector<ComplexVector> r_vertex;  // r_vertex[m-1], length genus of the base vertex
  ComplexMatrix q;                      // q(n-1, m-1), order x order

  std::size_t base_index() const;
  const VertexData& base() const { return vertices[base_index()]; }
  int total_weight() const;
};

// All vertex weights 0 or 1. Differentials on each component are built
// from the residues sigma * M[j][e] / (2 pi i) at the node x_{sigma e}; B0
// sums regularised integrals over each walk's straight segments.
ComponentData component_data(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked);

// Same, but requires every weight to be 0.
ComponentData rational_component_data(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked);

// Contribution of one weight-1 vertex: its B_v and C_v, its share of B0
// (rows: walks, columns: differentials; not symmetrised), and the expansions
// at the base point when it is the base vertex.
struct EllipticContribution {
  VertexData vertex;
  ComplexMatrix b0_part;
  std::vector<ComplexVector> r_trop;
  std::vector<ComplexVector> r_vertex;
  ComplexMatrix q;
};

EllipticContribution elliptic_component_data(const TropicalCurve& curve, const CycleBasis& basis,
                                              const MarkedCurve& marked, std::size_t vertex);

// Regularised integral of sum_h rho_h dzeta / (zeta - x_h) along the segment
// from nodes[from] to nodes[to]: the singular logs at both ends are replaced
// by rho log(Q - P) and -rho log(P - Q). Logs of the other nodes follow the
// segment continuously. Exposed for the quadrature oracle.
Complex rational_segment_integral(const std::vector<Complex>& nodes, const std::vector<Complex>& residues,
                                  std::size_t from, std::size_t to);

// Same on the torus with sum_h rho_h (theta_1'/theta_1)(u - x_h) du, by
// adaptive quadrature after subtracting the two endpoint poles.
Complex elliptic_segment_integral(const std::vector<Complex>& nodes, const std::vector<Complex>& residues,
                                  std::size_t from, std::size_t to, Complex tau, double tol = 1e-12);

// Throws ValidationError with the offending field path.
ComponentData load_component_data(const nlohmann::json& document);
nlohmann::json to_json(const ComponentData& data);

// Vertex ids, weights and h1 must match the curve.
void check_compatible(const ComponentData& data, const TropicalCurve& curve);

// Either kind of components document: "marked" is turned into data with
// `component_data`, "component_data" is loaded as is.
ComponentData component_data_from_json(const nlohmann::json& document, const TropicalCurve& curve,
                                       const CycleBasis& basis, std::optional<int> order = std::nullopt);

}  // namespace tropkp

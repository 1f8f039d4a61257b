#pragma once

#include "tropkp/matrix.hpp"
#include "tropkp/rational.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tropkp {

struct Vertex {
  std::string id;
  int weight = 0;  // genus of the component sitting over this vertex

  bool operator==(const Vertex&) const = default;
};

// `tail` and `head` are vertex indices; their order fixes the orientation.
struct Edge {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  Rational length;

  bool operator==(const Edge&) const = default;
  bool is_loop() const noexcept { return tail == head; }
};

// Connected multigraph with positive rational edge lengths and
// nonnegative vertex weights. Loops and parallel edges are allowed.
// Vertex and edge order is the construction (document) order, and every
// deterministic choice downstream uses it.
class TropicalCurve {
 public:
  // Throws ValidationError naming the offending element.
  TropicalCurve(std::vector<Vertex> vertices, std::vector<Edge> edges);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<std::size_t> find_vertex(std::string_view id) const;
  std::optional<std::size_t> find_edge(std::string_view id) const;

  RationalVector lengths() const;

  // Same graph and weights, new lengths (one per edge, all > 0).
  TropicalCurve with_lengths(const RationalVector& lengths) const;

  bool operator==(const TropicalCurve&) const = default;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
};

struct Genus {
  int h1 = 0;  // first Betti number |E| - |V| + 1
  int g = 0;   // h1 + sum of weights

  bool operator==(const Genus&) const = default;
};

Genus genus(const TropicalCurve& curve);

// An edge traversed with (+1) or against (-1) its orientation.
struct OrientedEdge {
  std::size_t edge = 0;
  int sign = 1;

  bool operator==(const OrientedEdge&) const = default;
};

// Fundamental cycles of a spanning tree. Row j of `matrix` counts signed
// traversals of each edge by cycle b_j; it is +1 on `cycle_edges[j]` and 0 on
// every other non-tree edge. `walks[j]` is the closed walk realising b_j:
// the non-tree edge forward, then the tree path from its head back to its
// tail.
struct CycleBasis {
  std::vector<std::size_t> tree_edges;
  std::vector<std::size_t> cycle_edges;
  DenseMatrix<std::int64_t> matrix;
  std::vector<std::vector<OrientedEdge>> walks;

  std::size_t rank() const noexcept { return matrix.rows(); }
  std::size_t edge_count() const noexcept { return matrix.cols(); }
};

// Deterministic: the tree grows from vertex 0, always taking the lowest
// index edge that reaches a new vertex.
CycleBasis cycle_basis(const TropicalCurve& curve);

// |V| x |E|, -1 at the tail and +1 at the head (0 for loops).
DenseMatrix<std::int64_t> incidence_matrix(const TropicalCurve& curve);

// Curve document: {"vertices":[{"id","weight"}],"edges":[{"id","tail","head","length"}]}
TropicalCurve parse_tropical_curve(std::string_view document);
TropicalCurve tropical_curve_from_json(const nlohmann::json& document);
nlohmann::json to_json(const TropicalCurve& curve);
nlohmann::json to_json(const CycleBasis& basis, const TropicalCurve& curve);

}  // namespace tropkp

#include "tropkp/graph.hpp"

#include "tropkp/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tropkp {

TropicalCurve::TropicalCurve(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (vertices_.empty()) throw ValidationError("vertices", "a curve needs at least one vertex");

  std::set<std::string> seen;
  for (const auto& v : vertices_) {
    if (v.id.empty()) throw ValidationError("vertices", "empty vertex id");
    if (!seen.insert(v.id).second) throw ValidationError(v.id, "duplicate vertex id");
    if (v.weight < 0) throw ValidationError(v.id, "negative weight");
  }
  seen.clear();
  for (const auto& e : edges_) {
    if (e.id.empty()) throw ValidationError("edges", "empty edge id");
    if (!seen.insert(e.id).second) throw ValidationError(e.id, "duplicate edge id");
    if (e.tail >= vertices_.size() || e.head >= vertices_.size()) {
      throw ValidationError(e.id, "endpoint is not a vertex of the curve");
    }
    if (sgn(e.length) <= 0) throw ValidationError(e.id, "length must be positive");
  }

  // Connectivity by union-find.
  std::vector<std::size_t> parent(vertices_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges_) parent[find(e.tail)] = find(e.head);
  for (std::size_t v = 1; v < vertices_.size(); ++v) {
    if (find(v) != find(0)) {
      throw ValidationError(vertices_[v].id, "graph is disconnected (vertex not reachable from " +
                                                 vertices_[0].id + ")");
    }
  }
}

std::optional<std::size_t> TropicalCurve::find_vertex(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TropicalCurve::find_edge(std::string_view id) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id == id) return i;
  }
  return std::nullopt;
}

RationalVector TropicalCurve::lengths() const {
  RationalVector out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back(e.length);
  return out;
}

TropicalCurve TropicalCurve::with_lengths(const RationalVector& lengths) const {
  if (lengths.size() != edges_.size()) {
    throw ValidationError("lengths", "expected one length per edge");
  }
  auto edges = edges_;
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].length = lengths[i];
  return TropicalCurve(vertices_, std::move(edges));
}

Genus genus(const TropicalCurve& curve) {
  Genus out;
  out.h1 = static_cast<int>(curve.edge_count()) - static_cast<int>(curve.vertex_count()) + 1;
  out.g = out.h1;
  for (const auto& v : curve.vertices()) out.g += v.weight;
  return out;
}

DenseMatrix<std::int64_t> incidence_matrix(const TropicalCurve& curve) {
  DenseMatrix<std::int64_t> inc(curve.vertex_count(), curve.edge_count(), 0);
  for (std::size_t e = 0; e < curve.edge_count(); ++e) {
    const auto& edge = curve.edges()[e];
    inc(edge.tail, e) -= 1;
    inc(edge.head, e) += 1;
  }
  return inc;
}

CycleBasis cycle_basis(const TropicalCurve& curve) {
  const std::size_t nv = curve.vertex_count();
  const std::size_t ne = curve.edge_count();
  const auto& edges = curve.edges();

  // Prim-style growth; parent_edge[v] is the tree edge through which v was reached.
  std::vector<bool> in_tree_vertex(nv, false);
  std::vector<bool> in_tree_edge(ne, false);
  std::vector<std::optional<std::size_t>> parent_edge(nv);
  std::vector<std::size_t> depth(nv, 0);
  in_tree_vertex[0] = true;
  for (std::size_t added = 1; added < nv; ++added) {
    for (std::size_t e = 0; e < ne; ++e) {
      const auto& edge = edges[e];
      if (in_tree_vertex[edge.tail] == in_tree_vertex[edge.head]) continue;
      std::size_t from = in_tree_vertex[edge.tail] ? edge.tail : edge.head;
      std::size_t to = in_tree_vertex[edge.tail] ? edge.head : edge.tail;
      in_tree_vertex[to] = true;
      in_tree_edge[e] = true;
      parent_edge[to] = e;
      depth[to] = depth[from] + 1;
      break;
    }
  }

  CycleBasis basis;
  for (std::size_t e = 0; e < ne; ++e) {
    if (in_tree_edge[e]) {
      basis.tree_edges.push_back(e);
    } else {
      basis.cycle_edges.push_back(e);
    }
  }

  auto step_up = [&](std::size_t v) {
    // Oriented tree edge leading from v towards the root, and the vertex reached.
    std::size_t e = *parent_edge[v];
    const auto& edge = edges[e];
    if (edge.head == v) return std::pair{OrientedEdge{e, -1}, edge.tail};
    return std::pair{OrientedEdge{e, +1}, edge.head};
  };

  basis.matrix = DenseMatrix<std::int64_t>(basis.cycle_edges.size(), ne, 0);
  for (std::size_t j = 0; j < basis.cycle_edges.size(); ++j) {
    std::size_t e = basis.cycle_edges[j];
    std::vector<OrientedEdge> walk{{e, +1}};
    // Tree path from head(e) back to tail(e) through their common ancestor.
    std::size_t a = edges[e].head;
    std::size_t b = edges[e].tail;
    std::vector<OrientedEdge> down;  // path b -> ancestor, reversed later
    while (a != b) {
      if (depth[a] >= depth[b]) {
        auto [step, next] = step_up(a);
        walk.push_back(step);
        a = next;
      } else {
        auto [step, next] = step_up(b);
        down.push_back(OrientedEdge{step.edge, -step.sign});
        b = next;
      }
    }
    walk.insert(walk.end(), down.rbegin(), down.rend());
    for (const auto& step : walk) basis.matrix(j, step.edge) += step.sign;
    basis.walks.push_back(std::move(walk));
  }
  return basis;
}

namespace {

const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(path, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw ValidationError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

Rational json_rational(const nlohmann::json& v, const std::string& path) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(mpz_class(std::to_string(v.get<long long>()), 10));
  } catch (const ValidationError& err) {
    throw ValidationError(path, err.what());
  }
  throw ValidationError(path, "expected a rational string \"p/q\" or an integer");
}

}  // namespace

TropicalCurve tropical_curve_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("$", "curve document must be an object");
  const auto& jv = require(doc, "vertices", "$");
  const auto& je = require(doc, "edges", "$");
  if (!jv.is_array()) throw ValidationError("$.vertices", "expected an array");
  if (!je.is_array()) throw ValidationError("$.edges", "expected an array");

  std::vector<Vertex> vertices;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    std::string path = "$.vertices[" + std::to_string(i) + "]";
    Vertex v;
    v.id = require_string(jv[i], "id", path);
    const auto& w = jv[i].contains("weight") ? jv[i].at("weight") : nlohmann::json(0);
    if (!w.is_number_integer()) throw ValidationError(v.id, "weight must be an integer");
    v.weight = w.get<int>();
    if (v.weight < 0) throw ValidationError(v.id, "negative weight");
    vertices.push_back(std::move(v));
  }
  auto index_of = [&](const std::string& id, const std::string& path) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i].id == id) return i;
    }
    throw ValidationError(path, "unknown vertex '" + id + "'");
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < je.size(); ++i) {
    std::string path = "$.edges[" + std::to_string(i) + "]";
    Edge e;
    e.id = require_string(je[i], "id", path);
    e.tail = index_of(require_string(je[i], "tail", path), e.id);
    e.head = index_of(require_string(je[i], "head", path), e.id);
    e.length = json_rational(require(je[i], "length", path), e.id);
    if (sgn(e.length) <= 0) throw ValidationError(e.id, "length must be positive");
    edges.push_back(std::move(e));
  }
  return TropicalCurve(std::move(vertices), std::move(edges));
}

TropicalCurve parse_tropical_curve(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& err) {
    throw ValidationError("$", std::string("malformed JSON: ") + err.what());
  }
  return tropical_curve_from_json(doc);
}

nlohmann::json to_json(const TropicalCurve& curve) {
  nlohmann::json doc;
  doc["vertices"] = nlohmann::json::array();
  for (const auto& v : curve.vertices()) doc["vertices"].push_back({{"id", v.id}, {"weight", v.weight}});
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : curve.edges()) {
    doc["edges"].push_back({{"id", e.id},
                            {"tail", curve.vertices()[e.tail].id},
                            {"head", curve.vertices()[e.head].id},
                            {"length", to_string(e.length)}});
  }
  return doc;
}

nlohmann::json to_json(const CycleBasis& basis, const TropicalCurve& curve) {
  nlohmann::json out;
  auto ids = [&](const std::vector<std::size_t>& idx) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto e : idx) arr.push_back(curve.edges()[e].id);
    return arr;
  };
  out["tree"] = ids(basis.tree_edges);
  out["cycle_edges"] = ids(basis.cycle_edges);
  out["matrix"] = nlohmann::json::array();
  for (std::size_t j = 0; j < basis.matrix.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t e = 0; e < basis.matrix.cols(); ++e) row.push_back(basis.matrix(j, e));
    out["matrix"].push_back(row);
  }
  out["walks"] = nlohmann::json::array();
  for (const auto& walk : basis.walks) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& step : walk) w.push_back((step.sign > 0 ? "+" : "-") + curve.edges()[step.edge].id);
    out["walks"].push_back(w);
  }
  return out;
}

}  // namespace tropkp

#include "tropkp/component_data.hpp"

#include "tropkp/elliptic.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"
#include "tropkp/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace tropkp {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kTwoPiI(0.0, 2.0 * kPi);
constexpr double kCoincidence = 1e-12;

// One-variable series helpers.

Series compose(const Series& g, const Series& w) {
  Series out(g.layout());
  for (std::size_t k = g.size(); k-- > 0;) {
    out = out * w;
    out[0] += g[k];
  }
  return out;
}

Series differentiate(const Series& s) {
  Series out(s.layout());
  for (std::size_t k = 0; k + 1 < s.size(); ++k) out[k] = static_cast<double>(k + 1) * s[k + 1];
  return out;
}

Series chart_series(const LocalChart& chart, int degree) {
  Series phi(1, degree);
  for (std::size_t k = 0; k < chart.coeffs.size() && static_cast<int>(k) + 1 <= degree; ++k) phi[k + 1] = chart.coeffs[k];
  return phi;
}

// w(z) with phi(w(z)) = z.
Series revert_chart(const LocalChart& chart, int degree) {
  const Complex c1 = chart.coeffs.front();
  Series z = Series::variable(1, degree, 0);
  Series rest(1, degree);
  for (std::size_t k = 1; k < chart.coeffs.size() && static_cast<int>(k) + 1 <= degree; ++k) rest[k + 1] = chart.coeffs[k];
  Series w = z * (1.0 / c1);
  for (int iter = 0; iter < degree; ++iter) w = (z - compose(rest, w)) * (1.0 / c1);
  return w;
}

// Expansion coefficients in z of g(w) dw, given g as a series in w.
Series to_chart(const Series& g_of_w, const Series& w_of_z) {
  return compose(g_of_w, w_of_z) * differentiate(w_of_z);
}

struct Segment {
  std::size_t vertex;
  HalfEdge from;  // arrival node
  HalfEdge to;    // departure node
};

std::vector<std::vector<Segment>> walk_segments(const TropicalCurve& curve, const CycleBasis& basis) {
  std::vector<std::vector<Segment>> out;
  for (const auto& walk : basis.walks) {
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      const auto& h = walk[i];
      const auto& next = walk[(i + 1) % walk.size()];
      const Edge& e = curve.edges()[h.edge];
      const std::size_t end = h.sign > 0 ? e.head : e.tail;
      segments.push_back({end, HalfEdge{h.edge, -h.sign}, HalfEdge{next.edge, next.sign}});
    }
    out.push_back(std::move(segments));
  }
  return out;
}

// Node coordinates of one component together with the residues of every
// omega_k there.
struct ComponentNodes {
  std::vector<HalfEdge> half_edges;
  std::vector<Complex> points;
  std::vector<std::vector<Complex>> residues;  // residues[k][node]

  std::size_t index_of(HalfEdge h) const {
    for (std::size_t i = 0; i < half_edges.size(); ++i) {
      if (half_edges[i] == h) return i;
    }
    throw InconsistencyError("segment endpoint without a node coordinate");
  }
};

std::string vertex_path(const std::string& id) { return "$.vertices." + id; }

Complex reduce_mod_lattice(Complex d, Complex tau) {
  d -= std::round(d.imag() / tau.imag()) * tau;
  d -= std::round(d.real());
  return d;
}

ComponentNodes collect_nodes(const TropicalCurve& curve, const CycleBasis& basis, const MarkedComponent& marked,
                             std::size_t v) {
  const std::string where = vertex_path(marked.vertex) + ".nodes";
  std::vector<bool> used(curve.edge_count(), false);
  for (std::size_t k = 0; k < basis.rank(); ++k) {
    for (std::size_t e = 0; e < curve.edge_count(); ++e) used[e] = used[e] || basis.matrix(k, e) != 0;
  }
  std::map<std::string, HalfEdge> here;
  for (std::size_t e = 0; e < curve.edge_count(); ++e) {
    const Edge& edge = curve.edges()[e];
    if (edge.tail == v) here[half_edge_label(curve, {e, 1})] = {e, 1};
    if (edge.head == v) here[half_edge_label(curve, {e, -1})] = {e, -1};
  }
  for (const auto& [label, point] : marked.nodes) {
    if (!here.count(label)) throw ValidationError(where + "." + label, "not a half-edge at this vertex");
  }
  ComponentNodes out;
  out.residues.assign(basis.rank(), {});
  for (std::size_t e = 0; e < curve.edge_count(); ++e) {
    for (int sign : {1, -1}) {
      const Edge& edge = curve.edges()[e];
      if ((sign > 0 ? edge.tail : edge.head) != v) continue;
      const HalfEdge h{e, sign};
      const std::string label = half_edge_label(curve, h);
      auto it = marked.nodes.find(label);
      if (it == marked.nodes.end()) {
        if (used[e]) throw ValidationError(where, "missing node coordinate for half-edge " + label);
        continue;
      }
      out.half_edges.push_back(h);
      out.points.push_back(it->second);
      for (std::size_t k = 0; k < basis.rank(); ++k) {
        out.residues[k].push_back(static_cast<double>(sign * basis.matrix(k, e)) / kTwoPiI);
      }
    }
  }
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    for (std::size_t j = i + 1; j < out.points.size(); ++j) {
      Complex d = out.points[i] - out.points[j];
      if (marked.genus == 1) d = reduce_mod_lattice(d, marked.tau);
      if (std::abs(d) < kCoincidence) {
        throw ValidationError(where, "coincident node points " + half_edge_label(curve, out.half_edges[i]) + " and " +
                                         half_edge_label(curve, out.half_edges[j]));
      }
    }
  }
  if (marked.genus == 1) {
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      const double im = out.points[i].imag();
      if (!(im > 0.0 && im < marked.tau.imag())) {
        throw ValidationError(where + "." + half_edge_label(curve, out.half_edges[i]),
                              "torus node must satisfy 0 < Im u < Im tau");
      }
    }
  }
  return out;
}

void check_base_point(const MarkedCurve& marked, const MarkedComponent& base, const ComponentNodes& nodes) {
  const std::string where = vertex_path(base.vertex) + ".base_point";
  if (!marked.base_point) {
    if (base.genus != 0) throw ValidationError(where, "infinity is only available on a projective line");
    return;
  }
  for (const auto& x : nodes.points) {
    Complex d = *marked.base_point - x;
    if (base.genus == 1) d = reduce_mod_lattice(d, base.tau);
    if (std::abs(d) < kCoincidence) throw ValidationError(where, "base point collides with a node");
  }
}

int internal_degree(int order) { return 2 * order + 4; }

// omega = g(w) dw for sum_h rho_h dzeta / (zeta - x_h) in the uniformizer at p.
Series rational_differential(const std::vector<Complex>& points, const std::vector<Complex>& residues,
                             const std::optional<Complex>& p, int degree) {
  Series g(1, degree);
  for (std::size_t h = 0; h < points.size(); ++h) {
    const Complex rho = residues[h];
    if (rho == Complex{}) continue;
    if (p) {
      // rho / (w - (x - p)) = -rho sum_n w^n / (x - p)^{n+1}
      const Complex inv = 1.0 / (points[h] - *p);
      Complex power = inv;
      for (std::size_t n = 0; n < g.size(); ++n) {
        g[n] -= rho * power;
        power *= inv;
      }
    } else {
      // zeta = 1/w: rho dzeta / (zeta - x) = -rho dw / (w (1 - x w)); the 1/w
      // parts cancel because the residues on a component sum to zero.
      Complex power = points[h];
      for (std::size_t n = 0; n < g.size(); ++n) {
        g[n] -= rho * power;
        power *= points[h];
      }
    }
  }
  return g;
}

}  // namespace

std::string half_edge_label(const TropicalCurve& curve, HalfEdge h) {
  return curve.edges().at(h.edge).id + (h.sign > 0 ? "+" : "-");
}

bool LocalChart::is_identity() const {
  if (coeffs.empty() || coeffs[0] != Complex(1.0)) return false;
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (coeffs[k] != Complex{}) return false;
  }
  return true;
}

const MarkedComponent* MarkedCurve::find(std::string_view vertex) const {
  for (const auto& c : components) {
    if (c.vertex == vertex) return &c;
  }
  return nullptr;
}

Complex rational_segment_integral(const std::vector<Complex>& nodes, const std::vector<Complex>& residues,
                                  std::size_t from, std::size_t to) {
  const Complex p = nodes.at(from);
  const Complex q = nodes.at(to);
  if (std::abs(q - p) < kCoincidence) throw ValidationError("segment", "endpoints coincide");
  Complex sum = 0.0;
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    const Complex rho = residues[h];
    if (rho == Complex{}) continue;
    if (h == from) {
      sum += rho * std::log(q - p);
    } else if (h == to) {
      sum -= rho * std::log(p - q);
    } else {
      const Complex ratio = (q - nodes[h]) / (p - nodes[h]);
      if (ratio.real() <= 0.0 && std::abs(ratio.imag()) <= 1e-14 * std::abs(ratio)) {
        throw ValidationError("segment", "a node lies on the integration segment");
      }
      sum += rho * std::log(ratio);
    }
  }
  return sum;
}

Complex elliptic_segment_integral(const std::vector<Complex>& nodes, const std::vector<Complex>& residues,
                                  std::size_t from, std::size_t to, Complex tau, double tol) {
  const Complex p = nodes.at(from);
  const Complex q = nodes.at(to);
  if (std::abs(q - p) < kCoincidence) throw ValidationError("segment", "endpoints coincide");
  // Other poles (and their integer translates) must stay off the segment.
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    if (residues[h] == Complex{}) continue;
    for (int m = -3; m <= 3; ++m) {
      const Complex x = nodes[h] + static_cast<double>(m);
      if ((h == from || h == to) && m == 0) continue;
      const Complex d = q - p;
      const double t = std::clamp(((x - p) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
      if (std::abs(p + t * d - x) < 1e-9) throw ValidationError("segment", "a node lies on the integration segment");
    }
  }
  const Complex rho_p = residues[from];
  const Complex rho_q = residues[to];
  auto f = [&](Complex u) {
    Complex value = 0.0;
    for (std::size_t h = 0; h < nodes.size(); ++h) {
      if (residues[h] == Complex{}) continue;
      const Complex z = u - nodes[h];
      Complex term = jacobi_theta1(z, tau, 1) / jacobi_theta1(z, tau, 0);
      if (h == from || h == to) term -= 1.0 / z;
      value += residues[h] * term;
    }
    return value;
  };
  const auto integral = integrate_segment(f, p, q, tol);
  return integral.value + rho_p * std::log(q - p) - rho_q * std::log(p - q);
}

EllipticContribution elliptic_component_data(const TropicalCurve& curve, const CycleBasis& basis,
                                              const MarkedCurve& marked, std::size_t v) {
  const Vertex& vertex = curve.vertices().at(v);
  const MarkedComponent* comp = marked.find(vertex.id);
  if (!comp) throw ValidationError(vertex_path(vertex.id), "missing component description");
  if (comp->genus != 1) throw ValidationError(vertex_path(vertex.id) + ".genus", "expected a genus 1 component");
  if (!(comp->tau.imag() > 0.0)) throw ValidationError(vertex_path(vertex.id) + ".tau", "Im tau must be positive");
  const std::size_t h1 = basis.rank();
  const int order = marked.order;
  const ComponentNodes nodes = collect_nodes(curve, basis, *comp, v);
  const auto segments = walk_segments(curve, basis);

  EllipticContribution out;
  out.vertex.id = vertex.id;
  out.vertex.genus = 1;
  out.vertex.period = ComplexMatrix::Constant(1, 1, comp->tau);
  out.vertex.coupling = ComplexMatrix::Zero(1, static_cast<Eigen::Index>(h1));
  out.b0_part = ComplexMatrix::Zero(static_cast<Eigen::Index>(h1), static_cast<Eigen::Index>(h1));
  for (std::size_t j = 0; j < h1; ++j) {
    for (const auto& seg : segments[j]) {
      if (seg.vertex != v) continue;
      const std::size_t a = nodes.index_of(seg.from);
      const std::size_t b = nodes.index_of(seg.to);
      out.vertex.coupling(0, static_cast<Eigen::Index>(j)) += nodes.points[b] - nodes.points[a];
      for (std::size_t k = 0; k < h1; ++k) {
        out.b0_part(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
            elliptic_segment_integral(nodes.points, nodes.residues[k], a, b, comp->tau);
      }
    }
  }

  if (marked.base_vertex == vertex.id) {
    check_base_point(marked, *comp, nodes);
    if (!marked.chart.is_identity()) {
      throw ValidationError(vertex_path(vertex.id) + ".chart", "torus base components support only z = u - p");
    }
    const Complex p = *marked.base_point;
    out.r_vertex.assign(static_cast<std::size_t>(order), ComplexVector::Zero(1));
    out.r_vertex[0](0) = 1.0;
    out.r_trop.assign(static_cast<std::size_t>(order), ComplexVector::Zero(static_cast<Eigen::Index>(h1)));
    double factorial = 1.0;  // (m-1)!
    for (int m = 1; m <= order; ++m) {
      if (m > 1) factorial *= (m - 1);
      for (std::size_t h = 0; h < nodes.points.size(); ++h) {
        const Complex d = log_theta1_derivative(p - nodes.points[h], comp->tau, m) / factorial;
        for (std::size_t j = 0; j < h1; ++j) out.r_trop[static_cast<std::size_t>(m - 1)](static_cast<Eigen::Index>(j)) += nodes.residues[j][h] * d;
      }
    }
    // omega^(n) = ((-1)^n / n!) (log theta_1)^(n+1)(z) dz and
    // log theta_1(z) = log theta_1'(0) + log z + sum_j L_j z^j.
    const auto l = log_theta1_regular_part(comp->tau, 2 * order);
    out.q = ComplexMatrix::Zero(order, order);
    auto fact = [](int n) {
      double f = 1.0;
      for (int i = 2; i <= n; ++i) f *= i;
      return f;
    };
    for (int n = 1; n <= order; ++n) {
      for (int m = 1; m <= order; ++m) {
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        out.q(n - 1, m - 1) = sign * l[static_cast<std::size_t>(n + m - 1)] * fact(n + m) / (fact(n - 1) * fact(m - 1));
      }
    }
  }
  return out;
}

ComponentData component_data(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked) {
  if (marked.order < 4) throw ValidationError("$.order", "order must be at least 4");
  const auto base_vertex = curve.find_vertex(marked.base_vertex);
  if (!base_vertex) throw ValidationError("$.base_vertex", "unknown vertex '" + marked.base_vertex + "'");
  const std::size_t h1 = basis.rank();
  const int order = marked.order;
  const auto hd = static_cast<Eigen::Index>(h1);

  ComponentData data;
  data.order = order;
  data.h1 = h1;
  data.base_vertex = marked.base_vertex;
  ComplexMatrix raw = ComplexMatrix::Zero(hd, hd);
  data.r_trop.assign(static_cast<std::size_t>(order), ComplexVector::Zero(hd));
  data.q = ComplexMatrix::Zero(order, order);
  const auto segments = walk_segments(curve, basis);

  for (std::size_t v = 0; v < curve.vertex_count(); ++v) {
    const Vertex& vertex = curve.vertices()[v];
    const MarkedComponent* comp = marked.find(vertex.id);
    if (!comp) throw ValidationError(vertex_path(vertex.id), "missing component description");
    if (comp->genus != vertex.weight) {
      throw ValidationError(vertex_path(vertex.id) + ".genus", "does not match the vertex weight");
    }
    if (vertex.weight >= 2) {
      throw ValidationError(vertex_path(vertex.id),
                            "genus >= 2 components must be supplied as a component_data document");
    }
    if (vertex.weight == 1) {
      auto part = elliptic_component_data(curve, basis, marked, v);
      raw += part.b0_part;
      if (v == *base_vertex) {
        data.r_trop = std::move(part.r_trop);
        data.r_vertex = std::move(part.r_vertex);
        data.q = part.q;
      }
      data.vertices.push_back(std::move(part.vertex));
      continue;
    }

    const ComponentNodes nodes = collect_nodes(curve, basis, *comp, v);
    for (std::size_t j = 0; j < h1; ++j) {
      for (const auto& seg : segments[j]) {
        if (seg.vertex != v) continue;
        const std::size_t a = nodes.index_of(seg.from);
        const std::size_t b = nodes.index_of(seg.to);
        for (std::size_t k = 0; k < h1; ++k) {
          raw(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) +=
              rational_segment_integral(nodes.points, nodes.residues[k], a, b);
        }
      }
    }
    data.vertices.push_back({vertex.id, 0, ComplexMatrix(0, 0), ComplexMatrix(0, hd)});

    if (v != *base_vertex) continue;
    check_base_point(marked, *comp, nodes);
    if (marked.chart.coeffs.empty() || std::abs(marked.chart.coeffs.front()) == 0.0) {
      throw ValidationError(vertex_path(vertex.id) + ".chart", "leading chart coefficient must be nonzero");
    }
    const int degree = internal_degree(order);
    const Series w_of_z = revert_chart(marked.chart, degree);
    for (std::size_t j = 0; j < h1; ++j) {
      const Series g = rational_differential(nodes.points, nodes.residues[j], marked.base_point, degree);
      const Series in_z = to_chart(g, w_of_z);
      for (int m = 1; m <= order; ++m) data.r_trop[static_cast<std::size_t>(m - 1)](static_cast<Eigen::Index>(j)) = in_z[static_cast<std::size_t>(m - 1)];
    }
    // dz / z^{n+1} = w^{-n-1} T_n(w) dw with T_n = phi' (phi / w)^{-n-1}; the
    // normalised omega^(n) is its principal part, so omega^(n) - dz/z^{n+1}
    // is minus the regular part, re-expanded in z.
    const int big = degree + order + 2;
    const Series phi = chart_series(marked.chart, big + 1);
    Series phi_over_w(1, big);
    for (std::size_t k = 0; k < phi_over_w.size(); ++k) phi_over_w[k] = phi[k + 1];
    const Series log_ratio = phi_over_w.log();
    Series dphi(1, big);
    for (std::size_t k = 0; k < dphi.size(); ++k) dphi[k] = static_cast<double>(k + 1) * phi[k + 1];
    for (int n = 1; n <= order; ++n) {
      const Series t = dphi * (log_ratio * Complex(-(n + 1.0))).exp();
      Series regular(1, degree);
      for (std::size_t k = 0; k < regular.size(); ++k) regular[k] = t[k + static_cast<std::size_t>(n) + 1];
      const Series in_z = to_chart(regular, w_of_z);
      for (int m = 1; m <= order; ++m) data.q(n - 1, m - 1) = -static_cast<double>(n) * in_z[static_cast<std::size_t>(m - 1)];
    }
  }

  data.b0 = ComplexMatrix::Zero(hd, hd);
  data.b0_asymmetry = ComplexMatrix::Zero(hd, hd);
  for (Eigen::Index j = 0; j < hd; ++j) {
    for (Eigen::Index k = j; k < hd; ++k) {
      data.b0(j, k) = raw(j, k);
      data.b0(k, j) = raw(j, k);
      data.b0_asymmetry(j, k) = raw(k, j) - raw(j, k);
      data.b0_asymmetry(k, j) = -data.b0_asymmetry(j, k);
    }
  }
  if (data.r_vertex.empty()) {
    data.r_vertex.assign(static_cast<std::size_t>(order), ComplexVector::Zero(data.base().genus));
  }
  return data;
}

ComponentData rational_component_data(const TropicalCurve& curve, const CycleBasis& basis, const MarkedCurve& marked) {
  for (const auto& v : curve.vertices()) {
    if (v.weight != 0) throw ValidationError(vertex_path(v.id), "rational component data needs weight 0");
  }
  return component_data(curve, basis, marked);
}

std::size_t ComponentData::base_index() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id == base_vertex) return i;
  }
  throw ValidationError("$.base_vertex", "base vertex '" + base_vertex + "' not among the vertices");
}

int ComponentData::total_weight() const {
  int total = 0;
  for (const auto& v : vertices) total += v.genus;
  return total;
}

MarkedCurve marked_curve_from_json(const nlohmann::json& doc, const TropicalCurve& curve) {
  if (!doc.is_object()) throw ValidationError("$", "expected an object");
  if (doc.contains("kind") && doc["kind"] != "marked") throw ValidationError("$.kind", "expected \"marked\"");
  MarkedCurve out;
  if (doc.contains("order")) {
    if (!doc["order"].is_number_integer()) throw ValidationError("$.order", "expected an integer");
    out.order = doc["order"].get<int>();
  }
  if (!doc.contains("vertices") || !doc["vertices"].is_object()) {
    throw ValidationError("$.vertices", "expected an object keyed by vertex id");
  }
  const auto& vertices = doc["vertices"];
  std::string declared_base;
  if (doc.contains("base_vertex")) {
    if (!doc["base_vertex"].is_string()) throw ValidationError("$.base_vertex", "expected a vertex id");
    declared_base = doc["base_vertex"].get<std::string>();
  }
  for (const auto& [id, entry] : vertices.items()) {
    const std::string where = vertex_path(id);
    const auto index = curve.find_vertex(id);
    if (!index) throw ValidationError(where, "unknown vertex");
    if (!entry.is_object()) throw ValidationError(where, "expected an object");
    MarkedComponent comp;
    comp.vertex = id;
    comp.genus = entry.value("genus", curve.vertices()[*index].weight);
    if (entry.contains("tau")) comp.tau = complex_from_json(entry["tau"], where + ".tau");
    if (comp.genus == 1 && !entry.contains("tau")) throw ValidationError(where + ".tau", "required for genus 1");
    if (comp.genus == 1 && !(comp.tau.imag() > 0.0)) throw ValidationError(where + ".tau", "Im tau must be positive");
    if (entry.contains("nodes")) {
      if (!entry["nodes"].is_object()) throw ValidationError(where + ".nodes", "expected an object");
      for (const auto& [label, value] : entry["nodes"].items()) {
        const auto point = projective_from_json(value, where + ".nodes." + label);
        if (!point) throw ValidationError(where + ".nodes." + label, "node points must be finite");
        comp.nodes[label] = *point;
      }
    }
    if (entry.contains("base_point")) {
      if (!declared_base.empty() && declared_base != id) {
        throw ValidationError(where + ".base_point", "base point given on a vertex other than base_vertex");
      }
      declared_base = id;
      out.base_point = projective_from_json(entry["base_point"], where + ".base_point");
    }
    if (entry.contains("chart")) {
      const auto coeffs = complex_vector_from_json(entry["chart"], where + ".chart");
      if (coeffs.size() == 0 || std::abs(coeffs(0)) == 0.0) {
        throw ValidationError(where + ".chart", "leading coefficient must be nonzero");
      }
      out.chart.coeffs.assign(coeffs.data(), coeffs.data() + coeffs.size());
    }
    out.components.push_back(std::move(comp));
  }
  if (declared_base.empty()) declared_base = curve.vertices().front().id;
  out.base_vertex = declared_base;
  const MarkedComponent* base = out.find(out.base_vertex);
  if (!base) throw ValidationError("$.base_vertex", "no component description for '" + out.base_vertex + "'");
  if (!vertices[out.base_vertex].contains("base_point") && base->genus != 0) {
    throw ValidationError(vertex_path(out.base_vertex) + ".base_point", "required on a torus component");
  }
  return out;
}

nlohmann::json to_json(const MarkedCurve& marked) {
  nlohmann::json vertices = nlohmann::json::object();
  for (const auto& comp : marked.components) {
    nlohmann::json entry{{"genus", comp.genus}};
    if (comp.genus == 1) entry["tau"] = to_json(comp.tau);
    nlohmann::json nodes = nlohmann::json::object();
    for (const auto& [label, point] : comp.nodes) nodes[label] = to_json(point);
    entry["nodes"] = nodes;
    if (comp.vertex == marked.base_vertex) {
      entry["base_point"] = marked.base_point ? to_json(*marked.base_point) : nlohmann::json("inf");
      nlohmann::json chart = nlohmann::json::array();
      for (const auto& c : marked.chart.coeffs) chart.push_back(to_json(c));
      entry["chart"] = chart;
    }
    vertices[comp.vertex] = entry;
  }
  return {{"kind", "marked"}, {"order", marked.order}, {"base_vertex", marked.base_vertex}, {"vertices", vertices}};
}

nlohmann::json to_json(const ComponentData& data) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : data.vertices) {
    vertices.push_back({{"id", v.id}, {"genus", v.genus}, {"B_v", to_json(v.period)}, {"C_v", to_json(v.coupling)}});
  }
  nlohmann::json r_trop = nlohmann::json::array();
  for (const auto& r : data.r_trop) r_trop.push_back(to_json(r));
  nlohmann::json r_vertex = nlohmann::json::array();
  for (const auto& r : data.r_vertex) r_vertex.push_back(to_json(r));
  return {{"kind", "component_data"},
          {"order", data.order},
          {"h1", data.h1},
          {"base_vertex", data.base_vertex},
          {"B0", to_json(data.b0)},
          {"B0_asymmetry", to_json(data.b0_asymmetry)},
          {"r_trop", r_trop},
          {"r_vertex", r_vertex},
          {"q", to_json(data.q)},
          {"vertices", vertices}};
}

ComponentData load_component_data(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("$", "expected an object");
  if (doc.contains("kind") && doc["kind"] != "component_data") throw ValidationError("$.kind", "expected \"component_data\"");
  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw ValidationError(std::string("$.") + key, "missing field");
    return doc[key];
  };
  ComponentData data;
  const auto& order = require("order");
  if (!order.is_number_integer() || order.get<int>() < 4) throw ValidationError("$.order", "expected an integer >= 4");
  data.order = order.get<int>();
  const auto& h1 = require("h1");
  if (!h1.is_number_unsigned()) throw ValidationError("$.h1", "expected a nonnegative integer");
  data.h1 = h1.get<std::size_t>();
  const auto hd = static_cast<Eigen::Index>(data.h1);
  if (!require("base_vertex").is_string()) throw ValidationError("$.base_vertex", "expected a vertex id");
  data.base_vertex = doc["base_vertex"].get<std::string>();

  data.b0 = complex_matrix_from_json(require("B0"), "$.B0");
  if (data.b0.rows() != hd || data.b0.cols() != hd) throw ValidationError("$.B0", "expected an h1 x h1 matrix");
  const double scale = std::max(1.0, data.h1 ? data.b0.cwiseAbs().maxCoeff() : 0.0);
  if (data.h1 && (data.b0 - data.b0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("$.B0", "matrix is not symmetric");
  }
  data.b0_asymmetry = doc.contains("B0_asymmetry") ? complex_matrix_from_json(doc["B0_asymmetry"], "$.B0_asymmetry")
                                                    : ComplexMatrix::Zero(hd, hd);
  if (data.b0_asymmetry.rows() != hd || data.b0_asymmetry.cols() != hd) {
    throw ValidationError("$.B0_asymmetry", "expected an h1 x h1 matrix");
  }

  const auto& vertices = require("vertices");
  if (!vertices.is_array() || vertices.empty()) throw ValidationError("$.vertices", "expected a nonempty array");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string where = "$.vertices[" + std::to_string(i) + "]";
    const auto& entry = vertices[i];
    if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string()) {
      throw ValidationError(where + ".id", "expected a vertex id");
    }
    VertexData v;
    v.id = entry["id"].get<std::string>();
    if (!entry.contains("genus") || !entry["genus"].is_number_integer() || entry["genus"].get<int>() < 0) {
      throw ValidationError(where + ".genus", "expected a nonnegative integer");
    }
    v.genus = entry["genus"].get<int>();
    const auto gd = static_cast<Eigen::Index>(v.genus);
    v.period = v.genus ? complex_matrix_from_json(entry.value("B_v", nlohmann::json()), where + ".B_v") : ComplexMatrix(0, 0);
    if (v.period.rows() != gd || v.period.cols() != gd) throw ValidationError(where + ".B_v", "expected genus x genus");
    if (v.genus) {
      try {
        SiegelMatrix check(v.period);
      } catch (const ValidationError& e) {
        throw ValidationError(where + ".B_v", e.what());
      }
    }
    v.coupling = v.genus ? complex_matrix_from_json(entry.value("C_v", nlohmann::json()), where + ".C_v")
                         : ComplexMatrix(0, hd);
    if (v.genus && data.h1 == 0 && v.coupling.rows() == 0) v.coupling = ComplexMatrix(gd, 0);
    if (v.coupling.rows() != gd || v.coupling.cols() != hd) throw ValidationError(where + ".C_v", "expected genus x h1");
    data.vertices.push_back(std::move(v));
  }
  const std::size_t base = data.base_index();
  const auto gbase = static_cast<Eigen::Index>(data.vertices[base].genus);

  auto read_vectors = [&](const char* key, Eigen::Index length, std::vector<ComplexVector>& out) {
    const std::string where = std::string("$.") + key;
    const auto& arr = require(key);
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(data.order)) {
      throw ValidationError(where, "expected one vector per order m = 1..order");
    }
    for (std::size_t m = 0; m < arr.size(); ++m) {
      auto v = complex_vector_from_json(arr[m], where + "[" + std::to_string(m) + "]");
      if (v.size() != length) throw ValidationError(where + "[" + std::to_string(m) + "]", "wrong length");
      out.push_back(std::move(v));
    }
  };
  read_vectors("r_trop", hd, data.r_trop);
  read_vectors("r_vertex", gbase, data.r_vertex);
  data.q = complex_matrix_from_json(require("q"), "$.q");
  if (data.q.rows() != data.order || data.q.cols() != data.order) throw ValidationError("$.q", "expected order x order");
  return data;
}

void check_compatible(const ComponentData& data, const TropicalCurve& curve) {
  const Genus gen = genus(curve);
  if (data.h1 != static_cast<std::size_t>(gen.h1)) {
    throw ValidationError("$.h1", "component data has h1 = " + std::to_string(data.h1) + ", curve has " +
                                      std::to_string(gen.h1));
  }
  if (data.vertices.size() != curve.vertex_count()) throw ValidationError("$.vertices", "vertex count mismatch");
  for (std::size_t i = 0; i < data.vertices.size(); ++i) {
    const auto& v = curve.vertices()[i];
    const std::string where = "$.vertices[" + std::to_string(i) + "]";
    if (data.vertices[i].id != v.id) throw ValidationError(where + ".id", "expected '" + v.id + "' (curve order)");
    if (data.vertices[i].genus != v.weight) throw ValidationError(where + ".genus", "does not match the vertex weight");
  }
}

ComponentData component_data_from_json(const nlohmann::json& document, const TropicalCurve& curve,
                                       const CycleBasis& basis, std::optional<int> order) {
  const std::string kind = document.is_object() ? document.value("kind", std::string("marked")) : "";
  if (kind == "component_data") {
    ComponentData data = load_component_data(document);
    check_compatible(data, curve);
    return data;
  }
  MarkedCurve marked = marked_curve_from_json(document, curve);
  if (order) marked.order = *order;
  ComponentData data = component_data(curve, basis, marked);
  check_compatible(data, curve);
  return data;
}

}  // namespace tropkp

#pragma once

#include "tropkp/checks/bundled.hpp"
#include "tropkp/checks/random_instances.hpp"
#include "tropkp/graph.hpp"
#include "tropkp/period.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace tropkp::test {

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kI{0.0, 1.0};

struct EdgeSpec {
  std::string id, tail, head, length;
};

inline TropicalCurve make_curve(const std::vector<std::pair<std::string, int>>& vertices,
                                const std::vector<EdgeSpec>& edges) {
  nlohmann::json doc{{"vertices", nlohmann::json::array()}, {"edges", nlohmann::json::array()}};
  for (const auto& [id, w] : vertices) doc["vertices"].push_back({{"id", id}, {"weight", w}});
  for (const auto& e : edges) {
    doc["edges"].push_back({{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"length", e.length}});
  }
  return tropical_curve_from_json(doc);
}

inline TropicalCurve single_loop(const std::string& length = "3", int weight = 0) {
  return make_curve({{"v", weight}}, {{"e", "v", "v", length}});
}

inline TropicalCurve theta_graph(const std::string& l1 = "1", const std::string& l2 = "2", const std::string& l3 = "3",
                                 int wa = 0, int wb = 0) {
  return make_curve({{"a", wa}, {"b", wb}}, {{"e1", "a", "b", l1}, {"e2", "a", "b", l2}, {"e3", "a", "b", l3}});
}

inline TropicalPeriodMatrix rational_matrix(const std::vector<std::vector<int>>& rows) {
  DenseMatrix<Rational> m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  }
  return TropicalPeriodMatrix(m);
}

inline RationalVector rationals(std::initializer_list<const char*> items) {
  RationalVector out;
  for (const char* s : items) out.push_back(parse_rational(s));
  return out;
}

}  // namespace tropkp::test

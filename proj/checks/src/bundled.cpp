#include "tropkp/checks/bundled.hpp"

#include "tropkp/checks/bundled_documents.hpp"
#include "tropkp/errors.hpp"
#include "tropkp/json_io.hpp"

namespace tropkp::checks {

Example example_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("$", "expected an object");
  for (const char* key : {"curve", "components"}) {
    if (!doc.contains(key)) throw ValidationError(std::string("$.") + key, "missing");
  }
  Example out{doc.value("name", std::string("example")), doc.value("description", std::string()),
              tropical_curve_from_json(doc["curve"]), doc["components"], {}, {}};
  const std::size_t h1 = static_cast<std::size_t>(genus(out.curve).h1);
  if (doc.contains("alpha")) {
    out.alpha = rational_vector_from_json(doc["alpha"], "$.alpha");
  } else {
    out.alpha.assign(h1, Rational(0));
  }
  if (out.alpha.size() != h1) throw ValidationError("$.alpha", "expected " + std::to_string(h1) + " entries");
  const auto g = static_cast<Eigen::Index>(genus(out.curve).g);
  out.c = doc.contains("c") ? complex_vector_from_json(doc["c"], "$.c") : ComplexVector::Zero(g);
  if (out.c.size() != g) throw ValidationError("$.c", "expected " + std::to_string(g) + " entries");
  return out;
}

std::vector<std::string> bundled_names() {
  std::vector<std::string> out;
  for (const auto& [name, body] : detail::kBundledDocuments) out.emplace_back(name);
  return out;
}

nlohmann::json bundled_document(std::string_view name) {
  for (const auto& [key, body] : detail::kBundledDocuments) {
    if (key == name) return nlohmann::json::parse(body);
  }
  std::string known;
  for (const auto& n : bundled_names()) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("--example", "unknown example '" + std::string(name) + "' (known: " + known + ")");
}

Example bundled_example(std::string_view name) { return example_from_json(bundled_document(name)); }

}  // namespace tropkp::checks

namespace tropkp::checks {

Pipeline build_pipeline(const TropicalCurve& curve, const nlohmann::json& components, std::optional<int> order) {
  CycleBasis basis = cycle_basis(curve);
  TropicalPeriodMatrix bc = period_matrix(curve, basis);
  ComponentData data = component_data_from_json(components, curve, basis, order);
  return {curve, std::move(basis), std::move(bc), std::move(data)};
}

Pipeline build_pipeline(const Example& example, std::optional<int> order) {
  return build_pipeline(example.curve, example.components, order);
}

}  // namespace tropkp::checks

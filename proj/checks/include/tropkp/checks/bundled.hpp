#pragma once

#include "tropkp/component_data.hpp"
#include "tropkp/graph.hpp"
#include "tropkp/period.hpp"
#include "tropkp/rational.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tropkp::checks {

// Example document: {"name","description","curve":{...},"components":{...},
// "alpha":[...],"c":[...]}.
struct Example {
  std::string name;
  std::string description;
  TropicalCurve curve;
  nlohmann::json components;
  RationalVector alpha;
  ComplexVector c;  // ((c_v)_v, c)
};

Example example_from_json(const nlohmann::json& document);

std::vector<std::string> bundled_names();
// Throws ValidationError for unknown names.
nlohmann::json bundled_document(std::string_view name);
Example bundled_example(std::string_view name);

}  // namespace tropkp::checks

namespace tropkp::checks {

// Everything derived from a curve and its components document.
struct Pipeline {
  TropicalCurve curve;
  CycleBasis basis;
  TropicalPeriodMatrix bc;
  ComponentData data;
};

Pipeline build_pipeline(const TropicalCurve& curve, const nlohmann::json& components,
                        std::optional<int> order = std::nullopt);
Pipeline build_pipeline(const Example& example, std::optional<int> order = std::nullopt);

}  // namespace tropkp::checks

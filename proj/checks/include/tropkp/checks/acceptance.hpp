#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tropkp::checks {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
};

constexpr int kCriterionCount = 8;

// Runs one criterion; exceptions become a failed result.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// "PASS [3] riemann theta ...: detail (1.2 s / 10 s)"
std::string format_line(const CriterionResult& result);
nlohmann::json to_json(const CriterionResult& result);

}  // namespace tropkp::checks

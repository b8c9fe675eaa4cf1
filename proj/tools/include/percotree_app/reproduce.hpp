#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace percotree::app {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  nlohmann::json data;

  std::string line() const;
};

inline constexpr int kCriterionCount = 11;

std::string criterion_name(int id);
CriterionResult run_criterion(int id, unsigned threads = 1);

}  // namespace percotree::app

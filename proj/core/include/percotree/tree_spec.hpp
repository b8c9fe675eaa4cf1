#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "percotree/constructions.hpp"

namespace percotree {

// Malformed tree specification; the message names the offending field.
class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field(field) {}
  std::string field;
};

GeneralTree tree_from_json(const nlohmann::json& spec);
GeneralTree load_tree(const std::string& path);

nlohmann::json sequence_to_json(const ChildSequence& seq);

// Spec for a named construction with its parameters.
nlohmann::json construction_spec(const std::string& name, const nlohmann::json& params);
std::vector<std::string> construction_names();

// Short id from the canonical dump.
std::string tree_id(const nlohmann::json& spec);

nlohmann::json read_json_file(const std::string& path);

}  // namespace percotree

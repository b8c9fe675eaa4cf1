#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace percotree {

std::string fmt_num(long double v);
std::string fmt_opt(const std::optional<long double>& v);

// FNV-1a 64-bit, rendered as 16 hex digits
std::string hash_hex(const std::string& text);

struct CsvMeta {
  std::vector<std::pair<std::string, std::string>> fields;
  void add(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }
};

// '#'-prefixed metadata lines followed by the column row
void write_csv_header(std::ostream& os, const CsvMeta& meta, const std::vector<std::string>& columns);

// Strips '#' lines, leaving the deterministic body.
std::string csv_body(const std::string& text);

}  // namespace percotree

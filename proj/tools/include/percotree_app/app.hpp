#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace percotree::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

// Runs the percotree command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b:step" (inclusive) or a comma-separated list
std::vector<double> parse_grid(const std::string& text);

}  // namespace percotree::app

#include "percotree/precise_prob.hpp"

#include <cstdio>

namespace percotree {

std::string PreciseProb::str() const {
  char buf[96];
  if (offset == 0.0L) {
    std::snprintf(buf, sizeof buf, "%.17Lg", base);
  } else {
    std::snprintf(buf, sizeof buf, "%.17Lg%+.6Le", base, offset);
  }
  return buf;
}

}  // namespace percotree

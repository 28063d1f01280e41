#pragma once

#include <cstdio>
#include <string>

namespace edgefuse::detail {

// Fixed-format numeric rendering so emitted files are reproducible
// independent of locale and stream state.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace edgefuse::detail

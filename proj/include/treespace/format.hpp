#pragma once

#include <cstdio>
#include <string>

namespace treespace {

// Shortest form that round-trips bit-exactly is not needed; 17 significant
// digits always round-trips and keeps outputs bitwise comparable.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace treespace

#pragma once

#include <cstdio>
#include <string>

namespace torus_lab {

/// Round-trip decimal representation (%.17g); identical bytes on every run.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace torus_lab

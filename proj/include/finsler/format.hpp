#pragma once

#include "finsler/types.hpp"

#include <cstdio>
#include <string>

namespace finsler {

/// Full-precision (17 significant digits) representation of a double.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace finsler

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace catforget::detail {

// 17 significant digits round-trips any double.
inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace catforget::detail

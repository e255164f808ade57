#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace ccr {

/// Decimal with 12 significant digits (round-half-even on the exact binary
/// value). Magnitudes below 1e-12 are rounding residue and print as "0".
inline std::string format_number(double x) {
  if (std::abs(x) < 1e-12) return "0";
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace ccr

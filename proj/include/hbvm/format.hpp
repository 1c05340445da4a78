#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "hbvm/errors.hpp"

namespace hbvm {

/// Shortest decimal string that parses back to the identical double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw InternalError("to_chars failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw FormatError("not a number: '" + std::string(text) + "'");
  return value;
}

}  // namespace hbvm

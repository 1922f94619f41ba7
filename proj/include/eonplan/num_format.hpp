#pragma once

#include <charconv>
#include <string>

namespace eonplan {

// Shortest decimal form that parses back to the same double. Locale-free,
// so identical runs serialize byte-identically.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace eonplan

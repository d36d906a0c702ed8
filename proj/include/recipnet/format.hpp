#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace recipnet {

/// Shortest text that parses back to the same double.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

/// `format_double`, or `missing` for nullopt.
inline std::string format_optional(const std::optional<double>& value, std::string_view missing = "") {
  return value ? format_double(*value) : std::string(missing);
}

}  // namespace recipnet

#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

namespace graphgan {

// Shortest decimal representation that round-trips the exact double.
inline std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view token, double& out) {
  auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc{} && res.ptr == token.data() + token.size();
}

}  // namespace graphgan

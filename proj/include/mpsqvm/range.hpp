#pragma once

// Range syntax used on the command line: `start:stop:third`.
//   real grids    -3.14159265:3.14159265:100   third field = number of points
//   integer axes  5:85:5                       third field = step
// A single value `v` is the one-element range. Both ends are inclusive.

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mpsqvm/vqe.hpp"

namespace mpsqvm {

namespace detail {

inline std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) return parts;
    start = colon + 1;
  }
}

template <typename T>
T parse_field(std::string_view field, std::string_view whole) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("malformed range '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace detail

/// `start:stop:count` for a real-valued sweep.
inline Grid parse_grid(std::string_view text) {
  const auto parts = detail::split_colon(text);
  if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:count, got '" + std::string(text) + "'");
  Grid g;
  g.start = detail::parse_field<double>(parts[0], text);
  g.stop = detail::parse_field<double>(parts[1], text);
  g.count = detail::parse_field<std::size_t>(parts[2], text);
  if (g.count < 2) throw std::invalid_argument("grid needs at least two points");
  return g;
}

/// `start:stop:step`, `start:stop` (step 1) or a single value.
inline std::vector<std::size_t> parse_int_range(std::string_view text) {
  const auto parts = detail::split_colon(text);
  if (parts.size() > 3) throw std::invalid_argument("malformed range '" + std::string(text) + "'");
  const auto start = detail::parse_field<std::size_t>(parts[0], text);
  const auto stop = parts.size() > 1 ? detail::parse_field<std::size_t>(parts[1], text) : start;
  const auto step = parts.size() > 2 ? detail::parse_field<std::size_t>(parts[2], text) : std::size_t{1};
  if (step == 0) throw std::invalid_argument("range step must be positive");
  if (stop < start) throw std::invalid_argument("range stop is below start in '" + std::string(text) + "'");
  std::vector<std::size_t> out;
  for (std::size_t v = start; v <= stop; v += step) out.push_back(v);
  return out;
}

}  // namespace mpsqvm

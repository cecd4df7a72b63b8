#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rideshare {

using VertexId = std::int32_t;
using Meters = std::int64_t;
using RiderId = std::int64_t;
using DriverId = std::int64_t;

inline constexpr VertexId kNoVertex = -1;

// Sentinel for "no path". Kept far below the int64 limit so that sums of a
// handful of sentinels never overflow.
inline constexpr Meters kUnreachable = std::numeric_limits<Meters>::max() / 8;

constexpr bool reachable(Meters d) { return d < kUnreachable; }

// Saturating addition over distances.
constexpr Meters add_distance(Meters a, Meters b) {
  if (!reachable(a) || !reachable(b)) return kUnreachable;
  return a + b;
}

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rideshare

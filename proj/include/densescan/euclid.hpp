#pragma once

#include <cstdint>
#include <utility>

#include "densescan/error.hpp"

namespace densescan {

using Index = std::int64_t;

// Euclidean division on naturals: a = q*b + r with 0 <= r < b.
// Shift identities: div(a + n*b, b) = div(a, b) + n and
// rem(a + n*b, b) = rem(a, b).
inline std::pair<Index, Index> euclid_divmod(Index a, Index b) {
  if (a < 0) throw IndexOutOfRange("euclid_divmod: dividend must be >= 0");
  if (b < 1) throw DivisibilityError("euclid_divmod: divisor must be >= 1");
  return {a / b, a % b};
}

inline Index euclid_div(Index a, Index b) { return euclid_divmod(a, b).first; }

inline Index euclid_rem(Index a, Index b) { return euclid_divmod(a, b).second; }

inline bool divides(Index k, Index a) { return euclid_rem(a, k) == 0; }

// Ceiling of a/b on naturals.
inline Index ceil_div(Index a, Index b) {
  if (a < 0) throw IndexOutOfRange("ceil_div: dividend must be >= 0");
  if (b < 1) throw DivisibilityError("ceil_div: divisor must be >= 1");
  return (a + b - 1) / b;
}

}  // namespace densescan

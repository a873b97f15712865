#pragma once

// Continued-fraction convergents of doubles, computed exactly from the
// binary representation.

#include <cstdint>
#include <vector>

namespace qvar::ratapprox {

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// Convergents p/q of a in [0, 1) with q <= q_max, in order of increasing q.
/// The first one is always 0/1. Values below 2^-73 only yield 0/1.
std::vector<Convergent> convergents(double a, std::int64_t q_max);

/// a - p/q with a single rounding.
double offset(double a, std::int64_t p, std::int64_t q);

}  // namespace qvar::ratapprox

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qvar {

inline constexpr const char* kVersion = "0.3.0";

using cplx = std::complex<double>;

// Error taxonomy shared by every module. Callers that only care about
// "bad input" can catch std::invalid_argument.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Unsupported : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// e(x) = exp(2 pi i x). The argument is reduced mod 1 first so that large
/// phases keep their fractional accuracy.
inline cplx expi2pi(double x) {
  const double frac = x - std::floor(x);
  const double angle = kTwoPi * frac;
  return {std::cos(angle), std::sin(angle)};
}

/// e(k/q) for integers, exact reduction of the numerator.
inline cplx expi2pi_ratio(long long k, long long q) {
  long long r = k % q;
  if (r < 0) r += q;
  const double angle = kTwoPi * static_cast<double>(r) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

}  // namespace qvar

#include "qvar/rational_approx.hpp"

#include <cmath>

#include "qvar/common.hpp"

namespace qvar::ratapprox {

std::vector<Convergent> convergents(double a, std::int64_t q_max) {
  require(a >= 0.0 && a < 1.0, "convergents need a in [0, 1)");
  require(q_max >= 1, "q_max must be at least 1");
  std::vector<Convergent> out{{0, 1}};
  if (a == 0.0 || a < 0x1p-73) return out;
  // a = mant * 2^exp exactly, with mant < 2^53 and exp >= -126.
  int exp = 0;
  const double frac = std::frexp(a, &exp);
  using u128 = unsigned __int128;
  const auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  const int shift = 53 - exp;  // a = mant / 2^shift
  u128 num = mant;
  u128 den = static_cast<u128>(1) << shift;
  // strip common powers of two
  while ((num & 1) == 0 && (den & 1) == 0) {
    num >>= 1;
    den >>= 1;
  }
  // h/k recurrences, seeded for the leading zero partial quotient.
  u128 h_prev = 1, h = 0;
  u128 k_prev = 0, k = 1;
  while (num != 0) {
    const u128 t = den / num;  // next partial quotient of den/num expansion
    const u128 r = den % num;
    // x = num/den = 1/(t + r/num)
    const u128 h_next = t * h + h_prev;
    const u128 k_next = t * k + k_prev;
    if (k_next > static_cast<u128>(q_max)) break;
    out.push_back({static_cast<std::int64_t>(h_next), static_cast<std::int64_t>(k_next)});
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    den = num;
    num = r;
  }
  return out;
}

double offset(double a, std::int64_t p, std::int64_t q) {
  return std::fma(a, static_cast<double>(q), -static_cast<double>(p)) / static_cast<double>(q);
}

}  // namespace qvar::ratapprox

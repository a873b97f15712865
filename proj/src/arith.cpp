#include "qvar/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/fft.hpp"

namespace qvar::arith {

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t lcm(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  const std::int64_t g = std::gcd(a, b);
  const __int128 v = static_cast<__int128>(a / g) * b;
  if (v > static_cast<__int128>(INT64_MAX)) throw ResourceLimit("lcm overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

ReducedFraction::ReducedFraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  require(den >= 1, "fraction denominator must be positive");
  require(num >= 0 && num < den, "fraction must lie in [0, 1)");
  require(std::gcd(num, den) == 1, "fraction is not in lowest terms");
}

ReducedFraction ReducedFraction::normalized(std::int64_t num, std::int64_t den) {
  require(den != 0, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  num %= den;
  if (num < 0) num += den;
  const std::int64_t g = std::gcd(num, den);
  return ReducedFraction(num / g, den / g);
}

FreqPoint::FreqPoint(std::vector<ReducedFraction> coords) : coords_(std::move(coords)) {
  require(!coords_.empty(), "frequency point needs at least one coordinate");
  height_ = 1;
  for (const auto& c : coords_) height_ = lcm(height_, c.den());
}

int FreqPoint::level() const { return level_of_height(height_); }

std::vector<double> FreqPoint::values() const {
  std::vector<double> v;
  v.reserve(coords_.size());
  for (const auto& c : coords_) v.push_back(c.value());
  return v;
}

int level_of_height(std::int64_t height) {
  require(height >= 1, "height must be positive");
  return 63 - __builtin_clzll(static_cast<unsigned long long>(height));
}

double ArithTables::psi(std::int64_t n) const {
  require(n >= 0 && n <= limit, "psi argument outside the sieved range");
  double s = 0.0;
  for (std::int64_t k = 2; k <= n; ++k) s += von_mangoldt[static_cast<std::size_t>(k)];
  return s;
}

ArithTables build_tables(std::int64_t limit, std::int64_t cap) {
  require(limit >= 1, "sieve limit must be at least 1");
  if (limit > cap) throw ResourceLimit("sieve limit " + std::to_string(limit) + " exceeds cap " + std::to_string(cap));
  const auto n = static_cast<std::size_t>(limit);
  ArithTables t;
  t.limit = limit;
  t.von_mangoldt.assign(n + 1, 0.0);
  t.mobius.assign(n + 1, 0);
  t.totient.assign(n + 1, 0);
  t.spf.assign(n + 1, 0);
  // rest[m] = m with every factor of spf(m) removed; prime powers have rest 1.
  std::vector<std::int32_t> rest(n + 1, 0);
  std::vector<std::int32_t> primes;
  t.mobius[1] = 1;
  t.totient[1] = 1;
  t.spf[1] = 1;
  rest[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (t.spf[i] == 0) {
      t.spf[i] = static_cast<std::int32_t>(i);
      primes.push_back(static_cast<std::int32_t>(i));
      t.mobius[i] = -1;
      t.totient[i] = static_cast<std::int64_t>(i) - 1;
      rest[i] = 1;
    }
    for (std::int32_t p : primes) {
      const std::size_t m = i * static_cast<std::size_t>(p);
      if (m > n || p > t.spf[i]) break;
      t.spf[m] = p;
      if (p == t.spf[i]) {
        t.mobius[m] = 0;
        t.totient[m] = t.totient[i] * p;
        rest[m] = rest[i];
      } else {
        t.mobius[m] = static_cast<std::int8_t>(-t.mobius[i]);
        t.totient[m] = t.totient[i] * (p - 1);
        rest[m] = static_cast<std::int32_t>(i);
      }
    }
    if (rest[i] == 1) t.von_mangoldt[i] = std::log(static_cast<double>(t.spf[i]));
  }
  return t;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  require(n >= 1, "factorize needs a positive integer");
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int mobius_of(std::int64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::int64_t totient_of(std::int64_t n) {
  std::int64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> divs{1};
  for (auto [p, e] : factorize(n)) {
    const std::size_t base = divs.size();
    std::int64_t pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

std::vector<std::int64_t> reduced_residues(std::int64_t q) {
  require(q >= 1, "modulus must be at least 1");
  std::vector<std::int64_t> out;
  for (std::int64_t r = 1; r <= q; ++r)
    if (std::gcd(r, q) == 1) out.push_back(r);
  return out;
}

cplx ramanujan_sum(std::int64_t q, std::int64_t a) {
  require(q >= 1, "modulus must be at least 1");
  require(std::gcd(a, q) == 1, "Ramanujan sum identity needs gcd(a, q) = 1");
  cplx sum{0.0, 0.0};
  for (std::int64_t r : reduced_residues(q)) {
    const std::int64_t k = static_cast<std::int64_t>((static_cast<__int128>(r) * a) % q);
    sum += expi2pi_ratio(k, q);
  }
  return sum;
}

namespace {

// Jordan totient J_d(L): number of points of (Z/L)^d of exact order L.
std::int64_t jordan_totient(std::int64_t L, int d) {
  __int128 v = 1;
  for (int j = 0; j < d; ++j) v *= L;
  for (auto [p, e] : factorize(L)) {
    __int128 pd = 1;
    for (int j = 0; j < d; ++j) pd *= p;
    v = v / pd * (pd - 1);
  }
  if (v > static_cast<__int128>(INT64_MAX)) throw ResourceLimit("rational point count overflows");
  return static_cast<std::int64_t>(v);
}

// Numerators in [0, q) coprime to q (just {0} for q = 1).
std::vector<std::int64_t> unit_numerators(std::int64_t q) {
  if (q == 1) return {0};
  std::vector<std::int64_t> out;
  for (std::int64_t a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) out.push_back(a);
  return out;
}

}  // namespace

std::int64_t count_rats(int s, int d) {
  require(s >= 0 && s <= 61, "level must lie in [0, 61]");
  require(d >= 1, "dimension must be at least 1");
  std::int64_t total = 0;
  const std::int64_t lo = std::int64_t{1} << s;
  const std::int64_t hi = std::int64_t{1} << (s + 1);
  if (hi - lo > 50'000'000) throw ResourceLimit("level too large to count");
  for (std::int64_t L = lo; L < hi; ++L) {
    total += jordan_totient(L, d);
    if (total < 0) throw ResourceLimit("rational point count overflows");
  }
  return total;
}

std::vector<FreqPoint> enumerate_rats(int s, int d, std::int64_t budget) {
  require(s >= 0, "level must be non-negative");
  require(d >= 1, "dimension must be at least 1");
  const std::int64_t expected = count_rats(s, d);
  if (expected > budget)
    throw ResourceLimit("R_" + std::to_string(s) + " in dimension " + std::to_string(d) + " has " +
                        std::to_string(expected) + " points, above the budget " + std::to_string(budget));
  std::vector<FreqPoint> out;
  out.reserve(static_cast<std::size_t>(expected));
  const std::int64_t lo = std::int64_t{1} << s;
  const std::int64_t hi = std::int64_t{1} << (s + 1);
  for (std::int64_t L = lo; L < hi; ++L) {
    const auto divs = divisors(L);
    // Odometer over d-tuples of divisors, keeping those with lcm exactly L.
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      std::int64_t l = 1;
      for (int j = 0; j < d; ++j) l = lcm(l, divs[idx[static_cast<std::size_t>(j)]]);
      if (l == L) {
        std::vector<std::vector<std::int64_t>> nums(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) nums[static_cast<std::size_t>(j)] = unit_numerators(divs[idx[static_cast<std::size_t>(j)]]);
        std::vector<std::size_t> k(static_cast<std::size_t>(d), 0);
        while (true) {
          std::vector<ReducedFraction> coords;
          coords.reserve(static_cast<std::size_t>(d));
          for (int j = 0; j < d; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            coords.emplace_back(nums[ju][k[ju]], divs[idx[ju]]);
          }
          out.emplace_back(std::move(coords));
          int j = d - 1;
          while (j >= 0 && ++k[static_cast<std::size_t>(j)] == nums[static_cast<std::size_t>(j)].size()) {
            k[static_cast<std::size_t>(j)] = 0;
            --j;
          }
          if (j < 0) break;
        }
      }
      int j = d - 1;
      while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == divs.size()) {
        idx[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
}
}  // namespace

cplx complete_poly_sum_period(std::int64_t q, std::span<const std::int64_t> numerators,
                              std::span<const std::int64_t> denominators) {
  require(q >= 1, "period must be positive");
  require(numerators.size() == denominators.size(), "numerator/denominator length mismatch");
  const std::size_t d = numerators.size();
  // Integer phase coefficients c_j with theta_j = c_j / q.
  std::vector<std::int64_t> coef(d);
  for (std::size_t j = 0; j < d; ++j) {
    require(denominators[j] >= 1 && q % denominators[j] == 0, "period must be a multiple of every denominator");
    std::int64_t c = numerators[j] % denominators[j];
    if (c < 0) c += denominators[j];
    coef[j] = mulmod(c, q / denominators[j], q);
  }
  cplx sum{0.0, 0.0};
  for (std::int64_t n = 1; n <= q; ++n) {
    const std::int64_t nm = n % q;
    std::int64_t power = 1;
    std::int64_t phase = 0;
    for (std::size_t j = 0; j < d; ++j) {
      power = mulmod(power, nm, q);
      phase = (phase + mulmod(coef[j], power, q)) % q;
    }
    sum += expi2pi_ratio(phase, q);
  }
  return sum / static_cast<double>(q);
}

cplx complete_poly_sum(std::int64_t q, const FreqPoint& theta, int d) {
  require(d == theta.dim(), "dimension does not match the frequency point");
  require(q == theta.height(), "q must equal the lcm height of theta");
  std::vector<std::int64_t> nums, dens;
  for (const auto& c : theta.coords()) {
    nums.push_back(c.num());
    dens.push_back(c.den());
  }
  return complete_poly_sum_period(q, nums, dens);
}

double psi_progression(const ArithTables& tables, std::int64_t N, std::int64_t q, std::int64_t r) {
  require(N >= 1, "N must be at least 1");
  require(q >= 1 && r >= 1 && r <= q, "need 1 <= r <= q");
  require(N <= tables.limit, "N exceeds the sieved range");
  double sum = 0.0;
  for (std::int64_t n = r; n <= N; n += q) sum += tables.lambda(n);
  return sum;
}

double max_complete_sum_at_height(std::int64_t q, int d) {
  require(q >= 1, "height must be positive");
  require(d >= 1, "dimension must be at least 1");
  if (q == 1) return 1.0;
  if (d == 1) return 0.0;  // a nontrivial additive character sums to zero
  if (q > (1 << 16)) throw ResourceLimit("height too large for exhaustive complete-sum scan");
  std::int64_t slices = 1;
  for (int j = 1; j < d; ++j) {
    slices *= q;
    if (slices > 50'000'000) throw ResourceLimit("too many complete sums to scan");
  }
  std::vector<std::int64_t> powers(static_cast<std::size_t>(q) * static_cast<std::size_t>(d));
  for (std::int64_t n = 0; n < q; ++n) {
    std::int64_t p = 1;
    for (int j = 0; j < d; ++j) {
      p = mulmod(p, n, q);
      powers[static_cast<std::size_t>(n) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = p;
    }
  }
  std::vector<cplx> table(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) table[static_cast<std::size_t>(k)] = expi2pi_ratio(k, q);

  fft::Plan plan({static_cast<int>(q)}, fft::Sign::plus);
  std::vector<cplx> buf(static_cast<std::size_t>(q));
  std::vector<std::int64_t> tail(static_cast<std::size_t>(d - 1), 0);
  double best = 0.0;
  for (std::int64_t slice = 0; slice < slices; ++slice) {
    std::int64_t rem = slice;
    std::int64_t g = q;
    for (int j = 0; j < d - 1; ++j) {
      tail[static_cast<std::size_t>(j)] = rem % q;
      rem /= q;
      g = std::gcd(g, tail[static_cast<std::size_t>(j)]);
    }
    for (std::int64_t n = 0; n < q; ++n) {
      std::int64_t phase = 0;
      for (int j = 1; j < d; ++j)
        phase = (phase + mulmod(tail[static_cast<std::size_t>(j - 1)],
                                powers[static_cast<std::size_t>(n) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)], q)) % q;
      buf[static_cast<std::size_t>(n)] = table[static_cast<std::size_t>(phase)];
    }
    plan.execute(buf);
    for (std::int64_t b1 = 0; b1 < q; ++b1) {
      if (std::gcd(g, b1) != 1) continue;
      best = std::max(best, std::abs(buf[static_cast<std::size_t>(b1)]) / static_cast<double>(q));
    }
  }
  return best;
}

}  // namespace qvar::arith

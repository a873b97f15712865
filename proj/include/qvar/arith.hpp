#pragma once

// Exact number-theoretic primitives: sieved multiplicative functions,
// reduced residues, rational frequency sets and complete exponential sums.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qvar/common.hpp"

namespace qvar::arith {

inline constexpr std::int64_t kDefaultSieveCap = 10'000'000;

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t lcm(std::int64_t a, std::int64_t b);

/// a/q in lowest terms with 0 <= a/q < 1.
class ReducedFraction {
 public:
  ReducedFraction() = default;
  /// Throws InvalidArgument unless gcd(num, den) = 1 and 0 <= num < den.
  ReducedFraction(std::int64_t num, std::int64_t den);

  /// Reduces num/den and wraps it into [0, 1).
  static ReducedFraction normalized(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const ReducedFraction&, const ReducedFraction&) = default;
  friend auto operator<=>(const ReducedFraction& a, const ReducedFraction& b) {
    // Compare by value via 128-bit cross products.
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A point of the rational torus with its lcm height.
class FreqPoint {
 public:
  FreqPoint() = default;
  explicit FreqPoint(std::vector<ReducedFraction> coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<ReducedFraction>& coords() const { return coords_; }
  const ReducedFraction& operator[](int j) const { return coords_[static_cast<std::size_t>(j)]; }
  std::int64_t height() const { return height_; }
  /// Level s with 2^s <= height < 2^{s+1}.
  int level() const;
  std::vector<double> values() const;

  friend bool operator==(const FreqPoint& a, const FreqPoint& b) { return a.coords_ == b.coords_; }
  friend bool operator<(const FreqPoint& a, const FreqPoint& b) {
    if (a.height_ != b.height_) return a.height_ < b.height_;
    return a.coords_ < b.coords_;
  }

 private:
  std::vector<ReducedFraction> coords_;
  std::int64_t height_ = 1;
};

/// Level of a height: floor(log2(height)).
int level_of_height(std::int64_t height);

struct ArithTables {
  std::int64_t limit = 0;
  std::vector<double> von_mangoldt;   // index n, natural logs
  std::vector<std::int8_t> mobius;    // index n
  std::vector<std::int64_t> totient;  // index n
  std::vector<std::int32_t> spf;      // smallest prime factor, spf[1] = 1

  double lambda(std::int64_t n) const { return von_mangoldt[static_cast<std::size_t>(n)]; }
  int mu(std::int64_t n) const { return mobius[static_cast<std::size_t>(n)]; }
  std::int64_t phi(std::int64_t n) const { return totient[static_cast<std::size_t>(n)]; }
  /// Chebyshev psi(N) = sum_{n <= N} Lambda(n).
  double psi(std::int64_t n) const;
};

/// Linear sieve for Lambda, mu, phi on 1..limit. limit above `cap` is a
/// resource-limit error so accidental huge sieves fail fast.
ArithTables build_tables(std::int64_t limit, std::int64_t cap = kDefaultSieveCap);

/// Binary cache: "QVARTBL1" magic, u32 version, u64 limit, then the three
/// arrays little-endian (f64 Lambda, i8 mu, u64 phi) for n = 0..limit.
void save_tables(const ArithTables& tables, const std::filesystem::path& path);
ArithTables load_tables(const std::filesystem::path& path);
/// Loads `dir/arith_<limit>.bin` when present, otherwise sieves and writes it.
ArithTables cached_tables(std::int64_t limit, const std::filesystem::path& dir);

/// Trial-division factorization into (prime, exponent) pairs.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);
int mobius_of(std::int64_t n);
std::int64_t totient_of(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n);

/// A_q = { r in 1..q : gcd(r, q) = 1 }.
std::vector<std::int64_t> reduced_residues(std::int64_t q);

/// sum_{r in A_q} e(r a / q); equals mu(q) for gcd(a, q) = 1.
cplx ramanujan_sum(std::int64_t q, std::int64_t a);

/// All reduced rational points of [0,1)^d with lcm height in [2^s, 2^{s+1}),
/// sorted by (height, coordinates). Throws ResourceLimit above `budget` points.
std::vector<FreqPoint> enumerate_rats(int s, int d, std::int64_t budget = 5'000'000);
/// Exact |R_s| without materializing the set.
std::int64_t count_rats(int s, int d);

/// (1/q) sum_{n=1}^{q} e(theta_1 n + ... + theta_d n^d) with q = theta.height().
cplx complete_poly_sum(std::int64_t q, const FreqPoint& theta, int d);

/// The same sum for an arbitrary period q that is a multiple of every
/// denominator (the value does not depend on which multiple is used).
cplx complete_poly_sum_period(std::int64_t q, std::span<const std::int64_t> numerators,
                              std::span<const std::int64_t> denominators);

/// psi(N; q, r) = sum_{n <= N, n = r mod q} Lambda(n).
double psi_progression(const ArithTables& tables, std::int64_t N, std::int64_t q, std::int64_t r);

/// Largest |complete_poly_sum| over points of exact height q (d >= 1).
/// Uses one length-q transform per slice of the last d-1 coordinates.
double max_complete_sum_at_height(std::int64_t q, int d);

}  // namespace qvar::arith

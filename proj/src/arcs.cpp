#include <algorithm>
#include <cmath>
#include <set>

#include "qvar/multiplier.hpp"

namespace qvar::mult {

double arc_nu(int d) {
  require(d >= 1, "dimension must be at least 1");
  return 1.0 / static_cast<double>(std::max(d, 12));
}

namespace {

struct AxisHit {
  arith::ReducedFraction frac;
  double beta;
  friend bool operator<(const AxisHit& a, const AxisHit& b) { return a.frac.den() < b.frac.den() || (a.frac.den() == b.frac.den() && a.frac < b.frac); }
};

}  // namespace

ArcClassification classify_arc(std::span<const double> alpha, std::int64_t N, int d, std::int64_t budget) {
  require(N >= 2, "arc classification needs N >= 2");
  require(d >= 1 && alpha.size() == static_cast<std::size_t>(d), "frequency dimension does not match d");
  for (double a : alpha) require(std::isfinite(a), "frequency must be finite");
  const double nu = arc_nu(d);
  const double Nd = static_cast<double>(N);
  // Largest admissible lcm; the small epsilon keeps exact powers (N^nu integral) in.
  const auto q_max = static_cast<std::int64_t>(std::floor(std::pow(Nd, nu) * (1.0 + 1e-12)));
  if (q_max > budget / d) throw ResourceLimit("arc search over denominators up to " + std::to_string(q_max) + " exceeds the budget");

  std::vector<std::vector<AxisHit>> hits(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    double a = alpha[static_cast<std::size_t>(j)];
    a -= std::floor(a);
    if (a >= 1.0) a = 0.0;
    const double tol = std::pow(Nd, -(j + 1) + nu);
    std::set<AxisHit> seen;
    for (std::int64_t q = 1; q <= q_max; ++q) {
      const auto p = static_cast<std::int64_t>(std::llround(a * static_cast<double>(q)));
      const double beta = a - static_cast<double>(p) / static_cast<double>(q);
      if (std::abs(beta) > tol) continue;
      seen.insert({arith::ReducedFraction::normalized(p, q), beta});
    }
    hits[static_cast<std::size_t>(j)].assign(seen.begin(), seen.end());
    if (hits[static_cast<std::size_t>(j)].empty()) return {};
  }

  std::int64_t combos = 1;
  for (const auto& h : hits) {
    combos *= static_cast<std::int64_t>(h.size());
    if (combos > budget) throw ResourceLimit("arc search combinations exceed the budget");
  }

  ArcClassification best;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  while (true) {
    std::int64_t L = 1;
    bool ok = true;
    for (int j = 0; j < d && ok; ++j) {
      L = arith::lcm(L, hits[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]].frac.den());
      ok = L <= q_max;
    }
    if (ok) {
      std::vector<arith::ReducedFraction> coords;
      std::vector<double> beta;
      for (int j = 0; j < d; ++j) {
        const auto& h = hits[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
        coords.push_back(h.frac);
        beta.push_back(h.beta);
      }
      arith::FreqPoint theta(std::move(coords));
      if (!best.major || theta < best.theta) {
        best.major = true;
        best.theta = std::move(theta);
        best.beta = std::move(beta);
        best.q = L;
      }
    }
    int j = d - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == hits[static_cast<std::size_t>(j)].size()) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return best;
}

}  // namespace qvar::mult

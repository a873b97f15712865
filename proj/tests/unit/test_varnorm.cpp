#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qvar/varnorm.hpp"

using namespace qvar;
using namespace qvar::varnorm;

namespace {

// Exhaustive oracles over all subsets of indices (T <= 12).
std::int64_t greedy_brute(const SampledPath& p, double lambda) {
  const std::size_t T = p.size();
  std::int64_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << T); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < T; ++i)
      if (mask >> i & 1u) idx.push_back(i);
    bool ok = true;
    for (std::size_t k = 1; k < idx.size() && ok; ++k) ok = p.dist(idx[k - 1], idx[k]) > lambda;
    if (ok) best = std::max<std::int64_t>(best, static_cast<std::int64_t>(idx.size()) - 1);
  }
  return best;
}

std::int64_t lazy_brute(const SampledPath& p, double lambda, std::size_t from) {
  std::int64_t best = 0;
  for (std::size_t s = from; s < p.size(); ++s)
    for (std::size_t t = s + 1; t < p.size(); ++t)
      if (p.dist(s, t) > lambda) best = std::max(best, 1 + lazy_brute(p, lambda, t));
  return best;
}

double hvar_brute(const SampledPath& p, double q) {
  const std::size_t T = p.size();
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << T); ++mask) {
    double s = 0.0;
    long prev = -1;
    for (std::size_t i = 0; i < T; ++i)
      if (mask >> i & 1u) {
        if (prev >= 0) s += std::pow(p.dist(static_cast<std::size_t>(prev), i), q);
        prev = static_cast<long>(i);
      }
    best = std::max(best, s);
  }
  return std::pow(best, 1.0 / q);
}

SampledPath random_path(std::mt19937_64& g, std::size_t T, int dim) {
  std::normal_distribution<double> n01;
  std::vector<double> times(T);
  std::vector<std::vector<double>> vals(T, std::vector<double>(static_cast<std::size_t>(dim)));
  for (std::size_t t = 0; t < T; ++t) {
    times[t] = static_cast<double>(t + 1);
    for (auto& v : vals[t]) v = n01(g);
  }
  return SampledPath::real_vectors(times, vals);
}

}  // namespace

TEST_CASE("jump count examples") {
  CHECK(greedy_jump_count(SampledPath::scalar({3, 3, 3, 3}), 0.1) == 0);
  CHECK(lazy_jump_count(SampledPath::scalar({3, 3, 3, 3}), 0.1) == 0);
  CHECK(greedy_jump_count(SampledPath::scalar({0, 1, 0, 1, 0}), 0.5) == 4);
  CHECK(greedy_jump_count(SampledPath::scalar({0, 2, 1, 3}), 1.5) == 1);
  CHECK(lazy_jump_count(SampledPath::scalar({0, 2, 1, 3}), 1.5) == 2);
  CHECK(lazy_jump_count(SampledPath::scalar({0, 1, 0, 1}), 0.5) == 3);
  CHECK_THROWS_AS(greedy_jump_count(SampledPath::scalar({0, 1}), 0.0), InvalidArgument);
  CHECK_THROWS_AS(lazy_jump_count(SampledPath::scalar({0, 1}), -1.0), InvalidArgument);
}

TEST_CASE("variation examples") {
  CHECK(hvar(SampledPath::scalar({2, 2, 2}), 2.0) == 0.0);
  CHECK(hvar(SampledPath::scalar({0, 1, 2, 3}), 1.0) == doctest::Approx(3.0));
  CHECK(hvar(SampledPath::scalar({0, 1, 0}), 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(ivar(SampledPath::scalar({0, 0, 0}), 2.0) == 0.0);
  CHECK(ivar(SampledPath::scalar({5, 5}), 3.0) == doctest::Approx(5.0));
  CHECK(ivar(SampledPath::scalar({0, 1, 0}), 2.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK_THROWS_AS(hvar(SampledPath::scalar({0, 1}), 0.5), Unsupported);
  CHECK_THROWS_AS(ivar(SampledPath::scalar({0, 1}), 0.5), Unsupported);
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(SampledPath({1.0, 1.0}, 1, {cplx{0}, cplx{1}}), InvalidArgument);
  CHECK_THROWS_AS(SampledPath({1.0, 2.0}, 1, {cplx{0}, cplx{NAN}}), InvalidArgument);
  CHECK_THROWS_AS(SampledPath({1.0, 2.0}, 2, {cplx{0}, cplx{1}}), InvalidArgument);
}

TEST_CASE("DP agrees with brute force") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t T = 1 + static_cast<std::size_t>(trial % 10);
    const auto p = random_path(g, T, 1 + trial % 3);
    const double lam = 0.3 + 0.2 * (trial % 7);
    CHECK(greedy_jump_count(p, lam) == greedy_brute(p, lam));
    CHECK(lazy_jump_count(p, lam) == lazy_brute(p, lam, 0));
    for (double q : {1.0, 2.0, 2.5, 4.0}) CHECK(hvar(p, q) == doctest::Approx(hvar_brute(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("complex-valued paths use the modulus") {
  const auto p = SampledPath::complex({cplx{0, 0}, cplx{0, 1}, cplx{1, 1}});
  CHECK(hvar(p, 1.0) == doctest::Approx(2.0));
  CHECK(hvar(p, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sup_norm(p) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("inequalities between jumps and variation") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_path(g, 5 + static_cast<std::size_t>(trial), 1 + 2 * (trial % 2));
    for (double lam : {0.1, 0.5, 1.3}) {
      const auto gr = greedy_jump_count(p, lam);
      const auto lz = lazy_jump_count(p, lam);
      CHECK(gr <= lz);
      CHECK(lz <= greedy_jump_count(p, lam / 2));
      for (double q : {2.0, 2.5, 4.0}) CHECK(lam * std::pow(static_cast<double>(lz), 1.0 / q) <= hvar(p, q) * (1 + 1e-12));
    }
    for (double q : {2.0, 2.5, 4.0}) {
      CHECK(hvar(p, q) <= jump_variation_bound(p, q));
      CHECK(hvar(p, q) <= hvar(p, q - 0.5) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Minkowski across coordinates") {
  std::mt19937_64 g(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_path(g, 12, 3);
    const double q = 2.5;
    double comb = 0.0;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> coord(p.size());
      for (std::size_t t = 0; t < p.size(); ++t) coord[t] = p.value(t)[k].real();
      comb += std::pow(hvar(SampledPath::scalar(coord), q), 2);
    }
    CHECK(hvar(p, q) <= std::sqrt(comb) * (1 + 1e-12));
  }
}

TEST_CASE("time grids") {
  CHECK(make_time_grid(1.0, 4).points == std::vector<std::int64_t>{2, 4, 8, 16});
  CHECK(make_time_grid(0.5, 4).points == std::vector<std::int64_t>{2, 3, 4});
  CHECK_THROWS_AS(make_time_grid(0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(make_time_grid(1.5, 4), InvalidArgument);
  // block sizes relative to N_k shrink for eps < 1
  const auto grid = make_time_grid(0.5, 100).points;
  const auto n = grid.size();
  const double late = static_cast<double>(grid[n - 1] - grid[n - 2]) / static_cast<double>(grid[n - 2]);
  const double early = static_cast<double>(grid[3] - grid[2]) / static_cast<double>(grid[2]);
  CHECK(late < early);
  CHECK(late < 0.2);
  const auto until = make_time_grid_until(0.7, 1000);
  CHECK(until.points.back() >= 1000);
  CHECK(until.points[until.points.size() - 2] < 1000);
}

TEST_CASE("long and short variation") {
  const auto p = SampledPath::scalar({0, 1, 0, 1});
  const auto ls = short_long_split(p, TimeGrid{1.0, {1, 4}}, 1.0);
  CHECK(ls.long_var == doctest::Approx(1.0));
  CHECK(ls.short_var == doctest::Approx(3.0));
  CHECK(hvar(p, 1.0) <= ls.long_var + 2 * ls.short_var);

  const auto all = short_long_split(p, TimeGrid{1.0, {1, 2, 3, 4}}, 2.0);
  CHECK(all.short_var == doctest::Approx(std::sqrt(3.0)));
  CHECK(all.long_var == doctest::Approx(hvar(p, 2.0)));

  const auto flat = short_long_split(SampledPath::scalar({4, 4, 4}), TimeGrid{1.0, {1, 3}}, 2.0);
  CHECK(flat.long_var == 0.0);
  CHECK(flat.short_var == 0.0);
  CHECK_THROWS_AS(short_long_split(p, TimeGrid{1.0, {2, 4}}, 2.0), InvalidArgument);
}

TEST_CASE("parent partition") {
  const auto p = SampledPath::scalar({0, 1, 0, 1});
  const auto part = build_parent_partition(p, 0.5);
  REQUIRE(part.levels() >= 2);
  CHECK(part.rho[0] == std::vector<std::size_t>{0, 1, 2, 3});
  // hand recursion: level 1 threshold 1, every adjacent step has size 1
  CHECK(part.rho[1] == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK(check_parent_partition(p, part).ok());

  const auto flat = build_parent_partition(SampledPath::scalar({2, 2.1, 2, 2.05}), 0.5);
  CHECK(flat.kept.size() == 1);
  for (int n = 1; n < flat.levels(); ++n)
    for (auto v : flat.rho[static_cast<std::size_t>(n)]) CHECK(v == 0);

  CHECK_THROWS_AS(build_parent_partition(p, 0.0), InvalidArgument);

  std::mt19937_64 g(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rp = random_path(g, 2 + static_cast<std::size_t>(trial % 9), 1 + trial % 2);
    double dmin = INFINITY;
    for (std::size_t t = 1; t < rp.size(); ++t) dmin = std::min(dmin, rp.dist(t - 1, t));
    const auto pp = build_parent_partition(rp, dmin / 2);
    CHECK(pp.kept.size() == rp.size());
    const auto chk = check_parent_partition(rp, pp);
    CHECK(chk.ok());
    // nested jump sets, recomputed from the table
    for (int n = 0; n + 1 < pp.levels(); ++n) {
      const auto jn = pp.jumps(n);
      for (auto t : pp.jumps(n + 1)) CHECK(std::find(jn.begin(), jn.end(), t) != jn.end());
    }
  }
}

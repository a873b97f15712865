#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qvar/harness.hpp"
#include "qvar/parallel.hpp"
#include "qvar/varnorm.hpp"

namespace qvar::harness {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Box-Muller on raw engine output so the stream does not depend on the library's distributions.
double gaussian(std::mt19937_64& g) {
  const double u1 = 1.0 - uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace

VariationSample variation_ratio(const std::vector<double>& f, const std::vector<double>& w,
                                const std::vector<std::int64_t>& grid, double p, double q, int split_samples) {
  require(!f.empty(), "input window must be non-empty");
  require(!grid.empty(), "time grid must be non-empty");
  require(p >= 1.0 && q >= 1.0, "exponents must be at least 1");
  for (std::size_t k = 0; k < grid.size(); ++k)
    require(grid[k] >= 1 && (k == 0 || grid[k] > grid[k - 1]), "time grid must be increasing and positive");
  const std::int64_t n_max = grid.back();
  require(static_cast<std::int64_t>(w.size()) > n_max, "kernel weights do not reach the last grid point");

  VariationSample out;
  double fp = 0.0;
  for (double v : f) fp += std::pow(std::abs(v), p);
  out.f_norm = std::pow(fp, 1.0 / p);
  if (out.f_norm == 0.0) {
    out.degenerate = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  const auto W = static_cast<std::int64_t>(f.size());
  const std::size_t X = static_cast<std::size_t>(n_max + W - 1);  // x = 1 .. n_max + W - 1
  const std::size_t T = grid.size();
  std::vector<double> vals(T * X, 0.0);
  std::vector<double> acc(X, 0.0);
  std::int64_t prev = 0;
  for (std::size_t k = 0; k < T; ++k) {
    for (std::int64_t n = prev + 1; n <= grid[k]; ++n) {
      const double wn = w[static_cast<std::size_t>(n)];
      if (wn == 0.0) continue;
      for (std::int64_t y = 0; y < W; ++y) acc[static_cast<std::size_t>(n + y - 1)] += wn * f[static_cast<std::size_t>(y)];
    }
    prev = grid[k];
    const double inv = 1.0 / static_cast<double>(grid[k]);
    for (std::size_t i = 0; i < X; ++i) vals[k * X + i] = acc[i] * inv;
  }

  std::vector<double> times(grid.begin(), grid.end());
  std::vector<double> iv(X, 0.0);
  std::vector<std::uint8_t> bad(X, 0);
  parallel_for(X, [&](std::size_t i) {
    std::vector<double> path(T);
    bool any = false;
    for (std::size_t k = 0; k < T; ++k) {
      path[k] = vals[k * X + i];
      any = any || path[k] != 0.0;
    }
    if (!any) return;
    const auto sp = varnorm::SampledPath::scalar(times, path);
    const double h = varnorm::hvar(sp, q);
    const double s = varnorm::sup_norm(sp);
    iv[i] = varnorm::ivar(sp, q);
    if (iv[i] < s * (1.0 - 1e-12) || iv[i] < h * (1.0 - 1e-12)) bad[i] = 1;
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < X; ++i) {
    sum += std::pow(iv[i], p);
    out.points += iv[i] > 0.0;
    out.cross_violations += bad[i];
  }
  out.lp_ivar = std::pow(sum, 1.0 / p);
  out.ratio = out.lp_ivar / out.f_norm;

  // Long/short split: coarse grid = first grid point at or past each power of two.
  std::vector<std::size_t> coarse{0};
  for (std::int64_t pw = 1; pw <= n_max; pw *= 2) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), pw);
    if (it != grid.end()) coarse.push_back(static_cast<std::size_t>(it - grid.begin()));
  }
  coarse.push_back(T - 1);
  std::sort(coarse.begin(), coarse.end());
  coarse.erase(std::unique(coarse.begin(), coarse.end()), coarse.end());
  if (T >= 2) {
    for (int s = 0; s < split_samples; ++s) {
      const std::size_t i = static_cast<std::size_t>(s) * X / static_cast<std::size_t>(split_samples);
      std::vector<double> path(T);
      for (std::size_t k = 0; k < T; ++k) path[k] = vals[k * X + i];
      const auto sp = varnorm::SampledPath::scalar(times, path);
      const double h = varnorm::hvar(sp, q);
      if (h == 0.0) continue;
      const auto ls = varnorm::short_long_split_indices(sp, coarse, q);
      out.split_ratio_max = std::max(out.split_ratio_max, h / (ls.long_var + 2.0 * ls.short_var));
    }
  }
  return out;
}

RunRecord variation_ratio_scan(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.kind = "variation-scan";
  rec.config = config_snapshot(cfg);
  rec.columns = {"W", "member", "distribution", "member_seed", "f_norm", "lp_ivar", "ratio", "split_ratio_max",
                 "cross_violations"};
  if (cfg.family == "poly" && cfg.degree != 1)
    throw Unsupported("variation scan supports the prime family and poly(1) only");

  std::vector<std::int64_t> grid;
  for (auto n : varnorm::make_time_grid_until(cfg.epsilon, cfg.n_max).points)
    if (n <= cfg.n_max) grid.push_back(n);
  require(!grid.empty(), "time grid is empty below n_max");

  std::vector<double> w(static_cast<std::size_t>(cfg.n_max + 1), 1.0);
  w[0] = 0.0;
  if (cfg.family == "prime") {
    const auto tables = tables_for(cfg, std::max<std::int64_t>(cfg.n_max, 2));
    for (std::int64_t n = 0; n <= cfg.n_max; ++n) w[static_cast<std::size_t>(n)] = tables.lambda(n);
  }

  std::vector<double> max_ratio;
  for (std::int64_t W : cfg.widths) {
    double best = 0.0, total = 0.0, least = INFINITY;
    int counted = 0;
    for (int m = 0; m < cfg.ensemble; ++m) {
      const std::uint64_t ms = mix(cfg.seed ^ mix(static_cast<std::uint64_t>(W) ^ mix(static_cast<std::uint64_t>(m))));
      std::mt19937_64 gen(ms);
      const bool rademacher = m % 2 == 0;
      std::vector<double> f(static_cast<std::size_t>(W));
      for (auto& v : f) v = rademacher ? ((gen() >> 63) ? 1.0 : -1.0) : gaussian(gen);
      const auto s = variation_ratio(f, w, grid, cfg.p_exponent, cfg.q_exponent, cfg.split_samples);
      rec.add_row({W, std::int64_t{m}, std::string(rademacher ? "rademacher" : "gaussian"), std::to_string(ms),
                   s.f_norm, s.lp_ivar, s.ratio, s.split_ratio_max, s.cross_violations});
      if (s.degenerate) {
        rec.set("degenerate_W" + std::to_string(W) + "_m" + std::to_string(m), std::string("zero input"));
        continue;
      }
      if (s.cross_violations > 0)
        rec.fail("iV below sup or hV at " + std::to_string(s.cross_violations) + " points (W=" + std::to_string(W) +
                 ", member " + std::to_string(m) + ")");
      if (s.split_ratio_max > 1.0 + 1e-9)
        rec.fail("long/short split violated (W=" + std::to_string(W) + ", member " + std::to_string(m) + ")");
      best = std::max(best, s.ratio);
      least = std::min(least, s.ratio);
      total += s.ratio;
      ++counted;
    }
    const std::string tag = "W" + std::to_string(W);
    rec.set("max_ratio_" + tag, best);
    rec.set("min_ratio_" + tag, counted ? least : NAN);
    rec.set("mean_ratio_" + tag, counted ? total / counted : NAN);
    max_ratio.push_back(best);
  }
  rec.set("grid_points", static_cast<std::int64_t>(grid.size()));
  rec.set("grid_last", grid.back());

  const double allowed = cfg.tol("growth", 0.10);
  double worst = -INFINITY;
  for (std::size_t i = 1; i < max_ratio.size(); ++i) {
    const double doublings = std::log2(static_cast<double>(cfg.widths[i]) / static_cast<double>(cfg.widths[i - 1]));
    if (doublings <= 0.0) continue;
    const double g = std::pow(max_ratio[i] / max_ratio[i - 1], 1.0 / doublings) - 1.0;
    worst = std::max(worst, g);
    rec.set("growth_per_doubling_W" + std::to_string(cfg.widths[i]), g);
    if (!(g < allowed))
      rec.fail("max ratio grows by " + format_double(100.0 * g) + "% per doubling at W=" + std::to_string(cfg.widths[i]));
  }
  if (std::isfinite(worst)) rec.set("max_growth_per_doubling", worst);
  return rec;
}

}  // namespace qvar::harness

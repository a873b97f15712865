#include <algorithm>
#include <cmath>
#include <random>

#include "qvar/harness.hpp"
#include "qvar/parallel.hpp"
#include "qvar/quadrature.hpp"
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

double gaussian(std::mt19937_64& g) {
  const double u1 = 1.0 - uniform01(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// integral_0^1 e(delta y) dy
cplx unit_interval_ft(double delta) {
  if (delta == 0.0) return 1.0;
  return (expi2pi(delta) - 1.0) / cplx{0.0, kTwoPi * delta};
}

double top_gram_eigenvalue(const std::vector<double>& freqs) {
  const std::size_t n = freqs.size();
  std::vector<cplx> G(n * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) G[k * n + l] = unit_interval_ft(freqs[k] - freqs[l]);
  std::vector<cplx> v(n, 1.0 / std::sqrt(static_cast<double>(n))), u(n);
  double lam = 0.0;
  for (int it = 0; it < 5000; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += G[k * n + l] * v[l];
      u[k] = s;
    }
    double norm = 0.0;
    for (const auto& x : u) norm += std::norm(x);
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t k = 0; k < n; ++k) v[k] = u[k] / norm;
    const bool done = std::abs(norm - lam) <= 1e-14 * norm;
    lam = norm;
    if (done) break;
  }
  return lam;
}

}  // namespace

MultifreqSample multifreq_sample(const std::vector<double>& freqs, const std::vector<std::vector<cplx>>& path,
                                 double q, double r) {
  require(!freqs.empty(), "need at least one frequency");
  require(!path.empty(), "need a non-empty coefficient path");
  require(q > r && r >= 1.0, "need q > r >= 1");
  const std::size_t n = freqs.size();
  const std::size_t T = path.size();
  for (const auto& c : path) require(c.size() == n, "every coefficient vector needs one entry per frequency");

  MultifreqSample out;
  out.M = std::sqrt(top_gram_eigenvalue(freqs));
  out.g_norm = std::sqrt(static_cast<double>(n));

  std::vector<double> times(T);
  std::vector<cplx> flat;
  for (std::size_t t = 0; t < T; ++t) {
    times[t] = static_cast<double>(t + 1);
    flat.insert(flat.end(), path[t].begin(), path[t].end());
  }
  const varnorm::SampledPath cp(times, static_cast<int>(n), flat);
  out.hvar_r = varnorm::hvar(cp, r);

  // LHS by composite Gauss-Legendre in y.
  double fmax = 0.0;
  for (double xi : freqs) fmax = std::max(fmax, std::abs(xi));
  const int panels = 8 * (static_cast<int>(std::ceil(fmax)) + 1);
  const auto& gl = quad::gauss_legendre(8);
  std::vector<double> part(static_cast<std::size_t>(panels), 0.0);
  parallel_for(part.size(), [&](std::size_t pnl) {
    const double h = 1.0 / panels;
    const double c = (static_cast<double>(pnl) + 0.5) * h;
    std::vector<cplx> ph(n), vals(T);
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double y = c + 0.5 * h * gl.nodes[i];
      for (std::size_t l = 0; l < n; ++l) ph[l] = expi2pi(freqs[l] * y);
      for (std::size_t t = 0; t < T; ++t) {
        cplx s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += path[t][l] * ph[l];
        vals[t] = s;
      }
      const double hv = varnorm::hvar(varnorm::SampledPath::complex(vals), q);
      acc += 0.5 * h * gl.weights[i] * hv * hv;
    }
    part[pnl] = acc;
  });
  double total = 0.0;
  for (double v : part) total += v;
  out.lhs = std::sqrt(total);

  // Jump integral: J_lambda is constant between consecutive increment sizes.
  std::vector<double> dists;
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = i + 1; j < T; ++j) dists.push_back(cp.dist(i, j));
  std::sort(dists.begin(), dists.end());
  dists.erase(std::unique(dists.begin(), dists.end()), dists.end());
  double prev = 0.0;
  for (double d : dists) {
    if (d <= prev) continue;
    const auto J = static_cast<double>(varnorm::greedy_jump_count(cp, 0.5 * (prev + d)));
    out.jump_rhs += (d - prev) * std::min(out.M * std::sqrt(J), out.g_norm * std::pow(J, 1.0 / q));
    prev = d;
  }
  return out;
}

RunRecord multifreq_constant_scan(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.kind = "multifreq-scan";
  rec.config = config_snapshot(cfg);
  rec.columns = {"N", "trials", "max_lemma_ratio", "max_lhs_over_hvar_r", "envelope_exponent", "max_envelope_ratio",
                 "prop_shape", "max_M"};
  const double q = cfg.q_exponent, r = cfg.r_exponent;
  const double expo = (0.5 - 1.0 / r) * q / (q - 2.0);
  const double prefactor = q / (q - r) + 2.0 / (r - 2.0);

  std::vector<double> lx, ly;
  double lemma_const = 0.0, prop_const = 0.0;
  for (std::int64_t N : cfg.freq_counts) {
    const auto n = static_cast<std::size_t>(N);
    double max_lemma = 0.0, max_norm = 0.0, max_env = 0.0, max_M = 0.0;
    for (int tr = 0; tr < cfg.trials; ++tr) {
      std::mt19937_64 gen(mix(cfg.seed ^ mix(static_cast<std::uint64_t>(N) ^ mix(static_cast<std::uint64_t>(tr) + 7))));
      std::vector<double> freqs(n);
      for (std::size_t l = 0; l < n; ++l) freqs[l] = static_cast<double>(l) + 0.25 * (2.0 * uniform01(gen) - 1.0);
      std::vector<std::vector<cplx>> path(static_cast<std::size_t>(cfg.path_length), std::vector<cplx>(n));
      for (std::size_t l = 0; l < n; ++l) path[0][l] = {gaussian(gen), gaussian(gen)};
      for (std::size_t t = 1; t < path.size(); ++t) {
        const double scale = std::exp(gaussian(gen)) / std::sqrt(static_cast<double>(n));
        for (std::size_t l = 0; l < n; ++l) path[t][l] = path[t - 1][l] + scale * cplx{gaussian(gen), gaussian(gen)};
      }
      const auto s = multifreq_sample(freqs, path, q, r);
      const double lemma = s.jump_rhs > 0.0 ? s.lhs / s.jump_rhs : 0.0;
      const double normed = s.hvar_r > 0.0 ? s.lhs / s.hvar_r : 0.0;
      max_lemma = std::max(max_lemma, lemma);
      max_norm = std::max(max_norm, normed);
      max_env = std::max(max_env, normed / (prefactor * std::pow(static_cast<double>(N), expo)));
      max_M = std::max(max_M, s.M);
    }
    const double shape = N >= 2 ? std::pow(q * std::log(static_cast<double>(N)) / (q - 2.0), 2) : 0.0;
    rec.add_row({N, std::int64_t{cfg.trials}, max_lemma, max_norm, expo, max_env, shape, max_M});
    lemma_const = std::max(lemma_const, max_lemma);
    if (shape > 0.0) prop_const = std::max(prop_const, max_norm / shape);
    if (max_norm > 0.0) {
      lx.push_back(std::log(static_cast<double>(N)));
      ly.push_back(std::log(max_norm));
    }
    if (!std::isfinite(max_lemma) || !std::isfinite(max_norm)) rec.fail("non-finite ratio at N=" + std::to_string(N));
  }
  rec.set("lemma_constant", lemma_const);
  rec.set("envelope_exponent", expo);
  rec.set("envelope_prefactor", prefactor);
  rec.set("prop_shape_constant", prop_const);
  if (lx.size() >= 2) {
    const auto [slope, icept] = fit_line(lx, ly);
    rec.set("fitted_exponent", slope);
    rec.set("fitted_intercept", icept);
    const double slack = cfg.tol("exponent_slack", 0.1);
    if (!(slope <= expo + slack))
      rec.fail("fitted exponent " + format_double(slope) + " exceeds " + format_double(expo) + " + " + format_double(slack));
  }
  return rec;
}

}  // namespace qvar::harness

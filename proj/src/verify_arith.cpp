#include <algorithm>
#include <cmath>

#include "qvar/harness.hpp"

namespace qvar::harness {

RunRecord verify_arith(const ExperimentConfig& cfg) {
  return verify_arith(cfg, tables_for(cfg, std::max<std::int64_t>(cfg.limit, 2)));
}

RunRecord verify_arith(const ExperimentConfig& cfg, const arith::ArithTables& tables) {
  require(tables.limit >= cfg.limit, "tables do not reach the configured limit");
  RunRecord rec;
  rec.kind = "verify-arith";
  rec.config = config_snapshot(cfg);
  rec.columns = {"q", "mu", "phi", "reduced_count", "ramanujan_max_residual", "pass"};
  const double tol = cfg.tol("ramanujan", 1e-9);

  double worst = 0.0;
  std::int64_t failed_rows = 0;
  double totient_const = INFINITY;
  for (std::int64_t q = 1; q <= cfg.limit; ++q) {
    const auto A = arith::reduced_residues(q);
    const int mu = tables.mu(q);
    const std::int64_t phi = tables.phi(q);
    double res = 0.0;
    std::int64_t bad_a = -1;
    for (std::int64_t a : A) {
      const double r = std::abs(arith::ramanujan_sum(q, a) - static_cast<double>(mu));
      if (r > res) res = r;
      if (!(r < tol) && bad_a < 0) bad_a = a;
    }
    const bool count_ok = static_cast<std::int64_t>(A.size()) == phi;
    const bool ok = bad_a < 0 && count_ok;
    worst = std::max(worst, res);
    totient_const = std::min(totient_const, static_cast<double>(phi) / std::pow(static_cast<double>(q), 0.75));
    if (!ok) {
      ++failed_rows;
      if (bad_a >= 0)
        rec.fail("ramanujan sum differs from mu at (q,a)=(" + std::to_string(q) + "," + std::to_string(bad_a) +
                 "), residual " + format_double(res));
      if (!count_ok)
        rec.fail("|A_q| = " + std::to_string(A.size()) + " but phi(" + std::to_string(q) + ") = " + std::to_string(phi));
    }
    rec.add_row({q, std::int64_t{mu}, phi, static_cast<std::int64_t>(A.size()), res, std::string(ok ? "pass" : "fail")});
  }

  // psi(N; 1, 1) split into reduced classes plus the prime powers sharing a factor with q.
  double psi_gap = 0.0, sw_resid = 0.0;
  const std::int64_t N = cfg.limit;
  const double psi_all = arith::psi_progression(tables, N, 1, 1);
  for (std::int64_t q = 1; q <= std::min<std::int64_t>(N, 30); ++q) {
    double split = 0.0;
    for (std::int64_t r = 1; r <= q; ++r) {
      if (arith::gcd(r, q) == 1) {
        const double v = arith::psi_progression(tables, N, q, r);
        split += v;
        // empirical only, no constant fitted
        sw_resid = std::max(sw_resid, std::abs(v - static_cast<double>(N) / static_cast<double>(arith::totient_of(q))));
      }
    }
    for (std::int64_t n = 2; n <= N; ++n)
      if (arith::gcd(n, q) > 1) split += tables.lambda(n);
    psi_gap = std::max(psi_gap, std::abs(split - psi_all));
  }
  if (psi_gap > 1e-9 * std::max(1.0, psi_all)) rec.fail("psi progression split misses psi(N) by " + format_double(psi_gap));

  rec.set("rows", static_cast<std::int64_t>(rec.rows.size()));
  rec.set("ramanujan_max_residual", worst);
  rec.set("failed_rows", failed_rows);
  rec.set("totient_c_delta_0.25", totient_const);
  rec.set("psi_split_residual", psi_gap);
  rec.set("progression_residual_max", sw_resid);
  rec.set("progression_residual_rel", sw_resid / static_cast<double>(N));
  return rec;
}

}  // namespace qvar::harness

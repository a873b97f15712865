#include <algorithm>
#include <cmath>
#include <sstream>

#include "qvar/harness.hpp"
#include "qvar/kernels.hpp"
#include "qvar/multiplier.hpp"

namespace qvar::harness {

RunRecord approx_error_scan(const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.kind = "approx-scan";
  rec.config = config_snapshot(cfg);
  rec.columns = {"N", "sup_error", "grid_max", "grid_density", "s_max", "tail_bound", "tail_certified", "argmax"};

  const bool prime = cfg.family == "prime";
  const auto family = prime ? mult::CoefficientFamily::prime() : mult::CoefficientFamily::poly(cfg.degree);
  const double tail_tol = cfg.tol("tail", 1e-4);
  const int s_max = cfg.s_max >= 0 ? cfg.s_max : mult::required_s_max(family, tail_tol);
  arith::ArithTables tables;
  if (prime) tables = tables_for(cfg, std::max<std::int64_t>(cfg.N_grid.back(), 2));

  std::vector<double> xs, ys;
  for (std::int64_t N : cfg.N_grid) {
    try {
      const auto K = prime ? kernels::prime_kernel(N, tables) : kernels::poly_kernel(N, cfg.degree);
      const auto L = mult::full_multiplier(N, s_max, family, tail_tol);
      const std::int64_t density = static_cast<std::int64_t>(cfg.grid_factor) * N;
      mult::SupErrorInfo info;
      const double err = mult::sup_error(K, L, density, &info);
      std::ostringstream arg;
      for (std::size_t j = 0; j < info.argmax.size(); ++j) arg << (j ? ";" : "") << format_double(info.argmax[j]);
      rec.add_row({N, err, info.grid_max, density, std::int64_t{s_max}, L.meta().tail,
                   std::string(L.meta().tail_certified ? "yes" : "no"), arg.str()});
      const double lx = prime ? std::log(std::log(static_cast<double>(N))) : std::log(static_cast<double>(N));
      xs.push_back(lx);
      ys.push_back(std::log(err));
    } catch (const ResourceLimit& e) {
      throw ResourceLimit("N=" + std::to_string(N) + ": " + e.what());
    }
  }

  rec.set("s_max", std::int64_t{s_max});
  rec.set("fit_abscissa", std::string(prime ? "log log N" : "log N"));
  const auto first = std::get<double>(rec.rows.front()[1]);
  const auto last = std::get<double>(rec.rows.back()[1]);
  rec.set("error_first", first);
  rec.set("error_last", last);
  if (rec.rows.size() >= 2) {
    const bool finite = std::all_of(ys.begin(), ys.end(), [](double v) { return std::isfinite(v); });
    if (finite) {
      const auto [slope, icept] = fit_line(xs, ys);
      rec.set("fit_slope", slope);
      rec.set("fit_intercept", icept);
      if (!prime) rec.set("delta_fit", -slope);
      if (!(slope < 0.0)) rec.fail("fitted slope " + format_double(slope) + " is not negative");
    }
    rec.set("ratio_last_first", last / first);
    if (!(last < first)) rec.fail("error at the last N is not below the error at the first N");
  }
  return rec;
}

}  // namespace qvar::harness

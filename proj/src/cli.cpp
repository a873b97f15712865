#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qvar/harness.hpp"
#include "qvar/multiplier.hpp"

namespace qvar::harness {

namespace {

std::vector<std::vector<double>> read_alpha_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read input file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string item;
    bool numeric = true;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(item, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw InvalidArgument("non-numeric row in " + path + ": " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RunRecord arc_classify(const ExperimentConfig& cfg, const std::vector<std::vector<double>>& rows, std::int64_t N, int d) {
  RunRecord rec;
  rec.kind = "arc-classify";
  rec.config = config_snapshot(cfg);
  rec.columns = {"row", "kind", "theta", "q", "beta"};
  std::int64_t majors = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == static_cast<std::size_t>(d), "row " + std::to_string(i) + " does not have d entries");
    const auto a = mult::classify_arc(rows[i], N, d);
    std::string theta, beta;
    if (a.major) {
      ++majors;
      for (int j = 0; j < d; ++j) {
        theta += (j ? ";" : "") + std::to_string(a.theta[j].num()) + "/" + std::to_string(a.theta[j].den());
        beta += (j ? ";" : "") + format_double(a.beta[static_cast<std::size_t>(j)]);
      }
    }
    rec.add_row({static_cast<std::int64_t>(i), std::string(a.major ? "major" : "minor"), theta, a.major ? a.q : 0, beta});
  }
  rec.set("N", N);
  rec.set("d", std::int64_t{d});
  rec.set("nu", mult::arc_nu(d));
  rec.set("major", majors);
  return rec;
}

RunRecord dump_multiplier(const ExperimentConfig& cfg, std::int64_t N, int level, std::int64_t points) {
  require(points >= 1, "points must be positive");
  const bool prime = cfg.family == "prime";
  const auto family = prime ? mult::CoefficientFamily::prime() : mult::CoefficientFamily::poly(cfg.degree);
  const int d = prime ? 1 : cfg.degree;
  if (d > 2) throw Unsupported("multiplier dumps are limited to d <= 2");
  const double tail_tol = cfg.tol("tail", 1e-4);
  const auto m = level >= 0 ? mult::level_multiplier(level, N, family)
                            : mult::full_multiplier(N, cfg.s_max >= 0 ? cfg.s_max : mult::required_s_max(family, tail_tol),
                                                    family, tail_tol);
  RunRecord rec;
  rec.kind = "dump-multiplier";
  rec.config = config_snapshot(cfg);
  for (int j = 0; j < d; ++j) rec.columns.push_back("alpha_" + std::to_string(j + 1));
  rec.columns.push_back("re");
  rec.columns.push_back("im");
  std::int64_t cells = 1;
  for (int j = 0; j < d; ++j) cells *= points;
  double peak = 0.0;
  std::vector<double> a(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < cells; ++i) {
    std::int64_t rest = i;
    for (int j = d; j-- > 0;) {
      a[static_cast<std::size_t>(j)] = static_cast<double>(rest % points) / static_cast<double>(points);
      rest /= points;
    }
    const cplx v = m(a);
    peak = std::max(peak, std::abs(v));
    std::vector<Cell> row(a.begin(), a.end());
    row.emplace_back(v.real());
    row.emplace_back(v.imag());
    rec.add_row(std::move(row));
  }
  rec.set("family", m.meta().family);
  rec.set("level", std::int64_t{m.meta().level});
  rec.set("N", N);
  rec.set("max_abs", peak);
  rec.set("bound", m.meta().bound);
  rec.set("tail", m.meta().tail);
  if (peak > m.meta().bound + 1e-12) rec.fail("sampled values exceed the recorded bound");
  return rec;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variation, jump and multiplier verification scans", "qvar"};
  app.require_subcommand(1, 1);

  std::string config_path, out_path, format, cache_dir;
  std::vector<std::string> sets;
  bool timing = false;
  std::map<std::string, std::string> overrides;  // config key -> text
  std::map<std::string, std::string> local;      // subcommand-only values

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option_function<std::string>("--seed", [&](const std::string& v) { overrides["seed"] = v; }, "random seed");
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--set", sets, "extra key=value config entries");
    sub->add_option("--cache-dir", cache_dir, "directory for cached arithmetic tables");
    sub->add_flag("--timing", timing, "record wall-clock time in the output");
  };
  auto keyed = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  auto plain = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&local, key](const std::string& v) { local[key] = v; }, help);
  };

  auto* va = app.add_subcommand("verify-arith", "Ramanujan sums, reduced residues and prime-count splits");
  common(va);
  keyed(va, "--limit", "limit", "largest modulus q");

  auto* ap = app.add_subcommand("approx-scan", "sup-norm error between the kernel transform and its approximant");
  common(ap);
  keyed(ap, "--family", "family", "prime or poly");
  keyed(ap, "--degree", "degree", "polynomial degree");
  keyed(ap, "--N", "N_grid", "comma separated N values (2^k allowed)");
  keyed(ap, "--s-max", "s_max", "largest level (-1 = from the tail tolerance)");
  keyed(ap, "--grid-factor", "grid_factor", "grid density in units of N");

  auto* vs = app.add_subcommand("variation-scan", "variation ratio of averages over random inputs");
  common(vs);
  keyed(vs, "--family", "family", "prime or poly(1)");
  keyed(vs, "--widths", "widths", "comma separated window widths");
  keyed(vs, "--ensemble", "ensemble", "members per width");
  keyed(vs, "--n-max", "n_max", "largest N of the time grid");
  keyed(vs, "--epsilon", "epsilon", "time grid exponent");
  keyed(vs, "--p", "p", "outer exponent");
  keyed(vs, "--q", "q", "variation exponent");

  auto* mf = app.add_subcommand("multifreq-scan", "multi-frequency variation constants");
  common(mf);
  keyed(mf, "--freq-counts", "freq_counts", "comma separated frequency counts");
  keyed(mf, "--trials", "trials", "random paths per count");
  keyed(mf, "--path-length", "path_length", "coefficient path length");
  keyed(mf, "--r", "r", "inner exponent r");
  keyed(mf, "--q", "q", "variation exponent");

  auto* ac = app.add_subcommand("arc-classify", "major/minor arc classification of frequency rows");
  common(ac);
  plain(ac, "--input", "input", "CSV with one frequency vector per row");
  plain(ac, "--alpha", "alpha", "a single comma separated frequency vector");
  plain(ac, "--N", "N", "scale N");
  plain(ac, "--d", "d", "dimension");

  auto* dm = app.add_subcommand("dump-multiplier", "sample a multiplier on a uniform grid");
  common(dm);
  keyed(dm, "--family", "family", "prime or poly");
  keyed(dm, "--degree", "degree", "polynomial degree");
  keyed(dm, "--s-max", "s_max", "largest level for the full sum");
  plain(dm, "--N", "N", "scale N");
  plain(dm, "--level", "level", "level s, or -1 for the full sum");
  plain(dm, "--points", "points", "grid points per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (argc <= 1) err << app.help();
    return 2;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& [k, v] : overrides) set_config_value(cfg, k, v);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + s + "'");
      set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!format.empty()) cfg.format = format;
    if (!out_path.empty()) cfg.output_path = out_path;
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (timing) cfg.record_timing = true;
    config_snapshot(cfg);  // validates
  } catch (const std::invalid_argument& e) {
    err << "qvar: " << e.what() << "\n";
    return 2;
  }
  for (const auto& w : config_warnings(cfg)) err << "qvar: warning: " << w << "\n";

  auto get_int = [&](const std::string& key, std::int64_t fallback) -> std::int64_t {
    const auto it = local.find(key);
    if (it == local.end()) return fallback;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != it->second.size()) throw InvalidArgument("--" + key + " expects an integer");
    return v;
  };

  RunRecord rec;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (va->parsed()) {
      rec = verify_arith(cfg);
    } else if (ap->parsed()) {
      rec = approx_error_scan(cfg);
    } else if (vs->parsed()) {
      rec = variation_ratio_scan(cfg);
    } else if (mf->parsed()) {
      rec = multifreq_constant_scan(cfg);
    } else if (ac->parsed()) {
      const int d = static_cast<int>(get_int("d", cfg.degree));
      const std::int64_t N = get_int("N", cfg.N_grid.front());
      std::vector<std::vector<double>> rows;
      if (local.count("input")) rows = read_alpha_rows(local["input"]);
      if (local.count("alpha")) {
        std::vector<double> row;
        std::stringstream ss(local["alpha"]);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            row.push_back(std::stod(item));
          } catch (const std::exception&) {
            throw InvalidArgument("--alpha expects comma separated numbers");
          }
        }
        rows.push_back(row);
      }
      if (rows.empty()) throw InvalidArgument("arc-classify needs --input or --alpha");
      rec = arc_classify(cfg, rows, N, d);
    } else if (dm->parsed()) {
      rec = dump_multiplier(cfg, get_int("N", cfg.N_grid.front()), static_cast<int>(get_int("level", -1)),
                            get_int("points", 256));
    }
  } catch (const std::invalid_argument& e) {
    err << "qvar: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "qvar: " << e.what() << "\n";
    return 1;
  }
  if (cfg.record_timing)
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ofstream file;
  std::ostream* dst = &out;
  if (!cfg.output_path.empty()) {
    file.open(cfg.output_path);
    if (!file) {
      err << "qvar: cannot write " << cfg.output_path << "\n";
      return 2;
    }
    dst = &file;
  }
  if (cfg.format == "json")
    write_json(*dst, rec);
  else
    write_csv(*dst, rec);
  for (const auto& f : rec.failures) err << "qvar: FAIL " << f << "\n";
  return rec.passed ? 0 : 1;
}

}  // namespace qvar::harness

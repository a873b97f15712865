#pragma once

// Experiment configuration, run records and the verification scans driven
// by the command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qvar/arith.hpp"
#include "qvar/common.hpp"

namespace qvar::harness {

struct ExperimentConfig {
  std::string family = "prime";  // prime | poly
  int degree = 1;                // poly family only
  double p_exponent = 2.0;
  double q_exponent = 3.0;
  std::vector<std::int64_t> N_grid{1024, 4096, 16384, 65536};
  double epsilon = 0.7;
  int s_max = -1;  // -1: smallest value meeting tol.tail
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances{{"tail", 1e-4}, {"ramanujan", 1e-9}};
  std::string output_path;
  std::string format = "csv";

  // verify-arith
  std::int64_t limit = 500;
  // approx-scan: grid density = grid_factor * N
  int grid_factor = 4;
  // variation-scan
  std::vector<std::int64_t> widths{64, 128, 256};
  int ensemble = 50;
  std::int64_t n_max = 16384;
  int split_samples = 64;  // x values per member for the long/short split
  // multifreq-scan
  std::vector<std::int64_t> freq_counts{2, 4, 8, 16, 32};
  int path_length = 8;
  int trials = 200;
  double r_exponent = 2.5;

  bool record_timing = false;
  std::string cache_dir;

  double tol(const std::string& key, double fallback) const;
};

/// Flat `key = value` text; `#` starts a comment. Integer lists are comma
/// separated and accept 2^k. Unknown keys are an InvalidArgument.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
/// Throws InvalidArgument naming the path when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one key/value pair (same syntax as the file).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Every field as key/value text, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_snapshot(const ExperimentConfig& cfg);
/// Warnings about parameters outside the supported ranges (not enforced).
std::vector<std::string> config_warnings(const ExperimentConfig& cfg);

using Cell = std::variant<std::int64_t, double, std::string>;

struct RunRecord {
  std::string kind;
  std::string version = kVersion;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> failures;
  bool passed = true;
  std::optional<double> wall_seconds;

  void add_row(std::vector<Cell> row);
  void set(const std::string& key, Cell value);
  const Cell* find(const std::string& key) const;
  double number(const std::string& key) const;
  void fail(const std::string& what);
};

/// `# key=value` metadata lines, a header row, one row per measurement;
/// floats with 17 significant digits.
void write_csv(std::ostream& out, const RunRecord& rec);
void write_json(std::ostream& out, const RunRecord& rec);
std::string format_double(double v);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

arith::ArithTables tables_for(const ExperimentConfig& cfg, std::int64_t limit);

/// One input f on [0, W): the l^p norm over x of the inhomogeneous
/// q-variation of N -> (K_N * f)(x) over the grid, divided by ||f||_p, with
/// K_N = (1/N) sum_{n <= N} w[n] delta_n.
struct VariationSample {
  double ratio = 0.0;  // NaN when f = 0
  double lp_ivar = 0.0;
  double f_norm = 0.0;
  bool degenerate = false;
  std::int64_t points = 0;              // x values with a nonzero path
  std::int64_t cross_violations = 0;    // iV < sup or iV < hV at some x
  double split_ratio_max = 0.0;         // max of hV / (long + 2 short) on sampled x
};

VariationSample variation_ratio(const std::vector<double>& f, const std::vector<double>& w,
                                const std::vector<std::int64_t>& grid, double p, double q, int split_samples);

/// Both sides of the jump-integral bound for one coefficient path c_t in
/// l^2 of the frequency set, with g(y) = (e(xi_l y))_l on I = [0, 1].
struct MultifreqSample {
  double lhs = 0.0;        // || ||<c_t, g(y)>||_{hV^q_t} ||_{L^2_y(I)}
  double jump_rhs = 0.0;   // integral_0^inf min(M J^{1/2}, ||g|| J^{1/q}) d lambda
  double M = 0.0;          // sqrt of the top Gram eigenvalue
  double g_norm = 0.0;     // ||g||_{L^2(I, l^2)}
  double hvar_r = 0.0;     // ||c||_{hV^r(l^2)}
};

MultifreqSample multifreq_sample(const std::vector<double>& freqs, const std::vector<std::vector<cplx>>& path,
                                 double q, double r);

RunRecord verify_arith(const ExperimentConfig& cfg);
/// Same suite against caller-supplied tables (fault injection in tests).
RunRecord verify_arith(const ExperimentConfig& cfg, const arith::ArithTables& tables);
RunRecord approx_error_scan(const ExperimentConfig& cfg);
RunRecord variation_ratio_scan(const ExperimentConfig& cfg);
RunRecord multifreq_constant_scan(const ExperimentConfig& cfg);

/// Exit codes: 0 all checks passed, 1 a check failed or a computation was
/// refused, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qvar::harness

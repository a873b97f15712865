#include <cmath>
#include <fstream>
#include <sstream>

#include "qvar/harness.hpp"

namespace qvar::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  // 2^k shorthand
  if (const auto caret = t.find('^'); caret != std::string::npos) {
    const std::int64_t base = parse_int(key, t.substr(0, caret));
    const std::int64_t exp = parse_int(key, t.substr(caret + 1));
    if (exp < 0 || exp > 62) throw InvalidArgument("bad exponent for " + key + ": " + t);
    std::int64_t v = 1;
    for (std::int64_t i = 0; i < exp; ++i) {
      if (v > INT64_MAX / std::max<std::int64_t>(1, std::abs(base))) throw InvalidArgument("overflow in " + key);
      v *= base;
    }
    return v;
  }
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("expected an integer for " + key + ", got '" + t + "'");
  }
  if (used != t.size()) throw InvalidArgument("expected an integer for " + key + ", got '" + t + "'");
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("expected a number for " + key + ", got '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw InvalidArgument("expected a number for " + key + ", got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw InvalidArgument("expected true/false for " + key + ", got '" + t + "'");
}

std::vector<std::int64_t> parse_list(const std::string& key, const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw InvalidArgument(key + " must list at least one value");
  return out;
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int to_int(const std::string& key, std::int64_t v) {
  if (v < INT32_MIN || v > INT32_MAX) throw InvalidArgument(key + " out of range");
  return static_cast<int>(v);
}

void validate(const ExperimentConfig& c) {
  require(c.family == "prime" || c.family == "poly", "family must be prime or poly");
  require(c.degree >= 1, "degree must be at least 1");
  require(c.family != "prime" || c.degree == 1, "prime family is one-dimensional");
  require(c.p_exponent > 1.0, "p must exceed 1");
  require(c.q_exponent > 2.0, "q must exceed 2");
  require(c.epsilon > 0.0 && c.epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(c.s_max >= -1, "s_max must be -1 (automatic) or non-negative");
  for (std::size_t i = 0; i < c.N_grid.size(); ++i) {
    require(c.N_grid[i] >= 1, "N_grid entries must be positive");
    require(i == 0 || c.N_grid[i] > c.N_grid[i - 1], "N_grid must be increasing");
  }
  require(!c.N_grid.empty(), "N_grid must not be empty");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  require(c.limit >= 1, "limit must be at least 1");
  require(c.grid_factor >= 2, "grid_factor must be at least 2");
  for (auto w : c.widths) require(w >= 1, "widths must be positive");
  require(c.ensemble >= 1, "ensemble must be at least 1");
  require(c.n_max >= 1, "n_max must be at least 1");
  require(c.split_samples >= 0, "split_samples must be non-negative");
  for (auto n : c.freq_counts) require(n >= 1, "freq_counts must be positive");
  require(c.path_length >= 1, "path_length must be at least 1");
  require(c.trials >= 1, "trials must be at least 1");
  require(c.r_exponent > 2.0 && c.r_exponent < c.q_exponent, "need 2 < r < q");
  for (const auto& [k, v] : c.tolerances) require(v > 0.0, "tolerance " + k + " must be positive");
}

}  // namespace

double ExperimentConfig::tol(const std::string& key, double fallback) const {
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

void set_config_value(ExperimentConfig& c, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "family") {
    if (value.rfind("poly(", 0) == 0 && value.back() == ')') {
      c.family = "poly";
      c.degree = to_int(key, parse_int(key, value.substr(5, value.size() - 6)));
    } else {
      c.family = value;
      if (value == "prime") c.degree = 1;
    }
  } else if (key == "degree" || key == "d") {
    c.degree = to_int(key, parse_int(key, value));
  } else if (key == "p" || key == "p_exponent") {
    c.p_exponent = parse_double(key, value);
  } else if (key == "q" || key == "q_exponent") {
    c.q_exponent = parse_double(key, value);
  } else if (key == "N_grid") {
    c.N_grid = parse_list(key, value);
  } else if (key == "epsilon") {
    c.epsilon = parse_double(key, value);
  } else if (key == "s_max") {
    c.s_max = to_int(key, parse_int(key, value));
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key.rfind("tol.", 0) == 0 && key.size() > 4) {
    c.tolerances[key.substr(4)] = parse_double(key, value);
  } else if (key == "output" || key == "output_path") {
    c.output_path = value;
  } else if (key == "format") {
    c.format = value;
  } else if (key == "limit") {
    c.limit = parse_int(key, value);
  } else if (key == "grid_factor") {
    c.grid_factor = to_int(key, parse_int(key, value));
  } else if (key == "widths") {
    c.widths = parse_list(key, value);
  } else if (key == "ensemble") {
    c.ensemble = to_int(key, parse_int(key, value));
  } else if (key == "n_max") {
    c.n_max = parse_int(key, value);
  } else if (key == "split_samples") {
    c.split_samples = to_int(key, parse_int(key, value));
  } else if (key == "freq_counts") {
    c.freq_counts = parse_list(key, value);
  } else if (key == "path_length") {
    c.path_length = to_int(key, parse_int(key, value));
  } else if (key == "trials") {
    c.trials = to_int(key, parse_int(key, value));
  } else if (key == "r" || key == "r_exponent") {
    c.r_exponent = parse_double(key, value);
  } else if (key == "record_timing") {
    c.record_timing = parse_bool(key, value);
  } else if (key == "cache_dir") {
    c.cache_dir = value;
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set_config_value(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    validate(c);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file " + path.string());
  return parse_config(in, path.string());
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const ExperimentConfig& c) {
  validate(c);
  std::vector<std::pair<std::string, std::string>> s{
      {"family", c.family},
      {"degree", std::to_string(c.degree)},
      {"p", format_double(c.p_exponent)},
      {"q", format_double(c.q_exponent)},
      {"N_grid", join(c.N_grid)},
      {"epsilon", format_double(c.epsilon)},
      {"s_max", std::to_string(c.s_max)},
      {"seed", std::to_string(c.seed)},
  };
  for (const auto& [k, v] : c.tolerances) s.emplace_back("tol." + k, format_double(v));
  s.insert(s.end(), {
                        {"output", c.output_path},
                        {"format", c.format},
                        {"limit", std::to_string(c.limit)},
                        {"grid_factor", std::to_string(c.grid_factor)},
                        {"widths", join(c.widths)},
                        {"ensemble", std::to_string(c.ensemble)},
                        {"n_max", std::to_string(c.n_max)},
                        {"split_samples", std::to_string(c.split_samples)},
                        {"freq_counts", join(c.freq_counts)},
                        {"path_length", std::to_string(c.path_length)},
                        {"trials", std::to_string(c.trials)},
                        {"r", format_double(c.r_exponent)},
                        {"record_timing", c.record_timing ? "true" : "false"},
                        {"cache_dir", c.cache_dir},
                    });
  return s;
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> w;
  if (c.family == "poly") {
    const double gap = std::abs(1.0 / c.p_exponent - 0.5);
    if (gap >= 1.0 / (2.0 * (c.degree + 1)))
      w.push_back("|1/p - 1/2| = " + format_double(gap) + " is outside the range covered for degree " +
                  std::to_string(c.degree));
  }
  return w;
}

}  // namespace qvar::harness

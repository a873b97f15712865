#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "qvar/harness.hpp"

namespace qvar::harness {

void RunRecord::add_row(std::vector<Cell> row) {
  require(row.size() == columns.size(), "row width does not match the header");
  rows.push_back(std::move(row));
}

void RunRecord::set(const std::string& key, Cell value) {
  for (auto& [k, v] : summary)
    if (k == key) {
      v = std::move(value);
      return;
    }
  summary.emplace_back(key, std::move(value));
}

const Cell* RunRecord::find(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return &v;
  return nullptr;
}

double RunRecord::number(const std::string& key) const {
  const Cell* c = find(key);
  if (!c) throw InvalidArgument("record has no summary value '" + key + "'");
  if (const auto* i = std::get_if<std::int64_t>(c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(c)) return *d;
  throw InvalidArgument("summary value '" + key + "' is not numeric");
}

void RunRecord::fail(const std::string& what) {
  passed = false;
  failures.push_back(what);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  return std::get<std::string>(c);
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

}  // namespace

void write_csv(std::ostream& out, const RunRecord& rec) {
  out << "# kind=" << rec.kind << "\n";
  out << "# version=" << rec.version << "\n";
  for (const auto& [k, v] : rec.config) out << "# config." << k << "=" << one_line(v) << "\n";
  for (const auto& [k, v] : rec.summary) out << "# summary." << k << "=" << one_line(cell_text(v)) << "\n";
  for (const auto& f : rec.failures) out << "# failure=" << one_line(f) << "\n";
  out << "# passed=" << (rec.passed ? "true" : "false") << "\n";
  if (rec.wall_seconds) out << "# wall_seconds=" << format_double(*rec.wall_seconds) << "\n";
  for (std::size_t i = 0; i < rec.columns.size(); ++i) out << (i ? "," : "") << rec.columns[i];
  out << "\n";
  for (const auto& row : rec.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
}

void write_json(std::ostream& out, const RunRecord& rec) {
  nlohmann::ordered_json j;
  j["kind"] = rec.kind;
  j["version"] = rec.version;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rec.config) cfg[k] = v;
  j["config"] = cfg;
  j["columns"] = rec.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rec.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  nlohmann::ordered_json sum = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rec.summary) sum[k] = cell_json(v);
  j["summary"] = std::move(sum);
  j["failures"] = rec.failures;
  j["passed"] = rec.passed;
  if (rec.wall_seconds) j["wall_seconds"] = *rec.wall_seconds;
  out << j.dump(2) << "\n";
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "a line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "a line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

arith::ArithTables tables_for(const ExperimentConfig& cfg, std::int64_t limit) {
  if (cfg.cache_dir.empty()) return arith::build_tables(limit);
  return arith::cached_tables(limit, cfg.cache_dir);
}

}  // namespace qvar::harness

#include "qvar/varnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qvar::varnorm {

SampledPath::SampledPath(std::vector<double> times, int dim, std::vector<cplx> data)
    : times_(std::move(times)), dim_(dim), data_(std::move(data)) {
  require(dim_ >= 1, "path dimension must be at least 1");
  require(data_.size() == times_.size() * static_cast<std::size_t>(dim_), "path values do not match times");
  for (std::size_t i = 1; i < times_.size(); ++i)
    require(times_[i] > times_[i - 1], "path times must be strictly increasing");
  for (const cplx& z : data_)
    require(std::isfinite(z.real()) && std::isfinite(z.imag()), "path values must be finite");
}

SampledPath SampledPath::scalar(const std::vector<double>& values) {
  std::vector<double> times(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i + 1);
  return scalar(std::move(times), values);
}

SampledPath SampledPath::scalar(std::vector<double> times, const std::vector<double>& values) {
  std::vector<cplx> data(values.begin(), values.end());
  return SampledPath(std::move(times), 1, std::move(data));
}

SampledPath SampledPath::complex(const std::vector<cplx>& values) {
  std::vector<double> times(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i + 1);
  return SampledPath(std::move(times), 1, values);
}

SampledPath SampledPath::real_vectors(std::vector<double> times, const std::vector<std::vector<double>>& values) {
  require(!values.empty() || times.empty(), "path values do not match times");
  const std::size_t m = values.empty() ? 1 : values.front().size();
  std::vector<cplx> data;
  data.reserve(values.size() * m);
  for (const auto& v : values) {
    require(v.size() == m, "every path value needs the same dimension");
    data.insert(data.end(), v.begin(), v.end());
  }
  return SampledPath(std::move(times), static_cast<int>(m), std::move(data));
}

double SampledPath::dist(std::size_t i, std::size_t j) const {
  const cplx* a = value(i);
  const cplx* b = value(j);
  if (dim_ == 1) return std::abs(a[0] - b[0]);
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s);
}

double SampledPath::norm(std::size_t i) const {
  const cplx* a = value(i);
  if (dim_ == 1) return std::abs(a[0]);
  double s = 0.0;
  for (int k = 0; k < dim_; ++k) s += std::norm(a[k]);
  return std::sqrt(s);
}

SampledPath SampledPath::slice(std::size_t first, std::size_t last) const {
  require(first <= last && last < size(), "slice out of range");
  std::vector<double> t(times_.begin() + static_cast<std::ptrdiff_t>(first),
                        times_.begin() + static_cast<std::ptrdiff_t>(last + 1));
  const auto m = static_cast<std::size_t>(dim_);
  std::vector<cplx> d(data_.begin() + static_cast<std::ptrdiff_t>(first * m),
                      data_.begin() + static_cast<std::ptrdiff_t>((last + 1) * m));
  return SampledPath(std::move(t), dim_, std::move(d));
}

SampledPath SampledPath::select(const std::vector<std::size_t>& idx) const {
  std::vector<double> t;
  std::vector<cplx> d;
  for (std::size_t i : idx) {
    require(i < size(), "selected index out of range");
    t.push_back(times_[i]);
    d.insert(d.end(), value(i), value(i) + dim_);
  }
  return SampledPath(std::move(t), dim_, std::move(d));
}

std::int64_t greedy_jump_count(const SampledPath& path, double lambda) {
  require(lambda > 0.0, "jump threshold must be positive");
  const std::size_t T = path.size();
  std::vector<std::int64_t> len(T, 0);
  std::int64_t best = 0;
  for (std::size_t j = 1; j < T; ++j) {
    for (std::size_t i = 0; i < j; ++i)
      if (len[i] + 1 > len[j] && path.dist(i, j) > lambda) len[j] = len[i] + 1;
    best = std::max(best, len[j]);
  }
  return best;
}

std::int64_t lazy_jump_count(const SampledPath& path, double lambda) {
  require(lambda > 0.0, "jump threshold must be positive");
  const std::size_t T = path.size();
  std::int64_t count = 0;
  std::size_t start = 0;
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = start; s < t; ++s) {
      if (path.dist(s, t) > lambda) {
        ++count;
        start = t;
        break;
      }
    }
  }
  return count;
}

namespace {

double power(double x, double q, int iq) {
  switch (iq) {
    case 1: return x;
    case 2: return x * x;
    case 3: return x * x * x;
    case 4: { const double y = x * x; return y * y; }
    default: return std::pow(x, q);
  }
}

}  // namespace

double hvar(const SampledPath& path, double q) {
  if (!(q >= 1.0)) throw Unsupported("q-variation needs q >= 1");
  const std::size_t T = path.size();
  if (T < 2) return 0.0;
  const int iq = (q == std::floor(q) && q <= 4.0) ? static_cast<int>(q) : 0;
  // best[j]: largest sum of q-th powers over chains ending at j.
  std::vector<double> best(T, 0.0);
  double top = 0.0;
  for (std::size_t j = 1; j < T; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) b = std::max(b, best[i] + power(path.dist(i, j), q, iq));
    best[j] = b;
    top = std::max(top, b);
  }
  return iq == 1 ? top : std::pow(top, 1.0 / q);
}

double sup_norm(const SampledPath& path) {
  double s = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) s = std::max(s, path.norm(i));
  return s;
}

double ivar(const SampledPath& path, double q) {
  const double h = hvar(path, q);
  const double s = sup_norm(path);
  if (h == 0.0) return s;
  if (s == 0.0) return h;
  const double m = std::max(h, s);
  return m * std::pow(std::pow(h / m, q) + std::pow(s / m, q), 1.0 / q);
}

TimeGrid make_time_grid(double epsilon, int k_max) {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(k_max >= 1, "k_max must be at least 1");
  require(std::pow(static_cast<double>(k_max), epsilon) < 62.0, "grid points overflow 64 bits");
  TimeGrid g;
  g.epsilon = epsilon;
  for (int k = 1; k <= k_max; ++k) {
    const double e = epsilon == 1.0 ? static_cast<double>(k) : std::pow(static_cast<double>(k), epsilon);
    const auto n = static_cast<std::int64_t>(std::floor(std::exp2(e)));
    if (g.points.empty() || n > g.points.back()) g.points.push_back(n);
  }
  return g;
}

TimeGrid make_time_grid_until(double epsilon, std::int64_t n_max) {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(n_max >= 2 && n_max < (std::int64_t{1} << 61), "n_max out of range");
  int k = 1;
  while (std::floor(std::exp2(std::pow(static_cast<double>(k), epsilon))) < static_cast<double>(n_max)) ++k;
  return make_time_grid(epsilon, k);
}

LongShort short_long_split_indices(const SampledPath& path, const std::vector<std::size_t>& grid_idx, double q) {
  if (!(q >= 1.0)) throw Unsupported("q-variation needs q >= 1");
  if (path.size() == 0) return {};
  require(!grid_idx.empty() && grid_idx.front() == 0 && grid_idx.back() == path.size() - 1,
          "grid must contain the first and last path times");
  for (std::size_t i = 1; i < grid_idx.size(); ++i)
    require(grid_idx[i] > grid_idx[i - 1], "grid indices must be increasing");
  LongShort out;
  out.long_var = hvar(path.select(grid_idx), q);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid_idx.size(); ++i) {
    const double h = hvar(path.slice(grid_idx[i], grid_idx[i + 1]), q);
    acc += std::pow(h, q);
  }
  out.short_var = std::pow(acc, 1.0 / q);
  return out;
}

LongShort short_long_split(const SampledPath& path, const TimeGrid& grid, double q) {
  if (path.size() == 0) return {};
  const auto& times = path.times();
  std::vector<std::size_t> idx;
  for (std::int64_t g : grid.points) {
    const auto gt = static_cast<double>(g);
    if (gt < times.front() || gt > times.back()) continue;
    const auto it = std::lower_bound(times.begin(), times.end(), gt);
    require(it != times.end() && *it == gt, "grid point " + std::to_string(g) + " is not a path time");
    idx.push_back(static_cast<std::size_t>(it - times.begin()));
  }
  require(!idx.empty() && idx.front() == 0 && idx.back() == times.size() - 1,
          "grid does not cover the path's time range");
  return short_long_split_indices(path, idx, q);
}

double jump_variation_bound(const SampledPath& path, double q) {
  if (!(q >= 1.0)) throw Unsupported("q-variation needs q >= 1");
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (std::size_t j = 1; j < path.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double d = path.dist(i, j);
      if (d > 0.0) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
  if (dmax == 0.0) return 0.0;
  const int k_lo = static_cast<int>(std::floor(std::log2(dmin))) - 2;
  const int k_hi = static_cast<int>(std::ceil(std::log2(dmax)));
  double acc = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const auto j = greedy_jump_count(path, std::ldexp(1.0, k));
    if (j > 0) acc += std::pow(2.0, k * q) * static_cast<double>(j);
  }
  return 4.0 * std::pow(acc, 1.0 / q);
}

std::vector<std::size_t> ParentPartition::jumps(int n) const {
  std::vector<std::size_t> out;
  const auto& r = rho[static_cast<std::size_t>(n)];
  for (std::size_t t = 0; t + 1 < r.size(); ++t)
    if (r[t + 1] != r[t]) out.push_back(t);
  return out;
}

ParentPartition build_parent_partition(const SampledPath& path, double lambda) {
  require(lambda > 0.0, "lambda must be positive");
  ParentPartition part;
  part.lambda = lambda;
  if (path.size() == 0) return part;
  part.kept.push_back(0);
  for (std::size_t i = 1; i < path.size(); ++i)
    if (path.dist(part.kept.back(), i) > lambda) part.kept.push_back(i);

  const std::size_t T = part.kept.size();
  auto c = [&](std::size_t t) { return part.kept[t]; };
  std::vector<std::size_t> level(T);
  for (std::size_t t = 0; t < T; ++t) level[t] = t;
  part.rho.push_back(level);
  double threshold = lambda;
  while (std::any_of(level.begin(), level.end(), [](std::size_t v) { return v != 0; })) {
    threshold *= 2.0;
    std::vector<std::size_t> next(T, 0);
    for (std::size_t t = 0; t + 1 < T; ++t) {
      if (path.dist(c(next[t]), c(level[t + 1])) <= threshold)
        next[t + 1] = next[t];
      else
        next[t + 1] = level[t + 1];
    }
    part.rho.push_back(next);
    level = std::move(next);
    if (part.rho.size() > 2100) throw NumericFailure("parent partition did not terminate");
  }
  return part;
}

PartitionCheck check_parent_partition(const SampledPath& path, const ParentPartition& part) {
  PartitionCheck chk;
  chk.worst_lower_margin = std::numeric_limits<double>::infinity();
  chk.worst_upper_margin = std::numeric_limits<double>::infinity();
  const std::size_t L = part.rho.size();
  if (L == 0) return chk;
  const std::size_t T = part.kept.size();
  auto c = [&](std::size_t t) { return part.kept[t]; };
  for (std::size_t t = 0; t < T; ++t)
    if (part.rho[0][t] != t) chk.monotone = false;
  for (std::size_t n = 0; n < L; ++n) {
    const auto& r = part.rho[n];
    const double scale = std::ldexp(part.lambda, static_cast<int>(n));
    for (std::size_t t = 0; t + 1 < T; ++t) {
      if (r[t + 1] < r[t]) chk.monotone = false;
      if (r[t + 1] != r[t]) {
        const double margin = path.dist(c(r[t]), c(r[t + 1])) - scale;
        chk.worst_lower_margin = std::min(chk.worst_lower_margin, margin);
        if (!(margin > 0.0)) chk.lower = false;
      }
    }
    if (n + 1 < L) {
      const auto& up = part.rho[n + 1];
      for (std::size_t t = 0; t < T; ++t) {
        if (up[t] > r[t]) chk.monotone = false;
        const double margin = 2.0 * scale - path.dist(c(r[t]), c(up[t]));
        chk.worst_upper_margin = std::min(chk.worst_upper_margin, margin);
        if (margin < 0.0) chk.upper = false;
      }
      for (std::size_t t = 0; t + 1 < T; ++t)
        if (up[t + 1] != up[t] && r[t + 1] == r[t]) chk.nested = false;
    }
  }
  for (std::size_t v : part.rho.back())
    if (v != 0) chk.terminal = false;
  return chk;
}

}  // namespace qvar::varnorm

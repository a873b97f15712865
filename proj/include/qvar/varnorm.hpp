#pragma once

// Variation norms and jump counts of finite paths, long/short splits over
// sparse time grids, and the rho(n, t) coarsening used for jump estimates.

#include <cstdint>
#include <vector>

#include "qvar/common.hpp"

namespace qvar::varnorm {

/// Values indexed by strictly increasing times. Every value lives in C^dim
/// (stored row-major); distances are Euclidean.
class SampledPath {
 public:
  SampledPath() = default;
  SampledPath(std::vector<double> times, int dim, std::vector<cplx> data);

  /// Real scalar path on times 1..T.
  static SampledPath scalar(const std::vector<double>& values);
  static SampledPath scalar(std::vector<double> times, const std::vector<double>& values);
  /// Complex scalar path on times 1..T.
  static SampledPath complex(const std::vector<cplx>& values);
  /// Real vector path: values[t] has `dim` entries.
  static SampledPath real_vectors(std::vector<double> times, const std::vector<std::vector<double>>& values);

  std::size_t size() const { return times_.size(); }
  int dim() const { return dim_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<cplx>& data() const { return data_; }
  const cplx* value(std::size_t i) const { return data_.data() + i * static_cast<std::size_t>(dim_); }

  double dist(std::size_t i, std::size_t j) const;
  double norm(std::size_t i) const;
  /// Sub-path on index range [first, last].
  SampledPath slice(std::size_t first, std::size_t last) const;
  /// Sub-path on the listed (increasing) indices.
  SampledPath select(const std::vector<std::size_t>& idx) const;

 private:
  std::vector<double> times_;
  int dim_ = 1;
  std::vector<cplx> data_;
};

/// Longest chain t_0 < ... < t_J with every consecutive increment > lambda.
std::int64_t greedy_jump_count(const SampledPath& path, double lambda);
/// Most disjoint pairs s_1 < t_1 <= s_2 < t_2 <= ... with increments > lambda.
std::int64_t lazy_jump_count(const SampledPath& path, double lambda);

/// Homogeneous q-variation (exact chain DP). q < 1 is Unsupported.
double hvar(const SampledPath& path, double q);
/// Inhomogeneous q-variation: ((hvar)^q + sup|c_t|^q)^{1/q}.
double ivar(const SampledPath& path, double q);
double sup_norm(const SampledPath& path);

/// Z_eps = { floor(2^{k^eps}) : k = 1..k_max } without repeats.
struct TimeGrid {
  double epsilon = 1.0;
  std::vector<std::int64_t> points;
};

TimeGrid make_time_grid(double epsilon, int k_max);
/// Smallest grid whose last point is >= n_max.
TimeGrid make_time_grid_until(double epsilon, std::int64_t n_max);

struct LongShort {
  double long_var = 0.0;
  double short_var = 0.0;
};

/// Long variation over grid times and the l^q sum of block variations.
/// Grid points inside the path's time range must be path times, and the first
/// and last path times must both be grid points.
LongShort short_long_split(const SampledPath& path, const TimeGrid& grid, double q);
/// Same split with the grid given as increasing path indices (first and last included).
LongShort short_long_split_indices(const SampledPath& path, const std::vector<std::size_t>& grid_idx, double q);

/// 4 (sum_k 2^{kq} greedy(2^k))^{1/q} over the dyadic range covering all increments.
double jump_variation_bound(const SampledPath& path, double q);

/// Indices are 0-based: rho[n][t] is an index into `kept`, the positions of
/// the original path that survive the initial collapse.
struct ParentPartition {
  double lambda = 0.0;
  std::vector<std::size_t> kept;
  std::vector<std::vector<std::size_t>> rho;

  int levels() const { return static_cast<int>(rho.size()); }
  /// Jump places J_n: t with rho(n, t+1) != rho(n, t).
  std::vector<std::size_t> jumps(int n) const;
};

ParentPartition build_parent_partition(const SampledPath& path, double lambda);

struct PartitionCheck {
  bool lower = true;      // level-n jumps exceed 2^n lambda
  bool upper = true;      // |c_rho(n,t) - c_rho(n+1,t)| <= 2^{n+1} lambda
  bool nested = true;     // J_{n+1} subset of J_n
  bool monotone = true;   // increasing in t, decreasing in n
  bool terminal = true;   // last level identically 0
  double worst_lower_margin = 0.0;
  double worst_upper_margin = 0.0;
  bool ok() const { return lower && upper && nested && monotone && terminal; }
};

/// Exhaustive scan of every invariant of the partition against the path.
PartitionCheck check_parent_partition(const SampledPath& path, const ParentPartition& part);

}  // namespace qvar::varnorm

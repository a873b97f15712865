#pragma once

// Discrete averaging kernels on Z^d, their exponential sums, the continuous
// polynomial average and its transform, the frequency cutoff, and
// convolution of kernels with finitely supported sequences.
//
// Transform convention: K^(alpha) = sum_x K(x) e(+alpha . x).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qvar/arith.hpp"
#include "qvar/common.hpp"

namespace qvar::kernels {

struct DiscreteKernel {
  int dim = 1;
  std::vector<std::int64_t> points;  // size() * dim coordinates, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const std::int64_t> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  double mass() const;
  /// Bounding box of the support, per coordinate (lo, hi).
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds() const;
  /// Throws InvalidArgument on repeated support points or non-finite weights.
  void validate() const;
};

/// Lambda(n)/N at every n <= N with Lambda(n) > 0.
DiscreteKernel prime_kernel(std::int64_t N, const arith::ArithTables& tables);
/// 1/N at (n, n^2, ..., n^d), n = 1..N. Degrees above max_degree are refused.
DiscreteKernel poly_kernel(std::int64_t N, int d, int max_degree = 4);

/// Direct exponential sum sum_x K(x) e(alpha . x).
cplx kernel_ft(const DiscreteKernel& K, std::span<const double> alpha);

void write_kernel_csv(std::ostream& out, const DiscreteKernel& K);

/// A finitely supported sequence on Z^d stored densely on the box
/// lo[j] <= x_j < lo[j] + extent[j] (row-major, last axis fastest).
struct Sequence {
  int dim = 1;
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> extent;
  std::vector<cplx> values;

  static Sequence zeros(std::vector<std::int64_t> lo, std::vector<std::int64_t> extent);
  /// Unit mass at the given point.
  static Sequence delta(std::vector<std::int64_t> at);
  std::size_t size() const { return values.size(); }
  bool contains(std::span<const std::int64_t> x) const;
  /// Value at x, zero outside the box.
  cplx at(std::span<const std::int64_t> x) const;
  cplx& ref(std::span<const std::int64_t> x);
  /// Coordinates of the flat index i.
  std::vector<std::int64_t> coords(std::size_t i) const;
  double l1() const;
  double lp(double p) const;
};

enum class ConvMethod { automatic, direct, fft };

/// (K * f)(x) = sum_y K(y) f(x - y) on the box covering the full support.
Sequence convolve(const Sequence& f, const DiscreteKernel& K, ConvMethod method = ConvMethod::automatic);

/// (1/t) integral_0^t e(beta_1 s + ... + beta_d s^d) ds, absolute error <= 1e-8.
cplx cm_ft(double t, std::span<const double> beta, int d);
/// Same average written in the normalized coefficients b_j = beta_j t^j.
cplx cm_ft_normalized(std::span<const double> b);

/// Smooth one-dimensional profile: 1 on |x| <= 1/100, 0 on |x| >= 1/50.
double cutoff_profile(double x);
/// chi^(t xi) as a tensor product of the profile.
double cutoff_ft(std::span<const double> xi, double t = 1.0);
/// Spatial dilate chi_t(x) = t^{-d} chi(x / t) where chi is the inverse
/// transform of the cutoff (evaluated by quadrature, even and real).
double cutoff_spatial(std::span<const double> x, double t = 1.0);

/// ||sum_k c_k e(xi_k . y)||_{L^2(I)} over a box I = prod [a_j, b_j].
double exp_sum_l2_norm(const std::vector<std::pair<double, double>>& box,
                       const std::vector<std::vector<double>>& freqs, const std::vector<cplx>& coeffs);

}  // namespace qvar::kernels

#pragma once

// Multi-frequency approximating multipliers on the torus, their coefficient
// families, arc classification, periodization of real-line multipliers,
// application of torus multipliers to sequences, and sup-norm errors.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qvar/arith.hpp"
#include "qvar/common.hpp"
#include "qvar/kernels.hpp"

namespace qvar::mult {

enum class Family { prime, poly, custom };

std::string family_name(Family f);

/// S(theta): mu(q)/phi(q) for primes (d = 1), the complete sum for poly(d).
class CoefficientFamily {
 public:
  static CoefficientFamily prime();
  static CoefficientFamily poly(int d);

  Family tag() const { return tag_; }
  int dim() const { return dim_; }
  std::string name() const;
  cplx operator()(const arith::FreqPoint& theta) const;
  /// S for the point with numerators/denominators given per coordinate
  /// (already reduced). Cached; refuses prime powers above 2^28.
  cplx value(std::span<const std::int64_t> nums, std::span<const std::int64_t> dens) const;

 private:
  CoefficientFamily(Family tag, int dim);
  Family tag_;
  int dim_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

cplx coeffs(const CoefficientFamily& family, const arith::FreqPoint& theta);

/// max over theta in R_s of |S(theta)|, exact. Throws ResourceLimit when the
/// level is too large for an exhaustive scan.
double smax(const CoefficientFamily& family, int s);

struct TailBound {
  double value = 0.0;
  bool certified = false;
  std::string method;
  double fitted_constant = 0.0;  // poly family only
};

/// Bound on sum_{s > s_max} S_max(s).
TailBound tail_bound(const CoefficientFamily& family, int s_max);
/// Smallest s_max whose tail bound is <= tol (searching up to 200).
int required_s_max(const CoefficientFamily& family, double tol);

/// Per-coordinate candidate: reduced p/q near alpha_j with beta = alpha_j - p/q.
struct AxisCandidate {
  std::int64_t p = 0;
  std::int64_t q = 1;
  double beta = 0.0;
};

/// Sum over levels s_lo..s_hi of sum_{theta in R_s} S(theta) m_N^(alpha - theta) chi^(10^s (alpha - theta)).
/// Active terms are found per coordinate through continued-fraction
/// convergents: a point within 10^{-s}/50 of height < 2^{s+1} is always one.
class BourgainSum {
 public:
  BourgainSum(int d, std::int64_t N, CoefficientFamily family, int s_lo, int s_hi);

  int dim() const { return d_; }
  std::int64_t N() const { return N_; }
  int s_lo() const { return s_lo_; }
  int s_hi() const { return s_hi_; }
  const CoefficientFamily& family() const { return family_; }

  cplx operator()(std::span<const double> alpha) const;
  /// Contribution of a single level (for additivity checks).
  cplx level_value(std::span<const double> alpha, int s) const;
  /// Candidates for one coordinate value in [0, 1).
  std::vector<AxisCandidate> axis_candidates(double a) const;
  /// Evaluate from precomputed candidate lists, one per coordinate.
  cplx combine(const std::vector<const std::vector<AxisCandidate>*>& lists, int only_level = -1) const;
  /// Number of theta in R_level whose term is nonzero at alpha.
  int active_terms(std::span<const double> alpha, int level) const;

 private:
  int d_;
  std::int64_t N_;
  CoefficientFamily family_;
  int s_lo_, s_hi_;
};

struct MultiplierMeta {
  std::string family = "custom";
  int level = -1;  // -1 = sum over levels ("full")
  std::int64_t N = 0;
  double bound = 1.0;
  double tail = 0.0;
  bool tail_certified = true;
};

/// Evaluable function on the torus [0,1)^d. Arguments are wrapped mod 1.
class TorusMultiplier {
 public:
  using Eval = std::function<cplx(std::span<const double>)>;

  TorusMultiplier(int d, Eval f, MultiplierMeta meta = {});

  int dim() const { return d_; }
  const MultiplierMeta& meta() const { return meta_; }
  cplx operator()(std::span<const double> alpha) const;
  cplx operator()(std::initializer_list<double> alpha) const;

  /// Present when the multiplier is the transform of a finite kernel.
  std::shared_ptr<const kernels::DiscreteKernel> kernel;
  /// Present for Bourgain-type sums (enables per-axis candidate caching).
  std::shared_ptr<const BourgainSum> bourgain;

 private:
  int d_;
  Eval f_;
  MultiplierMeta meta_;
};

TorusMultiplier level_multiplier(int s, std::int64_t N, const CoefficientFamily& family);
/// Sum of levels 0..s_max; throws ResourceLimit (naming the required s_max)
/// when the truncation tail exceeds tol.
TorusMultiplier full_multiplier(std::int64_t N, int s_max, const CoefficientFamily& family, double tol = 1e-4);
/// K^ itself, as a multiplier (custom family).
TorusMultiplier kernel_multiplier(const kernels::DiscreteKernel& K);

// ---------------------------------------------------------------- arcs

struct ArcClassification {
  bool major = false;
  arith::FreqPoint theta;
  std::vector<double> beta;
  std::int64_t q = 0;
};

/// nu = 1/max(d, 12); major when some reduced a_j/q_j with lcm <= N^nu has
/// |alpha_j - a_j/q_j| <= N^{-j+nu} for every j. The smallest lcm wins.
ArcClassification classify_arc(std::span<const double> alpha, std::int64_t N, int d,
                               std::int64_t budget = 10'000'000);
double arc_nu(int d);

// ----------------------------------------------------- restricted levels

/// sum over a in [1..q]^d of w(a/q) m_t^(alpha - a/q) chi^(Q (alpha - a/q)),
/// with unit weights for prime/custom families and S(a/q) for poly.
TorusMultiplier full_residue_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d);
/// Same sum restricted to a in A_q^d (gcd(a_1..a_d, q) = 1), built directly.
TorusMultiplier direct_restricted_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d);
/// Restricted sum assembled as sum_{d'|q} mu(q/d') full_residue_level(d').
/// Requires q <= 25 Q.
TorusMultiplier mobius_restricted_level(std::int64_t q, double Q, double t, const CoefficientFamily& family,
                                        int d, std::int64_t budget = 10'000'000);

// ------------------------------------------------------- periodization

/// Multiplier on R^d vanishing outside the side-1 cube [lo_j, lo_j + 1].
struct RealMultiplier {
  int dim = 1;
  std::function<cplx(std::span<const double>)> f;
  std::vector<double> cube_lo;  // defaults to -1/2 per coordinate
};

/// xi -> sum_l m(q xi - l). Support is checked by sampling outside the cube.
TorusMultiplier periodize(const RealMultiplier& m, std::int64_t q);

// ------------------------------------------------------ application

struct ApplyOptions {
  double tol = 1e-10;
  /// Upper bound on the total number of grid cells M^d.
  std::int64_t max_cells = std::int64_t{1} << 24;
  /// Margin added around f's box for non-polynomial multipliers (per side,
  /// in units of f's extent).
  int margin_factor = 4;
};

struct Applied {
  kernels::Sequence out;
  std::vector<std::int64_t> grid;  // M per coordinate
  double alias_bound = 0.0;
  bool exact = false;
};

/// Inverse discrete transform of m times the transform of f:
/// (T_m f)(x) = integral m(xi) f^(xi) e(-xi . x) dxi.
Applied apply_multiplier(const TorusMultiplier& m, const kernels::Sequence& f, const ApplyOptions& opt = {});

// ------------------------------------------------------ sup error

struct SupErrorInfo {
  double grid_max = 0.0;
  double refined_max = 0.0;
  std::vector<double> argmax;
  std::int64_t grid_points = 0;
  double offset = 0.0;
};

/// max over alpha_k = (k + omega)/M of |K^(alpha) - L(alpha)| (omega = frac(sqrt 2)),
/// followed by a local refinement around the 10 largest grid values.
double sup_error(const kernels::DiscreteKernel& K, const TorusMultiplier& L, std::int64_t grid_density,
                 SupErrorInfo* info = nullptr);

// ------------------------------------------------ poly cutoff identity

/// alpha -> sum_{a in [1..q]^d} S(a/q) chi^((Q/4)(alpha - a/q)), periodized.
TorusMultiplier poly_cutoff_sum(std::int64_t q, double Q, int d);
/// Its inverse transform at x by quadrature over each bump.
cplx poly_cutoff_sum_inverse(std::int64_t q, double Q, int d, std::span<const std::int64_t> x);
/// Same at several points, sharing the quadrature nodes.
std::vector<cplx> poly_cutoff_sum_inverse(std::int64_t q, double Q, int d,
                                          const std::vector<std::vector<std::int64_t>>& xs);
/// chi_{Q/4}(x) q^{d-1} 1[x_j = x_1^j mod q for j >= 2].
double poly_cutoff_sum_closed_form(std::int64_t q, double Q, int d, std::span<const std::int64_t> x);

}  // namespace qvar::mult

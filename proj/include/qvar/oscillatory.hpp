#pragma once

// Averages of e(P(u)) over u in [0, 1] for real polynomial phases P with
// P(0) = 0. Degree 1 and 2 have closed forms (the latter through a scaled
// complementary error function); higher degrees go through a piecewise
// scheme mixing adaptive quadrature with an endpoint asymptotic expansion.

#include <span>
#include <vector>

#include "qvar/common.hpp"

namespace qvar::osc {

/// erfcx(z) = exp(z^2) erfc(z) for Re z >= 0 (continued fraction, |z| >~ 2).
cplx erfcx_cf(cplx z);

/// G(X) = exp(-i pi X^2 / 2) * integral_X^inf exp(i pi t^2 / 2) dt, X >= 0.
cplx fresnel_tail(double X);

/// integral_0^1 e(b1 u) du.
cplx linear_phase_average(double b1);

/// integral_0^1 e(b1 u + b2 u^2) du.
cplx quadratic_phase_average(double b1, double b2);

struct OscOptions {
  double abs_tol = 1e-10;
  /// Pieces spanning fewer cycles than this are integrated directly.
  double direct_cycles = 1e4;
  /// Direct quadrature near stationary points refuses to go beyond this.
  double max_direct_cycles = 4e6;
};

struct OscDiagnostics {
  int pieces = 0;
  int asymptotic_pieces = 0;
  double error_bound = 0.0;
  long evaluations = 0;
};

/// integral_0^1 e(b[0] u + b[1] u^2 + ... ) du by the general scheme, for any
/// degree. Throws NumericFailure with diagnostics if the tolerance cannot be met.
cplx polynomial_phase_average(std::span<const double> coeffs, const OscOptions& opt = {},
                              OscDiagnostics* diag = nullptr);

/// Real roots of sum_k p[k] x^k inside the open interval (lo, hi), sorted.
std::vector<double> real_roots(std::span<const double> poly, double lo, double hi);

}  // namespace qvar::osc

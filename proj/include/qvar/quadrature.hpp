#pragma once

// Adaptive Gauss-Kronrod integration of complex-valued functions of one real
// variable, and cached Gauss-Legendre rules.

#include <functional>
#include <vector>

#include "qvar/common.hpp"

namespace qvar::quad {

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  long evaluations = 0;
  int intervals = 0;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 200000;
  /// Initial uniform split of [a, b].
  int initial_panels = 1;
};

/// Globally adaptive GK(7,15). Throws NumericFailure with the reached error
/// when the interval budget runs out before the tolerance is met.
QuadResult integrate(const std::function<cplx(double)>& f, double a, double b, const QuadOptions& opt = {});

/// One non-adaptive GK15 panel: value and |G7 - K15| estimate.
QuadResult gk15(const std::function<cplx(double)>& f, double a, double b);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (computed once per n, thread-safe).
const GaussRule& gauss_legendre(int n);

}  // namespace qvar::quad

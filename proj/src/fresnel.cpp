#include <cmath>

#include "qvar/oscillatory.hpp"
#include "qvar/quadrature.hpp"

namespace qvar::osc {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);
// w = sqrt(pi)/2 (1 - i), so that (w t)^2 = -i pi t^2 / 2.
const cplx kW{0.5 * std::sqrt(std::numbers::pi), -0.5 * std::sqrt(std::numbers::pi)};

// integral_0^X exp(i pi t^2 / 2) dt by its power series; fine for X <~ 3.
cplx fresnel_series(double X) {
  const cplx z{0.0, 0.5 * std::numbers::pi * X * X};
  cplx term{X, 0.0};  // (i pi/2)^n X^{2n+1} / n!
  cplx sum = term;
  for (int n = 1; n < 200; ++n) {
    term *= z / static_cast<double>(n);
    const cplx add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum) && n > 4) break;
  }
  return sum;
}

}  // namespace

cplx erfcx_cf(cplx z) {
  // Modified Lentz on 1 / (z + (1/2) / (z + (2/2) / (z + ...))).
  const double tiny = 1e-300;
  cplx f = z;
  if (std::abs(f) < tiny) f = tiny;
  cplx C = f;
  cplx D = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = 0.5 * n;
    D = z + a * D;
    if (std::abs(D) < tiny) D = tiny;
    C = z + a / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    const cplx delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return 1.0 / (kSqrtPi * f);
  }
  throw NumericFailure("erfcx continued fraction did not converge at |z| = " + std::to_string(std::abs(z)));
}

cplx fresnel_tail(double X) {
  require(X >= 0.0, "fresnel_tail needs X >= 0");
  if (X < 2.5) {
    const cplx half{0.5, 0.5};  // integral_0^inf exp(i pi t^2/2) dt
    return std::exp(cplx{0.0, -0.5 * std::numbers::pi * X * X}) * (half - fresnel_series(X));
  }
  return kSqrtPi / (2.0 * kW) * erfcx_cf(kW * X);
}

cplx linear_phase_average(double b1) {
  const double x = kTwoPi * b1;
  if (std::abs(x) < 1e-3) {
    // (e^{ix} - 1)/(ix) = sum (ix)^n / (n+1)!
    const cplx ix{0.0, x};
    cplx term{1.0, 0.0};
    cplx sum = term;
    for (int n = 1; n < 12; ++n) {
      term *= ix / static_cast<double>(n + 1);
      sum += term;
    }
    return sum;
  }
  return (expi2pi(b1) - 1.0) / cplx{0.0, x};
}

cplx quadratic_phase_average(double b1, double b2) {
  if (b2 == 0.0) return linear_phase_average(b1);
  if (b2 < 0.0) return std::conj(quadratic_phase_average(-b1, -b2));
  const double cycles = std::abs(b1) + b2;
  if (b2 < 1.0 && cycles < 4000.0) {
    // Nearly linear phase: Gauss-Legendre panels, about one cycle each.
    const int panels = static_cast<int>(std::ceil(cycles)) + 1;
    const auto& rule = quad::gauss_legendre(24);
    cplx sum{0.0, 0.0};
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double u = c + 0.5 * h * rule.nodes[i];
        sum += rule.weights[i] * expi2pi(u * (b1 + b2 * u));
      }
    }
    return sum * (0.5 * h);
  }
  // Complete the square: u + b1/(2 b2) = v / (2 sqrt(b2)).
  const double r = std::sqrt(b2);
  const double v0 = b1 / r;
  const double v1 = (2.0 * b2 + b1) / r;
  const cplx e0{1.0, 0.0};
  const cplx e1 = expi2pi(b1 + b2);
  cplx inner;
  if (v0 >= 0.0) {
    inner = e0 * fresnel_tail(v0) - e1 * fresnel_tail(v1);
  } else if (v1 <= 0.0) {
    inner = e1 * fresnel_tail(-v1) - e0 * fresnel_tail(-v0);
  } else {
    // Stationary point inside: full Fresnel integral 1 + i times e(P(u*)).
    const cplx stat = expi2pi(-b1 * b1 / (4.0 * b2));
    inner = stat * cplx{1.0, 1.0} - e0 * fresnel_tail(-v0) - e1 * fresnel_tail(v1);
  }
  return inner / (2.0 * r);
}

}  // namespace qvar::osc

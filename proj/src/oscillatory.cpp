#include <algorithm>
#include <cmath>
#include <limits>

#include "qvar/oscillatory.hpp"
#include "qvar/quadrature.hpp"

namespace qvar::osc {

namespace {

using Poly = std::vector<double>;  // coefficients, lowest degree first

double eval(const Poly& p, double x) {
  double v = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
  return d;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

// Coefficients of p(x0 + h) in powers of h.
Poly shifted(const Poly& p, double x0) {
  Poly c = p;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += x0 * c[k];
  return c;
}

double bisect_root(const Poly& p, double lo, double hi) {
  double flo = eval(p, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = eval(p, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Truncated power series helpers (complex coefficients).
using Series = std::vector<cplx>;

Series series_inverse(const Series& s) {
  Series r(s.size());
  r[0] = 1.0 / s[0];
  for (std::size_t n = 1; n < s.size(); ++n) {
    cplx acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += s[k] * r[n - k];
    r[n] = -acc * r[0];
  }
  return r;
}

Series series_mul(const Series& a, const Series& b, std::size_t len) {
  Series r(len, 0.0);
  for (std::size_t i = 0; i < len && i < a.size(); ++i)
    for (std::size_t j = 0; i + j < len && j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Series series_deriv(const Series& a) {
  Series r(a.size() > 1 ? a.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) r[k - 1] = static_cast<double>(k) * a[k];
  return r;
}

constexpr int kTerms = 10;

struct Expansion {
  std::vector<cplx> terms;  // T_k(u0), k = 0..K-1
  cplx remainder_density;   // g_K(u0)
};

// Endpoint expansion of integral e(P) via repeated integration by parts:
// T_k = g_k / (2 pi i P'), g_{k+1} = T_k', g_0 = 1.
Expansion expand_at(const Poly& P, double u0) {
  const Poly c = shifted(P, u0);
  Series dp(kTerms + 1, 0.0);
  for (std::size_t m = 0; m + 1 < c.size() && m <= static_cast<std::size_t>(kTerms); ++m)
    dp[m] = cplx{0.0, kTwoPi} * (static_cast<double>(m + 1) * c[m + 1]);
  const Series w = series_inverse(dp);
  Series g(kTerms + 1, 0.0);
  g[0] = 1.0;
  Expansion e;
  for (int k = 0; k < kTerms; ++k) {
    const Series t = series_mul(g, w, g.size());
    e.terms.push_back(t[0]);
    g = series_deriv(t);
  }
  e.remainder_density = g[0];
  return e;
}

// Size of higher derivatives relative to P' at u; the endpoint expansion is
// accurate where this is small.
double roughness(const std::vector<Poly>& derivs, double u) {
  const double d1 = std::abs(eval(derivs[1], u));
  if (d1 == 0.0) return std::numeric_limits<double>::infinity();
  double v = 0.0;
  for (std::size_t k = 2; k < derivs.size(); ++k) {
    const double dk = std::abs(eval(derivs[k], u));
    if (dk == 0.0) continue;
    v = std::max(v, std::pow(dk / std::pow(d1, static_cast<double>(k)), 1.0 / static_cast<double>(k - 1)));
  }
  return v;
}

// Direct adaptive quadrature of e(P) on [a, b] with the phase re-centered at a.
cplx direct_piece(const Poly& P, double a, double b, double tol, OscDiagnostics& dg) {
  Poly c = shifted(P, a);
  const double p0 = c[0];
  c[0] = 0.0;
  const double cycles = std::abs(eval(c, b - a));
  quad::QuadOptions opt;
  opt.abs_tol = tol;
  opt.initial_panels = static_cast<int>(std::min(4e6, std::ceil(cycles))) + 1;
  opt.max_intervals = std::max(200000, 4 * opt.initial_panels);
  auto f = [&](double u) { return expi2pi(eval(c, u - a)); };
  const quad::QuadResult r = quad::integrate(f, a, b, opt);
  dg.evaluations += r.evaluations;
  dg.error_bound += r.error;
  return expi2pi(p0) * r.value;
}

}  // namespace

std::vector<double> real_roots(std::span<const double> poly, double lo, double hi) {
  Poly p(poly.begin(), poly.end());
  trim(p);
  if (p.size() <= 1) return {};
  // Critical points split [lo, hi] into monotone stretches.
  const std::vector<double> crit = real_roots(derivative(p), lo, hi);
  std::vector<double> knots;
  knots.push_back(lo);
  knots.insert(knots.end(), crit.begin(), crit.end());
  knots.push_back(hi);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double fa = eval(p, a), fb = eval(p, b);
    if (fa == 0.0 && a > lo) roots.push_back(a);
    if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0)) roots.push_back(bisect_root(p, a, b));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  std::vector<double> inside;
  for (double r : roots)
    if (r > lo && r < hi) inside.push_back(r);
  return inside;
}

cplx polynomial_phase_average(std::span<const double> coeffs, const OscOptions& opt, OscDiagnostics* diag) {
  OscDiagnostics local;
  OscDiagnostics& dg = diag ? *diag : local;
  dg = OscDiagnostics{};
  Poly P(coeffs.size() + 1, 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    require(std::isfinite(coeffs[j]), "phase coefficients must be finite");
    P[j + 1] = coeffs[j];
  }
  trim(P);
  if (P.size() <= 1) return 1.0;

  std::vector<Poly> derivs{P};
  while (derivs.back().size() > 1) derivs.push_back(derivative(derivs.back()));

  std::vector<double> knots{0.0, 1.0};
  for (std::size_t k = 1; k + 1 < derivs.size(); ++k) {
    const auto r = real_roots(derivs[k], 0.0, 1.0);
    knots.insert(knots.end(), r.begin(), r.end());
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const std::size_t pieces = knots.size() - 1;
  const double piece_tol = opt.abs_tol / static_cast<double>(pieces);
  cplx total{0.0, 0.0};
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = knots[i], b = knots[i + 1];
    ++dg.pieces;
    const double cycles = std::abs(eval(P, b) - eval(P, a));
    if (cycles <= opt.direct_cycles) {
      total += direct_piece(P, a, b, piece_tol, dg);
      continue;
    }
    // |P'| is monotone on the piece; e0 is the end where it is smaller.
    const bool left_small = std::abs(eval(derivs[1], a)) <= std::abs(eval(derivs[1], b));
    const double e0 = left_small ? a : b;
    const double e1 = left_small ? b : a;
    bool done = false;
    for (double rho = 0.05; rho >= 0.05 / 64.0 && !done; rho /= 4.0) {
      if (roughness(derivs, e1) > rho) continue;
      double near = e0, far = e1;  // roughness(near) > rho >= roughness(far)
      if (roughness(derivs, e0) <= rho) {
        far = e0;
      } else {
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (near + far);
          if (roughness(derivs, mid) > rho)
            near = mid;
          else
            far = mid;
        }
      }
      const double c = far;
      const double direct_cycles = std::abs(eval(P, c) - eval(P, e0));
      if (direct_cycles > opt.max_direct_cycles) break;
      // Remainder bound: sup |g_K| over the asymptotic stretch times its length.
      double gmax = 0.0;
      for (int k = 0; k <= 32; ++k) {
        const double frac = std::pow(static_cast<double>(k) / 32.0, 2.0);
        const double u = c + (e1 - c) * frac;
        gmax = std::max(gmax, std::abs(expand_at(P, u).remainder_density));
      }
      const double rem = gmax * std::abs(e1 - c);
      if (rem > 0.5 * piece_tol) continue;
      const double lo = std::min(c, e1), hi = std::max(c, e1);
      const Expansion ea = expand_at(P, lo);
      const Expansion eb = expand_at(P, hi);
      const cplx pa = expi2pi(eval(P, lo));
      const cplx pb = expi2pi(eval(P, hi));
      cplx asym{0.0, 0.0};
      for (int k = 0; k < kTerms; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        asym += sign * (eb.terms[static_cast<std::size_t>(k)] * pb - ea.terms[static_cast<std::size_t>(k)] * pa);
      }
      cplx near_part{0.0, 0.0};
      if (c != e0) near_part = direct_piece(P, std::min(c, e0), std::max(c, e0), 0.5 * piece_tol, dg);
      total += asym + near_part;
      dg.error_bound += rem;
      ++dg.asymptotic_pieces;
      done = true;
    }
    if (!done) {
      if (cycles > opt.max_direct_cycles)
        throw NumericFailure("oscillatory average: piece [" + std::to_string(a) + ", " + std::to_string(b) +
                             "] spans " + std::to_string(cycles) +
                             " cycles and the endpoint expansion does not reach tolerance");
      total += direct_piece(P, a, b, piece_tol, dg);
    }
  }
  return total;
}

}  // namespace qvar::osc

#include <algorithm>
#include <cmath>

#include "qvar/fft.hpp"
#include "qvar/multiplier.hpp"
#include "qvar/parallel.hpp"
#include "qvar/quadrature.hpp"

namespace qvar::mult {

namespace {

struct ResidueHit {
  std::int64_t a;  // residue in [0, q)
  double beta;     // alpha - a/q after wrapping
};

// Residues a mod q with |alpha - a/q| < r on the torus.
std::vector<ResidueHit> residue_hits(double alpha, std::int64_t q, double r) {
  std::vector<ResidueHit> out;
  const double qd = static_cast<double>(q);
  const auto lo = static_cast<std::int64_t>(std::ceil((alpha - r) * qd));
  const auto hi = static_cast<std::int64_t>(std::floor((alpha + r) * qd));
  for (std::int64_t a = lo; a <= hi; ++a) {
    const double beta = alpha - static_cast<double>(a) / qd;
    if (std::abs(beta) >= r) continue;
    std::int64_t res = a % q;
    if (res < 0) res += q;
    out.push_back({res, beta});
  }
  return out;
}

// Weight of the residue point a/q for the given family.
cplx residue_weight(const CoefficientFamily& family, std::int64_t q, const std::vector<std::int64_t>& a) {
  if (family.tag() != Family::poly) return 1.0;
  std::vector<std::int64_t> nums(a.size()), dens(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::int64_t g = arith::gcd(a[j], q);
    nums[j] = a[j] / g;
    dens[j] = q / g;
  }
  return family.value(nums, dens);
}

// sum over residue points near alpha of weight * bump(beta), where bump
// receives the wrapped offsets. `restricted` keeps gcd(a_1..a_d, q) = 1 only.
template <class Bump>
cplx residue_sum(std::span<const double> alpha, std::int64_t q, double radius, const CoefficientFamily& family,
                 bool restricted, Bump&& bump) {
  const std::size_t d = alpha.size();
  std::vector<std::vector<ResidueHit>> hits(d);
  for (std::size_t j = 0; j < d; ++j) {
    hits[j] = residue_hits(alpha[j], q, radius);
    if (hits[j].empty()) return 0.0;
  }
  cplx sum{0.0, 0.0};
  std::vector<std::size_t> idx(d, 0);
  std::vector<std::int64_t> a(d);
  std::vector<double> beta(d);
  while (true) {
    std::int64_t g = q;
    for (std::size_t j = 0; j < d; ++j) {
      a[j] = hits[j][idx[j]].a;
      beta[j] = hits[j][idx[j]].beta;
      g = arith::gcd(g, a[j]);
    }
    if (!restricted || g == 1) {
      const cplx b = bump(std::span<const double>(beta));
      if (b != cplx{0.0, 0.0}) sum += residue_weight(family, q, a) * b;
    }
    std::size_t j = d;
    while (j > 0 && ++idx[j - 1] == hits[j - 1].size()) {
      idx[j - 1] = 0;
      --j;
    }
    if (j == 0) break;
  }
  return sum;
}

void check_family_dim(const CoefficientFamily& family, int d) {
  require(d >= 1, "dimension must be at least 1");
  if (family.tag() == Family::poly) require(family.dim() == d, "family degree does not match the dimension");
}

TorusMultiplier residue_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d,
                              bool restricted) {
  require(q >= 1, "denominator must be at least 1");
  require(Q > 0.0 && t > 0.0, "Q and t must be positive");
  check_family_dim(family, d);
  const double radius = 1.0 / (50.0 * Q);
  MultiplierMeta meta;
  meta.family = family.name();
  meta.N = static_cast<std::int64_t>(t);
  meta.bound = 1.0;
  auto eval = [=](std::span<const double> alpha) {
    return residue_sum(alpha, q, radius, family, restricted, [&](std::span<const double> beta) -> cplx {
      const double chi = kernels::cutoff_ft(beta, Q);
      if (chi == 0.0) return 0.0;
      return chi * kernels::cm_ft(t, beta, d);
    });
  };
  return TorusMultiplier(d, eval, meta);
}

}  // namespace

TorusMultiplier full_residue_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d) {
  return residue_level(q, Q, t, family, d, false);
}

TorusMultiplier direct_restricted_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d) {
  return residue_level(q, Q, t, family, d, true);
}

TorusMultiplier mobius_restricted_level(std::int64_t q, double Q, double t, const CoefficientFamily& family, int d,
                                        std::int64_t budget) {
  require(q >= 1, "denominator must be at least 1");
  require(Q > 0.0, "Q must be positive");
  require(static_cast<double>(q) <= 25.0 * Q, "Moebius assembly requires q <= 25 Q");
  check_family_dim(family, d);
  std::vector<std::pair<int, TorusMultiplier>> parts;
  double cells = 0.0;
  for (std::int64_t dp : arith::divisors(q)) {
    cells += std::pow(static_cast<double>(dp), d);
    if (cells > static_cast<double>(budget))
      throw ResourceLimit("Moebius assembly over the divisors of " + std::to_string(q) + " exceeds the budget");
    const int mu = arith::mobius_of(q / dp);
    if (mu != 0) parts.emplace_back(mu, full_residue_level(dp, Q, t, family, d));
  }
  MultiplierMeta meta;
  meta.family = family.name();
  meta.N = static_cast<std::int64_t>(t);
  meta.bound = static_cast<double>(parts.size());
  auto eval = [parts](std::span<const double> alpha) {
    cplx sum{0.0, 0.0};
    for (const auto& [mu, m] : parts) sum += static_cast<double>(mu) * m(alpha);
    return sum;
  };
  return TorusMultiplier(d, eval, meta);
}

// ------------------------------------------------------- periodization

TorusMultiplier periodize(const RealMultiplier& m, std::int64_t q) {
  require(q >= 1, "q must be at least 1");
  require(m.dim >= 1, "dimension must be at least 1");
  require(static_cast<bool>(m.f), "real multiplier needs an evaluator");
  const auto d = static_cast<std::size_t>(m.dim);
  std::vector<double> lo = m.cube_lo.empty() ? std::vector<double>(d, -0.5) : m.cube_lo;
  require(lo.size() == d, "cube corner dimension mismatch");
  for (double l : lo) require(l <= 0.0 && l + 1.0 >= 0.0, "support cube must contain the origin");

  // Support check on a Kronecker sequence over the enlarged cube [lo-1, lo+2].
  {
    std::vector<double> y(d);
    const double g = 1.0 / std::numbers::phi;
    for (int k = 1; k <= 2048; ++k) {
      bool inside = true;
      for (std::size_t j = 0; j < d; ++j) {
        double u = std::fmod(k * (g + std::sqrt(2.0 + static_cast<double>(j))), 1.0);
        y[j] = lo[j] - 1.0 + 3.0 * u;
        inside = inside && y[j] >= lo[j] && y[j] <= lo[j] + 1.0;
      }
      if (inside) continue;
      if (std::abs(m.f(y)) > 1e-14)
        throw InvalidArgument("real multiplier does not vanish outside its unit cube (checked by sampling)");
    }
  }

  MultiplierMeta meta;
  meta.family = "custom";
  auto f = m.f;
  auto eval = [f, lo, q, d](std::span<const double> xi) {
    std::vector<std::int64_t> l_lo(d), l_hi(d);
    std::vector<double> y(d), arg(d);
    for (std::size_t j = 0; j < d; ++j) {
      y[j] = static_cast<double>(q) * xi[j];
      l_lo[j] = static_cast<std::int64_t>(std::ceil(y[j] - lo[j] - 1.0));
      l_hi[j] = static_cast<std::int64_t>(std::floor(y[j] - lo[j]));
      if (l_lo[j] > l_hi[j]) return cplx{0.0, 0.0};
    }
    std::vector<std::int64_t> l = l_lo;
    cplx sum{0.0, 0.0};
    while (true) {
      for (std::size_t j = 0; j < d; ++j) arg[j] = y[j] - static_cast<double>(l[j]);
      sum += f(arg);
      std::size_t j = d;
      while (j > 0 && ++l[j - 1] > l_hi[j - 1]) {
        l[j - 1] = l_lo[j - 1];
        --j;
      }
      if (j == 0) break;
    }
    return sum;
  };
  return TorusMultiplier(m.dim, eval, meta);
}

// ------------------------------------------------------ application

namespace {

std::int64_t total_cells(const std::vector<std::int64_t>& M) {
  std::int64_t c = 1;
  for (std::int64_t m : M) {
    if (m > (std::int64_t{1} << 40) / c) return std::int64_t{1} << 40;
    c *= m;
  }
  return c;
}

// Values of T_m f on the window [base, base + W) computed on the grid M.
std::vector<cplx> grid_apply(const TorusMultiplier& m, const kernels::Sequence& f, const std::vector<std::int64_t>& base,
                             const std::vector<std::int64_t>& W, const std::vector<std::int64_t>& M) {
  const std::size_t d = M.size();
  const auto cells = static_cast<std::size_t>(total_cells(M));
  std::vector<cplx> buf(cells, cplx{0.0, 0.0});
  auto flat = [&](const std::vector<std::int64_t>& idx) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < d; ++j) k = k * static_cast<std::size_t>(M[j]) + static_cast<std::size_t>(idx[j]);
    return k;
  };
  std::vector<std::int64_t> idx(d);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] == cplx{0.0, 0.0}) continue;
    const auto y = f.coords(i);
    for (std::size_t j = 0; j < d; ++j) {
      std::int64_t r = (y[j] - base[j]) % M[j];
      if (r < 0) r += M[j];
      idx[j] = r;
    }
    buf[flat(idx)] += f.values[i];
  }
  std::vector<int> ext(M.begin(), M.end());
  fft::Plan fwd(ext, fft::Sign::plus);
  fwd.execute(buf);
  parallel_for(cells, [&](std::size_t k) {
    double xi[8];
    std::vector<double> heap;
    double* p = xi;
    if (d > 8) {
      heap.resize(d);
      p = heap.data();
    }
    std::size_t rest = k;
    for (std::size_t j = d; j-- > 0;) {
      const auto mj = static_cast<std::size_t>(M[j]);
      p[j] = static_cast<double>(rest % mj) / static_cast<double>(mj);
      rest /= mj;
    }
    buf[k] *= m(std::span<const double>(p, d));
  });
  fft::Plan inv(ext, fft::Sign::minus);
  inv.execute(buf);
  const double scale = 1.0 / static_cast<double>(cells);

  std::size_t wcells = 1;
  for (std::int64_t w : W) wcells *= static_cast<std::size_t>(w);
  std::vector<cplx> out(wcells);
  std::vector<std::int64_t> n(d, 0);
  for (std::size_t i = 0; i < wcells; ++i) {
    out[i] = buf[flat(n)] * scale;
    std::size_t j = d;
    while (j > 0 && ++n[j - 1] == W[j - 1]) {
      n[j - 1] = 0;
      --j;
    }
  }
  return out;
}

}  // namespace

Applied apply_multiplier(const TorusMultiplier& m, const kernels::Sequence& f, const ApplyOptions& opt) {
  require(m.dim() == f.dim, "multiplier and sequence dimensions differ");
  require(opt.tol > 0.0, "tolerance must be positive");
  require(opt.margin_factor >= 0, "margin factor must be non-negative");
  const auto d = static_cast<std::size_t>(f.dim);
  for (std::int64_t e : f.extent) require(e >= 1, "sequence box must be non-empty");

  Applied res;
  if (m.kernel) {
    // m is a finite exponential sum: one grid covering the output support is exact.
    const auto kb = m.kernel->bounds();
    std::vector<std::int64_t> base(d), W(d);
    for (std::size_t j = 0; j < d; ++j) {
      const auto [klo, khi] = m.kernel->size() ? kb[j] : std::pair<std::int64_t, std::int64_t>{0, 0};
      base[j] = f.lo[j] + klo;
      W[j] = f.extent[j] + (khi - klo);
    }
    if (total_cells(W) > opt.max_cells)
      throw ResourceLimit("exact application needs " + std::to_string(total_cells(W)) + " grid cells, above the budget");
    res.out = kernels::Sequence::zeros(base, W);
    res.out.values = grid_apply(m, f, base, W, W);
    res.grid = W;
    res.alias_bound = 0.0;
    res.exact = true;
    return res;
  }

  std::vector<std::int64_t> base(d), W(d), M(d);
  for (std::size_t j = 0; j < d; ++j) {
    base[j] = f.lo[j] - opt.margin_factor * f.extent[j];
    W[j] = f.extent[j] * (1 + 2 * static_cast<std::int64_t>(opt.margin_factor));
    const std::int64_t want = std::max<std::int64_t>(8 * f.extent[j], W[j]);
    std::int64_t p = 1;
    while (p < want) p *= 2;
    M[j] = p;
  }
  auto doubled = [](std::vector<std::int64_t> v) {
    for (auto& x : v) x *= 2;
    return v;
  };
  if (total_cells(doubled(M)) > opt.max_cells)
    throw ResourceLimit("multiplier application needs more than " + std::to_string(opt.max_cells) + " grid cells");
  std::vector<cplx> coarse = grid_apply(m, f, base, W, M);
  while (true) {
    const auto M2 = doubled(M);
    if (total_cells(M2) > opt.max_cells)
      throw ResourceLimit("tolerance " + std::to_string(opt.tol) + " not reached within " +
                          std::to_string(opt.max_cells) + " grid cells");
    std::vector<cplx> fine = grid_apply(m, f, base, W, M2);
    double diff = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
    if (diff <= opt.tol) {
      res.out = kernels::Sequence::zeros(base, W);
      res.out.values = std::move(fine);
      res.grid = M2;
      res.alias_bound = diff;
      res.exact = false;
      return res;
    }
    M = M2;
    coarse = std::move(fine);
  }
}

// ------------------------------------------------ poly cutoff identity

namespace {

void check_cutoff_args(std::int64_t q, double Q, int d) {
  require(q >= 1, "q must be at least 1");
  require(Q > 0.0, "Q must be positive");
  require(d >= 1, "dimension must be at least 1");
  require(static_cast<double>(q) <= 5.0 * Q, "the cutoff identity requires q <= 5 Q");
}

}  // namespace

TorusMultiplier poly_cutoff_sum(std::int64_t q, double Q, int d) {
  check_cutoff_args(q, Q, d);
  const double t = Q / 4.0;
  const double radius = 1.0 / (50.0 * t);
  auto family = CoefficientFamily::poly(d);
  MultiplierMeta meta;
  meta.family = family.name();
  auto eval = [=](std::span<const double> alpha) {
    return residue_sum(alpha, q, radius, family, false,
                       [&](std::span<const double> beta) -> cplx { return kernels::cutoff_ft(beta, t); });
  };
  return TorusMultiplier(d, eval, meta);
}

std::vector<cplx> poly_cutoff_sum_inverse(std::int64_t q, double Q, int d,
                                          const std::vector<std::vector<std::int64_t>>& xs) {
  check_cutoff_args(q, Q, d);
  for (const auto& x : xs) require(x.size() == static_cast<std::size_t>(d), "point dimension mismatch");
  const TorusMultiplier F = poly_cutoff_sum(q, Q, d);
  const double t = Q / 4.0;
  const double a_r = 0.01 / t, b_r = 0.02 / t;

  // One-axis rule on [-b_r, b_r], split at the plateau edges.
  std::vector<double> nodes, weights;
  auto add_segment = [&](double lo, double hi, int pieces, int n) {
    const auto& gl = quad::gauss_legendre(n);
    const double h = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double c = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        nodes.push_back(c + 0.5 * h * gl.nodes[i]);
        weights.push_back(0.5 * h * gl.weights[i]);
      }
    }
  };
  add_segment(-b_r, -a_r, 6, 24);
  add_segment(-a_r, a_r, 2, 16);
  add_segment(a_r, b_r, 6, 24);
  const std::size_t n1 = nodes.size();

  std::size_t per_bump = 1;
  for (int j = 0; j < d; ++j) per_bump *= n1;
  std::size_t bumps = 1;
  for (int j = 0; j < d; ++j) bumps *= static_cast<std::size_t>(q);

  // Evaluate F once at every node of every bump box, then integrate against each x.
  std::vector<double> alpha_all(bumps * per_bump * static_cast<std::size_t>(d));
  std::vector<cplx> fw(bumps * per_bump);
  parallel_for(bumps, [&](std::size_t b) {
    std::vector<std::int64_t> a(static_cast<std::size_t>(d));
    std::size_t rest = b;
    for (int j = d; j-- > 0;) {
      a[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(q));
      rest /= static_cast<std::size_t>(q);
    }
    std::vector<double> alpha(static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < per_bump; ++k) {
      std::size_t r = k;
      double w = 1.0;
      for (int j = d; j-- > 0;) {
        const std::size_t i = r % n1;
        r /= n1;
        alpha[static_cast<std::size_t>(j)] =
            static_cast<double>(a[static_cast<std::size_t>(j)]) / static_cast<double>(q) + nodes[i];
        w *= weights[i];
      }
      std::copy(alpha.begin(), alpha.end(), alpha_all.begin() + static_cast<std::ptrdiff_t>((b * per_bump + k) * alpha.size()));
      fw[b * per_bump + k] = F(alpha) * w;
    }
  });

  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cplx sum{0.0, 0.0};
    for (std::size_t k = 0; k < fw.size(); ++k) {
      double phase = 0.0;
      for (int j = 0; j < d; ++j)
        phase += alpha_all[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] *
                 static_cast<double>(xs[i][static_cast<std::size_t>(j)]);
      sum += fw[k] * expi2pi(-phase);
    }
    out[i] = sum;
  }
  return out;
}

cplx poly_cutoff_sum_inverse(std::int64_t q, double Q, int d, std::span<const std::int64_t> x) {
  const std::vector<std::vector<std::int64_t>> xs{std::vector<std::int64_t>(x.begin(), x.end())};
  return poly_cutoff_sum_inverse(q, Q, d, xs)[0];
}

double poly_cutoff_sum_closed_form(std::int64_t q, double Q, int d, std::span<const std::int64_t> x) {
  check_cutoff_args(q, Q, d);
  require(x.size() == static_cast<std::size_t>(d), "point dimension mismatch");
  std::int64_t x1 = x[0] % q;
  if (x1 < 0) x1 += q;
  __int128 pw = 1;
  for (int j = 0; j < d; ++j) {
    pw = (pw * x1) % q;
    std::int64_t xj = x[static_cast<std::size_t>(j)] % q;
    if (xj < 0) xj += q;
    if (static_cast<std::int64_t>(pw) != xj) return 0.0;
  }
  std::vector<double> xd(x.begin(), x.end());
  return kernels::cutoff_spatial(xd, Q / 4.0) * std::pow(static_cast<double>(q), d - 1);
}

}  // namespace qvar::mult

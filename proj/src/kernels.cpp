#include "qvar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <set>

#include "qvar/fft.hpp"
#include "qvar/oscillatory.hpp"
#include "qvar/quadrature.hpp"

namespace qvar::kernels {

double DiscreteKernel::mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::vector<std::pair<std::int64_t, std::int64_t>> DiscreteKernel::bounds() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> b(static_cast<std::size_t>(dim), {0, 0});
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = point(i);
    for (int j = 0; j < dim; ++j) {
      auto& bj = b[static_cast<std::size_t>(j)];
      if (i == 0) {
        bj = {p[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)]};
      } else {
        bj.first = std::min(bj.first, p[static_cast<std::size_t>(j)]);
        bj.second = std::max(bj.second, p[static_cast<std::size_t>(j)]);
      }
    }
  }
  return b;
}

void DiscreteKernel::validate() const {
  require(dim >= 1, "kernel dimension must be at least 1");
  require(points.size() == weights.size() * static_cast<std::size_t>(dim), "kernel points and weights disagree");
  std::set<std::vector<std::int64_t>> seen;
  for (std::size_t i = 0; i < size(); ++i) {
    require(std::isfinite(weights[i]), "kernel weights must be finite");
    const auto p = point(i);
    require(seen.emplace(p.begin(), p.end()).second, "kernel support points must be distinct");
  }
}

DiscreteKernel prime_kernel(std::int64_t N, const arith::ArithTables& tables) {
  require(N >= 1, "N must be at least 1");
  require(tables.limit >= N, "arithmetic tables do not reach N");
  DiscreteKernel K;
  K.dim = 1;
  const double inv = 1.0 / static_cast<double>(N);
  for (std::int64_t n = 2; n <= N; ++n) {
    const double l = tables.lambda(n);
    if (l > 0.0) {
      K.points.push_back(n);
      K.weights.push_back(l * inv);
    }
  }
  return K;
}

DiscreteKernel poly_kernel(std::int64_t N, int d, int max_degree) {
  require(N >= 1, "N must be at least 1");
  require(d >= 1, "degree must be at least 1");
  if (d > max_degree) throw Unsupported("polynomial kernels above degree " + std::to_string(max_degree) + " are disabled");
  if (static_cast<double>(d) * std::log2(static_cast<double>(N)) >= 62.0)
    throw InvalidArgument("N^d overflows 64-bit positions");
  DiscreteKernel K;
  K.dim = d;
  K.points.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(d));
  const double w = 1.0 / static_cast<double>(N);
  for (std::int64_t n = 1; n <= N; ++n) {
    std::int64_t p = 1;
    for (int j = 0; j < d; ++j) {
      p *= n;
      K.points.push_back(p);
    }
    K.weights.push_back(w);
  }
  return K;
}

cplx kernel_ft(const DiscreteKernel& K, std::span<const double> alpha) {
  require(alpha.size() == static_cast<std::size_t>(K.dim), "frequency dimension does not match the kernel");
  // Phases are reduced coordinatewise: alpha_j x_j mod 1 keeps precision for large x_j.
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < K.size(); ++i) {
    const auto p = K.point(i);
    double phase = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const double a = alpha[j] * static_cast<double>(p[j]);
      phase += a - std::floor(a);
    }
    sum += K.weights[i] * expi2pi(phase);
  }
  return sum;
}

void write_kernel_csv(std::ostream& out, const DiscreteKernel& K) {
  for (int j = 0; j < K.dim; ++j) out << "x" << j + 1 << ",";
  out << "weight\n";
  char buf[64];
  for (std::size_t i = 0; i < K.size(); ++i) {
    for (auto v : K.point(i)) out << v << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", K.weights[i]);
    out << buf << "\n";
  }
}

// ---------------------------------------------------------------- sequences

Sequence Sequence::zeros(std::vector<std::int64_t> lo, std::vector<std::int64_t> extent) {
  require(!lo.empty() && lo.size() == extent.size(), "sequence box needs matching lo and extent");
  Sequence s;
  s.dim = static_cast<int>(lo.size());
  std::size_t n = 1;
  for (auto e : extent) {
    require(e >= 1, "sequence extents must be positive");
    n *= static_cast<std::size_t>(e);
  }
  s.lo = std::move(lo);
  s.extent = std::move(extent);
  s.values.assign(n, 0.0);
  return s;
}

Sequence Sequence::delta(std::vector<std::int64_t> at) {
  std::vector<std::int64_t> ext(at.size(), 1);
  Sequence s = zeros(std::move(at), std::move(ext));
  s.values[0] = 1.0;
  return s;
}

bool Sequence::contains(std::span<const std::int64_t> x) const {
  for (int j = 0; j < dim; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (x[u] < lo[u] || x[u] >= lo[u] + extent[u]) return false;
  }
  return true;
}

cplx Sequence::at(std::span<const std::int64_t> x) const {
  require(x.size() == static_cast<std::size_t>(dim), "point dimension does not match the sequence");
  if (!contains(x)) return 0.0;
  std::size_t idx = 0;
  for (int j = 0; j < dim; ++j) {
    const auto u = static_cast<std::size_t>(j);
    idx = idx * static_cast<std::size_t>(extent[u]) + static_cast<std::size_t>(x[u] - lo[u]);
  }
  return values[idx];
}

cplx& Sequence::ref(std::span<const std::int64_t> x) {
  require(x.size() == static_cast<std::size_t>(dim) && contains(x), "point outside the sequence box");
  std::size_t idx = 0;
  for (int j = 0; j < dim; ++j) {
    const auto u = static_cast<std::size_t>(j);
    idx = idx * static_cast<std::size_t>(extent[u]) + static_cast<std::size_t>(x[u] - lo[u]);
  }
  return values[idx];
}

std::vector<std::int64_t> Sequence::coords(std::size_t i) const {
  std::vector<std::int64_t> c(static_cast<std::size_t>(dim));
  for (int j = dim - 1; j >= 0; --j) {
    const auto u = static_cast<std::size_t>(j);
    const auto e = static_cast<std::size_t>(extent[u]);
    c[u] = lo[u] + static_cast<std::int64_t>(i % e);
    i /= e;
  }
  return c;
}

double Sequence::l1() const {
  double s = 0.0;
  for (const cplx& v : values) s += std::abs(v);
  return s;
}

double Sequence::lp(double p) const {
  require(p >= 1.0, "l^p norm needs p >= 1");
  double s = 0.0;
  for (const cplx& v : values) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::int64_t>& extent) {
  std::vector<std::size_t> s(extent.size(), 1);
  for (std::size_t j = extent.size(); j-- > 1;) s[j - 1] = s[j] * static_cast<std::size_t>(extent[j]);
  return s;
}

Sequence convolve_direct(const Sequence& f, const DiscreteKernel& K, Sequence out) {
  const auto so = strides_of(out.extent);
  const auto b = K.bounds();
  // Offset of every f entry inside the output box, relative to the kernel's min corner.
  std::vector<std::size_t> f_off(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t rem = i, off = 0;
    for (int j = f.dim - 1; j >= 0; --j) {
      const auto u = static_cast<std::size_t>(j);
      const auto e = static_cast<std::size_t>(f.extent[u]);
      off += (rem % e) * so[u];
      rem /= e;
    }
    f_off[i] = off;
  }
  for (std::size_t k = 0; k < K.size(); ++k) {
    const auto p = K.point(k);
    std::size_t base = 0;
    for (int j = 0; j < f.dim; ++j) {
      const auto u = static_cast<std::size_t>(j);
      base += static_cast<std::size_t>(p[u] - b[u].first) * so[u];
    }
    const double w = K.weights[k];
    for (std::size_t i = 0; i < f.size(); ++i) out.values[base + f_off[i]] += w * f.values[i];
  }
  return out;
}

Sequence convolve_fft(const Sequence& f, const DiscreteKernel& K, Sequence out) {
  const auto b = K.bounds();
  std::vector<int> ext;
  for (auto e : out.extent) ext.push_back(static_cast<int>(e));
  const auto so = strides_of(out.extent);
  const std::size_t M = out.size();
  std::vector<cplx> F(M, 0.0), G(M, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::size_t rem = i, off = 0;
    for (int j = f.dim - 1; j >= 0; --j) {
      const auto u = static_cast<std::size_t>(j);
      const auto e = static_cast<std::size_t>(f.extent[u]);
      off += (rem % e) * so[u];
      rem /= e;
    }
    F[off] = f.values[i];
  }
  for (std::size_t k = 0; k < K.size(); ++k) {
    const auto p = K.point(k);
    std::size_t off = 0;
    for (int j = 0; j < f.dim; ++j) {
      const auto u = static_cast<std::size_t>(j);
      off += static_cast<std::size_t>(p[u] - b[u].first) * so[u];
    }
    G[off] += K.weights[k];
  }
  fft::Plan fwd(ext, fft::Sign::minus);
  fft::Plan inv(ext, fft::Sign::plus);
  fwd.execute(F);
  fwd.execute(G);
  for (std::size_t i = 0; i < M; ++i) F[i] *= G[i];
  inv.execute(F);
  const double scale = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < M; ++i) out.values[i] = F[i] * scale;
  return out;
}

}  // namespace

Sequence convolve(const Sequence& f, const DiscreteKernel& K, ConvMethod method) {
  require(f.dim == K.dim, "sequence and kernel dimensions differ");
  if (K.size() == 0) return Sequence::zeros(f.lo, f.extent);
  const auto b = K.bounds();
  std::vector<std::int64_t> lo(static_cast<std::size_t>(f.dim)), ext(static_cast<std::size_t>(f.dim));
  double box = 1.0;
  for (int j = 0; j < f.dim; ++j) {
    const auto u = static_cast<std::size_t>(j);
    lo[u] = f.lo[u] + b[u].first;
    ext[u] = f.extent[u] + (b[u].second - b[u].first);
    box *= static_cast<double>(ext[u]);
  }
  if (box > 4e8) throw ResourceLimit("convolution output box has " + std::to_string(box) + " cells");
  Sequence out = Sequence::zeros(lo, ext);
  if (method == ConvMethod::automatic) {
    const double direct_cost = static_cast<double>(K.size()) * static_cast<double>(f.size());
    const double fft_cost = 15.0 * box * std::log2(std::max(2.0, box));
    method = (direct_cost > fft_cost && box <= 6.7e7) ? ConvMethod::fft : ConvMethod::direct;
  }
  if (method == ConvMethod::fft) {
    if (box > 6.7e7) throw ResourceLimit("fft convolution box too large");
    return convolve_fft(f, K, std::move(out));
  }
  return convolve_direct(f, K, std::move(out));
}

// ------------------------------------------------------- continuous average

cplx cm_ft_normalized(std::span<const double> b) {
  std::size_t deg = b.size();
  while (deg > 0 && b[deg - 1] == 0.0) --deg;
  if (deg == 0) return 1.0;
  if (deg == 1) return osc::linear_phase_average(b[0]);
  if (deg == 2) return osc::quadratic_phase_average(b[0], b[1]);
  osc::OscOptions opt;
  opt.abs_tol = 1e-10;
  return osc::polynomial_phase_average(b.first(deg), opt);
}

cplx cm_ft(double t, std::span<const double> beta, int d) {
  require(t > 0.0 && std::isfinite(t), "t must be positive");
  require(d >= 1 && beta.size() == static_cast<std::size_t>(d), "beta must have d coordinates");
  std::vector<double> b(beta.size());
  double tp = 1.0;
  for (std::size_t j = 0; j < beta.size(); ++j) {
    tp *= t;
    b[j] = beta[j] * tp;
  }
  return cm_ft_normalized(b);
}

// ------------------------------------------------------------------- cutoff

double cutoff_profile(double x) {
  constexpr double a = 1.0 / 100.0;
  constexpr double b = 1.0 / 50.0;
  x = std::abs(x);
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  const double u = (b - x) / (b - a);
  auto f = [](double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; };
  const double fu = f(u);
  return fu / (fu + f(1.0 - u));
}

double cutoff_ft(std::span<const double> xi, double t) {
  require(t > 0.0, "dilation must be positive");
  double v = 1.0;
  for (double x : xi) {
    v *= cutoff_profile(t * x);
    if (v == 0.0) break;
  }
  return v;
}

namespace {

// chi in one dimension: 2 integral_0^{1/50} h(xi) cos(2 pi xi y) d xi.
double cutoff_spatial_1d(double y) {
  auto g = [y](double xi) { return cplx{cutoff_profile(xi) * std::cos(kTwoPi * xi * y), 0.0}; };
  quad::QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.initial_panels = 4 + static_cast<int>(std::ceil(std::abs(y) / 50.0));
  // The profile has a kink-free but steep transition; split at the plateau edge.
  const double plateau = quad::integrate(g, 0.0, 0.01, opt).value.real();
  const double ramp = quad::integrate(g, 0.01, 0.02, opt).value.real();
  return 2.0 * (plateau + ramp);
}

}  // namespace

double cutoff_spatial(std::span<const double> x, double t) {
  require(t > 0.0, "dilation must be positive");
  double v = 1.0;
  for (double xj : x) v *= cutoff_spatial_1d(xj / t) / t;
  return v;
}

// ----------------------------------------------------------- L2 of sums

double exp_sum_l2_norm(const std::vector<std::pair<double, double>>& box,
                       const std::vector<std::vector<double>>& freqs, const std::vector<cplx>& coeffs) {
  require(freqs.size() == coeffs.size(), "need one coefficient per frequency");
  for (const auto& [a, b] : box) require(b >= a, "box sides must satisfy a <= b");
  for (const auto& xi : freqs) require(xi.size() == box.size(), "frequency dimension does not match the box");
  // Exact Gram form: ||F||^2 = sum_{k,l} c_k conj(c_l) prod_j integral e((xi_k - xi_l)_j y) dy.
  const std::size_t n = coeffs.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      cplx g{1.0, 0.0};
      for (std::size_t j = 0; j < box.size(); ++j) {
        const auto [a, b] = box[j];
        const double eta = freqs[k][j] - freqs[l][j];
        g *= (b - a) * expi2pi(eta * a) * osc::linear_phase_average(eta * (b - a));
      }
      total += (coeffs[k] * std::conj(coeffs[l]) * g).real();
    }
  }
  if (total < 0.0) {
    if (total < -1e-9) throw NumericFailure("negative squared norm from Gram sum: " + std::to_string(total));
    total = 0.0;
  }
  return std::sqrt(total);
}

}  // namespace qvar::kernels

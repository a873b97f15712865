#include <algorithm>
#include <cmath>

#include "qvar/fft.hpp"
#include "qvar/multiplier.hpp"
#include "qvar/parallel.hpp"

namespace qvar::mult {

namespace {

constexpr std::size_t kTop = 10;

struct GridHit {
  double value = -1.0;
  std::size_t index = 0;  // flat grid index
};

bool hit_before(const GridHit& a, const GridHit& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

void keep_top(std::vector<GridHit>& top, GridHit h) {
  if (top.size() < kTop) {
    top.push_back(h);
    std::sort(top.begin(), top.end(), hit_before);
  } else if (hit_before(h, top.back())) {
    top.back() = h;
    std::sort(top.begin(), top.end(), hit_before);
  }
}

// frac(omega * x / M) + (k * (x mod M) mod M) / M, reduced later by expi2pi.
double grid_phase(std::int64_t k, std::int64_t x, std::int64_t M, double omega) {
  std::int64_t r = x % M;
  if (r < 0) r += M;
  const auto kr = static_cast<std::int64_t>((static_cast<__int128>(k) * r) % M);
  const double w = omega * static_cast<double>(x) / static_cast<double>(M);
  return static_cast<double>(kr) / static_cast<double>(M) + (w - std::floor(w));
}

}  // namespace

double sup_error(const kernels::DiscreteKernel& K, const TorusMultiplier& L, std::int64_t grid_density,
                 SupErrorInfo* info) {
  const int d = K.dim;
  require(L.dim() == d, "kernel and multiplier dimensions differ");
  K.validate();
  std::int64_t span1 = 0;
  for (std::size_t i = 0; i < K.size(); ++i) span1 = std::max(span1, std::abs(K.point(i)[0]));
  require(grid_density >= 2 && grid_density >= 2 * span1,
          "grid density must be at least twice the kernel's first-coordinate range");
  const std::int64_t M = grid_density;
  if (d >= 3 && std::pow(static_cast<double>(M), d) > std::ldexp(1.0, 26))
    throw ResourceLimit("sup-error grid M^d above 2^26 cells for d >= 3");
  const double omega = std::sqrt(2.0) - 1.0;
  const auto Mz = static_cast<std::size_t>(M);

  // When L is itself a kernel transform, fold it into the sampled sum.
  kernels::DiscreteKernel D = K;
  const bool folded = static_cast<bool>(L.kernel);
  if (folded) {
    require(L.kernel->dim == d, "kernel and multiplier dimensions differ");
    D.points.insert(D.points.end(), L.kernel->points.begin(), L.kernel->points.end());
    for (double w : L.kernel->weights) D.weights.push_back(-w);
  }

  std::vector<std::vector<AxisCandidate>> cand;
  if (!folded && L.bourgain) {
    cand.resize(Mz);
    parallel_for(Mz, [&](std::size_t k) {
      const double a = (static_cast<double>(k) + omega) / static_cast<double>(M);
      cand[k] = L.bourgain->axis_candidates(a);
    });
  }
  auto grid_alpha = [&](std::size_t k) { return (static_cast<double>(k) + omega) / static_cast<double>(M); };
  auto eval_L = [&](const std::vector<std::size_t>& ks, std::vector<double>& alpha) -> cplx {
    if (folded) return 0.0;
    if (L.bourgain) {
      std::vector<const std::vector<AxisCandidate>*> lists;
      for (std::size_t k : ks) {
        if (cand[k].empty()) return 0.0;
        lists.push_back(&cand[k]);
      }
      return L.bourgain->combine(lists);
    }
    for (std::size_t j = 0; j < ks.size(); ++j) alpha[j] = grid_alpha(ks[j]);
    return L(alpha);
  };

  // Rows: one transform along the first coordinate for every value of the others.
  std::size_t rows = 1;
  for (int j = 1; j < d; ++j) rows *= Mz;
  fft::Plan plan({static_cast<int>(M)}, fft::Sign::plus);
  std::vector<std::vector<GridHit>> row_top(rows);
  parallel_for(rows, [&](std::size_t row) {
    std::vector<std::size_t> ks(static_cast<std::size_t>(d));
    std::size_t rest = row;
    for (int j = d; j-- > 1;) {
      ks[static_cast<std::size_t>(j)] = rest % Mz;
      rest /= Mz;
    }
    std::vector<cplx> buf(Mz, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < D.size(); ++i) {
      const auto x = D.point(i);
      double phase = grid_phase(0, x[0], M, omega);
      for (int j = 1; j < d; ++j)
        phase += grid_phase(static_cast<std::int64_t>(ks[static_cast<std::size_t>(j)]), x[static_cast<std::size_t>(j)], M, omega);
      std::int64_t r = x[0] % M;
      if (r < 0) r += M;
      buf[static_cast<std::size_t>(r)] += D.weights[i] * expi2pi(phase);
    }
    plan.execute(buf);
    bool row_zero = false;
    if (!folded && L.bourgain)
      for (int j = 1; j < d; ++j) row_zero = row_zero || cand[ks[static_cast<std::size_t>(j)]].empty();
    std::vector<double> alpha(static_cast<std::size_t>(d));
    std::vector<GridHit> top;
    for (std::size_t k = 0; k < Mz; ++k) {
      ks[0] = k;
      const cplx l = row_zero ? cplx{0.0, 0.0} : eval_L(ks, alpha);
      keep_top(top, {std::abs(buf[k] - l), row * Mz + k});
    }
    row_top[row] = std::move(top);
  });

  std::vector<GridHit> top;
  for (const auto& rt : row_top)
    for (const auto& h : rt) keep_top(top, h);

  double grid_max = top.empty() ? 0.0 : top.front().value;
  double best = grid_max;
  std::vector<double> argmax(static_cast<std::size_t>(d), 0.0);
  auto coords_of = [&](std::size_t flat) {
    std::vector<double> a(static_cast<std::size_t>(d));
    a[0] = grid_alpha(flat % Mz);
    std::size_t rest = flat / Mz;
    for (int j = d; j-- > 1;) {
      a[static_cast<std::size_t>(j)] = grid_alpha(rest % Mz);
      rest /= Mz;
    }
    return a;
  };
  if (!top.empty()) argmax = coords_of(top.front().index);

  // Local refinement: 17 points per axis spanning one cell either side.
  constexpr int kSide = 17;
  const double step = 2.0 / static_cast<double>(M) / (kSide - 1);
  std::size_t local = 1;
  for (int j = 0; j < d; ++j) local *= kSide;
  for (const auto& h : top) {
    const auto centre = coords_of(h.index);
    std::vector<double> vals(local);
    std::vector<std::vector<double>> pts(local);
    parallel_for(local, [&](std::size_t i) {
      std::vector<double> a(static_cast<std::size_t>(d));
      std::size_t rest = i;
      for (int j = d; j-- > 0;) {
        const auto o = static_cast<int>(rest % kSide);
        rest /= kSide;
        a[static_cast<std::size_t>(j)] = centre[static_cast<std::size_t>(j)] + (o - kSide / 2) * step;
      }
      vals[i] = std::abs(kernels::kernel_ft(K, a) - L(a));
      pts[i] = std::move(a);
    });
    for (std::size_t i = 0; i < local; ++i)
      if (vals[i] > best) {
        best = vals[i];
        argmax = pts[i];
      }
  }

  if (info) {
    info->grid_max = grid_max;
    info->refined_max = best;
    info->argmax = argmax;
    info->grid_points = static_cast<std::int64_t>(rows * Mz);
    info->offset = omega;
  }
  return best;
}

}  // namespace qvar::mult

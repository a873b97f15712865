#include "qvar/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qvar/rational_approx.hpp"

namespace qvar::mult {

std::string family_name(Family f) {
  switch (f) {
    case Family::prime: return "prime";
    case Family::poly: return "poly";
    case Family::custom: return "custom";
  }
  return "custom";
}

// ------------------------------------------------------- coefficients

struct CoefficientFamily::Cache {
  std::mutex mu;
  std::map<std::vector<std::int64_t>, cplx> values;
};

CoefficientFamily::CoefficientFamily(Family tag, int dim)
    : tag_(tag), dim_(dim), cache_(std::make_shared<Cache>()) {}

CoefficientFamily CoefficientFamily::prime() { return CoefficientFamily(Family::prime, 1); }

CoefficientFamily CoefficientFamily::poly(int d) {
  require(d >= 1, "polynomial degree must be at least 1");
  return CoefficientFamily(Family::poly, d);
}

std::string CoefficientFamily::name() const {
  return tag_ == Family::poly ? "poly(" + std::to_string(dim_) + ")" : family_name(tag_);
}

namespace {

constexpr std::int64_t kMaxPrimePower = std::int64_t{1} << 28;

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  __int128 r0 = m, r1 = a % m, s0 = 0, s1 = 1;
  while (r1 != 0) {
    const __int128 t = r0 / r1;
    const __int128 r2 = r0 - t * r1;
    r0 = r1;
    r1 = r2;
    const __int128 s2 = s0 - t * s1;
    s0 = s1;
    s1 = s2;
  }
  if (r0 != 1) throw InvalidArgument("no modular inverse");
  __int128 v = s0 % m;
  if (v < 0) v += m;
  return static_cast<std::int64_t>(v);
}

// (1/q) sum_{n mod q} e(sum_j c_j n^j / q), factored over the prime powers of q.
cplx complete_sum_crt(std::int64_t q, const std::vector<std::int64_t>& c) {
  cplx total{1.0, 0.0};
  for (auto [p, e] : arith::factorize(q)) {
    std::int64_t pk = 1;
    for (int i = 0; i < e; ++i) pk *= p;
    if (pk > kMaxPrimePower)
      throw ResourceLimit("complete sum needs a prime-power period " + std::to_string(pk) + " above 2^28");
    const std::int64_t u = q == pk ? 1 : inverse_mod((q / pk) % pk, pk);
    std::vector<std::int64_t> num, den;
    for (std::int64_t cj : c) {
      num.push_back(static_cast<std::int64_t>((static_cast<__int128>(cj % pk) * u) % pk));
      den.push_back(pk);
    }
    total *= arith::complete_poly_sum_period(pk, num, den);
  }
  return total;
}

}  // namespace

cplx CoefficientFamily::value(std::span<const std::int64_t> nums, std::span<const std::int64_t> dens) const {
  require(nums.size() == dens.size() && !nums.empty(), "coefficient point needs matching coordinates");
  if (tag_ == Family::prime) require(nums.size() == 1, "prime coefficients are only defined for d = 1");
  if (tag_ == Family::poly) require(nums.size() == static_cast<std::size_t>(dim_), "point dimension does not match the family");
  std::int64_t q = 1;
  for (std::size_t j = 0; j < dens.size(); ++j) {
    require(dens[j] >= 1 && nums[j] >= 0 && nums[j] < dens[j], "coefficient point must be reduced into [0,1)");
    q = arith::lcm(q, dens[j]);
  }
  if (tag_ == Family::custom) return 1.0;
  if (tag_ == Family::prime) {
    // |mu(q)|/phi(q) depends only on q.
    return static_cast<double>(arith::mobius_of(q)) / static_cast<double>(arith::totient_of(q));
  }
  std::vector<std::int64_t> key(nums.begin(), nums.end());
  key.insert(key.end(), dens.begin(), dens.end());
  {
    std::lock_guard lock(cache_->mu);
    const auto it = cache_->values.find(key);
    if (it != cache_->values.end()) return it->second;
  }
  std::vector<std::int64_t> c(nums.size());
  for (std::size_t j = 0; j < nums.size(); ++j) c[j] = nums[j] * (q / dens[j]);
  const cplx v = complete_sum_crt(q, c);
  std::lock_guard lock(cache_->mu);
  if (cache_->values.size() > 2'000'000) cache_->values.clear();
  cache_->values.emplace(std::move(key), v);
  return v;
}

cplx CoefficientFamily::operator()(const arith::FreqPoint& theta) const {
  std::vector<std::int64_t> nums, dens;
  for (const auto& c : theta.coords()) {
    nums.push_back(c.num());
    dens.push_back(c.den());
  }
  return value(nums, dens);
}

cplx coeffs(const CoefficientFamily& family, const arith::FreqPoint& theta) { return family(theta); }

// ------------------------------------------------------------ S_max

namespace {

int exact_level_limit(const CoefficientFamily& f) {
  if (f.tag() == Family::prime) return 20;
  switch (f.dim()) {
    case 1: return 60;
    case 2: return 8;
    case 3: return 5;
    default: return 3;
  }
}

const arith::ArithTables& prime_level_tables() {
  static const arith::ArithTables t = arith::build_tables(std::int64_t{1} << 21);
  return t;
}

// Largest |S| over points of exact height p^k, memoized per (d, p^k).
double prime_power_max(std::int64_t pk, int d) {
  static std::mutex mu;
  static std::map<std::pair<int, std::int64_t>, double> memo;
  {
    std::lock_guard lock(mu);
    const auto it = memo.find({d, pk});
    if (it != memo.end()) return it->second;
  }
  const double v = arith::max_complete_sum_at_height(pk, d);
  std::lock_guard lock(mu);
  memo[{d, pk}] = v;
  return v;
}

}  // namespace

double smax(const CoefficientFamily& family, int s) {
  require(s >= 0, "level must be non-negative");
  if (family.tag() == Family::custom) return 1.0;
  if (s > exact_level_limit(family))
    throw ResourceLimit("exact S_max at level " + std::to_string(s) + " is beyond the scan budget for " + family.name());
  const std::int64_t lo = std::int64_t{1} << s;
  const std::int64_t hi = std::int64_t{1} << (s + 1);
  double best = 0.0;
  if (family.tag() == Family::prime) {
    const auto& t = prime_level_tables();
    for (std::int64_t q = lo; q < hi; ++q)
      if (t.mu(q) != 0) best = std::max(best, 1.0 / static_cast<double>(t.phi(q)));
    return best;
  }
  const int d = family.dim();
  if (d == 1) return s == 0 ? 1.0 : 0.0;
  for (std::int64_t q = lo; q < hi; ++q) {
    double v = 1.0;
    for (auto [p, e] : arith::factorize(q)) {
      std::int64_t pk = 1;
      for (int i = 0; i < e; ++i) pk *= p;
      v *= prime_power_max(pk, d);
    }
    best = std::max(best, v);
  }
  return best;
}

TailBound tail_bound(const CoefficientFamily& family, int s_max) {
  require(s_max >= 0, "s_max must be non-negative");
  TailBound tb;
  if (family.tag() == Family::custom) {
    tb.value = 0.0;
    tb.certified = true;
    tb.method = "custom family has no level structure";
    return tb;
  }
  const int s_exact = exact_level_limit(family);
  if (family.tag() == Family::prime) {
    double sum = 0.0;
    for (int s = s_max + 1; s <= 200; ++s) {
      if (s <= s_exact) {
        sum += smax(family, s);
      } else {
        // n/phi(n) < e^gamma ln ln n + 3/ln ln n for n >= 3.
        const double lnln_hi = std::log((s + 1) * std::numbers::ln2);
        const double lnln_lo = std::log(s * std::numbers::ln2);
        const double ratio = std::exp(std::numbers::egamma) * lnln_hi + 3.0 / lnln_lo;
        sum += ratio * std::ldexp(1.0, -s);
      }
    }
    tb.value = sum;
    tb.certified = true;
    tb.method = "exact totient scan to level 20, Rosser-Schoenfeld bound beyond";
    return tb;
  }
  const int d = family.dim();
  if (d == 1) {
    tb.value = 0.0;
    tb.certified = true;
    tb.method = "complete linear sums vanish above height 1";
    return tb;
  }
  constexpr double delta = 0.05;
  const double gamma = 1.0 / d - delta;
  double C = 0.0;
  std::vector<double> exact(static_cast<std::size_t>(s_exact + 1));
  for (int s = 0; s <= s_exact; ++s) {
    exact[static_cast<std::size_t>(s)] = smax(family, s);
    C = std::max(C, exact[static_cast<std::size_t>(s)] * std::exp2(s * gamma));
  }
  double sum = 0.0;
  for (int s = s_max + 1; s <= s_exact; ++s) sum += exact[static_cast<std::size_t>(s)];
  const int first = std::max(s_max + 1, s_exact + 1);
  // C * sum_{s >= first} 2^{-s gamma}, each term also capped by 1 = trivial bound.
  const double r = std::exp2(-gamma);
  int s = first;
  for (; s < first + 400 && C * std::exp2(-s * gamma) > 1.0; ++s) sum += 1.0;
  sum += C * std::exp2(-s * gamma) / (1.0 - r);
  tb.value = sum;
  tb.certified = false;
  tb.fitted_constant = C;
  tb.method = "exact scan to level " + std::to_string(s_exact) + ", fitted C 2^{-s(1/d-0.05)} beyond";
  return tb;
}

int required_s_max(const CoefficientFamily& family, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  for (int s = 0; s <= 200; ++s)
    if (tail_bound(family, s).value <= tol) return s;
  throw ResourceLimit("no s_max up to 200 meets tail tolerance " + std::to_string(tol));
}

// ------------------------------------------------------- Bourgain sum

namespace {

double level_radius(int s) { return std::pow(10.0, -s) / 50.0; }

}  // namespace

BourgainSum::BourgainSum(int d, std::int64_t N, CoefficientFamily family, int s_lo, int s_hi)
    : d_(d), N_(N), family_(std::move(family)), s_lo_(s_lo), s_hi_(s_hi) {
  require(d >= 1, "dimension must be at least 1");
  require(N >= 1, "N must be at least 1");
  require(s_lo >= 0 && s_lo <= s_hi, "need 0 <= s_lo <= s_hi");
  if (s_hi > 60) throw ResourceLimit("levels above 60 exceed exact 64-bit arithmetic");
  if (family_.tag() == Family::prime) require(d == 1, "prime coefficients are only defined for d = 1");
  if (family_.tag() == Family::poly) require(d == family_.dim(), "family degree does not match the dimension");
}

std::vector<AxisCandidate> BourgainSum::axis_candidates(double a) const {
  std::vector<AxisCandidate> out;
  const std::int64_t q_max = (std::int64_t{1} << (s_hi_ + 1)) - 1;
  for (const auto& c : ratapprox::convergents(a, q_max)) {
    const int t = arith::level_of_height(c.q);
    const double beta = ratapprox::offset(a, c.p, c.q);
    if (std::abs(beta) >= level_radius(std::max(t, s_lo_))) continue;
    if (c.p == c.q)
      out.push_back({0, 1, beta});  // 1/1 is the point 0 of the torus
    else
      out.push_back({c.p, c.q, beta});
  }
  return out;
}

cplx BourgainSum::combine(const std::vector<const std::vector<AxisCandidate>*>& lists, int only_level) const {
  require(lists.size() == static_cast<std::size_t>(d_), "need one candidate list per coordinate");
  for (const auto* l : lists)
    if (l->empty()) return 0.0;
  cplx sum{0.0, 0.0};
  std::vector<std::size_t> idx(static_cast<std::size_t>(d_), 0);
  std::vector<std::int64_t> nums(static_cast<std::size_t>(d_)), dens(static_cast<std::size_t>(d_));
  std::vector<double> beta(static_cast<std::size_t>(d_));
  while (true) {
    std::int64_t L = 1;
    for (int j = 0; j < d_; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const auto& c = (*lists[u])[idx[u]];
      nums[u] = c.p;
      dens[u] = c.q;
      beta[u] = c.beta;
      L = arith::lcm(L, c.q);
    }
    const int s = arith::level_of_height(L);
    if (s >= s_lo_ && s <= s_hi_ && (only_level < 0 || s == only_level)) {
      const double r = level_radius(s);
      bool inside = true;
      for (double b : beta) inside = inside && std::abs(b) < r;
      if (inside) {
        const double chi = kernels::cutoff_ft(beta, std::pow(10.0, s));
        if (chi != 0.0) {
          const cplx m = kernels::cm_ft(static_cast<double>(N_), beta, d_);
          sum += family_.value(nums, dens) * m * chi;
        }
      }
    }
    int j = d_ - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == lists[static_cast<std::size_t>(j)]->size()) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return sum;
}

cplx BourgainSum::operator()(std::span<const double> alpha) const { return level_value(alpha, -1); }

cplx BourgainSum::level_value(std::span<const double> alpha, int s) const {
  require(alpha.size() == static_cast<std::size_t>(d_), "frequency dimension mismatch");
  std::vector<std::vector<AxisCandidate>> lists;
  std::vector<const std::vector<AxisCandidate>*> ptrs;
  lists.reserve(alpha.size());
  for (double a : alpha) {
    double w = a - std::floor(a);
    if (w >= 1.0) w = 0.0;
    lists.push_back(axis_candidates(w));
  }
  for (const auto& l : lists) ptrs.push_back(&l);
  return combine(ptrs, s);
}

int BourgainSum::active_terms(std::span<const double> alpha, int level) const {
  require(alpha.size() == static_cast<std::size_t>(d_), "frequency dimension mismatch");
  std::vector<std::vector<AxisCandidate>> lists;
  for (double a : alpha) {
    double w = a - std::floor(a);
    if (w >= 1.0) w = 0.0;
    lists.push_back(axis_candidates(w));
  }
  for (const auto& l : lists)
    if (l.empty()) return 0;
  int count = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d_), 0);
  std::vector<double> beta(static_cast<std::size_t>(d_));
  while (true) {
    std::int64_t L = 1;
    for (int j = 0; j < d_; ++j) {
      const auto u = static_cast<std::size_t>(j);
      L = arith::lcm(L, lists[u][idx[u]].q);
      beta[u] = lists[u][idx[u]].beta;
    }
    if (arith::level_of_height(L) == level && kernels::cutoff_ft(beta, std::pow(10.0, level)) != 0.0) ++count;
    int j = d_ - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == lists[static_cast<std::size_t>(j)].size()) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return count;
}

// ------------------------------------------------------ multipliers

TorusMultiplier::TorusMultiplier(int d, Eval f, MultiplierMeta meta) : d_(d), f_(std::move(f)), meta_(std::move(meta)) {
  require(d_ >= 1, "multiplier dimension must be at least 1");
  require(static_cast<bool>(f_), "multiplier needs an evaluator");
}

cplx TorusMultiplier::operator()(std::span<const double> alpha) const {
  require(alpha.size() == static_cast<std::size_t>(d_), "frequency dimension does not match the multiplier");
  double buf[8];
  std::vector<double> heap;
  double* w = buf;
  if (alpha.size() > 8) {
    heap.resize(alpha.size());
    w = heap.data();
  }
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    double v = alpha[j] - std::floor(alpha[j]);
    if (v >= 1.0) v = 0.0;
    w[j] = v;
  }
  return f_(std::span<const double>(w, alpha.size()));
}

cplx TorusMultiplier::operator()(std::initializer_list<double> alpha) const {
  return (*this)(std::span<const double>(alpha.begin(), alpha.size()));
}

TorusMultiplier level_multiplier(int s, std::int64_t N, const CoefficientFamily& family) {
  require(s >= 0, "level must be non-negative");
  require(N >= 1, "N must be at least 1");
  const int d = family.tag() == Family::prime ? 1 : family.dim();
  auto sum = std::make_shared<const BourgainSum>(d, N, family, s, s);
  MultiplierMeta meta;
  meta.family = family.name();
  meta.level = s;
  meta.N = N;
  meta.bound = 1.0;
  TorusMultiplier m(d, [sum](std::span<const double> a) { return (*sum)(a); }, meta);
  m.bourgain = sum;
  return m;
}

TorusMultiplier full_multiplier(std::int64_t N, int s_max, const CoefficientFamily& family, double tol) {
  require(N >= 1, "N must be at least 1");
  require(s_max >= 0, "s_max must be non-negative");
  const TailBound tb = tail_bound(family, s_max);
  if (tb.value > tol) {
    const int need = required_s_max(family, tol);
    throw ResourceLimit("tail bound " + std::to_string(tb.value) + " for s_max = " + std::to_string(s_max) +
                        " exceeds tolerance " + std::to_string(tol) + "; need s_max >= " + std::to_string(need));
  }
  const int d = family.tag() == Family::prime ? 1 : family.dim();
  auto sum = std::make_shared<const BourgainSum>(d, N, family, 0, s_max);
  MultiplierMeta meta;
  meta.family = family.name();
  meta.level = -1;
  meta.N = N;
  meta.bound = static_cast<double>(s_max + 1);
  meta.tail = tb.value;
  meta.tail_certified = tb.certified;
  TorusMultiplier m(d, [sum](std::span<const double> a) { return (*sum)(a); }, meta);
  m.bourgain = sum;
  return m;
}

TorusMultiplier kernel_multiplier(const kernels::DiscreteKernel& K) {
  auto k = std::make_shared<const kernels::DiscreteKernel>(K);
  MultiplierMeta meta;
  meta.family = "custom";
  meta.bound = 0.0;
  for (double w : K.weights) meta.bound += std::abs(w);
  TorusMultiplier m(K.dim, [k](std::span<const double> a) { return kernels::kernel_ft(*k, a); }, meta);
  m.kernel = k;
  return m;
}

}  // namespace qvar::mult

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "qvar/kernels.hpp"

using namespace qvar;
using namespace qvar::kernels;

namespace {

// Composite Simpson on (1/t) int_0^t e(sum beta_j s^j) ds; slow but independent.
cplx average_simpson(double t, const std::vector<double>& beta, int panels) {
  auto f = [&](double s) {
    double ph = 0.0, sp = 1.0;
    for (double b : beta) {
      sp *= s;
      ph += b * sp;
    }
    return std::exp(cplx{0.0, kTwoPi * ph});
  };
  const double h = t / panels;
  cplx acc = f(0.0) + f(t);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0 / t;
}

}  // namespace

TEST_CASE("prime kernel") {
  const auto tables = arith::build_tables(200);
  CHECK(prime_kernel(1, tables).size() == 0);
  const auto k3 = prime_kernel(3, tables);
  REQUIRE(k3.size() == 2);
  CHECK(k3.point(0)[0] == 2);
  CHECK(k3.weights[0] == doctest::Approx(std::log(2.0) / 3));
  CHECK(k3.point(1)[0] == 3);
  CHECK(k3.weights[1] == doctest::Approx(std::log(3.0) / 3));
  double psi100 = 0.0;
  for (int n = 2; n <= 100; ++n) {
    int m = n, p = 2;
    while (m % p) ++p;
    while (m % p == 0) m /= p;
    if (m == 1) psi100 += std::log(static_cast<double>(p));
  }
  CHECK(prime_kernel(100, tables).mass() == doctest::Approx(psi100 / 100));
  CHECK_THROWS_AS(prime_kernel(500, tables), InvalidArgument);
  const double a0 = 0.0;
  CHECK(kernel_ft(prime_kernel(4, tables), {&a0, 1}).real() == doctest::Approx((2 * std::log(2.0) + std::log(3.0)) / 4));
}

TEST_CASE("polynomial kernel") {
  const auto k = poly_kernel(2, 2);
  REQUIRE(k.size() == 2);
  CHECK(k.point(0)[0] == 1);
  CHECK(k.point(0)[1] == 1);
  CHECK(k.point(1)[0] == 2);
  CHECK(k.point(1)[1] == 4);
  CHECK(k.weights[1] == 0.5);
  const auto k1 = poly_kernel(3, 1);
  CHECK(k1.size() == 3);
  for (double w : k1.weights) CHECK(w == doctest::Approx(1.0 / 3));
  for (int d = 1; d <= 4; ++d) CHECK(poly_kernel(17, d).mass() == doctest::Approx(1.0));
  CHECK_THROWS_AS(poly_kernel(10, 5), Unsupported);
  CHECK_THROWS_AS(poly_kernel(3'000'000, 4), InvalidArgument);
  const double half = 0.5;
  CHECK(std::abs(kernel_ft(poly_kernel(2, 1), {&half, 1})) < 1e-15);
}

TEST_CASE("kernel transform is bounded and periodic") {
  const auto tables = arith::build_tables(500);
  const auto K = prime_kernel(500, tables);
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double a = u(g);
    const double b = a + 3.0;
    CHECK(std::abs(kernel_ft(K, {&a, 1})) <= K.mass() + 1e-12);
    CHECK(std::abs(kernel_ft(K, {&a, 1}) - kernel_ft(K, {&b, 1})) < 1e-10);
  }
  // psi(N)/N tends to 1
  const auto big = arith::build_tables(1 << 16);
  const double lo = prime_kernel(1 << 8, big).mass();
  const double hi = prime_kernel(1 << 16, big).mass();
  CHECK(std::abs(hi - 1.0) < std::abs(lo - 1.0));
  CHECK(std::abs(hi - 1.0) < 0.02);
}

TEST_CASE("kernel csv") {
  std::ostringstream os;
  write_kernel_csv(os, poly_kernel(2, 2));
  const auto s = os.str();
  CHECK(s.find("x1,x2,weight") != std::string::npos);
  CHECK(s.find("2,4,0.5") != std::string::npos);
}

TEST_CASE("convolution") {
  const auto K = poly_kernel(4, 2);
  const auto d = convolve(Sequence::delta({0, 0}), K);
  for (std::size_t i = 0; i < K.size(); ++i) CHECK(std::abs(d.at(K.point(i)) - 0.25) < 1e-15);
  CHECK(d.l1() == doctest::Approx(1.0));

  // f = 1 on a big window: interior equals the mass
  auto ones = Sequence::zeros({-50}, {200});
  for (auto& v : ones.values) v = 1.0;
  const auto tables = arith::build_tables(100);
  const auto P = prime_kernel(20, tables);
  const auto c = convolve(ones, P);
  const std::int64_t x = 60;
  CHECK(std::abs(c.at({&x, 1}) - P.mass()) < 1e-13);

  // random inputs against a map-based direct sum, both methods
  std::mt19937_64 g(9);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + trial % 2;
    auto f = dim == 1 ? Sequence::zeros({-3}, {64}) : Sequence::zeros({2, -4}, {8, 8});
    for (auto& v : f.values) v = cplx{n01(g), n01(g)};
    const auto Kk = dim == 1 ? prime_kernel(37, tables) : poly_kernel(5, 2);
    std::map<std::vector<std::int64_t>, cplx> oracle;
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t k = 0; k < Kk.size(); ++k) {
        auto y = f.coords(i);
        for (int j = 0; j < dim; ++j) y[static_cast<std::size_t>(j)] += Kk.point(k)[static_cast<std::size_t>(j)];
        oracle[y] += Kk.weights[k] * f.values[i];
      }
    double scale = 0.0;
    for (const auto& [y, v] : oracle) scale = std::max(scale, std::abs(v));
    for (auto method : {ConvMethod::direct, ConvMethod::fft}) {
      const auto out = convolve(f, Kk, method);
      double err = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto y = out.coords(i);
        const auto it = oracle.find(y);
        err = std::max(err, std::abs(out.values[i] - (it == oracle.end() ? cplx{} : it->second)));
      }
      CHECK(err <= 1e-10 * scale);
    }
  }
}

TEST_CASE("continuous average transform") {
  const std::vector<double> zero{0.0, 0.0};
  CHECK(std::abs(cm_ft(7.0, zero, 2) - 1.0) < 1e-15);
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> ut(0.5, 500.0), ub(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double t = ut(g), b = ub(g);
    const cplx closed = (std::exp(cplx{0, kTwoPi * t * b}) - 1.0) / cplx{0, kTwoPi * t * b};
    CHECK(std::abs(cm_ft(t, {&b, 1}, 1) - closed) < 1e-8);
  }
  // d = 2, 3 against brute-force Simpson at moderate phases
  for (int i = 0; i < 20; ++i) {
    const double t = 1.0 + 9.0 * i / 20.0;
    const std::vector<double> b2{ub(g) / t, ub(g) / (t * t)};
    CHECK(std::abs(cm_ft(t, b2, 2) - average_simpson(t, b2, 20000)) < 1e-8);
    const std::vector<double> b3{ub(g) / t, ub(g) / (t * t), ub(g) / (t * t * t)};
    CHECK(std::abs(cm_ft(t, b3, 3) - average_simpson(t, b3, 20000)) < 1e-8);
  }
  // |m| <= 1 and decay like |beta_2|^{-1/2} / N for d = 2
  const double N = 256.0;
  double C = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double b2 = std::pow(N, -2.0 + 2.0 * i / 200.0);
    const std::vector<double> b{0.0, b2};
    const double v = std::abs(cm_ft(N, b, 2));
    CHECK(v <= 1.0 + 1e-12);
    C = std::max(C, v * std::sqrt(b2) * N);
  }
  MESSAGE("oscillatory decay constant for d=2: " << C);
  CHECK(C < 2.0);
}

TEST_CASE("cutoff") {
  const std::vector<double> z{0.0, 0.0};
  CHECK(cutoff_ft(z) == 1.0);
  const std::vector<double> edge{1.0 / 40, 0.0};
  CHECK(cutoff_ft(edge) == 0.0);
  const std::vector<double> plateau{0.01, -0.01};
  CHECK(cutoff_ft(plateau) == 1.0);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> xi{u(g), u(g)};
    const double v = cutoff_ft(xi, 3.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const std::vector<double> scaled{3.0 * xi[0], 3.0 * xi[1]};
    CHECK(v == cutoff_ft(scaled, 1.0));
  }
  // chi(0) is the integral of the profile; Simpson on [-1/50, 1/50]
  double acc = 0.0;
  const int P = 4000;
  const double h = 0.04 / P;
  for (int i = 0; i <= P; ++i) {
    const double w = (i == 0 || i == P) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * cutoff_profile(-0.02 + i * h);
  }
  acc *= h / 3.0;
  const double x0 = 0.0;
  CHECK(cutoff_spatial({&x0, 1}) == doctest::Approx(acc).epsilon(1e-9));
  const double x1 = 40.0;
  CHECK(cutoff_spatial({&x1, 1}, 2.0) == doctest::Approx(cutoff_spatial(std::vector<double>{20.0}) / 2.0));
}

TEST_CASE("L2 norm of exponential sums") {
  const std::vector<std::pair<double, double>> box{{0.0, 3.0}};
  CHECK(exp_sum_l2_norm(box, {{0.37}}, {cplx{1.0, 0.0}}) == doctest::Approx(std::sqrt(3.0)));
  const std::vector<std::pair<double, double>> unit{{0.0, 1.0}};
  const std::vector<std::vector<double>> ints{{0.0}, {1.0}, {2.0}, {5.0}};
  const std::vector<cplx> c{{1, 2}, {-1, 0.5}, {0.3, 0}, {0, -2}};
  double l2 = 0.0;
  for (auto v : c) l2 += std::norm(v);
  CHECK(exp_sum_l2_norm(unit, ints, c) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));

  // general case against midpoint sums on a 2-d box
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::vector<std::pair<double, double>> box2{{-0.5, 1.0}, {0.25, 2.0}};
  std::vector<std::vector<double>> fr(5);
  std::vector<cplx> cc(5);
  for (int k = 0; k < 5; ++k) {
    fr[static_cast<std::size_t>(k)] = {u(g), u(g)};
    cc[static_cast<std::size_t>(k)] = {u(g), u(g)};
  }
  const int M = 600;
  double acc = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double y1 = -0.5 + 1.5 * (i + 0.5) / M;
      const double y2 = 0.25 + 1.75 * (j + 0.5) / M;
      cplx s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += cc[k] * std::exp(cplx{0, kTwoPi * (fr[k][0] * y1 + fr[k][1] * y2)});
      acc += std::norm(s);
    }
  acc *= 1.5 * 1.75 / (M * M);
  CHECK(std::abs(exp_sum_l2_norm(box2, fr, cc) - std::sqrt(acc)) < 1e-3);

  // separated frequencies: ratio to |I|^{1/2} ||c|| stays bounded
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> f2;
    std::vector<cplx> c2;
    double n2 = 0.0;
    for (int k = 0; k < 8; ++k) {
      f2.push_back({k + 0.2 * u(g) / 3.0});
      c2.push_back({u(g), u(g)});
      n2 += std::norm(c2.back());
    }
    worst = std::max(worst, exp_sum_l2_norm(unit, f2, c2) / std::sqrt(n2));
  }
  MESSAGE("almost-orthogonality constant over 100 trials: " << worst);
  CHECK(worst < 2.0);
  CHECK_THROWS_AS(exp_sum_l2_norm(unit, ints, {cplx{1, 0}}), InvalidArgument);
}

TEST_CASE("minor arc decay of the prime sum") {
  const auto tables = arith::build_tables(1 << 14);
  double C = 0.0;
  for (int k = 10; k <= 14; ++k) {
    const std::int64_t N = std::int64_t{1} << k;
    const auto K = prime_kernel(N, tables);
    const auto q = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(N)))) | 1;
    const double alpha = 1.0 / static_cast<double>(q) + 1.0 / static_cast<double>(q * q);
    const double L = std::log(static_cast<double>(N));
    const double bound = (std::pow(N, -0.25) + std::pow(N, -0.2)) * std::pow(L, 4);
    C = std::max(C, std::abs(kernel_ft(K, {&alpha, 1})) / bound);
  }
  MESSAGE("minor-arc constant: " << C);
  CHECK(std::isfinite(C));
  CHECK(C < 1.0);
}

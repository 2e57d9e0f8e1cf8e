#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dnlab/numerics.hpp"
#include "dnlab/scaled_real.hpp"
#include "oracles.hpp"

using namespace dnlab;
using std::numbers::pi;

namespace {

template <class F>
SampledFn1D sample(std::size_t n, F&& fn) {
  Grid1D g(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = fn(g.x(i));
  return SampledFn1D(g, std::move(v));
}

}  // namespace

TEST_CASE("grid endpoints and spacing") {
  Grid1D g(101);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(100) == 1.0);
  CHECK(g.spacing() == doctest::Approx(0.01).epsilon(1e-15));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.x(i) > g.x(i - 1));
  CHECK_THROWS_AS(Grid1D(2), InvalidInput);
}

TEST_CASE("sampled functions reject bad input") {
  CHECK_THROWS_AS(SampledFn1D(Grid1D(5), {1, 2, 3}), InvalidInput);
  CHECK_THROWS_AS(SampledFn1D(Grid1D(3), {1, NAN, 3}), InvalidInput);
}

TEST_CASE("quad") {
  CHECK(quad(sample(101, [](double) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(quad(sample(101, [](double x) { return x; })) == doctest::Approx(0.5).epsilon(1e-15));
  // Even point count exercises the trapezoid panel.
  CHECK(quad(sample(100, [](double x) { return x; })) == doctest::Approx(0.5).epsilon(1e-14));

  auto s = [](double x) { return std::sin(pi * x); };
  const double ref = oracle::integrate(s, 0.0, 1.0);
  CHECK(std::fabs(quad(sample(401, s)) - ref) < 1e-9);
  CHECK(std::fabs(ref - 2.0 / pi) < 1e-14);
}

TEST_CASE("quad is linear") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> f(257), g(257), h(257);
    const double a = u(rng), b = u(rng);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = u(rng);
      g[i] = u(rng);
      h[i] = a * f[i] + b * g[i];
    }
    const Grid1D grid(257);
    const double lhs = quad(SampledFn1D(grid, h));
    const double rhs = a * quad(SampledFn1D(grid, f)) + b * quad(SampledFn1D(grid, g));
    const double scale = std::fabs(a) * quad(SampledFn1D(grid, f)) + 1.0;
    CHECK(std::fabs(lhs - rhs) <= 1e-13 * scale);
  }
}

TEST_CASE("cumquad_from_right") {
  auto one = cumquad_from_right(sample(101, [](double) { return 1.0; }));
  for (std::size_t i = 0; i < one.size(); ++i)
    CHECK(one[i] == doctest::Approx(1.0 - one.grid().x(i)).epsilon(1e-13));
  CHECK(one[100] == 0.0);

  auto zero = cumquad_from_right(sample(50, [](double) { return 0.0; }));
  CHECK(zero.sup_abs() == 0.0);

  auto lin = cumquad_from_right(sample(401, [](double x) { return 2.0 * x; }));
  for (std::size_t i = 0; i < lin.size(); ++i) {
    const double x = lin.grid().x(i);
    CHECK(std::fabs(lin[i] - (1.0 - x * x)) < 1e-9);
  }

  for (std::size_t n : {101u, 100u, 2001u}) {
    auto f = sample(n, [](double x) { return std::exp(x) * std::cos(3 * x); });
    CHECK(cumquad_from_right(f)[0] == doctest::Approx(quad(f)).epsilon(1e-12));
  }
}

TEST_CASE("diff2_central") {
  auto q = diff2_central(sample(11, [](double x) { return x * x; }));
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(q[i] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(diff2_central(sample(11, [](double) { return 3.0; })).sup_abs() < 1e-9);

  auto s = diff2_central(sample(801, [](double x) { return std::sin(2 * pi * x); }));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s.grid().x(i);
    CHECK(std::fabs(s[i] + 4 * pi * pi * std::sin(2 * pi * x)) < 1e-3);
  }
  CHECK_THROWS_AS(diff2_central(sample(4, [](double x) { return x; })), InvalidInput);
}

TEST_CASE("analytic families carry exact derivatives") {
  const AnalyticFn g(GaussianTerm{3.0, 40.0, 0.4});
  const double x = 0.31, h = 1e-5;
  CHECK(g.d1(x) == doctest::Approx((g.value(x + h) - g.value(x - h)) / (2 * h)).epsilon(1e-8));
  CHECK(g.d2(x) ==
        doctest::Approx((g.value(x + h) - 2 * g.value(x) + g.value(x - h)) / (h * h)).epsilon(1e-5));

  const AnalyticFn four(FourierTerm{0.5, {1.0, 0.2}, {0.3}});
  CHECK(four.value(0.25) == doctest::Approx(0.5 + std::cos(pi / 4) + 0.2 * std::cos(pi / 2) +
                                            0.3 * std::sin(pi / 4)));
  CHECK(four.d2(0.25) == doctest::Approx(-pi * pi * std::cos(pi / 4) -
                                         4 * pi * pi * 0.2 * std::cos(pi / 2) -
                                         pi * pi * 0.3 * std::sin(pi / 4)));

  const AnalyticFn poly(PolynomialTerm{{1.0, 0.2}});
  CHECK(poly.value(1.0) == doctest::Approx(1.2));
  CHECK(poly.d1(0.3) == doctest::Approx(0.2));
  CHECK(poly.d2(0.3) == 0.0);

  const Function1D e = AnalyticFn(ExponentialTerm{2.0, 0.5});
  CHECK(e.exact_derivatives());
  CHECK(e.d2(0.7) == doctest::Approx(0.5 * std::exp(0.35)));
}

TEST_CASE("spline-backed functions interpolate samples") {
  auto s = sample(2001, [](double x) { return std::sin(3 * x); });
  const Function1D f = Function1D::from_samples(s);
  CHECK_FALSE(f.exact_derivatives());
  REQUIRE(f.samples() != nullptr);
  CHECK(std::fabs(f(0.12345) - std::sin(3 * 0.12345)) < 1e-12);
  CHECK(std::fabs(f.d2(0.5) + 9 * std::sin(1.5)) < 1e-4);
}

TEST_CASE("ScaledReal round trip and range") {
  for (double v : {0.0, 1.0, -3.5, 1e-300, 1.7e308, 5e-324}) {
    CHECK(ScaledReal::from_double(v).to_double() == v);
  }
  const ScaledReal big = ScaledReal::from_parts(1.5, 5000);
  CHECK(std::isinf(big.to_double()));
  CHECK(ratio(big, ScaledReal::from_parts(1.5, 4999)) == 2.0);
  CHECK((big * ScaledReal::from_parts(1.0, -5000)).to_double() == 1.5);
  CHECK(big.log_abs() == doctest::Approx(std::log(1.5) + 5000 * std::log(2.0)));
  CHECK(ScaledReal::from_double(0.0).is_zero());
  CHECK(ScaledReal::from_double(-2.0) < ScaledReal::from_double(1.0));
}

TEST_CASE("ScaledReal arithmetic agrees with extended precision") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mant(-2.0, 2.0);
  std::uniform_int_distribution<int> ex(-200, 200);
  int bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = std::ldexp(mant(rng), ex(rng));
    const double b = std::ldexp(mant(rng), ex(rng) / 8);
    const long double prod = static_cast<long double>(a) * b;
    const long double sum = static_cast<long double>(a) + b;
    const double sp = (ScaledReal::from_double(a) * ScaledReal::from_double(b)).to_double();
    const double ss = (ScaledReal::from_double(a) + ScaledReal::from_double(b)).to_double();
    const double ulp_p = std::fabs(static_cast<double>(prod)) * std::ldexp(1.0, -52);
    const double ulp_s = std::fabs(static_cast<double>(sum)) * std::ldexp(1.0, -52);
    if (std::fabs(sp - static_cast<double>(prod)) > ulp_p) ++bad;
    if (std::fabs(ss - static_cast<double>(sum)) > ulp_s) ++bad;
  }
  CHECK(bad == 0);
}

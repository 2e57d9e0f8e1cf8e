#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

namespace oracle {

double integrate(const Fn& fn, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(fn, a, b, 15, 1e-14);
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fd_solve(const Fn& q, int points) {
  const int m = points - 2;
  const double h = 1.0 / (points - 1);
  Eigen::VectorXd diag(m), sub(m - 1);
  for (int i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) + q((i + 1) * h);
  sub.setConstant(-1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("fd oracle: tridiagonal QR failed");
  return es;
}

}  // namespace

std::vector<double> fd_eigenvalues(const Fn& q, int count, int points) {
  const auto es = fd_solve(q, points);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

std::vector<double> fd_eigenvalues_extrapolated(const Fn& q, int count) {
  const auto fine = fd_eigenvalues(q, count, 4001);
  const auto coarse = fd_eigenvalues(q, count, 2001);
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

std::vector<double> fd_eigenvector(const Fn& q, int k, int points) {
  // Inverse iteration with the tridiagonal (Thomas) solve, shifted just below
  // the k-th eigenvalue.
  const double lam = fd_eigenvalues(q, k, points).back();
  const int m = points - 2;
  const double h = 1.0 / (points - 1);
  const double off = -1.0 / (h * h);
  const double shift = lam * (1.0 - 1e-10) - 1e-10;
  std::vector<double> diag(m), v(m, 1.0), cp(m), dp(m);
  for (int i = 0; i < m; ++i) {
    diag[i] = 2.0 / (h * h) + q((i + 1) * h) - shift;
    v[i] = std::sin(k * 3.141592653589793 * (i + 1) * h) + 1e-3;
  }
  for (int it = 0; it < 6; ++it) {
    cp[0] = off / diag[0];
    dp[0] = v[0] / diag[0];
    for (int i = 1; i < m; ++i) {
      const double den = diag[i] - off * cp[i - 1];
      cp[i] = off / den;
      dp[i] = (v[i] - off * dp[i - 1]) / den;
    }
    v[m - 1] = dp[m - 1];
    for (int i = m - 2; i >= 0; --i) v[i] = dp[i] - cp[i] * v[i + 1];
    double nrm = 0.0;
    for (double x : v) nrm = std::max(nrm, std::fabs(x));
    for (double& x : v) x /= nrm;
  }
  std::vector<double> out(points, 0.0);
  double norm2 = 0.0;
  for (int i = 0; i < m; ++i) {
    out[i + 1] = v[i];
    norm2 += v[i] * v[i] * h;
  }
  const double s = (out[1] > 0.0 ? 1.0 : -1.0) / std::sqrt(norm2);
  for (double& x : out) x *= s;
  return out;
}

std::vector<double> radial_gauge_shooting(const Fn& f, int n, double lambda,
                                          double w0, double w1, int points) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;  // (w, P = f^{2n-4} w')
  const double p = (n + 2.0) / (n - 2.0);
  auto rhs = [&](const State& s, State& ds, double x) {
    const double fx = f(x);
    ds[0] = s[1] / std::pow(fx, 2 * n - 4);
    ds[1] = -std::pow(fx, 2 * n) * lambda * (s[0] - std::copysign(std::pow(std::fabs(s[0]), p), s[0]));
  };
  const double h = 1.0 / (points - 1);
  auto shoot = [&](double slope, std::vector<double>* trace) {
    State s{w0, std::pow(f(0.0), 2 * n - 4) * slope};
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) xs[i] = i + 1 == points ? 1.0 : i * h;
    std::vector<double> vals;
    ode::integrate_times(stepper, rhs, s, xs.begin(), xs.end(), h,
                         [&](const State& st, double) { vals.push_back(st[0]); });
    if (trace) *trace = vals;
    return vals.back() - w1;
  };
  // w(1) increases with the slope. Walk outward from the chord slope; a shot
  // that blows up through w^p has overshot, so pull the end back until finite.
  auto miss = [&](double s) { return shoot(s, nullptr); };
  const double s0 = w1 - w0;
  auto walk = [&](double dir) {
    double prev = s0, cur = s0, step = 0.05;
    for (int i = 0; i < 200; ++i) {
      const double m = miss(cur);
      if (!std::isfinite(m)) {
        cur = 0.5 * (cur + prev);
        continue;
      }
      if (dir * m >= 0.0) return cur;
      prev = cur;
      cur += dir * step;
      step *= 2.0;
    }
    throw std::runtime_error("radial shooting: no bracket");
  };
  const double lo = walk(-1.0), hi = walk(1.0);
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      miss, lo, hi,
      boost::math::tools::eps_tolerance<double>(50), iters);
  std::vector<double> out;
  shoot(0.5 * (root.first + root.second), &out);
  return out;
}

}  // namespace oracle

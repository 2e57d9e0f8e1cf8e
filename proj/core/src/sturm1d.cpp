#include "dnlab/sturm1d.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnlab::sturm {

Potential1D::Potential1D(Function1D q, Grid1D grid)
    : q_(std::move(q)), grid_(grid), samples_(q_.sample(grid_)) {
  min_ = samples_.min();
  max_ = samples_.max();
}

Potential1D::Potential1D(SampledFn1D samples)
    : Potential1D(Function1D::from_samples(samples), samples.grid()) {}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

/// Adaptive integration of independent pairs (v, v') with v'' = (Q + mu) v.
/// The state carries a shared binary exponent so growing solutions never
/// overflow.
template <std::size_t N>
class Shooter {
 public:
  using State = std::array<double, N>;

  Shooter(const Potential1D& q, double mu, const IntegratorOptions& opts)
      : q_(q), mu_(mu), opts_(opts) {
    if (!std::isfinite(mu)) throw InvalidInput("integrate_fss: non-finite mu");
    const double scale = std::sqrt(std::fabs(mu) + std::max(std::fabs(q.min()), std::fabs(q.max())));
    h_ = 0.05 / (1.0 + scale);
  }

  std::size_t steps() const { return steps_; }

  /// Advances y (true value y * 2^e) from x0 to x1; obs(x, y, e) after each
  /// accepted step.
  template <class Observer>
  void advance(double x0, double x1, State& y, std::int64_t& e, Observer&& obs) {
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    const double span = std::fabs(x1 - x0);
    if (span == 0.0) return;
    double x = x0;
    double k1g = q_(x) + mu_;
    State k1 = deriv(y, k1g);
    while (dir * (x1 - x) > 0.0) {
      if (++steps_ > opts_.max_steps) throw NumericalFailure("integrate_fss: step budget exhausted");
      double h = std::min(h_, std::fabs(x1 - x));
      bool last = h >= std::fabs(x1 - x) * (1.0 - 1e-14);
      if (last) h = std::fabs(x1 - x);
      if (h < 1e-15 * std::max(1.0, span) && !last)
        throw NumericalFailure("integrate_fss: step size underflow at x = " + std::to_string(x));
      const double hs = dir * h;

      State tmp, k2, k3, k4, k5, k6, k7, ynew;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
      k2 = deriv(tmp, q_(x + c2 * hs) + mu_);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      k3 = deriv(tmp, q_(x + c3 * hs) + mu_);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = deriv(tmp, q_(x + c4 * hs) + mu_);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = deriv(tmp, q_(x + c5 * hs) + mu_);
      const double xend = last ? x1 : x + hs;
      const double gend = q_(xend) + mu_;
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = deriv(tmp, gend);
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      k7 = deriv(ynew, gend);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double ei =
            hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opts_.atol + opts_.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
        err = std::max(err, std::fabs(ei) / sc);
      }
      if (!std::isfinite(err)) throw NumericalFailure("integrate_fss: non-finite state");

      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        x = xend;
        y = ynew;
        k1 = k7;
        double mag = 0.0;
        for (double v : y) mag = std::max(mag, std::fabs(v));
        if (mag > std::ldexp(1.0, opts_.renorm_bits)) {
          for (double& v : y) v = std::ldexp(v, -opts_.renorm_bits);
          for (double& v : k1) v = std::ldexp(v, -opts_.renorm_bits);
          e += opts_.renorm_bits;
        }
        obs(x, y, e);
        // A clamped final step says nothing about the natural step size.
        if (!last) h_ = h * factor;
      } else {
        h_ = h * std::max(factor, 0.2);
      }
    }
  }

 private:
  State deriv(const State& y, double g) const {
    State d;
    for (std::size_t i = 0; i < N; i += 2) {
      d[i] = y[i + 1];
      d[i + 1] = g * y[i];
    }
    return d;
  }

  const Potential1D& q_;
  double mu_;
  IntegratorOptions opts_;
  double h_;
  std::size_t steps_ = 0;
};

ScaledReal scaled(double mantissa, std::int64_t e) { return ScaledReal::from_parts(mantissa, e); }

template <std::size_t N>
struct SupTracker {
  std::size_t index;
  ScaledReal sup;
  void operator()(double, const std::array<double, N>& y, std::int64_t e) {
    const ScaledReal v = scaled(std::fabs(y[index]), e);
    if (v > sup) sup = v;
  }
};

/// Runs a 4-state (c, c', s, s') launch from `from` to `to`; records node values
/// when `traj` is non-null.
std::array<double, 4> launch_pair(const Potential1D& q, double mu, double from, double to,
                                  std::int64_t& e, ScaledReal* s_sup, PairTrajectory* traj,
                                  const IntegratorOptions& opts) {
  Shooter<4> shooter(q, mu, opts);
  std::array<double, 4> y{1.0, 0.0, 0.0, 1.0};
  e = 0;
  SupTracker<4> sup{2, ScaledReal{}};
  if (!traj) {
    shooter.advance(from, to, y, e, sup);
  } else {
    const Grid1D& g = q.grid();
    const std::size_t n = g.size();
    traj->state.assign(n, {});
    traj->exponent.assign(n, 0);
    const bool forward = to > from;
    std::size_t idx = forward ? 0 : n - 1;
    traj->state[idx] = y;
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t next = forward ? idx + 1 : idx - 1;
      shooter.advance(g.x(idx), g.x(next), y, e, sup);
      traj->state[next] = y;
      traj->exponent[next] = e;
      idx = next;
    }
  }
  if (s_sup) *s_sup = sup.sup;
  return y;
}

}  // namespace

double FssAtMu::max_wronskian_deviation() const {
  if (!from_left || !from_right)
    throw InvalidInput("max_wronskian_deviation: trajectories were not kept");
  double worst = 0.0;
  for (const PairTrajectory* t : {&*from_left, &*from_right}) {
    for (std::size_t i = 0; i < t->state.size(); ++i) {
      const auto& s = t->state[i];
      const std::int64_t e = t->exponent[i];
      const ScaledReal cs = scaled(s[0], e) * scaled(s[3], e);
      const ScaledReal dcs = scaled(s[1], e) * scaled(s[2], e);
      const ScaledReal dev = (cs - dcs - ScaledReal::from_double(1.0)).abs();
      ScaledReal scale = ScaledReal::from_double(1.0);
      scale = std::max({scale, cs.abs(), dcs.abs()});
      worst = std::max(worst, ratio(dev, scale));
    }
  }
  return worst;
}

FssAtMu integrate_fss(const Potential1D& q, double mu, bool keep_trajectories,
                      const IntegratorOptions& opts) {
  FssAtMu out;
  out.mu = mu;
  std::int64_t e = 0;
  PairTrajectory left, right;
  auto y = launch_pair(q, mu, 0.0, 1.0, e, &out.s0_sup, keep_trajectories ? &left : nullptr, opts);
  out.c0_1 = scaled(y[0], e);
  out.dc0_1 = scaled(y[1], e);
  out.s0_1 = scaled(y[2], e);
  out.ds0_1 = scaled(y[3], e);
  y = launch_pair(q, mu, 1.0, 0.0, e, nullptr, keep_trajectories ? &right : nullptr, opts);
  out.c1_0 = scaled(y[0], e);
  out.dc1_0 = scaled(y[1], e);
  out.s1_0 = scaled(y[2], e);
  out.ds1_0 = scaled(y[3], e);
  if (keep_trajectories) {
    out.from_left = std::move(left);
    out.from_right = std::move(right);
  }
  return out;
}

SpectralFunctions spectral_functions(const Potential1D& q, double mu, double hit_threshold,
                                     const IntegratorOptions& opts) {
  const FssAtMu fss = integrate_fss(q, mu, false, opts);
  SpectralFunctions sf;
  sf.mu = mu;
  // Cauchy data at the far endpoint collapse the Wronskians to single values:
  // W(s0,s1)(1) = s0(1), W(c0,s1)(1) = c0(1), W(c1,s0)(0) = c1(0).
  sf.delta = fss.s0_1;
  sf.d = fss.c0_1;
  sf.e = -fss.c1_0;
  sf.margin = fss.s0_sup.is_zero() ? 0.0 : ratio(sf.delta.abs(), fss.s0_sup);
  if (sf.delta.is_zero() || sf.margin < hit_threshold) {
    std::ostringstream os;
    os << "spectral_functions: eigenvalue hit at mu = " << mu << " (|Delta|/sup|s0| = " << sf.margin
       << ")";
    throw NumericalFailure(os.str());
  }
  sf.m = -ratio(sf.d, sf.delta);
  sf.n = ratio(sf.e, sf.delta);
  return sf;
}

ScaledReal characteristic(const Potential1D& q, double mu, const IntegratorOptions& opts) {
  Shooter<2> shooter(q, mu, opts);
  std::array<double, 2> y{0.0, 1.0};
  std::int64_t e = 0;
  shooter.advance(0.0, 1.0, y, e, [](double, const auto&, std::int64_t) {});
  return scaled(y[0], e);
}

int count_eigenvalues_below(const Potential1D& q, double lambda, const IntegratorOptions& opts) {
  Shooter<2> shooter(q, -lambda, opts);
  std::array<double, 2> y{0.0, 1.0};
  std::int64_t e = 0;
  // Pruefer phase theta = atan2(v, v'), unwrapped step by step. Rescaling
  // both components by 2^k leaves the angle unchanged.
  double theta = 0.0;
  double pv = 0.0, pp = 1.0;
  shooter.advance(0.0, 1.0, y, e, [&](double, const std::array<double, 2>& s, std::int64_t) {
    const double cross = pp * s[0] - pv * s[1];
    const double dot = pp * s[1] + pv * s[0];
    theta += std::atan2(cross, dot);
    // Keep the previous vector O(1) so cross/dot never overflow.
    const double norm = std::hypot(s[0], s[1]);
    pv = s[0] / norm;
    pp = s[1] / norm;
  });
  return static_cast<int>(std::ceil(theta / std::numbers::pi)) - 1;
}

namespace {

/// Sign- and zero-preserving compression of a scaled value to a double.
double squash(const ScaledReal& v) {
  if (v.is_zero()) return 0.0;
  const double la = v.log_abs();
  const double mag = la < 600.0 ? std::log1p(std::exp(la)) : la;
  return v.sign() * mag;
}

}  // namespace

double dirichlet_eigenvalue(const Potential1D& q, int index, double rel_tol,
                            const IntegratorOptions& opts) {
  if (index < 1) throw InvalidInput("dirichlet_eigenvalue: index must be >= 1");
  const double base = static_cast<double>(index) * index * std::numbers::pi * std::numbers::pi;
  const double pad = 1.0 + 0.01 * (q.max() - q.min());
  double lo = base + q.min() - pad;
  double hi = base + q.max() + pad;
  int clo = count_eigenvalues_below(q, lo, opts);
  int chi = count_eigenvalues_below(q, hi, opts);
  for (int widen = 0; (clo > index - 1 || chi < index) && widen < 40; ++widen) {
    const double w = hi - lo;
    if (clo > index - 1) clo = count_eigenvalues_below(q, lo -= w, opts);
    if (chi < index) chi = count_eigenvalues_below(q, hi += w, opts);
  }
  if (clo > index - 1 || chi < index) {
    std::ostringstream os;
    os << "dirichlet_eigenvalue: could not bracket eigenvalue " << index << " in window [" << lo
       << ", " << hi << "] (counts " << clo << ", " << chi << ")";
    throw NumericalFailure(os.str());
  }
  // Isolate the index-th eigenvalue by phase counting.
  for (int it = 0; !(clo == index - 1 && chi == index); ++it) {
    if (it > 200) {
      std::ostringstream os;
      os << "dirichlet_eigenvalue: bisection failed to isolate eigenvalue " << index
         << " in window [" << lo << ", " << hi << "]";
      throw NumericalFailure(os.str());
    }
    const double mid = 0.5 * (lo + hi);
    const int c = count_eigenvalues_below(q, mid, opts);
    if (c >= index) {
      hi = mid;
      chi = c;
    } else {
      lo = mid;
      clo = c;
    }
  }
  // Exactly one simple zero of lambda -> Delta(-lambda) in [lo, hi].
  auto g = [&](double lambda) { return squash(characteristic(q, -lambda, opts)); };
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) {
    std::ostringstream os;
    os << "dirichlet_eigenvalue: Delta has no sign change on [" << lo << ", " << hi << "]";
    throw NumericalFailure(os.str());
  }
  auto tol = [rel_tol](double a, double b) {
    return std::fabs(b - a) <= rel_tol * std::max({1.0, std::fabs(a), std::fabs(b)});
  };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  return 0.5 * (a + b);
}

DirichletSpectrum dirichlet_eigenvalues(const Potential1D& q, int count, double rel_tol,
                                        const IntegratorOptions& opts) {
  if (count < 1) throw InvalidInput("dirichlet_eigenvalues: count must be >= 1");
  DirichletSpectrum spec;
  for (int n = 1; n <= count; ++n) {
    const double lam = dirichlet_eigenvalue(q, n, rel_tol, opts);
    if (!spec.eigenvalues.empty() && !(lam > spec.eigenvalues.back()))
      throw NumericalFailure("dirichlet_eigenvalues: eigenvalues not strictly increasing");
    spec.eigenvalues.push_back(lam);
    spec.alphas.push_back(-lam);
  }
  return spec;
}

Eigenfunction normalized_eigenfunction(const Potential1D& q, double lambda_dir,
                                       double not_eigen_threshold, const IntegratorOptions& opts) {
  const Grid1D& grid = q.grid();
  const std::size_t n = grid.size();
  Shooter<2> shooter(q, -lambda_dir, opts);
  std::array<double, 2> y{0.0, 1.0};
  std::int64_t e = 0;
  std::vector<std::array<double, 2>> st(n);
  std::vector<std::int64_t> ex(n, 0);
  st[0] = y;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    shooter.advance(grid.x(i), grid.x(i + 1), y, e, [](double, const auto&, std::int64_t) {});
    st[i + 1] = y;
    ex[i + 1] = e;
  }
  const std::int64_t emax = ex.back();
  std::vector<double> v(n), dv(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::ldexp(st[i][0], static_cast<int>(ex[i] - emax));
    dv[i] = std::ldexp(st[i][1], static_cast<int>(ex[i] - emax));
  }
  double sup = 0.0;
  for (double a : v) sup = std::max(sup, std::fabs(a));
  const double margin = sup > 0.0 ? std::fabs(v.back()) / sup : 1.0;
  if (margin > not_eigen_threshold) {
    std::ostringstream os;
    os << "normalized_eigenfunction: " << lambda_dir
       << " is not a Dirichlet eigenvalue (|Delta|/sup|s0| = " << margin << ")";
    throw PreconditionViolation(os.str());
  }
  std::vector<double> v2(n);
  for (std::size_t i = 0; i < n; ++i) v2[i] = v[i] * v[i];
  const double norm = std::sqrt(quad(SampledFn1D(grid, v2)));
  for (std::size_t i = 0; i < n; ++i) {
    v[i] /= norm;
    dv[i] /= norm;
  }
  v.back() = 0.0;
  return Eigenfunction{lambda_dir, SampledFn1D(grid, std::move(v)), SampledFn1D(grid, std::move(dv))};
}

double hadamard_truncated(std::span<const double> alphas, double c, double mu, std::size_t terms) {
  if (terms > alphas.size()) throw InvalidInput("hadamard_truncated: more terms than zeros");
  double p = c;
  for (std::size_t i = 0; i < terms; ++i) {
    if (alphas[i] == 0.0) throw InvalidInput("hadamard_truncated: zero alpha");
    p *= 1.0 - mu / alphas[i];
  }
  return p;
}

}  // namespace dnlab::sturm

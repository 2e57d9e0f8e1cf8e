#include "dnlab/cylinder_dn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace dnlab::cyl {

namespace {

// Counts of |m|^2 = value for m in [-r, r]^d, restricted to value <= r^2.
void lattice_counts(int d, int r, int depth, long partial, std::map<long, int>& out) {
  if (depth == d) {
    if (partial <= static_cast<long>(r) * r) ++out[partial];
    return;
  }
  for (int m = -r; m <= r; ++m) {
    const long next = partial + static_cast<long>(m) * m;
    if (next > static_cast<long>(r) * r) continue;
    lattice_counts(d, r, depth + 1, next, out);
  }
}

}  // namespace

std::vector<TransverseEigen> transverse_spectrum(const TransverseModel& model, int count) {
  if (count < 1) throw InvalidInput("transverse_spectrum: count must be >= 1");
  std::vector<TransverseEigen> out;
  if (std::holds_alternative<Circle>(model)) {
    for (int k = 0; k < count; ++k) out.push_back({k, static_cast<double>(k) * k, k == 0 ? 1 : 2});
  } else if (std::holds_alternative<DirichletInterval>(model)) {
    for (int k = 1; k <= count; ++k)
      out.push_back({k, static_cast<double>(k) * k * std::numbers::pi * std::numbers::pi, 1});
  } else if (const auto* t = std::get_if<FlatTorus>(&model)) {
    if (t->d < 1 || t->d > 8) throw InvalidInput("transverse_spectrum: torus dimension must be 1..8");
    for (int r = 1;; ++r) {
      std::map<long, int> counts;
      lattice_counts(t->d, r, 0, 0, counts);
      if (static_cast<int>(counts.size()) >= count) {
        int k = 0;
        for (const auto& [v, m] : counts) {
          if (k == count) break;
          out.push_back({k++, static_cast<double>(v), m});
        }
        break;
      }
    }
  } else {
    const auto& mus = std::get<Explicit>(model).mu;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      if (!(mus[i] >= 0.0) || !std::isfinite(mus[i]))
        throw InvalidInput("transverse_spectrum: explicit eigenvalues must be finite and >= 0");
      if (i && mus[i] < mus[i - 1])
        throw InvalidInput("transverse_spectrum: explicit eigenvalues must be sorted");
    }
    for (double mu : mus) {
      if (!out.empty() && out.back().mu == mu) {
        ++out.back().multiplicity;
        continue;
      }
      if (static_cast<int>(out.size()) == count) break;
      out.push_back({static_cast<int>(out.size()), mu, 1});
    }
    if (static_cast<int>(out.size()) < count)
      throw InvalidInput("transverse_spectrum: explicit list has only " +
                         std::to_string(out.size()) + " distinct values");
  }
  return out;
}

std::vector<TransverseEigen> transverse_harmonics(const TransverseModel& model, int k_max) {
  if (k_max < 0) throw InvalidInput("transverse_harmonics: k_max must be >= 0");
  if (std::holds_alternative<DirichletInterval>(model)) {
    if (k_max < 1) throw InvalidInput("transverse_harmonics: Dirichlet cross-section starts at k = 1");
    return transverse_spectrum(model, k_max);
  }
  return transverse_spectrum(model, k_max + 1);
}

std::string describe(const TransverseModel& model) {
  if (std::holds_alternative<Circle>(model)) return "circle";
  if (std::holds_alternative<DirichletInterval>(model)) return "dirichlet-interval";
  if (const auto* t = std::get_if<FlatTorus>(&model)) return "flat-torus(" + std::to_string(t->d) + ")";
  return "explicit(" + std::to_string(std::get<Explicit>(model).mu.size()) + ")";
}

// ---------------------------------------------------------------------------

WarpedCylinder::WarpedCylinder(int n_, Function1D f_, TransverseModel transverse_, Grid1D grid_)
    : n(n_), f(std::move(f_)), transverse(std::move(transverse_)), grid(grid_) {
  if (n < 2) throw InvalidInput("WarpedCylinder: dimension n must be >= 2");
  const SampledFn1D fs = f.sample(grid);
  if (!(fs.min() > 0.0)) throw InvalidInput("WarpedCylinder: warping factor f must be positive");
  for (double x : {0.0, 1.0})
    if (!std::isfinite(f.d1(x))) throw InvalidInput("WarpedCylinder: f' not finite at an endpoint");
}

SampledFn1D q_warp(const Function1D& f, int n, const Grid1D& grid) {
  const SampledFn1D fs = f.sample(grid);
  if (!(fs.min() > 0.0)) throw InvalidInput("q_warp: f must be positive");
  std::vector<double> q(grid.size(), 0.0);
  if (n == 2) return SampledFn1D(grid, std::move(q));
  const double m = n - 2;
  if (f.exact_derivatives()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i), fv = f(x), r1 = f.d1(x) / fv, r2 = f.d2(x) / fv;
      q[i] = m * (m - 1.0) * r1 * r1 + m * r2;
    }
  } else {
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p[i] = std::pow(fs[i], m);
    const SampledFn1D d2 = diff2_central(SampledFn1D(grid, p));
    for (std::size_t i = 0; i < grid.size(); ++i) q[i] = d2[i] / p[i];
  }
  return SampledFn1D(grid, std::move(q));
}

namespace {

struct EffectiveImpl final : Function1D::Impl {
  int n;
  Function1D f, V;
  double lambda;
  std::optional<CubicSpline> qf_spline;  // only for sampled f

  EffectiveImpl(int n_, Function1D f_, Function1D V_, double lambda_)
      : n(n_), f(std::move(f_)), V(std::move(V_)), lambda(lambda_) {}

  double qf(double x) const {
    if (n == 2) return 0.0;
    if (qf_spline) return qf_spline->value(x);
    const double m = n - 2, fv = f(x), r1 = f.d1(x) / fv, r2 = f.d2(x) / fv;
    return m * (m - 1.0) * r1 * r1 + m * r2;
  }
  double value(double x) const override {
    const double f2 = f(x) * f(x);
    return qf(x) + (V(x) - lambda) * f2 * f2;
  }
  // Derivatives of a combined potential are never consumed by the shooter;
  // provide centred differences.
  double d1(double x) const override {
    const double h = 1e-5;
    return (value(x + h) - value(x - h)) / (2 * h);
  }
  double d2(double x) const override {
    const double h = 1e-4;
    return (value(x + h) - 2 * value(x) + value(x - h)) / (h * h);
  }
  bool exact_derivatives() const override { return false; }
  std::string describe() const override {
    std::ostringstream os;
    os << "q_f[n=" << n << ", f=" << f.describe() << "] + (" << V.describe() << " - " << lambda
       << ") f^4";
    return os.str();
  }
};

}  // namespace

sturm::Potential1D effective_potential(const WarpedCylinder& cyl, const Function1D& V,
                                       double lambda) {
  if (!std::isfinite(lambda)) throw InvalidInput("effective_potential: non-finite lambda");
  auto impl = std::make_shared<EffectiveImpl>(cyl.n, cyl.f, V, lambda);
  if (!cyl.f.exact_derivatives() && cyl.n != 2) impl->qf_spline.emplace(q_warp(cyl.f, cyl.n, cyl.grid));
  return sturm::Potential1D(Function1D::from_impl(std::move(impl)), cyl.grid);
}

GuardResult guard_lambda(const WarpedCylinder& cyl, const Function1D& V, double lambda, int k_max,
                         double threshold) {
  const sturm::Potential1D q = effective_potential(cyl, V, lambda);
  GuardResult r;
  r.threshold = threshold;
  r.min_margin = std::numeric_limits<double>::infinity();
  for (const TransverseEigen& h : transverse_harmonics(cyl.transverse, k_max)) {
    const sturm::FssAtMu fss = sturm::integrate_fss(q, h.mu);
    const double margin = fss.s0_sup.is_zero() ? 0.0 : ratio(fss.s0_1.abs(), fss.s0_sup);
    if (margin < r.min_margin) {
      r.min_margin = margin;
      r.worst_k = h.k;
      r.worst_mu = h.mu;
    }
  }
  r.pass = r.min_margin >= threshold;
  return r;
}

const ScaledReal& DnBlock::entry(int row, int col) const {
  if (row == 0) return col == 0 ? a00 : a01;
  return col == 0 ? a10 : a11;
}

DnBlock dn_block(const WarpedCylinder& cyl, const sturm::Potential1D& q, double mu) {
  const sturm::SpectralFunctions sf = sturm::spectral_functions(q, mu);
  const int n = cyl.n;
  const double f0 = cyl.f(0.0), f1 = cyl.f(1.0);
  const double df0 = cyl.f.d1(0.0), df1 = cyl.f.d1(1.0);
  DnBlock b;
  b.mu = mu;
  b.delta = sf.delta;
  b.a00 = ScaledReal::from_double((n - 2) * df0 / (f0 * f0 * f0) - sf.m / (f0 * f0));
  b.a11 = ScaledReal::from_double(-(n - 2) * df1 / (f1 * f1 * f1) - sf.n / (f1 * f1));
  b.a01 = -(ScaledReal::from_double(std::pow(f1, n - 2) / std::pow(f0, n)) / sf.delta);
  b.a10 = -(ScaledReal::from_double(std::pow(f0, n - 2) / std::pow(f1, n)) / sf.delta);
  return b;
}

DnBlock dn_block(const WarpedCylinder& cyl, const Function1D& V, double lambda, double mu) {
  return dn_block(cyl, effective_potential(cyl, V, lambda), mu);
}

double off_diagonal_ratio(const WarpedCylinder& cyl) {
  const double f0 = cyl.f(0.0), f1 = cyl.f(1.0);
  return std::pow(f1, cyl.n - 2) * std::pow(f1, cyl.n) / (std::pow(f0, cyl.n - 2) * std::pow(f0, cyl.n));
}

const char* to_string(Component c) { return c == Component::Gamma0 ? "Gamma0" : "Gamma1"; }

PartialDnReport partial_dn(std::span<const DnBlock> blocks, Component gamma_d, Component gamma_n) {
  PartialDnReport r;
  r.gamma_d = gamma_d;
  r.gamma_n = gamma_n;
  for (const DnBlock& b : blocks)
    r.entries.push_back({b.k, b.mu, b.multiplicity,
                         b.entry(static_cast<int>(gamma_n), static_cast<int>(gamma_d))});
  return r;
}

PartialDnReport partial_dn(const WarpedCylinder& cyl, const Function1D& V, double lambda,
                           Component gamma_d, Component gamma_n, int k_max) {
  const sturm::Potential1D q = effective_potential(cyl, V, lambda);
  std::vector<DnBlock> blocks;
  for (const TransverseEigen& h : transverse_harmonics(cyl.transverse, k_max)) {
    DnBlock b = dn_block(cyl, q, h.mu);
    b.k = h.k;
    b.multiplicity = h.multiplicity;
    blocks.push_back(b);
  }
  return partial_dn(blocks, gamma_d, gamma_n);
}

DnComparison compare_dn(const PartialDnReport& a, const PartialDnReport& b) {
  if (a.gamma_d != b.gamma_d || a.gamma_n != b.gamma_n || a.entries.size() != b.entries.size())
    throw InvalidInput("compare_dn: reports differ in boundary pair or harmonic count");
  DnComparison c;
  const ScaledReal floor = ScaledReal::from_double(1e-300);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const PartialDnEntry &x = a.entries[i], &y = b.entries[i];
    if (x.k != y.k || x.mu != y.mu) throw InvalidInput("compare_dn: harmonics differ");
    const ScaledReal diff = (x.value - y.value).abs();
    const ScaledReal den = std::max({x.value.abs(), y.value.abs(), floor});
    DnDelta d{x.k, x.mu, diff.to_double(), ratio(diff, den)};
    c.max_abs = std::max(c.max_abs, d.abs_delta);
    if (d.rel_delta > c.max_rel || c.per_k.empty()) {
      c.max_rel = std::max(c.max_rel, d.rel_delta);
      c.argmax_rel_k = d.k;
    }
    c.per_k.push_back(d);
  }
  return c;
}

void write_blocks_csv(std::ostream& os, std::span<const DnBlock> blocks) {
  os << "k,mu,multiplicity,a00,a01,a10,a11\n";
  char buf[64];
  for (const DnBlock& b : blocks) {
    std::snprintf(buf, sizeof buf, "%.14e", b.mu);
    os << b.k << ',' << buf << ',' << b.multiplicity << ',' << b.a00.to_string() << ','
       << b.a01.to_string() << ',' << b.a10.to_string() << ',' << b.a11.to_string() << '\n';
  }
}

}  // namespace dnlab::cyl

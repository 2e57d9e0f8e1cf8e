#include "dnlab/yamabe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace dnlab::yamabe {

namespace {

double signed_pow(double w, double p) { return std::copysign(std::pow(std::fabs(w), p), w); }

}  // namespace

double NonlinearProblem::f(std::size_t node, double w) const {
  const double wp = signed_pow(w, p());
  if (kind == Nonlinearity::Gauge) return lambda * (w - wp);
  return (lambda - V[node]) * w - lambda * wp;
}

double NonlinearProblem::eta_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < form.nodes; ++i)
    if (form.dirichlet[i]) m = std::min(m, eta[i]);
  return m;
}

double NonlinearProblem::eta_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < form.nodes; ++i)
    if (form.dirichlet[i]) m = std::max(m, eta[i]);
  return m;
}

namespace {

void validate(const NonlinearProblem& pb) {
  if (pb.n < 3) throw InvalidInput("yamabe: dimension n must be >= 3");
  if (!std::isfinite(pb.lambda)) throw InvalidInput("yamabe: non-finite lambda");
  if (pb.eta.size() != pb.form.nodes) throw InvalidInput("yamabe: eta size mismatch");
  if (pb.kind == Nonlinearity::Linked && pb.V.size() != pb.form.nodes)
    throw InvalidInput("yamabe: V size mismatch");
}

}  // namespace

NonlinearProblem radial_problem(const Function1D& fwarp, int n, const Grid1D& grid,
                                Nonlinearity kind, double lambda, const Function1D& V,
                                double eta0, double eta1) {
  NonlinearProblem pb;
  pb.form = e2d::radial_form(fwarp, n, grid);
  pb.kind = kind;
  pb.n = n;
  pb.lambda = lambda;
  const SampledFn1D vs = V.sample(grid);
  pb.V.assign(vs.values().begin(), vs.values().end());
  pb.eta.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) pb.eta[i] = eta0 + (eta1 - eta0) * grid.x(i);
  pb.eta.front() = eta0;
  pb.eta.back() = eta1;
  validate(pb);
  return pb;
}

NonlinearProblem planar_problem(const e2d::ConformalMetric2D& metric, Nonlinearity kind,
                                double lambda, const e2d::SampledFn2D& V,
                                const e2d::SampledFn2D& eta) {
  if (!(V.grid() == metric.grid()) || !(eta.grid() == metric.grid()))
    throw InvalidInput("planar_problem: field grids differ from the metric grid");
  NonlinearProblem pb;
  pb.form = e2d::planar_form(metric);
  pb.kind = kind;
  pb.n = metric.n;
  pb.lambda = lambda;
  pb.V = V.values();
  pb.eta = eta.values();
  validate(pb);
  return pb;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::I: return "(i) gauge, lambda >= 0";
    case Regime::II: return "(ii) gauge, lambda < 0, eta <= 1";
    case Regime::III: return "(iii) linked, lambda = 0, V >= 0";
    case Regime::IV: return "(iv) linked, 0 < V < lambda, max eta >= 1";
    case Regime::V: return "(v) linked, lambda < 0, V >= 0, eta <= 1";
  }
  return "?";
}

Bracket make_bracket(const NonlinearProblem& pb) {
  validate(pb);
  const double lam = pb.lambda, emin = pb.eta_min(), emax = pb.eta_max();
  if (!(emin > 0.0)) throw PreconditionViolation("make_bracket: no existence regime (eta must be > 0)");
  double vmin = 0.0, vmax = 0.0;
  if (pb.kind == Nonlinearity::Linked) {
    vmin = std::numeric_limits<double>::infinity();
    vmax = -vmin;
    for (std::size_t i = 0; i < pb.form.nodes; ++i)
      if (!pb.form.dirichlet[i]) {
        vmin = std::min(vmin, pb.V[i]);
        vmax = std::max(vmax, pb.V[i]);
      }
  }
  std::ostringstream why;
  why << "make_bracket: no existence regime for "
      << (pb.kind == Nonlinearity::Gauge ? "gauge" : "linked") << " problem with lambda = " << lam
      << ", eta in [" << emin << ", " << emax << "]";
  if (pb.kind == Nonlinearity::Linked) why << ", V in [" << vmin << ", " << vmax << "]";

  Bracket b;
  if (pb.kind == Nonlinearity::Gauge) {
    if (lam == 0.0) {
      b = {emin, emax, Regime::I};
    } else if (lam > 0.0) {
      b = {std::min(1.0, emin), std::max(1.0, emax), Regime::I};
    } else if (emax <= 1.0) {
      b = {0.0, 1.0, Regime::II};
    } else {
      throw PreconditionViolation(why.str());
    }
  } else {
    const double p = pb.p();
    if (lam == 0.0 && vmin >= 0.0) {
      b = {0.0, emax, Regime::III};
    } else if (lam > 0.0 && vmin > 0.0 && vmax < lam && emax >= 1.0) {
      b = {0.5 * std::min(emin, std::pow((lam - vmax) / lam, 1.0 / (p - 1.0))), std::max(1.0, emax),
           Regime::IV};
    } else if (lam < 0.0 && vmin >= 0.0 && emax <= 1.0) {
      b = {0.0, 1.0, Regime::V};
    } else {
      throw PreconditionViolation(why.str());
    }
  }
  // Constants have zero discrete Laplacian, so the differential inequalities
  // reduce to signs of f.
  for (std::size_t i = 0; i < pb.form.nodes; ++i) {
    if (pb.form.dirichlet[i]) {
      if (pb.eta[i] < b.w_lo - 1e-12 || pb.eta[i] > b.w_hi + 1e-12)
        throw NumericalFailure("make_bracket: boundary data outside the bracket");
    } else if (pb.f(i, b.w_lo) < -1e-9 || pb.f(i, b.w_hi) > 1e-9) {
      throw NumericalFailure("make_bracket: constant bracket fails the differential inequalities");
    }
  }
  return b;
}

double default_mu_shift(const NonlinearProblem& pb, const Bracket& b) {
  const double p = pb.p();
  double sup_lv = std::fabs(pb.lambda);
  if (pb.kind == Nonlinearity::Linked) {
    sup_lv = 0.0;
    for (std::size_t i = 0; i < pb.form.nodes; ++i)
      if (!pb.form.dirichlet[i]) sup_lv = std::max(sup_lv, std::fabs(pb.lambda - pb.V[i]));
  }
  return std::fabs(pb.lambda) * (1.0 + p * std::pow(b.w_hi, p - 1.0)) + sup_lv + 1.0;
}

namespace {

double residual_sup(const NonlinearProblem& pb, const std::vector<double>& w) {
  const std::vector<double> lap = pb.form.laplacian(w);
  double r = 0.0;
  for (std::size_t i = 0; i < pb.form.nodes; ++i)
    if (!pb.form.dirichlet[i]) r = std::max(r, std::fabs(lap[i] + pb.f(i, w[i])));
  return r;
}

void finish(const NonlinearProblem& pb, YamabeSolution& s) {
  const double inv = 1.0 / (pb.n - 2.0);
  double wmin = std::numeric_limits<double>::infinity();
  for (double w : s.w) wmin = std::min(wmin, w);
  if (pb.eta_min() > 0.0 && !(wmin > 0.0)) {
    std::ostringstream os;
    os << "monotone_iterate: solution not positive (min w = " << wmin << ")";
    throw NumericalFailure(os.str());
  }
  for (std::size_t i = 0; i < s.w.size(); ++i)
    if (s.w[i] < s.bracket.w_lo - 1e-12 || s.w[i] > s.bracket.w_hi + 1e-12)
      throw NumericalFailure("monotone_iterate: solution left the bracket");
  s.c.resize(s.w.size());
  for (std::size_t i = 0; i < s.w.size(); ++i) s.c[i] = std::pow(s.w[i], inv);
}

}  // namespace

YamabeSolution monotone_iterate(const NonlinearProblem& pb, const Bracket& b,
                                const IterateOptions& opts) {
  validate(pb);
  if (!(b.w_lo <= b.w_hi)) throw InvalidInput("monotone_iterate: w_lo > w_hi");
  const std::size_t N = pb.form.nodes;
  YamabeSolution s;
  s.bracket = b;

  if (b.regime == Regime::III && pb.kind == Nonlinearity::Linked) {
    // lambda = 0: Delta_g w - V w = 0 is linear.
    const e2d::DirichletSolver solver(e2d::assemble(pb.form, pb.V, 0.0), opts.solver);
    s.w = solver.solve(pb.eta);
    IterationRecord rec;
    rec.iter = 1;
    double inc = 0.0, minc = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i)
      if (!pb.form.dirichlet[i]) {
        inc = std::max(inc, std::fabs(s.w[i] - b.w_lo));
        minc = std::min(minc, s.w[i] - b.w_lo);
      }
    rec.increment = inc;
    rec.min_increment = minc;
    rec.residual = residual_sup(pb, s.w);
    s.trace.push_back(rec);
    s.iterations = 1;
    s.residual = rec.residual;
    if (s.residual > opts.residual_tol) {
      std::ostringstream os;
      os << "monotone_iterate: linear solve residual " << s.residual << " exceeds " << opts.residual_tol;
      throw NumericalFailure(os.str());
    }
    finish(pb, s);
    return s;
  }

  const double mu = opts.mu_shift > 0.0 ? opts.mu_shift : default_mu_shift(pb, b);
  s.mu_shift = mu;
  const e2d::DirichletSolver solver(e2d::assemble(pb.form, std::vector<double>(N, mu), 0.0),
                                    opts.solver);
  std::vector<double> w(N), src(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) w[i] = pb.form.dirichlet[i] ? pb.eta[i] : b.w_lo;

  for (int k = 1; k <= opts.max_iter; ++k) {
    for (std::size_t i = 0; i < N; ++i)
      if (!pb.form.dirichlet[i]) src[i] = mu * w[i] + pb.f(i, w[i]);
    std::vector<double> next = solver.solve(pb.eta, &src);
    IterationRecord rec;
    rec.iter = k;
    rec.min_increment = std::numeric_limits<double>::infinity();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
      if (pb.form.dirichlet[i]) continue;
      const double d = next[i] - w[i];
      rec.increment = std::max(rec.increment, std::fabs(d));
      rec.min_increment = std::min(rec.min_increment, d);
      top = std::max(top, next[i]);
    }
    rec.residual = residual_sup(pb, next);
    s.trace.push_back(rec);
    if (rec.min_increment < -1e-12) {
      std::ostringstream os;
      os << "monotone_iterate: monotonicity violated at iteration " << k << " (min increment "
         << rec.min_increment << "); mu_shift " << mu << " too small";
      throw NumericalFailure(os.str());
    }
    if (top > b.w_hi + 1e-12) {
      std::ostringstream os;
      os << "monotone_iterate: iterate exceeds the upper solution at iteration " << k << " (max "
         << top << " > " << b.w_hi << ")";
      throw NumericalFailure(os.str());
    }
    w = std::move(next);
    if (rec.increment < opts.tol && rec.residual < opts.residual_tol) {
      s.w = std::move(w);
      s.iterations = k;
      s.residual = rec.residual;
      finish(pb, s);
      return s;
    }
  }
  std::ostringstream os;
  os << "monotone_iterate: no convergence in " << opts.max_iter << " iterations (increment "
     << s.trace.back().increment << ", residual " << s.trace.back().residual << ")";
  throw NumericalFailure(os.str());
}

// ---------------------------------------------------------------------------

std::vector<double> conformal_potential(const e2d::DivergenceForm& base, const std::vector<double>& c,
                                        int n, double lambda) {
  if (c.size() != base.nodes) throw InvalidInput("conformal_potential: field size mismatch");
  if (n < 3) throw InvalidInput("conformal_potential: dimension n must be >= 3");
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw InvalidInput("conformal_potential: c must be positive");
    w[i] = std::pow(c[i], n - 2.0);
  }
  std::vector<double> v = base.laplacian(w);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (base.dirichlet[i]) continue;
    const double c2 = c[i] * c[i];
    v[i] = v[i] / w[i] + lambda * (1.0 - c2 * c2);
  }
  return v;
}

e2d::SampledFn2D conformal_potential(const e2d::ConformalMetric2D& base, const e2d::SampledFn2D& c,
                                     double lambda) {
  const e2d::Grid2D& g = base.grid();
  if (!(c.grid() == g)) throw InvalidInput("conformal_potential: grid mismatch");
  std::vector<double> v = conformal_potential(e2d::planar_form(base), c.values(), base.n, lambda);
  const std::size_t L = g.nx() - 1;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    auto at = [&](std::size_t i) { return v[g.index(i, j)]; };
    v[g.index(0, j)] = 4.0 * at(1) - 6.0 * at(2) + 4.0 * at(3) - at(4);
    v[g.index(L, j)] = 4.0 * at(L - 1) - 6.0 * at(L - 2) + 4.0 * at(L - 3) - at(L - 4);
  }
  return e2d::SampledFn2D(g, std::move(v));
}

// ---------------------------------------------------------------------------

e2d::SampledFn2D eta_profile(const e2d::Grid2D& grid, double keep_a, double keep_b,
                             double amplitude, double ramp) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double keep = keep_b - keep_a;
  if (!(keep > 0.0) || keep >= two_pi) throw InvalidInput("eta_profile: kept interval must be a proper arc");
  if (!(ramp > 0.0) || 2.0 * ramp > two_pi - keep)
    throw InvalidInput("eta_profile: ramp does not fit outside the kept arc");
  // C-infinity step: 0 at s <= 0, 1 at s >= 1.
  auto step = [](double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
  };
  return e2d::SampledFn2D::from(grid, [&](double, double y) {
    double t = std::fmod(y - keep_a, two_pi);
    if (t < 0.0) t += two_pi;
    if (t < keep - 1e-12) return 1.0;
    const double d = std::min(t - keep, two_pi - t);
    return 1.0 + amplitude * step(d / ramp);
  });
}

GaugeResult gauge_pair(const e2d::ConformalMetric2D& base, double lambda,
                       const e2d::BoundaryArc& gamma_d, const e2d::BoundaryArc& gamma_n,
                       const e2d::SampledFn2D& eta, const e2d::BasisSpec& basis,
                       const IterateOptions& opts) {
  const e2d::Grid2D& g = base.grid();
  if (!e2d::arcs_disjoint(gamma_d, gamma_n, g))
    throw PreconditionViolation("gauge_pair requires Γ_D ∩ Γ_N = ∅ (arcs " +
                                gamma_d.describe() + " and " + gamma_n.describe() + " overlap)");
  if (!e2d::arcs_leave_gap(gamma_d, gamma_n, g))
    throw PreconditionViolation(
        "gauge_pair requires closure(Γ_D ∪ Γ_N) ≠ ∂M (arcs cover the boundary)");
  for (const e2d::BoundaryArc* arc : {&gamma_d, &gamma_n}) {
    const std::size_t i0 = arc->x_index(g);
    for (std::size_t j : arc->nodes(g))
      if (std::fabs(eta(i0, j) - 1.0) > 1e-12)
        throw PreconditionViolation("gauge_pair requires η = 1 on Γ_D ∪ Γ_N");
  }
  const NonlinearProblem pb =
      planar_problem(base, Nonlinearity::Gauge, lambda, e2d::SampledFn2D::constant(g, 0.0), eta);
  const Bracket b = make_bracket(pb);
  YamabeSolution sol = monotone_iterate(pb, b, opts);
  e2d::SampledFn2D c(g, sol.c);
  std::vector<double> ctot(g.size());
  double sup = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    ctot[p] = base.c.values()[p] * sol.c[p];
    sup = std::max(sup, std::fabs(sol.c[p] - 1.0));
  }
  const e2d::ConformalMetric2D gauge(base.n, base.f, e2d::SampledFn2D(g, std::move(ctot)));
  const e2d::SampledFn2D zero = e2d::SampledFn2D::constant(g, 0.0);
  GaugeResult r{std::move(sol),
                std::move(c),
                e2d::dn_matrix(base, zero, lambda, gamma_d, gamma_n, basis, opts.solver),
                e2d::dn_matrix(gauge, zero, lambda, gamma_d, gamma_n, basis, opts.solver),
                {},
                sup};
  r.mismatch = e2d::compare_matrices(r.base_dn, r.gauge_dn);
  return r;
}

Lemma31Report lemma31_check(const e2d::ConformalMetric2D& base, const e2d::SampledFn2D& c1,
                            const e2d::SampledFn2D& c2, double lambda, double tolerance,
                            double hypothesis_tol) {
  const e2d::Grid2D& g = base.grid();
  if (!(c1.grid() == g) || !(c2.grid() == g)) throw InvalidInput("lemma31_check: grid mismatch");
  const int n = base.n;
  const double p = (n + 2.0) / (n - 2.0);
  std::vector<double> c1tot(g.size()), wt(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(c1.values()[i] > 0.0) || !(c2.values()[i] > 0.0))
      throw InvalidInput("lemma31_check: conformal factors must be positive");
    c1tot[i] = base.c.values()[i] * c1.values()[i];
    wt[i] = std::pow(c2.values()[i] / c1.values()[i], n - 2.0);
  }
  const e2d::ConformalMetric2D m1(n, base.f, e2d::SampledFn2D(g, std::move(c1tot)));
  const e2d::DivergenceForm f1 = e2d::planar_form(m1);
  const std::vector<double> lap = f1.laplacian(wt);
  Lemma31Report r;
  r.tolerance = tolerance;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!f1.dirichlet[i])
      r.hypothesis_residual = std::max(
          r.hypothesis_residual, std::fabs(lap[i] + lambda * (wt[i] - std::pow(wt[i], p))));
  if (r.hypothesis_residual > hypothesis_tol) {
    std::ostringstream os;
    os << "lemma31_check: hypothesis not satisfied (gauge residual of c2/c1 in c1^4 g is "
       << r.hypothesis_residual << " > " << hypothesis_tol << ")";
    throw PreconditionViolation(os.str());
  }
  const e2d::DivergenceForm f0 = e2d::planar_form(base);
  const auto v1 = conformal_potential(f0, c1.values(), n, lambda);
  const auto v2 = conformal_potential(f0, c2.values(), n, lambda);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!f0.dirichlet[i]) r.sup_difference = std::max(r.sup_difference, std::fabs(v1[i] - v2[i]));
  r.pass = r.sup_difference < tolerance;
  return r;
}

void write_trace_json(std::ostream& os, const std::vector<IterationRecord>& trace) {
  char buf[160];
  os << "[";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const IterationRecord& r = trace[k];
    std::snprintf(buf, sizeof buf,
                  "%s\n  {\"iter\": %d, \"increment\": %.14e, \"min_increment\": %.14e, \"residual\": %.14e}",
                  k ? "," : "", r.iter, r.increment, r.min_increment, r.residual);
    os << buf;
  }
  os << "\n]\n";
}

}  // namespace dnlab::yamabe

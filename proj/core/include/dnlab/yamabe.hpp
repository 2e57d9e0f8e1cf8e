#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dnlab/elliptic2d.hpp"

namespace dnlab::yamabe {

enum class Nonlinearity {
  Gauge,   // f(w) = lambda (w - w^p)
  Linked,  // f(x, w) = (lambda - V(x)) w - lambda w^p
};

/// Delta_g w + f(x, w) = 0 on the free nodes of `form`, w = eta on its
/// Dirichlet nodes, p = (n+2)/(n-2).
struct NonlinearProblem {
  e2d::DivergenceForm form;
  Nonlinearity kind = Nonlinearity::Gauge;
  int n = 3;
  double lambda = 0.0;
  std::vector<double> V;    // per node; ignored for Gauge
  std::vector<double> eta;  // per node; read on Dirichlet nodes only

  double p() const { return (n + 2.0) / (n - 2.0); }
  double f(std::size_t node, double w) const;
  double eta_min() const;
  double eta_max() const;
};

/// y-independent problem on [0,1] with boundary values eta0, eta1.
NonlinearProblem radial_problem(const Function1D& fwarp, int n, const Grid1D& grid,
                                Nonlinearity kind, double lambda, const Function1D& V,
                                double eta0, double eta1);

/// Problem on the cylinder grid for the base metric; eta is read on x = 0, 1.
NonlinearProblem planar_problem(const e2d::ConformalMetric2D& metric, Nonlinearity kind,
                                double lambda, const e2d::SampledFn2D& V,
                                const e2d::SampledFn2D& eta);

/// Existence regimes: (i) Gauge, lambda >= 0; (ii) Gauge, lambda < 0, eta <= 1;
/// (iii) Linked, lambda = 0, V >= 0; (iv) Linked, lambda > 0, 0 < V < lambda,
/// max eta >= 1; (v) Linked, lambda < 0, V >= 0, eta <= 1.
enum class Regime { I = 1, II, III, IV, V };

struct Bracket {
  double w_lo = 0.0;
  double w_hi = 0.0;
  Regime regime = Regime::I;
};

/// Constant lower/upper solutions, verified pointwise. Throws
/// PreconditionViolation ("no existence regime") outside (i)-(v).
Bracket make_bracket(const NonlinearProblem& problem);

double default_mu_shift(const NonlinearProblem& problem, const Bracket& bracket);

struct IterationRecord {
  int iter = 0;
  double increment = 0.0;      // sup |w_{k+1} - w_k|
  double min_increment = 0.0;  // min (w_{k+1} - w_k)
  double residual = 0.0;       // sup |Delta_g w_{k+1} + f(x, w_{k+1})| on free nodes
};

struct IterateOptions {
  double tol = 1e-10;
  double residual_tol = 1e-8;
  int max_iter = 500;
  double mu_shift = 0.0;  // 0: default_mu_shift
  e2d::SolverOptions solver;
};

struct YamabeSolution {
  std::vector<double> w;
  std::vector<double> c;  // w^{1/(n-2)}
  int iterations = 0;
  double residual = 0.0;
  double mu_shift = 0.0;
  Bracket bracket;
  std::vector<IterationRecord> trace;
};

/// Solves (K + mu M) w_{k+1} = M (mu w_k + f(w_k)) from w_0 = w_lo (w = eta on
/// Dirichlet nodes) until the increment and residual certificates both hold.
/// Regime (iii) is linear and solved directly. Throws NumericalFailure on a
/// monotonicity violation, bracket escape, non-positivity or max_iter.
YamabeSolution monotone_iterate(const NonlinearProblem& problem, const Bracket& bracket,
                                const IterateOptions& opts = {});

/// V_{g,c,lambda} = c^{-(n-2)} Delta_g c^{n-2} + lambda (1 - c^4) on the free
/// nodes of the base-metric form; NaN on Dirichlet nodes.
std::vector<double> conformal_potential(const e2d::DivergenceForm& base, const std::vector<double>& c,
                                        int n, double lambda);

/// Planar version; boundary columns filled by cubic extrapolation in x.
e2d::SampledFn2D conformal_potential(const e2d::ConformalMetric2D& base, const e2d::SampledFn2D& c,
                                     double lambda);

struct GaugeResult {
  YamabeSolution solution;
  e2d::SampledFn2D c;
  e2d::DnMatrix2D base_dn;   // Lambda_g
  e2d::DnMatrix2D gauge_dn;  // Lambda_{c^4 g}
  e2d::MatrixMismatch mismatch;
  double sup_c_minus_1 = 0.0;
};

/// eta must equal 1 on both arcs; arcs disjoint with a boundary gap.
GaugeResult gauge_pair(const e2d::ConformalMetric2D& base, double lambda,
                       const e2d::BoundaryArc& gamma_d, const e2d::BoundaryArc& gamma_n,
                       const e2d::SampledFn2D& eta, const e2d::BasisSpec& basis = {},
                       const IterateOptions& opts = {});

/// eta = 1 on `keep` (angles on both components) and 1 + amplitude * taper
/// elsewhere; the taper ramps over `ramp` radians with a C-infinity step.
e2d::SampledFn2D eta_profile(const e2d::Grid2D& grid, double keep_a, double keep_b,
                             double amplitude, double ramp);

struct Lemma31Report {
  double hypothesis_residual = 0.0;
  double sup_difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Requires c = c2/c1 to solve the gauge PDE in c1^4 g (residual <= hypothesis_tol,
/// PreconditionViolation otherwise), then compares the two potentials on free nodes.
Lemma31Report lemma31_check(const e2d::ConformalMetric2D& base, const e2d::SampledFn2D& c1,
                            const e2d::SampledFn2D& c2, double lambda, double tolerance = 1e-5,
                            double hypothesis_tol = 1e-6);

/// [{"iter":..,"increment":..,"min_increment":..,"residual":..}, ...]
void write_trace_json(std::ostream& os, const std::vector<IterationRecord>& trace);

const char* to_string(Regime r);

}  // namespace dnlab::yamabe

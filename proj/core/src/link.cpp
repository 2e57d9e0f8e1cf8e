#include <cmath>
#include <sstream>

#include "dnlab/elliptic2d.hpp"
#include "dnlab/yamabe.hpp"

namespace dnlab::e2d {

LinkReport compare_link_unchecked(const ConformalMetric2D& metric_with_c, double lambda,
                                  const BoundaryArc& gamma_d, const BoundaryArc& gamma_n,
                                  double tolerance, const BasisSpec& basis,
                                  const SolverOptions& opts) {
  const Grid2D& g = metric_with_c.grid();
  const ConformalMetric2D base(metric_with_c.n, metric_with_c.f, g);
  const SampledFn2D v = yamabe::conformal_potential(base, metric_with_c.c, lambda);
  LinkReport r;
  r.disjoint = arcs_disjoint(gamma_d, gamma_n, g);
  r.tolerance = tolerance;
  r.conformal = dn_matrix(metric_with_c, SampledFn2D::constant(g, 0.0), lambda, gamma_d, gamma_n,
                          basis, opts);
  r.linked = dn_matrix(base, v, lambda, gamma_d, gamma_n, basis, opts);
  r.mismatch = compare_matrices(r.conformal, r.linked);
  r.pass = r.mismatch.rel <= tolerance;
  return r;
}

LinkReport verify_link(const ConformalMetric2D& metric_with_c, double lambda,
                       const BoundaryArc& gamma_d, const BoundaryArc& gamma_n, double tolerance,
                       const BasisSpec& basis, const SolverOptions& opts) {
  const Grid2D& g = metric_with_c.grid();
  const SampledFn2D& c = metric_with_c.c;
  for (const BoundaryArc* arc : {&gamma_d, &gamma_n}) {
    const std::size_t i0 = arc->x_index(g);
    for (std::size_t j : arc->nodes(g))
      if (std::fabs(c(i0, j) - 1.0) > 1e-12)
        throw PreconditionViolation("verify_link requires c = 1 on Γ_D ∪ Γ_N (violated on " +
                                    arc->describe() + ")");
  }
  if (!arcs_disjoint(gamma_d, gamma_n, g)) {
    // Case 2: overlapping arcs need a vanishing normal derivative of c on gamma_n.
    const bool left = gamma_n.component == cyl::Component::Gamma0;
    const std::size_t L = g.nx() - 1;
    double worst = 0.0;
    for (std::size_t j : gamma_n.nodes(g)) {
      const double d = left ? (-3.0 * c(0, j) + 4.0 * c(1, j) - c(2, j))
                            : (3.0 * c(L, j) - 4.0 * c(L - 1, j) + c(L - 2, j));
      worst = std::max(worst, std::fabs(d / (2.0 * g.hx())));
    }
    if (worst > 1e-8) {
      std::ostringstream os;
      os << "verify_link requires Γ_D ∩ Γ_N = ∅ or ∂_ν c = 0 on Γ_N (max |∂_ν c| = " << worst << ")";
      throw PreconditionViolation(os.str());
    }
  }
  return compare_link_unchecked(metric_with_c, lambda, gamma_d, gamma_n, tolerance, basis, opts);
}

}  // namespace dnlab::e2d

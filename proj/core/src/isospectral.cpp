#include "dnlab/isospectral.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "dnlab/cylinder_dn.hpp"

namespace dnlab::iso {

SampledFn1D theta(const SampledFn1D& phi, double t) {
  const Grid1D& g = phi.grid();
  std::vector<double> p2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) p2[i] = phi[i] * phi[i];
  const SampledFn1D tail = cumquad_from_right(SampledFn1D(g, std::move(p2)));
  if (std::fabs(tail[0] - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "theta: eigenfunction not normalized (int phi^2 = " << tail[0] << ")";
    throw InvalidInput(os.str());
  }
  const double s = std::expm1(t);
  std::vector<double> th(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) th[i] = 1.0 + s * tail[i];
  return SampledFn1D(g, std::move(th));
}

SampledFn1D log_theta_d2(const sturm::Eigenfunction& phi, double t) {
  const SampledFn1D th = theta(phi.phi, t);
  const double s = std::expm1(t);
  const Grid1D& g = th.grid();
  std::vector<double> d2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(th[i] > 0.0)) throw NumericalFailure("pt flow: theta is not positive");
    const double p = phi.phi[i];
    const double r1 = -s * p * p / th[i];
    const double r2 = -2.0 * s * p * phi.dphi[i] / th[i];
    d2[i] = r2 - r1 * r1;
  }
  return SampledFn1D(g, std::move(d2));
}

namespace {

/// base(x) + scale * corr(x) / weight(x)^4, corr interpolated from samples.
struct CorrectedImpl final : Function1D::Impl {
  Function1D base;
  SampledFn1D corr_samples;
  CubicSpline corr;
  double scale;
  std::optional<Function1D> weight;
  std::string label;

  CorrectedImpl(Function1D b, SampledFn1D c, double s, std::optional<Function1D> w, std::string l)
      : base(std::move(b)),
        corr_samples(std::move(c)),
        corr(corr_samples),
        scale(s),
        weight(std::move(w)),
        label(std::move(l)) {}

  // g = 1 / f^4 and its derivatives.
  void inv4(double x, double& g, double& g1, double& g2) const {
    if (!weight) {
      g = 1.0;
      g1 = g2 = 0.0;
      return;
    }
    const double f = (*weight)(x), f1 = weight->d1(x), f2 = weight->d2(x);
    const double f4 = f * f * f * f;
    g = 1.0 / f4;
    g1 = -4.0 * f1 / (f4 * f);
    g2 = 20.0 * f1 * f1 / (f4 * f * f) - 4.0 * f2 / (f4 * f);
  }
  double value(double x) const override {
    double g, g1, g2;
    inv4(x, g, g1, g2);
    return base(x) + scale * corr.value(x) * g;
  }
  double d1(double x) const override {
    double g, g1, g2;
    inv4(x, g, g1, g2);
    return base.d1(x) + scale * (corr.d1(x) * g + corr.value(x) * g1);
  }
  double d2(double x) const override {
    double g, g1, g2;
    inv4(x, g, g1, g2);
    return base.d2(x) +
           scale * (corr.d2(x) * g + 2.0 * corr.d1(x) * g1 + corr.value(x) * g2);
  }
  bool exact_derivatives() const override { return false; }
  std::string describe() const override { return base.describe() + " + " + label; }
};

std::string flow_label(int k, double t) {
  std::ostringstream os;
  os.precision(17);
  os << "pt(k=" << k << ",t=" << t << ")";
  return os.str();
}

sturm::Eigenfunction kth_eigenfunction(const sturm::Potential1D& q, int k) {
  if (k < 1) throw InvalidInput("pt flow: eigenfunction index k must be >= 1");
  const double lam = sturm::dirichlet_eigenvalue(q, k);
  return sturm::normalized_eigenfunction(q, lam);
}

}  // namespace

sturm::Potential1D pt_deform(const sturm::Potential1D& q, const sturm::Eigenfunction& phi,
                             double t) {
  if (!std::isfinite(t)) throw InvalidInput("pt_deform: non-finite flow time");
  if (!(phi.phi.grid() == q.grid())) throw InvalidInput("pt_deform: eigenfunction grid mismatch");
  if (t == 0.0) return q;
  auto impl = std::make_shared<CorrectedImpl>(q.function(), log_theta_d2(phi, t), -2.0,
                                              std::nullopt, flow_label(0, t));
  return sturm::Potential1D(Function1D::from_impl(std::move(impl)), q.grid());
}

sturm::Potential1D pt_deform(const sturm::Potential1D& q, FlowParam p) {
  if (p.t == 0.0) return q;
  const sturm::Eigenfunction phi = kth_eigenfunction(q, p.k);
  auto impl = std::make_shared<CorrectedImpl>(q.function(), log_theta_d2(phi, p.t), -2.0,
                                              std::nullopt, flow_label(p.k, p.t));
  return sturm::Potential1D(Function1D::from_impl(std::move(impl)), q.grid());
}

sturm::Potential1D apply_chain(const sturm::Potential1D& q, const FlowChain& chain) {
  sturm::Potential1D cur = q;
  for (const FlowParam& p : chain) cur = pt_deform(cur, p);
  return cur;
}

Function1D deform_V(const Function1D& V, const Function1D& f, int n, double lambda, FlowParam p,
                    const Grid1D& grid) {
  if (!(f.sample(grid).min() > 0.0)) throw InvalidInput("deform_V: f must be positive");
  if (p.t == 0.0) return V;
  const cyl::WarpedCylinder c(n, f, cyl::Circle{}, grid);
  const sturm::Potential1D q = cyl::effective_potential(c, V, lambda);
  const sturm::Eigenfunction phi = kth_eigenfunction(q, p.k);
  auto impl = std::make_shared<CorrectedImpl>(V, log_theta_d2(phi, p.t), -2.0, f,
                                              flow_label(p.k, p.t) + "/f^4");
  return Function1D::from_impl(std::move(impl));
}

SampledFn1D deform_V(const SampledFn1D& V, const SampledFn1D& f, int n, double lambda,
                     FlowParam p) {
  if (!(V.grid() == f.grid())) throw InvalidInput("deform_V: V and f grids differ");
  if (p.t == 0.0) return V;
  const Grid1D g = V.grid();
  return deform_V(Function1D::from_samples(V), Function1D::from_samples(f), n, lambda, p, g)
      .sample(g);
}

Function1D apply_chain_V(const Function1D& V, const Function1D& f, int n, double lambda,
                         const FlowChain& chain, const Grid1D& grid) {
  Function1D cur = V;
  for (const FlowParam& p : chain) cur = deform_V(cur, f, n, lambda, p, grid);
  return cur;
}

}  // namespace dnlab::iso

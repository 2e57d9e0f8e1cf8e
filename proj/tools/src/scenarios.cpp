#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dnlab/cylinder_dn.hpp"
#include "dnlab/elliptic2d.hpp"
#include "dnlab/isospectral.hpp"
#include "dnlab/sturm1d.hpp"
#include "dnlab/yamabe.hpp"
#include "dnlab_cli/runner.hpp"

#ifndef DNLAB_VERSION
#define DNLAB_VERSION "unknown"
#endif

namespace dnlab::cli {

void Artifacts::add(std::string name, std::string content) {
  files_.emplace_back(std::move(name), std::move(content));
}

void Artifacts::commit(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files_) {
    const auto target = dir / name;
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      os << content;
      os.close();
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }
}

namespace {

using cyl::Component;

const char* const kAnchorSpectral = "characteristic and Weyl-Titchmarsh functions of the 1D reduction";
const char* const kAnchorIso = "isospectral deformations preserve the Dirichlet spectrum and characteristic function";
const char* const kAnchorDn = "DN map of a warped cylinder, block diagonal in transverse harmonics";
const char* const kAnchorOffDiag = "isospectral potentials share DN data between disjoint boundary components";
const char* const kAnchorDiag = "same-component DN data separates isospectral potentials";
const char* const kAnchorGauge = "gauge invariance of the DN map for conformal factors equal to 1 on disjoint arcs";
const char* const kAnchorLink = "DN map of c^4 g equals the DN map of g with the conformal potential";
const char* const kAnchorLemma = "gauge-related conformal factors give the same potential";

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.14e", v);
  return buf;
}

Json num_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

/// Both levels below the solver floor count as converged: their ratio is noise.
bool converged(double coarse, double fine, double ratio, double floor) {
  return fine <= coarse / ratio || std::max(coarse, fine) < floor;
}

double ratio_or_nan(double coarse, double fine) {
  return fine > 0.0 ? coarse / fine : std::numeric_limits<double>::quiet_NaN();
}

std::string model_slug(const cyl::TransverseModel& m) {
  if (std::holds_alternative<cyl::Circle>(m)) return "circle";
  if (std::holds_alternative<cyl::DirichletInterval>(m)) return "dirichlet-interval";
  if (const auto* t = std::get_if<cyl::FlatTorus>(&m)) return "torus" + std::to_string(t->d);
  return "explicit";
}

std::vector<std::string> model_slugs(const std::vector<cyl::TransverseModel>& models) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::string s = model_slug(models[i]);
    if (std::count_if(models.begin(), models.end(), [&](const auto& m) { return model_slug(m) == s; }) > 1)
      s += "-" + std::to_string(i);
    out.push_back(s);
  }
  return out;
}

std::string grid_tag(const e2d::Grid2D& g) { return std::to_string(g.nx()) + "x" + std::to_string(g.ny()); }

struct Run {
  const ScenarioConfig& cfg;
  RunOutcome out;
  Json grids = Json::array();

  void check(std::string name, double measured, double tolerance, bool pass, const char* anchor) {
    out.checks.push_back({std::move(name), measured, tolerance, pass && !std::isnan(measured), anchor});
  }
  void at_most(std::string name, double measured, double tol, const char* anchor) {
    check(std::move(name), measured, tol, measured <= tol, anchor);
  }
  void at_least(std::string name, double measured, double tol, const char* anchor) {
    check(std::move(name), measured, tol, measured >= tol, anchor);
  }
  /// Convergence under refinement; measured is coarse / fine.
  void convergence(std::string name, double coarse, double fine, const char* anchor) {
    const double r = ratio_or_nan(coarse, fine);
    const bool ok = converged(coarse, fine, cfg.tol.convergence_ratio, cfg.tol.solver_floor);
    out.checks.push_back({std::move(name) + " (>= tolerance, or both levels below solver floor)", r,
                          cfg.tol.convergence_ratio, ok, anchor});
  }
};

std::size_t refined_points(std::size_t points) { return 2 * points - 1; }

sturm::Potential1D base_potential(const ScenarioConfig& cfg, const Grid1D& grid) {
  if (cfg.Q) return sturm::Potential1D(Function1D(*cfg.Q), grid);
  const cyl::WarpedCylinder cw(cfg.n, cfg.f, cyl::Circle{}, grid);
  return cyl::effective_potential(cw, cfg.V, cfg.lambda);
}

std::vector<cyl::DnBlock> blocks_for(const cyl::WarpedCylinder& cw, const sturm::Potential1D& q, int k_max) {
  std::vector<cyl::DnBlock> blocks;
  for (const auto& h : cyl::transverse_harmonics(cw.transverse, k_max)) {
    cyl::DnBlock b = cyl::dn_block(cw, q, h.mu);
    b.k = h.k;
    b.multiplicity = h.multiplicity;
    blocks.push_back(b);
  }
  return blocks;
}

double entry_rel(const std::vector<cyl::DnBlock>& a, const std::vector<cyl::DnBlock>& b, Component d, Component n) {
  return cyl::compare_dn(cyl::partial_dn(a, d, n), cyl::partial_dn(b, d, n)).max_rel;
}

double off_diagonal_rel(const std::vector<cyl::DnBlock>& a, const std::vector<cyl::DnBlock>& b) {
  return std::max(entry_rel(a, b, Component::Gamma0, Component::Gamma1),
                  entry_rel(a, b, Component::Gamma1, Component::Gamma0));
}

double diagonal_rel(const std::vector<cyl::DnBlock>& a, const std::vector<cyl::DnBlock>& b) {
  return std::max(entry_rel(a, b, Component::Gamma0, Component::Gamma0),
                  entry_rel(a, b, Component::Gamma1, Component::Gamma1));
}

std::string blocks_csv(const std::vector<cyl::DnBlock>& blocks) {
  std::ostringstream os;
  cyl::write_blocks_csv(os, blocks);
  return os.str();
}

void require_guard(const ScenarioConfig& cfg, const cyl::WarpedCylinder& cw, const Function1D& V) {
  const auto g = cyl::guard_lambda(cw, V, cfg.lambda, cfg.k_max, cfg.tol.guard);
  if (!g.pass) {
    std::ostringstream os;
    os << "lambda = " << cfg.lambda << " is a Dirichlet eigenvalue up to the guard margin (harmonic k = " << g.worst_k
       << ", mu = " << g.worst_mu << ", margin " << g.min_margin << " < " << g.threshold << ")";
    throw PreconditionViolation(os.str());
  }
}

// ---------------------------------------------------------------------------

void spectral_sweep(Run& run) {
  const auto& cfg = run.cfg;
  const Grid1D grid(cfg.points);
  run.grids.push_back({{"points", cfg.points}});
  const auto q = base_potential(cfg, grid);

  std::ostringstream csv;
  csv << "mu,delta,d,e,m,n,margin,wronskian\n";
  double worst_w = 0.0;
  for (double mu : cfg.mu) {
    const auto sf = sturm::spectral_functions(q, mu);
    const double w = sturm::integrate_fss(q, mu, true).max_wronskian_deviation();
    worst_w = std::max(worst_w, w);
    csv << sci(mu) << ',' << sf.delta.to_string() << ',' << sf.d.to_string() << ',' << sf.e.to_string() << ','
        << sci(sf.m) << ',' << sci(sf.n) << ',' << sci(sf.margin) << ',' << sci(w) << '\n';
  }
  run.out.artifacts.add("sweep.csv", csv.str());
  run.at_most("wronskian max deviation", worst_w, cfg.tol.wronskian, kAnchorSpectral);

  const auto spec = sturm::dirichlet_eigenvalues(q, cfg.eigen_count);
  const auto& ev = spec.eigenvalues;
  std::ostringstream ecsv;
  ecsv << "index,eigenvalue\n";
  for (std::size_t i = 0; i < ev.size(); ++i) ecsv << i + 1 << ',' << sci(ev[i]) << '\n';
  run.out.artifacts.add("eigenvalues.csv", ecsv.str());

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ev.size(); ++i) min_gap = std::min(min_gap, ev[i] - ev[i - 1]);
  if (ev.size() > 1) run.check("eigenvalue min gap (> 0)", min_gap, 0.0, min_gap > 0.0, kAnchorSpectral);

  // Oscillation count just above each eigenvalue must equal its index.
  double worst_count = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double gap = ev.size() > 1 ? (i + 1 < ev.size() ? ev[i + 1] - ev[i] : ev[i] - ev[i - 1]) : 1.0;
    const int count = sturm::count_eigenvalues_below(q, ev[i] + 0.5 * gap);
    worst_count = std::max(worst_count, std::fabs(double(count) - double(i + 1)));
  }
  run.at_most("oscillation count mismatch", worst_count, 0.0, kAnchorSpectral);
}

void isospectral(Run& run) {
  const auto& cfg = run.cfg;
  const auto slugs = model_slugs(cfg.transverse);
  const std::size_t res[2] = {cfg.points, refined_points(cfg.points)};
  std::vector<double> off[2];
  std::vector<double> diag;
  for (int r = 0; r < 2; ++r) {
    const Grid1D grid(res[r]);
    run.grids.push_back({{"points", res[r]}});
    const auto q = base_potential(cfg, grid);
    const auto qx = iso::apply_chain(q, cfg.chain);

    if (r == 0) {
      const auto a = sturm::dirichlet_eigenvalues(q, cfg.eigen_count).eigenvalues;
      const auto b = sturm::dirichlet_eigenvalues(qx, cfg.eigen_count).eigenvalues;
      std::ostringstream ecsv;
      ecsv << "index,eigenvalue,deformed\n";
      double ev_err = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ev_err = std::max(ev_err, std::fabs(b[i] - a[i]) / std::max(std::fabs(a[i]), 1e-300));
        ecsv << i + 1 << ',' << sci(a[i]) << ',' << sci(b[i]) << '\n';
      }
      run.out.artifacts.add("eigenvalues.csv", ecsv.str());
      run.at_most("eigenvalues max rel", ev_err, cfg.tol.eigenvalue, kAnchorIso);

      double ch_err = 0.0;
      for (double mu : cfg.mu)
        ch_err = std::max(ch_err, std::fabs(ratio(sturm::characteristic(qx, mu), sturm::characteristic(q, mu)) - 1.0));
      run.at_most("characteristic function max rel", ch_err, cfg.tol.characteristic, kAnchorIso);

      std::ostringstream pcsv;
      pcsv << "x,Q,Q_deformed\n";
      double move = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        move = std::max(move, std::fabs(qx(x) - q(x)));
        pcsv << sci(x) << ',' << sci(q(x)) << ',' << sci(qx(x)) << '\n';
      }
      run.out.artifacts.add("potentials.csv", pcsv.str());
      run.at_least("sup |Q_deformed - Q| (>= tolerance)", move, cfg.tol.potential_change_min, kAnchorIso);
    }

    for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
      const cyl::WarpedCylinder cw(cfg.n, cfg.f, cfg.transverse[m], grid);
      const auto a = blocks_for(cw, q, cfg.k_max);
      const auto b = blocks_for(cw, qx, cfg.k_max);
      off[r].push_back(off_diagonal_rel(a, b));
      if (r == 0) {
        diag.push_back(diagonal_rel(a, b));
        run.out.artifacts.add("blocks_" + slugs[m] + ".csv", blocks_csv(a));
        run.out.artifacts.add("blocks_" + slugs[m] + "_deformed.csv", blocks_csv(b));
      }
    }
  }
  for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
    const std::string tag = " [" + slugs[m] + "]";
    run.at_most("off-diagonal DN max rel" + tag, off[0][m], cfg.tol.dn, kAnchorOffDiag);
    run.at_most("off-diagonal DN max rel, refined" + tag, off[1][m], cfg.tol.dn, kAnchorOffDiag);
    run.convergence("off-diagonal DN convergence ratio" + tag, off[0][m], off[1][m], kAnchorOffDiag);
    run.at_least("diagonal DN max rel (>= tolerance)" + tag, diag[m], cfg.tol.dn_diag_min, kAnchorDiag);
  }
}

void dn_compare(Run& run) {
  const auto& cfg = run.cfg;
  const auto slugs = model_slugs(cfg.transverse);
  const Function1D Va = cfg.V;
  const Function1D Vb = cfg.V_compare ? Function1D(*cfg.V_compare) : Va;
  const std::size_t res[2] = {cfg.points, refined_points(cfg.points)};
  std::vector<double> worst[2];
  for (int r = 0; r < 2; ++r) {
    const Grid1D grid(res[r]);
    run.grids.push_back({{"points", res[r]}});
    for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
      const cyl::WarpedCylinder cw(cfg.n, cfg.f, cfg.transverse[m], grid);
      require_guard(cfg, cw, Va);
      require_guard(cfg, cw, Vb);
      const auto a = blocks_for(cw, cyl::effective_potential(cw, Va, cfg.lambda), cfg.k_max);
      const auto b = blocks_for(cw, cyl::effective_potential(cw, Vb, cfg.lambda), cfg.k_max);
      double w = 0.0;
      std::ostringstream dcsv;
      dcsv << "gamma_d,gamma_n,k,mu,abs_delta,rel_delta\n";
      for (Component d : {Component::Gamma0, Component::Gamma1})
        for (Component n : {Component::Gamma0, Component::Gamma1}) {
          const auto c = cyl::compare_dn(cyl::partial_dn(a, d, n), cyl::partial_dn(b, d, n));
          w = std::max(w, c.max_rel);
          for (const auto& e : c.per_k)
            dcsv << cyl::to_string(d) << ',' << cyl::to_string(n) << ',' << e.k << ',' << sci(e.mu) << ','
                 << sci(e.abs_delta) << ',' << sci(e.rel_delta) << '\n';
        }
      worst[r].push_back(w);
      if (r == 0) {
        run.out.artifacts.add("blocks_" + slugs[m] + "_a.csv", blocks_csv(a));
        run.out.artifacts.add("blocks_" + slugs[m] + "_b.csv", blocks_csv(b));
        run.out.artifacts.add("deltas_" + slugs[m] + ".csv", dcsv.str());
      }
    }
  }
  for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
    const std::string tag = " [" + slugs[m] + "]";
    run.at_most("DN max rel delta" + tag, worst[0][m], cfg.tol.dn, kAnchorDn);
    run.at_most("DN max rel delta, refined" + tag, worst[1][m], cfg.tol.dn, kAnchorDn);
    run.convergence("DN convergence ratio" + tag, worst[0][m], worst[1][m], kAnchorDn);
  }
}

void uniqueness_probe(Run& run) {
  const auto& cfg = run.cfg;
  const auto slugs = model_slugs(cfg.transverse);
  const std::size_t res[2] = {cfg.points, refined_points(cfg.points)};
  std::vector<double> off[2];
  std::vector<double> diag;
  for (int r = 0; r < 2; ++r) {
    const Grid1D grid(res[r]);
    run.grids.push_back({{"points", res[r]}});
    const Function1D V = cfg.V;
    const Function1D Vx = iso::apply_chain_V(V, cfg.f, cfg.n, cfg.lambda, cfg.chain, grid);
    if (r == 0) {
      std::ostringstream pcsv;
      pcsv << "x,V,V_deformed\n";
      double move = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        move = std::max(move, std::fabs(Vx(x) - V(x)));
        pcsv << sci(x) << ',' << sci(V(x)) << ',' << sci(Vx(x)) << '\n';
      }
      run.out.artifacts.add("potentials.csv", pcsv.str());
      run.at_least("sup |V_deformed - V| (>= tolerance)", move, cfg.tol.potential_change_min, kAnchorOffDiag);
    }
    for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
      const cyl::WarpedCylinder cw(cfg.n, cfg.f, cfg.transverse[m], grid);
      require_guard(cfg, cw, V);
      const auto a = blocks_for(cw, cyl::effective_potential(cw, V, cfg.lambda), cfg.k_max);
      const auto b = blocks_for(cw, cyl::effective_potential(cw, Vx, cfg.lambda), cfg.k_max);
      off[r].push_back(off_diagonal_rel(a, b));
      if (r == 0) {
        diag.push_back(entry_rel(a, b, Component::Gamma0, Component::Gamma0));
        run.out.artifacts.add("blocks_" + slugs[m] + ".csv", blocks_csv(a));
        run.out.artifacts.add("blocks_" + slugs[m] + "_deformed.csv", blocks_csv(b));
      }
    }
  }
  for (std::size_t m = 0; m < cfg.transverse.size(); ++m) {
    const std::string tag = " [" + slugs[m] + "]";
    run.at_most("off-diagonal DN max rel" + tag, off[0][m], cfg.tol.dn, kAnchorOffDiag);
    run.at_most("off-diagonal DN max rel, refined" + tag, off[1][m], cfg.tol.dn, kAnchorOffDiag);
    run.convergence("off-diagonal DN convergence ratio" + tag, off[0][m], off[1][m], kAnchorOffDiag);
    run.at_least("Gamma0 -> Gamma0 DN max rel (>= tolerance)" + tag, diag[m], cfg.tol.dn_diag_min, kAnchorDiag);
  }
}

std::string matrix_csv(const e2d::DnMatrix2D& m) {
  std::ostringstream os;
  e2d::write_dn_matrix_csv(os, m);
  return os.str();
}

std::string field_csv(const e2d::SampledFn2D& u) {
  std::ostringstream os;
  e2d::write_field_csv(os, u);
  return os.str();
}

std::string trace_json(const std::vector<yamabe::IterationRecord>& t) {
  std::ostringstream os;
  yamabe::write_trace_json(os, t);
  return os.str();
}

std::pair<e2d::Grid2D, e2d::Grid2D> two_grids(const ScenarioConfig& cfg) {
  return {e2d::Grid2D(cfg.nx, cfg.ny), e2d::Grid2D(2 * cfg.nx - 1, 2 * cfg.ny)};
}

void gauge(Run& run) {
  const auto& cfg = run.cfg;
  const auto [coarse, fine] = two_grids(cfg);
  double mm[2] = {0.0, 0.0};
  double sup_c = 0.0;
  for (int r = 0; r < 2; ++r) {
    const e2d::Grid2D& g = r == 0 ? coarse : fine;
    run.grids.push_back({{"nx", g.nx()}, {"ny", g.ny()}});
    const e2d::ConformalMetric2D base(cfg.n, cfg.f, g);
    const auto res = yamabe::gauge_pair(base, cfg.lambda, cfg.gamma_d, cfg.gamma_n, cfg.eta.sample(g), cfg.basis);
    mm[r] = res.mismatch.rel;
    run.out.artifacts.add("dn_base_" + grid_tag(g) + ".csv", matrix_csv(res.base_dn));
    run.out.artifacts.add("dn_gauge_" + grid_tag(g) + ".csv", matrix_csv(res.gauge_dn));
    if (r == 0) {
      sup_c = res.sup_c_minus_1;
      run.out.artifacts.add("c_field.csv", field_csv(res.c));
      run.out.artifacts.add("trace.json", trace_json(res.solution.trace));
    }
  }
  run.at_least("sup |c - 1| (>= tolerance)", sup_c, cfg.tol.sup_c_min, kAnchorGauge);
  run.at_most("DN mismatch rel", mm[0], cfg.tol.mismatch, kAnchorGauge);
  run.at_most("DN mismatch rel, refined", mm[1], cfg.tol.mismatch, kAnchorGauge);
  run.convergence("DN mismatch convergence ratio", mm[0], mm[1], kAnchorGauge);
}

void link_check(Run& run) {
  const auto& cfg = run.cfg;
  const auto [coarse, fine] = two_grids(cfg);
  double mm[2] = {0.0, 0.0};
  for (int r = 0; r < 2; ++r) {
    const e2d::Grid2D& g = r == 0 ? coarse : fine;
    run.grids.push_back({{"nx", g.nx()}, {"ny", g.ny()}});
    const e2d::ConformalMetric2D m(cfg.n, cfg.f, cfg.c.sample(g));
    const auto rep = cfg.expect_link
                         ? e2d::verify_link(m, cfg.lambda, cfg.gamma_d, cfg.gamma_n, cfg.tol.mismatch, cfg.basis)
                         : e2d::compare_link_unchecked(m, cfg.lambda, cfg.gamma_d, cfg.gamma_n, cfg.tol.mismatch,
                                                       cfg.basis);
    mm[r] = rep.mismatch.rel;
    run.out.artifacts.add("dn_conformal_" + grid_tag(g) + ".csv", matrix_csv(rep.conformal));
    run.out.artifacts.add("dn_linked_" + grid_tag(g) + ".csv", matrix_csv(rep.linked));
    if (r == 0) run.out.artifacts.add("c_field.csv", field_csv(m.c));
  }
  if (cfg.expect_link) {
    run.at_most("DN mismatch rel", mm[0], cfg.tol.mismatch, kAnchorLink);
    run.at_most("DN mismatch rel, refined", mm[1], cfg.tol.mismatch, kAnchorLink);
    run.convergence("DN mismatch convergence ratio", mm[0], mm[1], kAnchorLink);
  } else {
    const bool conv = mm[0] < cfg.tol.mismatch &&
                      converged(mm[0], mm[1], cfg.tol.convergence_ratio, cfg.tol.solver_floor);
    run.check("negative control: DN mismatch does not converge (ratio < tolerance)", ratio_or_nan(mm[0], mm[1]),
              cfg.tol.convergence_ratio, !conv, kAnchorLink);
  }
}

void lemma31(Run& run) {
  const auto& cfg = run.cfg;
  const e2d::Grid2D g(cfg.nx, cfg.ny);
  run.grids.push_back({{"nx", g.nx()}, {"ny", g.ny()}});
  const auto c1 = cfg.c.sample(g);
  const e2d::ConformalMetric2D m1(cfg.n, cfg.f, c1);
  const auto pb = yamabe::planar_problem(m1, yamabe::Nonlinearity::Gauge, cfg.lambda,
                                         e2d::SampledFn2D::constant(g, 0.0), cfg.eta.sample(g));
  const auto sol = yamabe::monotone_iterate(pb, yamabe::make_bracket(pb));
  std::vector<double> c2v(g.size());
  for (std::size_t i = 0; i < c2v.size(); ++i) c2v[i] = c1.values()[i] * sol.c[i];
  const e2d::SampledFn2D c2(g, std::move(c2v));
  const auto rep = yamabe::lemma31_check(e2d::ConformalMetric2D(cfg.n, cfg.f, g), c1, c2, cfg.lambda,
                                         cfg.tol.potential, cfg.tol.hypothesis);
  run.out.artifacts.add("c1_field.csv", field_csv(c1));
  run.out.artifacts.add("c2_field.csv", field_csv(c2));
  run.out.artifacts.add("trace.json", trace_json(sol.trace));
  run.at_most("gauge equation residual for c2 / c1", rep.hypothesis_residual, cfg.tol.hypothesis, kAnchorLemma);
  run.at_most("sup |V_c1 - V_c2|", rep.sup_difference, cfg.tol.potential, kAnchorLemma);
}

Json environment(const Run& run, const RunOptions& opts) {
  const sturm::IntegratorOptions io;
  const e2d::SolverOptions so;
  const yamabe::IterateOptions it;
  Json env;
  env["tool"] = "dnlab";
  env["version"] = DNLAB_VERSION;
  env["resolution_scale"] = opts.resolution_scale;
  env["tol_scale"] = opts.tol_scale;
  env["grids"] = run.grids;
  env["integrator"] = {{"rtol", io.rtol}, {"atol", io.atol}};
  env["solver"] = {{"direct_up_to_unknowns", so.pcg_threshold},
                   {"pcg_tol", so.pcg_tol},
                   {"pivot_ratio", so.pivot_ratio}};
  env["monotone_iteration"] = {{"tol", it.tol}, {"residual_tol", it.residual_tol}, {"max_iter", it.max_iter}};
  return env;
}

}  // namespace

RunOutcome run_scenario(ScenarioConfig cfg, const RunOptions& opts) {
  apply_resolution_scale(cfg, opts.resolution_scale);
  if (!(opts.tol_scale > 0.0) || !std::isfinite(opts.tol_scale)) throw ConfigError("--tol-scale must be > 0");
  cfg.tol.scale(opts.tol_scale);
  check_preconditions(cfg);

  Run run{cfg, {}, Json::array()};
  switch (cfg.scenario) {
    case Scenario::SpectralSweep: spectral_sweep(run); break;
    case Scenario::Isospectral: isospectral(run); break;
    case Scenario::DnCompare: dn_compare(run); break;
    case Scenario::UniquenessProbe: uniqueness_probe(run); break;
    case Scenario::Gauge: gauge(run); break;
    case Scenario::LinkCheck: link_check(run); break;
    case Scenario::Lemma31: lemma31(run); break;
  }

  Json checks = Json::array();
  std::size_t passed = 0;
  for (const Check& c : run.out.checks) {
    passed += c.pass;
    checks.push_back({{"name", c.name},
                      {"measured", num_or_null(c.measured)},
                      {"tolerance", num_or_null(c.tolerance)},
                      {"pass", c.pass},
                      {"paper_anchor", c.anchor}});
  }
  const std::size_t total = run.out.checks.size();
  run.out.pass = passed == total;

  Json report;
  report["schema_version"] = kSchemaVersion;
  report["scenario"] = to_string(cfg.scenario);
  report["config"] = cfg.source;
  report["checks"] = std::move(checks);
  report["environment"] = environment(run, opts);
  report["summary"] = {{"total", total}, {"passed", passed}, {"failed", total - passed}, {"pass", run.out.pass}};
  run.out.artifacts.add("report.json", report.dump(2) + "\n");
  run.out.report = std::move(report);
  return std::move(run.out);
}

}  // namespace dnlab::cli

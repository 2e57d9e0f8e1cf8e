#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dnlab/cylinder_dn.hpp"
#include "dnlab/elliptic2d.hpp"
#include "dnlab/yamabe.hpp"

using namespace dnlab;
using namespace dnlab::e2d;
using std::numbers::pi;

namespace {

const Function1D kOne = AnalyticFn::constant(1.0);

std::vector<double> boundary_fn(const Grid2D& g, double (*fn)(double, double)) {
  std::vector<double> b(g.size(), 0.0);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    b[g.index(0, j)] = fn(0.0, g.y(j));
    b[g.index(g.nx() - 1, j)] = fn(1.0, g.y(j));
  }
  return b;
}

SampledFn2D zeros(const Grid2D& g) { return SampledFn2D::constant(g, 0.0); }

// Flux at Gamma_1 for data cos(y) on Gamma_0, against the 1D block entry a10.
double mode_flux_error(std::size_t nx, std::size_t ny, const Function1D& f, double lambda) {
  const Grid2D g(nx, ny);
  const ConformalMetric2D m(3, f, g);
  const auto sys = assemble(m, zeros(g), lambda);
  std::vector<double> b(g.size(), 0.0);
  for (std::size_t j = 0; j < ny; ++j) b[g.index(0, j)] = std::cos(g.y(j));
  const SampledFn2D u(g, DirichletSolver(sys).solve(b));
  const auto flux = dn_extract(u, m, BoundaryArc{cyl::Component::Gamma1});
  const cyl::WarpedCylinder cw(3, f, cyl::Circle{}, Grid1D(2001));
  const double a10 = cyl::dn_block(cw, AnalyticFn::constant(0.0), lambda, 1.0).a10.to_double();
  double err = 0.0;
  for (std::size_t j = 0; j < ny; ++j) err = std::max(err, std::fabs(flux[j] - a10 * std::cos(g.y(j))));
  return err / std::fabs(a10);
}

}  // namespace

TEST_CASE("grid and arcs") {
  const Grid2D g(11, 16);
  CHECK(g.index(3, 16) == g.index(3, 0));
  CHECK(g.x(10) == 1.0);
  CHECK(g.hy() == doctest::Approx(2 * pi / 16));
  CHECK_THROWS_AS(Grid2D(7, 16), InvalidInput);

  const BoundaryArc full{cyl::Component::Gamma0};
  CHECK(full.full_circle());
  CHECK(full.nodes(g).size() == 16);
  const BoundaryArc half{cyl::Component::Gamma0, 0.0, pi};
  CHECK(half.nodes(g).size() == 8);
  const BoundaryArc other{cyl::Component::Gamma0, pi, 2 * pi};
  const BoundaryArc far{cyl::Component::Gamma1, 0.0, pi};
  CHECK(arcs_disjoint(half, other, g));
  CHECK(arcs_leave_gap(half, other, g));  // all of Gamma_1 is left over
  CHECK_FALSE(arcs_leave_gap(full, BoundaryArc{cyl::Component::Gamma1}, g));
  CHECK(arcs_disjoint(half, far, g));
  CHECK(arcs_leave_gap(half, far, g));
  CHECK_FALSE(arcs_disjoint(half, full, g));
  CHECK(far.x_index(g) == 10);
  CHECK_THROWS_AS((BoundaryArc{cyl::Component::Gamma0, 1.0, 1.0}.nodes(g)), InvalidInput);
}

TEST_CASE("flat weight reduces to the 5-point Laplacian") {
  const Grid2D g(9, 12);
  const ConformalMetric2D m(5, kOne, g);
  const auto form = planar_form(m);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u01(-1, 1);
  std::vector<double> u(g.size());
  for (double& v : u) v = u01(rng);
  const auto lap = form.laplacian(u);
  for (std::size_t i = 1; i + 1 < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double ref = (u[g.index(i + 1, j)] - 2 * u[g.index(i, j)] + u[g.index(i - 1, j)]) / (g.hx() * g.hx()) +
                         (u[g.index(i, j + 1)] - 2 * u[g.index(i, j)] + u[g.index(i, j + g.ny() - 1)]) /
                             (g.hy() * g.hy());
      CHECK(lap[g.index(i, j)] == doctest::Approx(ref).epsilon(1e-12));
    }
  CHECK(std::isnan(lap[g.index(0, 3)]));
}

TEST_CASE("assembled operator is symmetric") {
  const Grid2D g(21, 16);
  const auto c = SampledFn2D::from(g, [](double x, double y) { return 1.0 + 0.2 * x * (1 - x) * std::sin(y); });
  const ConformalMetric2D m(4, AnalyticFn(PolynomialTerm{{1.0, 0.3}}), c);
  const auto V = SampledFn2D::from(g, [](double x, double y) { return x * std::cos(y); });
  const auto sys = assemble(m, V, 0.5);
  const Eigen::SparseMatrix<double> diff = sys.a_ii - Eigen::SparseMatrix<double>(sys.a_ii.transpose());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::fabs(it.value()));
  CHECK(worst < 1e-13);
}

TEST_CASE("Dirichlet solves with closed forms") {
  const Grid2D g(41, 32);
  const ConformalMetric2D flat(3, kOne, g);
  const auto sys = assemble(flat, zeros(g), 0.0);
  const DirichletSolver solver(sys);

  const auto zero = solver.solve(std::vector<double>(g.size(), 0.0));
  for (double v : zero) CHECK(v == 0.0);

  const auto one = solver.solve(std::vector<double>(g.size(), 1.0));
  for (double v : one) CHECK(std::fabs(v - 1.0) < 1e-10);
  CHECK(solver.last_residual() <= 1e-10);

  const auto lin = solver.solve(boundary_fn(g, [](double x, double) { return x; }));
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) CHECK(std::fabs(lin[g.index(i, j)] - g.x(i)) < 1e-10);

  const SampledFn2D ul(g, lin);
  for (double v : dn_extract(ul, flat, BoundaryArc{cyl::Component::Gamma0})) CHECK(v == doctest::Approx(-1.0).epsilon(1e-9));
  for (double v : dn_extract(ul, flat, BoundaryArc{cyl::Component::Gamma1})) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  for (double v : dn_extract(SampledFn2D(g, one), flat, BoundaryArc{cyl::Component::Gamma1})) CHECK(std::fabs(v) < 1e-9);
}

TEST_CASE("single-mode solve and flux match separation of variables") {
  const Grid2D g(201, 256);
  const ConformalMetric2D flat(3, kOne, g);
  const auto sys = assemble(flat, zeros(g), 0.0);
  std::vector<double> b(g.size(), 0.0);
  for (std::size_t j = 0; j < g.ny(); ++j) b[g.index(0, j)] = std::cos(g.y(j));
  const SampledFn2D u(g, DirichletSolver(sys).solve(b));
  double err = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double ref = std::sinh(1.0 - g.x(i)) / std::sinh(1.0) * std::cos(g.y(j));
      err = std::max(err, std::fabs(u(i, j) - ref));
    }
  CHECK(err < 1e-4);

  const double coth1 = 1.0 / std::tanh(1.0);
  const auto flux0 = dn_extract(u, flat, BoundaryArc{cyl::Component::Gamma0});
  double ferr = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) ferr = std::max(ferr, std::fabs(flux0[j] - coth1 * std::cos(g.y(j))));
  CHECK(ferr < 1e-3);
}

TEST_CASE("second-order convergence against the 1D blocks") {
  const Function1D f = AnalyticFn(PolynomialTerm{{1.0, 0.1}});
  const double coarse = mode_flux_error(41, 32, f, 0.0);
  const double fine = mode_flux_error(81, 64, f, 0.0);
  MESSAGE("flux error " << coarse << " -> " << fine);
  CHECK(coarse / fine >= 3.5);
  CHECK(mode_flux_error(81, 64, kOne, 0.0) < 1e-3);
  CHECK(mode_flux_error(81, 64, f, -2.0) < 2e-3);
}

TEST_CASE("maximum principle") {
  const Grid2D g(31, 24);
  const auto c = SampledFn2D::from(g, [](double x, double y) { return 1.0 + 0.3 * x * (1 - x) * (1 + std::cos(y)); });
  const ConformalMetric2D m(3, AnalyticFn(PolynomialTerm{{1.0, 0.5}}), c);
  const auto V = SampledFn2D::from(g, [](double x, double) { return 2.0 * x; });
  const auto sys = assemble(m, V, -1.0);
  std::vector<double> b(g.size(), 0.0);
  for (std::size_t j = 0; j < g.ny(); ++j) {
    b[g.index(0, j)] = std::max(0.0, std::sin(g.y(j)));
    b[g.index(g.nx() - 1, j)] = 0.5 * (1 + std::cos(3 * g.y(j)));
  }
  const auto u = DirichletSolver(sys).solve(b);
  double mn = 1e300, mx = -1e300, bmax = 0.0;
  for (double v : b) bmax = std::max(bmax, v);
  for (std::size_t k : sys.free_nodes) {
    mn = std::min(mn, u[k]);
    mx = std::max(mx, u[k]);
  }
  CHECK(mn >= -1e-9);
  CHECK(mx <= bmax + 1e-9);
}

TEST_CASE("lambda on a discrete eigenvalue is reported") {
  const Grid2D g(21, 8);
  const ConformalMetric2D flat(3, kOne, g);
  const double h = g.hx();
  const double lam1 = (2.0 - 2.0 * std::cos(pi * h)) / (h * h);
  CHECK_THROWS_AS(DirichletSolver(assemble(flat, zeros(g), lam1)), NumericalFailure);
}

TEST_CASE("PCG path agrees with the direct solver") {
  const Grid2D g(41, 32);
  const auto c = SampledFn2D::from(g, [](double x, double y) { return 1.0 + 0.2 * x * (1 - x) * std::cos(y); });
  const ConformalMetric2D m(3, AnalyticFn(PolynomialTerm{{1.0, 0.2}}), c);
  const auto sys = assemble(m, zeros(g), 0.3);
  SolverOptions pcg;
  pcg.pcg_threshold = 10;
  const DirichletSolver a(sys), b(sys, pcg);
  CHECK_FALSE(a.iterative());
  CHECK(b.iterative());
  const auto bd = boundary_fn(g, [](double x, double y) { return x + std::sin(y); });
  const auto ua = a.solve(bd), ub = b.solve(bd);
  double d = 0.0;
  for (std::size_t k = 0; k < ua.size(); ++k) d = std::max(d, std::fabs(ua[k] - ub[k]));
  CHECK(d < 1e-9);
}

TEST_CASE("DN matrices") {
  const Grid2D g(101, 64);
  const ConformalMetric2D flat(3, kOne, g);
  const BoundaryArc d{cyl::Component::Gamma0, 0.0, pi};
  const BoundaryArc n{cyl::Component::Gamma1, 0.5, 2.5};

  const auto empty = dn_matrix(flat, zeros(g), 0.0, d, n, BasisSpec{0, -1});
  CHECK(empty.values.cols() == 0);
  CHECK(empty.values.rows() == static_cast<Eigen::Index>(n.nodes(g).size()));

  const auto m1 = dn_matrix(flat, zeros(g), 0.0, d, n);
  const auto m2 = dn_matrix(flat, zeros(g), 0.0, d, n);
  CHECK(m1.values.cols() == 8);
  CHECK((m1.values.array() == m2.values.array()).all());
  CHECK(m1.metric_hash == m2.metric_hash);
  CHECK(compare_matrices(m1, m2).max_abs == 0.0);

  std::ostringstream os;
  write_dn_matrix_csv(os, m1);
  CHECK(os.str().find('\n') != std::string::npos);
}

TEST_CASE("full-circle Fourier DN matrix reproduces the 1D blocks") {
  // ny = 256: the angular error of mode k is about k^2 hy^2 / 12.
  const Grid2D g(201, 256);
  const Function1D f = AnalyticFn(PolynomialTerm{{1.0, 0.1}});
  const ConformalMetric2D m(3, f, g);
  const auto dn = dn_matrix(m, zeros(g), 0.0, BoundaryArc{cyl::Component::Gamma0}, BoundaryArc{cyl::Component::Gamma1},
                            BasisSpec{0, 3});
  REQUIRE(dn.values.cols() == 7);
  const cyl::WarpedCylinder cw(3, f, cyl::Circle{}, Grid1D(2001));
  int col = 0;
  double worst = 0.0;
  for (int k = 0; k <= 3; ++k) {
    const double a10 = cyl::dn_block(cw, AnalyticFn::constant(0.0), 0.0, double(k * k)).a10.to_double();
    for (int kind = 0; kind < (k == 0 ? 1 : 2); ++kind, ++col) {
      double err = 0.0;
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const double y = g.y(j);
        const double mode = kind == 0 ? std::cos(k * y) : std::sin(k * y);
        err = std::max(err, std::fabs(dn.values(static_cast<Eigen::Index>(j), col) - a10 * mode));
      }
      worst = std::max(worst, err / std::fabs(a10));
    }
  }
  MESSAGE("worst relative mode error " << worst);
  CHECK(worst < 1e-3);
}

TEST_CASE("link preconditions and the trivial case") {
  const Grid2D g(41, 32);
  const BoundaryArc d{cyl::Component::Gamma0, 0.0, pi};
  const BoundaryArc n{cyl::Component::Gamma1, 0.0, pi};
  const ConformalMetric2D plain(3, kOne, g);
  const auto trivial = verify_link(plain, 0.7, d, n, 1e-12);
  CHECK(trivial.pass);
  CHECK(trivial.mismatch.max_abs == 0.0);

  const auto cb = SampledFn2D::from(g, [](double x, double) { return 1.0 + 0.2 * x; });
  CHECK_THROWS_AS(verify_link(ConformalMetric2D(3, kOne, cb), 0.0, d, n, 1e-3), PreconditionViolation);

  const auto cn = SampledFn2D::from(g, [](double x, double y) { return 1.0 + 0.1 * x * (1 - x) * (1 + std::sin(y)); });
  try {
    verify_link(ConformalMetric2D(3, kOne, cn), 0.0, d, d, 1e-3);
    FAIL("overlapping arcs with a non-zero normal derivative were accepted");
  } catch (const PreconditionViolation& e) {
    CHECK(std::string(e.what()).find("Γ_D ∩ Γ_N = ∅") != std::string::npos);
  }
}

TEST_CASE("field CSV") {
  const Grid2D g(8, 8);
  std::ostringstream os;
  write_field_csv(os, SampledFn2D::constant(g, 2.0));
  const std::string s = os.str();
  CHECK(s.rfind("x,y,u\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 65);
}

#include "dnlab/elliptic2d.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <ostream>
#include <sstream>

namespace dnlab::e2d {

Grid2D::Grid2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
  if (nx < 8 || ny < 8) throw InvalidInput("Grid2D: nx and ny must be >= 8");
  hx_ = 1.0 / static_cast<double>(nx - 1);
  hy_ = 2.0 * std::numbers::pi / static_cast<double>(ny);
}

SampledFn2D::SampledFn2D(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidInput("SampledFn2D: " + std::to_string(values_.size()) + " values for " +
                       std::to_string(grid_.size()) + " nodes");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidInput("SampledFn2D: non-finite value");
}

SampledFn2D SampledFn2D::constant(const Grid2D& grid, double v) {
  return SampledFn2D(grid, std::vector<double>(grid.size(), v));
}

double SampledFn2D::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SampledFn2D::max() const { return *std::max_element(values_.begin(), values_.end()); }

// ---------------------------------------------------------------------------

ConformalMetric2D::ConformalMetric2D(int n_, Function1D f_, SampledFn2D c_)
    : n(n_), f(std::move(f_)), c(std::move(c_)) {
  if (n < 3) throw InvalidInput("ConformalMetric2D: dimension n must be >= 3");
  if (!(c.min() > 0.0)) throw InvalidInput("ConformalMetric2D: conformal factor must be positive");
  const Grid1D xg = grid().x_grid();
  if (!(f.sample(xg).min() > 0.0)) throw InvalidInput("ConformalMetric2D: f must be positive");
}

ConformalMetric2D::ConformalMetric2D(int n_, Function1D f_, const Grid2D& grid)
    : ConformalMetric2D(n_, std::move(f_), SampledFn2D::constant(grid, 1.0)) {}

double ConformalMetric2D::a(std::size_t i, std::size_t j) const {
  const double fv = f(grid().x(i)), cv = c(i, j);
  const double cf = cv * fv;
  return cf * cf * cf * cf;
}

std::uint64_t ConformalMetric2D::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < len; ++k) {
      h ^= b[k];
      h *= 1099511628211ull;
    }
  };
  mix(&n, sizeof n);
  const Grid2D& g = grid();
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double v = a(i, j);
      mix(&v, sizeof v);
    }
  return h;
}

// ---------------------------------------------------------------------------

bool BoundaryArc::full_circle() const { return y_b - y_a >= 2.0 * std::numbers::pi; }

bool BoundaryArc::contains(double y) const {
  if (full_circle()) return true;
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(y - y_a, two_pi);
  if (t < 0.0) t += two_pi;
  return t < (y_b - y_a) - 1e-12;
}

std::vector<std::size_t> BoundaryArc::nodes(const Grid2D& grid) const {
  if (!(y_b > y_a)) throw InvalidInput("BoundaryArc: empty interval " + describe());
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < grid.ny(); ++j)
    if (contains(grid.y(j))) out.push_back(j);
  return out;
}

std::size_t BoundaryArc::x_index(const Grid2D& grid) const {
  return component == cyl::Component::Gamma0 ? 0 : grid.nx() - 1;
}

std::string BoundaryArc::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << cyl::to_string(component) << "[" << y_a << "," << y_b << ")";
  return os.str();
}

bool arcs_disjoint(const BoundaryArc& a, const BoundaryArc& b, const Grid2D& grid) {
  if (a.component != b.component) return true;
  const auto na = a.nodes(grid), nb = b.nodes(grid);
  std::vector<std::size_t> both;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(both));
  return both.empty();
}

bool arcs_leave_gap(const BoundaryArc& a, const BoundaryArc& b, const Grid2D& grid) {
  std::vector<char> hit(2 * grid.ny(), 0);
  for (const BoundaryArc* arc : {&a, &b}) {
    const std::size_t off = arc->component == cyl::Component::Gamma0 ? 0 : grid.ny();
    for (std::size_t j : arc->nodes(grid)) hit[off + j] = 1;
  }
  return std::find(hit.begin(), hit.end(), 0) != hit.end();
}

// ---------------------------------------------------------------------------

std::vector<double> DivergenceForm::laplacian(const std::vector<double>& u) const {
  if (u.size() != nodes) throw InvalidInput("laplacian: vector size mismatch");
  const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd ku = stiffness * uv;
  std::vector<double> out(nodes, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t p = 0; p < nodes; ++p)
    if (!dirichlet[p]) out[p] = -ku[static_cast<Eigen::Index>(p)] / mass[p];
  return out;
}

DivergenceForm planar_form(const ConformalMetric2D& metric) {
  const Grid2D& g = metric.grid();
  const std::size_t nx = g.nx(), ny = g.ny(), N = g.size();
  const double half = 0.5 * metric.n;
  DivergenceForm form;
  form.nodes = N;
  form.dirichlet.assign(N, 0);
  form.mass.resize(N);
  std::vector<double> b(N);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t p = g.index(i, j);
      const double a = metric.a(i, j);
      form.mass[p] = std::pow(a, half);
      b[p] = std::pow(a, half - 1.0);
      if (i == 0 || i + 1 == nx) form.dirichlet[p] = 1;
    }
  const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * N);
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t p = g.index(i, j);
      const std::size_t nb[4] = {g.index(i - 1, j), g.index(i + 1, j), g.index(i, j + ny - 1),
                                 g.index(i, j + 1)};
      const double w[4] = {ix2, ix2, iy2, iy2};
      double diag = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double coef = std::sqrt(b[p] * b[nb[k]]) * w[k];
        diag += coef;
        trip.emplace_back(p, nb[k], -coef);
      }
      trip.emplace_back(p, p, diag);
    }
  form.stiffness.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  form.stiffness.setFromTriplets(trip.begin(), trip.end());
  return form;
}

DivergenceForm radial_form(const Function1D& f, int n, const Grid1D& grid) {
  if (n < 3) throw InvalidInput("radial_form: dimension n must be >= 3");
  const std::size_t N = grid.size();
  const SampledFn1D fs = f.sample(grid);
  if (!(fs.min() > 0.0)) throw InvalidInput("radial_form: f must be positive");
  DivergenceForm form;
  form.nodes = N;
  form.dirichlet.assign(N, 0);
  form.dirichlet.front() = form.dirichlet.back() = 1;
  form.mass.resize(N);
  std::vector<double> b(N);
  for (std::size_t i = 0; i < N; ++i) {
    form.mass[i] = std::pow(fs[i], 2.0 * n);
    b[i] = std::pow(fs[i], 2.0 * n - 4.0);
  }
  const double ih2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double cl = std::sqrt(b[i] * b[i - 1]) * ih2, cr = std::sqrt(b[i] * b[i + 1]) * ih2;
    trip.emplace_back(i, i - 1, -cl);
    trip.emplace_back(i, i + 1, -cr);
    trip.emplace_back(i, i, cl + cr);
  }
  form.stiffness.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  form.stiffness.setFromTriplets(trip.begin(), trip.end());
  return form;
}

// ---------------------------------------------------------------------------

LinearSystem assemble(DivergenceForm form, const std::vector<double>& V, double lambda) {
  if (V.size() != form.nodes) throw InvalidInput("assemble: potential size mismatch");
  if (!std::isfinite(lambda)) throw InvalidInput("assemble: non-finite lambda");
  for (double m : form.mass)
    if (!(m > 0.0)) throw InvalidInput("assemble: weight a must be positive");
  LinearSystem s;
  s.potential.resize(form.nodes);
  s.local.assign(form.nodes, -1);
  for (std::size_t p = 0; p < form.nodes; ++p) {
    s.potential[p] = V[p] - lambda;
    if (!form.dirichlet[p]) {
      s.local[p] = static_cast<std::ptrdiff_t>(s.free_nodes.size());
      s.free_nodes.push_back(p);
    }
  }
  const auto nf = static_cast<Eigen::Index>(s.free_nodes.size());
  std::vector<Eigen::Triplet<double>> tii, tib;
  for (Eigen::Index col = 0; col < form.stiffness.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(form.stiffness, col); it; ++it) {
      const auto r = s.local[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      const auto c = s.local[static_cast<std::size_t>(it.col())];
      if (c >= 0) tii.emplace_back(r, c, it.value());
      else tib.emplace_back(r, it.col(), it.value());
    }
  for (std::size_t p : s.free_nodes) {
    const auto r = s.local[p];
    tii.emplace_back(r, r, form.mass[p] * s.potential[p]);
  }
  s.a_ii.resize(nf, nf);
  s.a_ii.setFromTriplets(tii.begin(), tii.end());
  s.a_ib.resize(nf, static_cast<Eigen::Index>(form.nodes));
  s.a_ib.setFromTriplets(tib.begin(), tib.end());
  s.form = std::move(form);
  return s;
}

LinearSystem assemble(const ConformalMetric2D& metric, const SampledFn2D& V, double lambda) {
  if (!(V.grid() == metric.grid())) throw InvalidInput("assemble: V and metric grids differ");
  return assemble(planar_form(metric), V.values(), lambda);
}

// ---------------------------------------------------------------------------

struct DirichletSolver::Impl {
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  std::unique_ptr<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                           Eigen::IncompleteCholesky<double>>>
      cg;
};

DirichletSolver::DirichletSolver(LinearSystem system, SolverOptions opts)
    : system_(std::move(system)), opts_(opts), impl_(std::make_unique<Impl>()) {
  const auto n = static_cast<std::size_t>(system_.a_ii.rows());
  if (n == 0) return;
  if (n <= opts_.pcg_threshold) {
    impl_->ldlt = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(system_.a_ii);
    if (impl_->ldlt->info() != Eigen::Success)
      throw NumericalFailure("dirichlet solver: factorization failed (lambda near a discrete eigenvalue?)");
    const Eigen::VectorXd d = impl_->ldlt->vectorD();
    const double dmax = d.cwiseAbs().maxCoeff(), dmin = d.cwiseAbs().minCoeff();
    if (!(dmin > opts_.pivot_ratio * dmax)) {
      std::ostringstream os;
      os << "dirichlet solver: lambda near a discrete eigenvalue (pivot ratio " << dmin / dmax
         << "); shift lambda";
      throw NumericalFailure(os.str());
    }
  } else {
    impl_->cg = std::make_unique<Eigen::ConjugateGradient<
        Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>>>();
    impl_->cg->setTolerance(opts_.pcg_tol);
    impl_->cg->setMaxIterations(opts_.pcg_max_iter);
    impl_->cg->compute(system_.a_ii);
    if (impl_->cg->info() != Eigen::Success)
      throw NumericalFailure("dirichlet solver: incomplete Cholesky preconditioner failed");
  }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

bool DirichletSolver::iterative() const { return impl_->cg != nullptr; }

std::vector<double> DirichletSolver::solve(const std::vector<double>& boundary,
                                           const std::vector<double>* source) const {
  const LinearSystem& s = system_;
  const std::size_t N = s.form.nodes;
  if (boundary.size() != N) throw InvalidInput("dirichlet solve: boundary vector size mismatch");
  if (source && source->size() != N) throw InvalidInput("dirichlet solve: source size mismatch");
  Eigen::VectorXd ub = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t p = 0; p < N; ++p)
    if (s.form.dirichlet[p]) ub[static_cast<Eigen::Index>(p)] = boundary[p];
  Eigen::VectorXd rhs = -(s.a_ib * ub);
  if (source)
    for (std::size_t k = 0; k < s.free_nodes.size(); ++k) {
      const std::size_t p = s.free_nodes[k];
      rhs[static_cast<Eigen::Index>(k)] += s.form.mass[p] * (*source)[p];
    }
  std::vector<double> u(N);
  for (std::size_t p = 0; p < N; ++p) u[p] = s.form.dirichlet[p] ? boundary[p] : 0.0;
  const double bnorm = rhs.norm();
  if (rhs.size() == 0 || bnorm == 0.0) {
    last_residual_ = 0.0;
    return u;
  }
  Eigen::VectorXd x;
  if (impl_->ldlt) {
    x = impl_->ldlt->solve(rhs);
  } else {
    x = impl_->cg->solve(rhs);
    if (impl_->cg->info() != Eigen::Success) {
      std::ostringstream os;
      os << "dirichlet solver: PCG did not converge in " << impl_->cg->iterations()
         << " iterations (error " << impl_->cg->error() << "); lambda may be near the discrete spectrum";
      throw NumericalFailure(os.str());
    }
  }
  last_residual_ = (s.a_ii * x - rhs).norm() / bnorm;
  if (!(last_residual_ <= opts_.residual_tol)) {
    std::ostringstream os;
    os << "dirichlet solver: relative residual " << last_residual_ << " exceeds "
       << opts_.residual_tol << " (lambda near a discrete eigenvalue?)";
    throw NumericalFailure(os.str());
  }
  for (std::size_t k = 0; k < s.free_nodes.size(); ++k) u[s.free_nodes[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

SampledFn2D dirichlet_solve(const LinearSystem& system, const SampledFn2D& boundary,
                            const SolverOptions& opts) {
  if (boundary.values().size() != system.form.nodes)
    throw InvalidInput("dirichlet_solve: boundary field size mismatch");
  const DirichletSolver solver(system, opts);
  return SampledFn2D(boundary.grid(), solver.solve(boundary.values()));
}

// ---------------------------------------------------------------------------

std::vector<double> dn_extract(const SampledFn2D& u, const ConformalMetric2D& metric,
                               const BoundaryArc& arc) {
  const Grid2D& g = u.grid();
  if (!(g == metric.grid())) throw InvalidInput("dn_extract: field and metric grids differ");
  const double h = g.hx();
  const bool left = arc.component == cyl::Component::Gamma0;
  std::vector<double> out;
  for (std::size_t j : arc.nodes(g)) {
    double dudx;
    std::size_t i0;
    if (left) {
      i0 = 0;
      dudx = (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * h);
    } else {
      i0 = g.nx() - 1;
      dudx = (3.0 * u(i0, j) - 4.0 * u(i0 - 1, j) + u(i0 - 2, j)) / (2.0 * h);
    }
    const double s = 1.0 / std::sqrt(metric.a(i0, j));
    out.push_back(left ? -s * dudx : s * dudx);
  }
  return out;
}

std::string BasisSpec::describe() const {
  std::ostringstream os;
  os << "cos4-bumps(" << bumps << ")";
  if (fourier >= 0) os << "+fourier(0.." << fourier << ")";
  return os.str();
}

std::vector<std::vector<double>> dirichlet_basis(const Grid2D& grid, const BoundaryArc& gamma_d,
                                                 const BasisSpec& basis) {
  if (basis.bumps < 0) throw InvalidInput("dirichlet_basis: negative bump count");
  const double two_pi = 2.0 * std::numbers::pi;
  const double L = gamma_d.full_circle() ? two_pi : gamma_d.y_b - gamma_d.y_a;
  const std::size_t i0 = gamma_d.x_index(grid);
  const auto nodes = gamma_d.nodes(grid);
  auto local_t = [&](double y) {
    double t = std::fmod(y - gamma_d.y_a, two_pi);
    if (t < 0.0) t += two_pi;
    return t;
  };
  std::vector<std::vector<double>> out;
  const double r = L / (basis.bumps + 1);
  for (int m = 0; m < basis.bumps; ++m) {
    const double center = (m + 1) * r;
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t j : nodes) {
      const double s = (local_t(grid.y(j)) - center) / r;
      if (std::fabs(s) < 1.0) {
        const double c = std::cos(0.5 * std::numbers::pi * s);
        v[grid.index(i0, j)] = c * c * c * c;
      }
    }
    out.push_back(std::move(v));
  }
  if (basis.fourier >= 0) {
    const bool windowed = !gamma_d.full_circle();
    for (int k = 0; k <= basis.fourier; ++k)
      for (int kind = 0; kind < (k == 0 ? 1 : 2); ++kind) {
        std::vector<double> v(grid.size(), 0.0);
        for (std::size_t j : nodes) {
          const double y = grid.y(j);
          double val = kind == 0 ? std::cos(k * y) : std::sin(k * y);
          if (windowed) {
            const double s = std::sin(std::numbers::pi * local_t(y) / L);
            val *= s * s * s * s;
          }
          v[grid.index(i0, j)] = val;
        }
        out.push_back(std::move(v));
      }
  }
  return out;
}

DnMatrix2D dn_matrix(const ConformalMetric2D& metric, const SampledFn2D& V, double lambda,
                     const BoundaryArc& gamma_d, const BoundaryArc& gamma_n,
                     const BasisSpec& basis, const SolverOptions& opts) {
  const Grid2D& g = metric.grid();
  DnMatrix2D m;
  m.grid = g;
  m.basis = basis.describe() + " on " + gamma_d.describe() + " -> " + gamma_n.describe();
  m.metric_hash = metric.hash();
  m.row_nodes = gamma_n.nodes(g);
  const auto data = dirichlet_basis(g, gamma_d, basis);
  m.values.resize(static_cast<Eigen::Index>(m.row_nodes.size()), static_cast<Eigen::Index>(data.size()));
  if (data.empty()) return m;
  const DirichletSolver solver(assemble(metric, V, lambda), opts);
  for (std::size_t col = 0; col < data.size(); ++col) {
    const SampledFn2D u(g, solver.solve(data[col]));
    const auto flux = dn_extract(u, metric, gamma_n);
    for (std::size_t r = 0; r < flux.size(); ++r)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = flux[r];
  }
  return m;
}

MatrixMismatch compare_matrices(const DnMatrix2D& a, const DnMatrix2D& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols() || !(a.grid == b.grid))
    throw InvalidInput("compare_matrices: DN matrices differ in shape or grid");
  MatrixMismatch mm;
  if (a.values.size() == 0) return mm;
  mm.max_abs = (a.values - b.values).cwiseAbs().maxCoeff();
  const double scale =
      std::max({a.values.cwiseAbs().maxCoeff(), b.values.cwiseAbs().maxCoeff(), 1e-300});
  mm.rel = mm.max_abs / scale;
  return mm;
}

void write_field_csv(std::ostream& os, const SampledFn2D& u) {
  const Grid2D& g = u.grid();
  os << "x,y,u\n";
  char buf[128];
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) {
      std::snprintf(buf, sizeof buf, "%.14e,%.14e,%.14e\n", g.x(i), g.y(j), u(i, j));
      os << buf;
    }
}

void write_dn_matrix_csv(std::ostream& os, const DnMatrix2D& m) {
  os << "y";
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) os << ",b" << c;
  os << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    std::snprintf(buf, sizeof buf, "%.14e", m.grid.y(m.row_nodes[static_cast<std::size_t>(r)]));
    os << buf;
    for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.14e", m.values(r, c));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace dnlab::e2d

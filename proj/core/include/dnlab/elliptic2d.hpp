#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "dnlab/cylinder_dn.hpp"
#include "dnlab/numerics.hpp"

namespace dnlab::e2d {

/// x_i = i/(nx-1) on [0,1]; y_j = 2 pi j / ny on the circle (periodic).
/// Node (i, j) has flat index i * ny + j.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double x(std::size_t i) const { return i + 1 == nx_ ? 1.0 : static_cast<double>(i) * hx_; }
  double y(std::size_t j) const { return static_cast<double>(j % ny_) * hy_; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * ny_ + (j % ny_); }
  Grid1D x_grid() const { return Grid1D(nx_); }

  friend bool operator==(const Grid2D& a, const Grid2D& b) { return a.nx_ == b.nx_ && a.ny_ == b.ny_; }

 private:
  std::size_t nx_, ny_;
  double hx_, hy_;
};

class SampledFn2D {
 public:
  SampledFn2D(Grid2D grid, std::vector<double> values);
  static SampledFn2D constant(const Grid2D& grid, double v);
  template <class F>
  static SampledFn2D from(const Grid2D& grid, F&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.ny(); ++j) v[grid.index(i, j)] = fn(grid.x(i), grid.y(j));
    return SampledFn2D(grid, std::move(v));
  }

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double min() const;
  double max() const;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// G = a (dx^2 + g_flat) with a = c^4 f^4, in dimension n, restricted to
/// functions of (x, y).
struct ConformalMetric2D {
  ConformalMetric2D(int n, Function1D f, SampledFn2D c);
  /// c = 1.
  ConformalMetric2D(int n, Function1D f, const Grid2D& grid);

  int n;
  Function1D f;
  SampledFn2D c;

  const Grid2D& grid() const { return c.grid(); }
  double a(std::size_t i, std::size_t j) const;
  /// FNV-1a over the weight field and n.
  std::uint64_t hash() const;
};

/// Angular interval [y_a, y_b) on x = 0 (Gamma0) or x = 1 (Gamma1). An interval
/// of length >= 2 pi is the full circle.
struct BoundaryArc {
  cyl::Component component = cyl::Component::Gamma0;
  double y_a = 0.0;
  double y_b = 2.0 * std::numbers::pi;

  bool full_circle() const;
  bool contains(double y) const;
  /// Column indices j of the arc nodes, increasing.
  std::vector<std::size_t> nodes(const Grid2D& grid) const;
  std::size_t x_index(const Grid2D& grid) const;
  std::string describe() const;
};

bool arcs_disjoint(const BoundaryArc& a, const BoundaryArc& b, const Grid2D& grid);
/// True when some boundary node lies in neither arc.
bool arcs_leave_gap(const BoundaryArc& a, const BoundaryArc& b, const Grid2D& grid);

/// Weighted divergence-form operator K u + mass (V - lambda) u on node vectors.
/// K = -D(b D .) with b = a^{n/2-1} averaged geometrically onto half nodes, so
/// scaling a by a conformal factor transforms the stencil exactly. Rows of
/// Dirichlet nodes are empty.
struct DivergenceForm {
  std::size_t nodes = 0;
  std::vector<char> dirichlet;
  std::vector<double> mass;  // a^{n/2}
  Eigen::SparseMatrix<double> stiffness;

  /// Delta_g u = -(K u) / mass on free nodes; NaN on Dirichlet nodes.
  std::vector<double> laplacian(const std::vector<double>& u) const;
};

/// 2D form on the cylinder grid; Dirichlet nodes are the x = 0 and x = 1 columns.
DivergenceForm planar_form(const ConformalMetric2D& metric);
/// y-independent reduction on [0,1]: Delta_g u = f^{-2n} (f^{2n-4} u')'.
DivergenceForm radial_form(const Function1D& f, int n, const Grid1D& grid);

struct SolverOptions {
  /// Direct factorization at or below this many unknowns, PCG above. PCG noise
  /// near 1e-12 is large enough to break the monotone-iteration certificate.
  std::size_t pcg_threshold = 1000000;
  double pcg_tol = 1e-12;
  int pcg_max_iter = 20000;
  /// min |pivot| / max |pivot| below this means lambda is near a discrete eigenvalue.
  double pivot_ratio = 1e-12;
  double residual_tol = 1e-10;
};

/// Interior block A_II = K_II + diag(mass (V - lambda)) and coupling A_IB.
struct LinearSystem {
  DivergenceForm form;
  std::vector<double> potential;  // V - lambda per node
  std::vector<std::size_t> free_nodes;
  std::vector<std::ptrdiff_t> local;  // node -> free index or -1
  Eigen::SparseMatrix<double> a_ii;
  Eigen::SparseMatrix<double> a_ib;  // columns indexed by node
};

LinearSystem assemble(DivergenceForm form, const std::vector<double>& V, double lambda);
LinearSystem assemble(const ConformalMetric2D& metric, const SampledFn2D& V, double lambda);

/// Factorized (or preconditioned) interior system, reusable across data.
class DirichletSolver {
 public:
  explicit DirichletSolver(LinearSystem system, SolverOptions opts = {});
  ~DirichletSolver();
  DirichletSolver(DirichletSolver&&) noexcept;
  DirichletSolver& operator=(DirichletSolver&&) noexcept;

  /// Full node vector u with u = boundary on Dirichlet nodes and
  /// A_II u_I = mass * source - A_IB u_B elsewhere (source optional).
  std::vector<double> solve(const std::vector<double>& boundary,
                            const std::vector<double>* source = nullptr) const;

  bool iterative() const;
  double last_residual() const { return last_residual_; }
  const LinearSystem& system() const { return system_; }

 private:
  struct Impl;
  LinearSystem system_;
  SolverOptions opts_;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

SampledFn2D dirichlet_solve(const LinearSystem& system, const SampledFn2D& boundary,
                            const SolverOptions& opts = {});

/// Outward unit normal derivative -+a^{-1/2} du/dx at the arc nodes, with the
/// one-sided three-point difference.
std::vector<double> dn_extract(const SampledFn2D& u, const ConformalMetric2D& metric,
                               const BoundaryArc& arc);

struct BasisSpec {
  int bumps = 8;     // cos^4 bumps with contiguous supports inside the arc
  int fourier = -1;  // highest Fourier mode; -1 for none. Windowed unless the arc is the full circle
  std::string describe() const;
};

/// Boundary data per basis function, as full-node vectors supported on gamma_d.
std::vector<std::vector<double>> dirichlet_basis(const Grid2D& grid, const BoundaryArc& gamma_d,
                                                 const BasisSpec& basis);

struct DnMatrix2D {
  Eigen::MatrixXd values;  // rows: gamma_n nodes, columns: basis functions
  std::vector<std::size_t> row_nodes;
  std::string basis;
  Grid2D grid{8, 8};
  std::uint64_t metric_hash = 0;
};

DnMatrix2D dn_matrix(const ConformalMetric2D& metric, const SampledFn2D& V, double lambda,
                     const BoundaryArc& gamma_d, const BoundaryArc& gamma_n,
                     const BasisSpec& basis = {}, const SolverOptions& opts = {});

struct MatrixMismatch {
  double max_abs = 0.0;
  double rel = 0.0;  // max_abs / max(|A|_max, |B|_max, 1e-300)
};

MatrixMismatch compare_matrices(const DnMatrix2D& a, const DnMatrix2D& b);

struct LinkReport {
  DnMatrix2D conformal;  // Lambda_{c^4 g}(lambda), V = 0
  DnMatrix2D linked;     // Lambda_{g, V_{g,c,lambda}}(lambda)
  MatrixMismatch mismatch;
  bool disjoint = false;  // case 1 (true) or case 2
  double tolerance = 0.0;
  bool pass = false;
};

/// Checks c = 1 on both arcs and either disjoint arcs or d_nu c = 0 on gamma_n
/// (PreconditionViolation otherwise), then compares the two DN matrices.
LinkReport verify_link(const ConformalMetric2D& metric_with_c, double lambda,
                       const BoundaryArc& gamma_d, const BoundaryArc& gamma_n, double tolerance,
                       const BasisSpec& basis = {}, const SolverOptions& opts = {});

/// The same comparison without the precondition checks.
LinkReport compare_link_unchecked(const ConformalMetric2D& metric_with_c, double lambda,
                                  const BoundaryArc& gamma_d, const BoundaryArc& gamma_n,
                                  double tolerance, const BasisSpec& basis = {},
                                  const SolverOptions& opts = {});

/// Columns x, y, u.
void write_field_csv(std::ostream& os, const SampledFn2D& u);
/// Header row of basis indices, then one row per gamma_n node: y, entries.
void write_dn_matrix_csv(std::ostream& os, const DnMatrix2D& m);

}  // namespace dnlab::e2d

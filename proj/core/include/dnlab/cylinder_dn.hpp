#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dnlab/numerics.hpp"
#include "dnlab/scaled_real.hpp"
#include "dnlab/sturm1d.hpp"

namespace dnlab::cyl {

// Transverse cross-sections K.
struct Circle {};                // mu = k^2, k >= 0
struct FlatTorus {               // mu = |m|^2, m in Z^d
  int d = 2;
};
struct DirichletInterval {};     // mu = k^2 pi^2, k >= 1 (cross-section with boundary)
struct Explicit {                // mu >= 0, sorted, repeated for multiplicity
  std::vector<double> mu;
};
using TransverseModel = std::variant<Circle, FlatTorus, DirichletInterval, Explicit>;

struct TransverseEigen {
  int k = 0;  // harmonic index of this distinct value
  double mu = 0.0;
  int multiplicity = 1;
};

/// First `count` distinct transverse eigenvalues with multiplicities.
/// Indices start at 1 for DirichletInterval and at 0 otherwise.
std::vector<TransverseEigen> transverse_spectrum(const TransverseModel& model, int count);

/// Harmonics with index k <= k_max.
std::vector<TransverseEigen> transverse_harmonics(const TransverseModel& model, int k_max);

std::string describe(const TransverseModel& model);

/// g = f^4 (dx^2 + g_K) on [0,1] x K, dim = n.
struct WarpedCylinder {
  WarpedCylinder(int n, Function1D f, TransverseModel transverse, Grid1D grid = Grid1D(2001));

  int n;
  Function1D f;
  TransverseModel transverse;
  Grid1D grid;
};

/// q_f = (f^{n-2})'' / f^{n-2}. Exact derivatives for analytic f, diff2_central
/// of f^{n-2} for sampled f.
SampledFn1D q_warp(const Function1D& f, int n, const Grid1D& grid);

/// Q = q_f + (V - lambda) f^4 as an evaluable potential on cyl.grid.
sturm::Potential1D effective_potential(const WarpedCylinder& cyl, const Function1D& V,
                                       double lambda);

struct GuardResult {
  bool pass = true;
  double min_margin = 0.0;  // min over k of |Delta(mu_k)| / sup|s0|
  int worst_k = 0;
  double worst_mu = 0.0;
  double threshold = 0.0;
};

/// lambda is a Dirichlet eigenvalue of -Delta_g + V iff some Delta_Q(mu_k) = 0.
GuardResult guard_lambda(const WarpedCylinder& cyl, const Function1D& V, double lambda, int k_max,
                         double threshold = 1e-8);

/// 2x2 DN block on harmonic mu; rows/columns indexed by (Gamma_0, Gamma_1).
struct DnBlock {
  int k = 0;
  double mu = 0.0;
  int multiplicity = 1;
  ScaledReal a00, a01, a10, a11;
  ScaledReal delta;

  const ScaledReal& entry(int row, int col) const;
};

DnBlock dn_block(const WarpedCylinder& cyl, const sturm::Potential1D& q, double mu);
DnBlock dn_block(const WarpedCylinder& cyl, const Function1D& V, double lambda, double mu);

/// f^{n-2}(1) f^n(1) / (f^{n-2}(0) f^n(0)); equals a01 / a10 for every block.
double off_diagonal_ratio(const WarpedCylinder& cyl);

enum class Component { Gamma0 = 0, Gamma1 = 1 };
const char* to_string(Component c);

struct PartialDnEntry {
  int k = 0;
  double mu = 0.0;
  int multiplicity = 1;
  ScaledReal value;
};

/// The (gamma_n, gamma_d) entry of each block with k <= k_max.
struct PartialDnReport {
  Component gamma_d = Component::Gamma0;
  Component gamma_n = Component::Gamma1;
  std::vector<PartialDnEntry> entries;
};

PartialDnReport partial_dn(const WarpedCylinder& cyl, const Function1D& V, double lambda,
                           Component gamma_d, Component gamma_n, int k_max);
PartialDnReport partial_dn(std::span<const DnBlock> blocks, Component gamma_d, Component gamma_n);

struct DnDelta {
  int k = 0;
  double mu = 0.0;
  double abs_delta = 0.0;
  double rel_delta = 0.0;  // |a-b| / max(|a|, |b|, 1e-300), formed in scaled arithmetic
};

struct DnComparison {
  std::vector<DnDelta> per_k;
  double max_abs = 0.0;
  double max_rel = 0.0;
  int argmax_rel_k = 0;
};

/// Throws InvalidInput when the reports differ in shape or harmonics.
DnComparison compare_dn(const PartialDnReport& a, const PartialDnReport& b);

/// Columns k, mu, multiplicity, a00, a01, a10, a11.
void write_blocks_csv(std::ostream& os, std::span<const DnBlock> blocks);

}  // namespace dnlab::cyl

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dnlab/numerics.hpp"
#include "dnlab/scaled_real.hpp"

namespace dnlab::sturm {

/// Effective 1D potential Q on [0,1] together with the grid on which it is
/// sampled for output, bracketing and deformation.
class Potential1D {
 public:
  Potential1D(Function1D q, Grid1D grid);
  /// Raw samples; the grid is taken from the samples.
  explicit Potential1D(SampledFn1D samples);

  double operator()(double x) const { return q_(x); }
  const Function1D& function() const { return q_; }
  const Grid1D& grid() const { return grid_; }
  const SampledFn1D& samples() const { return samples_; }
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  Function1D q_;
  Grid1D grid_;
  SampledFn1D samples_;
  double min_, max_;
};

struct IntegratorOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  /// Renormalize the state once its magnitude exceeds 2^renorm_bits.
  int renorm_bits = 512;
  std::size_t max_steps = 50'000'000;
};

/// Values at the grid nodes of one launched pair, stored as mantissas with a
/// shared binary exponent per node: true value = stored * 2^exponent[i].
struct PairTrajectory {
  std::vector<std::array<double, 4>> state;  // (c, c', s, s')
  std::vector<std::int64_t> exponent;
};

/// Fundamental systems at spectral parameter mu, launched from both ends.
struct FssAtMu {
  double mu = 0.0;
  // Launched at x = 0, read at x = 1.
  ScaledReal c0_1, dc0_1, s0_1, ds0_1;
  // Launched at x = 1, read at x = 0.
  ScaledReal c1_0, dc1_0, s1_0, ds1_0;
  /// sup over accepted steps of |s0|; scale reference for eigenvalue proximity.
  ScaledReal s0_sup;
  std::optional<PairTrajectory> from_left;   // c0, s0 at nodes
  std::optional<PairTrajectory> from_right;  // c1, s1 at nodes

  /// max over stored nodes of |W - 1| / max(1, |c s'|, |c' s|) for both
  /// launched pairs. Requires trajectories.
  double max_wronskian_deviation() const;
};

/// Integrates v'' = (Q + mu) v from both endpoints with the Cauchy data
/// c(a)=1, c'(a)=0, s(a)=0, s'(a)=1.
FssAtMu integrate_fss(const Potential1D& q, double mu, bool keep_trajectories = false,
                      const IntegratorOptions& opts = {});

/// Delta = W(s0,s1), D = W(c0,s1), E = -W(c1,s0); M = -D/Delta, N = E/Delta.
struct SpectralFunctions {
  double mu = 0.0;
  ScaledReal delta, d, e;
  double m = 0.0;
  double n = 0.0;
  /// |Delta| / sup|s0|; near zero when -mu is close to a Dirichlet eigenvalue.
  double margin = 0.0;
};

/// Throws NumericalFailure ("eigenvalue hit") when margin < hit_threshold.
SpectralFunctions spectral_functions(const Potential1D& q, double mu,
                                     double hit_threshold = 1e-10,
                                     const IntegratorOptions& opts = {});

/// Characteristic function only (one integration from x = 0).
ScaledReal characteristic(const Potential1D& q, double mu, const IntegratorOptions& opts = {});

/// Number of Dirichlet eigenvalues of -d^2/dx^2 + Q strictly below lambda,
/// from the Pruefer phase of s0(., -lambda).
int count_eigenvalues_below(const Potential1D& q, double lambda,
                            const IntegratorOptions& opts = {});

struct DirichletSpectrum {
  std::vector<double> eigenvalues;  // lambda^dir_1 < lambda^dir_2 < ...
  std::vector<double> alphas;       // zeros of Delta: alpha_n = -lambda^dir_n
};

DirichletSpectrum dirichlet_eigenvalues(const Potential1D& q, int count, double rel_tol = 1e-11,
                                        const IntegratorOptions& opts = {});

/// Single eigenvalue lambda^dir_index (1-based).
double dirichlet_eigenvalue(const Potential1D& q, int index, double rel_tol = 1e-11,
                            const IntegratorOptions& opts = {});

struct Eigenfunction {
  double lambda = 0.0;
  SampledFn1D phi;   // unit L^2 norm, phi'(0) > 0
  SampledFn1D dphi;  // from the integrator state
};

/// Normalized eigenfunction on the potential's grid. Fails when
/// |s0(1, -lambda)| / sup|s0| exceeds `not_eigen_threshold`.
Eigenfunction normalized_eigenfunction(const Potential1D& q, double lambda_dir,
                                       double not_eigen_threshold = 1e-6,
                                       const IntegratorOptions& opts = {});

/// C * prod_{n <= terms} (1 - mu / alpha_n).
double hadamard_truncated(std::span<const double> alphas, double c, double mu, std::size_t terms);

}  // namespace dnlab::sturm

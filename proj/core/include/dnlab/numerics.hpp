#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dnlab/errors.hpp"

namespace dnlab {

/// Uniform grid x_i = i / (n_points - 1) on [0, 1].
class Grid1D {
 public:
  explicit Grid1D(std::size_t n_points);

  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  /// Node i; the last node is exactly 1.
  double x(std::size_t i) const { return i + 1 == n_ ? 1.0 : static_cast<double>(i) * h_; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) { return a.n_ == b.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// Real-valued function sampled on a Grid1D. Values are always finite.
class SampledFn1D {
 public:
  SampledFn1D(Grid1D grid, std::vector<double> values);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double min() const;
  double max() const;
  double sup_abs() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Composite Simpson integral over [0,1]; the last panel falls back to the
/// trapezoid rule when the number of intervals is odd.
double quad(const SampledFn1D& f);

/// F(x_i) = integral of f over [x_i, 1]; F(1) = 0 exactly and F(0) == quad(f)
/// up to summation order.
SampledFn1D cumquad_from_right(const SampledFn1D& f);

/// Second derivative: central differences inside, one-sided second-order
/// four-point stencils at the endpoints. Needs at least 5 points.
SampledFn1D diff2_central(const SampledFn1D& f);

// ---------------------------------------------------------------------------
// Analytic families with exact first and second derivatives.

struct ConstantTerm {
  double value = 0.0;
};

/// c0 + c1 x + c2 x^2 + ...
struct PolynomialTerm {
  std::vector<double> coeffs;
};

/// amp * exp(-width * (x - center)^2)
struct GaussianTerm {
  double amp = 0.0;
  double width = 1.0;
  double center = 0.5;
};

/// a0 + sum_k a_k cos(k pi x) + b_k sin(k pi x), k = 1, 2, ...
struct FourierTerm {
  double a0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

/// amp * exp(rate * x)
struct ExponentialTerm {
  double amp = 1.0;
  double rate = 0.0;
};

using AnalyticTerm =
    std::variant<ConstantTerm, PolynomialTerm, GaussianTerm, FourierTerm, ExponentialTerm>;

/// Finite sum of analytic terms.
class AnalyticFn {
 public:
  AnalyticFn() = default;
  explicit AnalyticFn(std::vector<AnalyticTerm> terms) : terms_(std::move(terms)) {}
  AnalyticFn(AnalyticTerm term) : terms_{std::move(term)} {}  // NOLINT: implicit on purpose

  static AnalyticFn constant(double c) { return AnalyticFn(ConstantTerm{c}); }

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  const std::vector<AnalyticTerm>& terms() const { return terms_; }
  std::string describe() const;

 private:
  std::vector<AnalyticTerm> terms_;
};

/// Not-a-knot cubic spline through samples on a uniform grid. O(h^4).
class CubicSpline {
 public:
  explicit CubicSpline(const SampledFn1D& samples);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  std::size_t locate(double x, double& t) const;

  double h_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at nodes
};

/// A function of x on [0,1] in one of three forms: analytic family (exact
/// derivatives), raw samples (spline interpolation, differenced derivatives),
/// or an opaque composition.
class Function1D {
 public:
  struct Impl;

  Function1D(AnalyticFn fn);  // NOLINT: implicit so analytic specs pass straight through
  static Function1D from_samples(SampledFn1D samples);
  static Function1D from_impl(std::shared_ptr<const Impl> impl);

  double operator()(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  /// True when d1/d2 are exact (analytic family or composition of such).
  bool exact_derivatives() const;
  /// Non-null for functions built from raw samples.
  const SampledFn1D* samples() const;

  SampledFn1D sample(const Grid1D& grid) const;
  std::string describe() const;

 private:
  explicit Function1D(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct Function1D::Impl {
  virtual ~Impl() = default;
  virtual double value(double x) const = 0;
  virtual double d1(double x) const = 0;
  virtual double d2(double x) const = 0;
  virtual bool exact_derivatives() const = 0;
  virtual const SampledFn1D* samples() const { return nullptr; }
  virtual std::string describe() const = 0;
};

}  // namespace dnlab

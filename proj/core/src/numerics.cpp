#include "dnlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnlab {

Grid1D::Grid1D(std::size_t n_points) : n_(n_points), h_(0.0) {
  if (n_points < 3) throw InvalidInput("Grid1D needs at least 3 points");
  h_ = 1.0 / static_cast<double>(n_points - 1);
}

SampledFn1D::SampledFn1D(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidInput("SampledFn1D: " + std::to_string(values_.size()) + " values for a " +
                       std::to_string(grid_.size()) + "-point grid");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw InvalidInput("SampledFn1D: non-finite value at node " + std::to_string(i));
}

double SampledFn1D::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SampledFn1D::max() const { return *std::max_element(values_.begin(), values_.end()); }
double SampledFn1D::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::fabs(v));
  return s;
}

double quad(const SampledFn1D& f) {
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const std::size_t simpson_end = (n - 1) % 2 == 0 ? n - 1 : n - 2;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
    sum += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (simpson_end != n - 1) sum += 0.5 * h * (f[n - 2] + f[n - 1]);
  return sum;
}

SampledFn1D cumquad_from_right(const SampledFn1D& f) {
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  std::vector<double> F(n, 0.0);
  std::size_t i = n - 1;
  if ((n - 1) % 2 == 1) {
    // Mirror of quad(): the odd interval is the last one on the right.
    F[n - 2] = 0.5 * h * (f[n - 2] + f[n - 1]);
    i = n - 2;
  }
  for (; i >= 2; i -= 2) {
    F[i - 2] = F[i] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    // Quadratic through (i-2, i-1, i) integrated over [x_{i-1}, x_i].
    F[i - 1] = F[i] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
  }
  return SampledFn1D(f.grid(), std::move(F));
}

SampledFn1D diff2_central(const SampledFn1D& f) {
  const std::size_t n = f.size();
  if (n < 5) throw InvalidInput("diff2_central needs at least 5 points");
  const double h2 = f.grid().spacing() * f.grid().spacing();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return SampledFn1D(f.grid(), std::move(d));
}

// ---------------------------------------------------------------------------

namespace {

struct TermEval {
  double x;
  int order;  // 0, 1, 2

  double operator()(const ConstantTerm& t) const { return order == 0 ? t.value : 0.0; }

  double operator()(const PolynomialTerm& t) const {
    double p = 0.0, dp = 0.0, ddp = 0.0;
    for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) {
      ddp = ddp * x + 2.0 * dp;
      dp = dp * x + p;
      p = p * x + *it;
    }
    return order == 0 ? p : order == 1 ? dp : ddp;
  }

  double operator()(const GaussianTerm& t) const {
    const double u = x - t.center;
    const double g = t.amp * std::exp(-t.width * u * u);
    if (order == 0) return g;
    if (order == 1) return -2.0 * t.width * u * g;
    return (4.0 * t.width * t.width * u * u - 2.0 * t.width) * g;
  }

  double operator()(const FourierTerm& t) const {
    double s = order == 0 ? t.a0 : 0.0;
    for (std::size_t k = 0; k < t.cos_coeffs.size(); ++k) {
      const double w = static_cast<double>(k + 1) * std::numbers::pi;
      const double c = t.cos_coeffs[k];
      if (order == 0) s += c * std::cos(w * x);
      else if (order == 1) s -= c * w * std::sin(w * x);
      else s -= c * w * w * std::cos(w * x);
    }
    for (std::size_t k = 0; k < t.sin_coeffs.size(); ++k) {
      const double w = static_cast<double>(k + 1) * std::numbers::pi;
      const double b = t.sin_coeffs[k];
      if (order == 0) s += b * std::sin(w * x);
      else if (order == 1) s += b * w * std::cos(w * x);
      else s -= b * w * w * std::sin(w * x);
    }
    return s;
  }

  double operator()(const ExponentialTerm& t) const {
    const double e = t.amp * std::exp(t.rate * x);
    return order == 0 ? e : order == 1 ? t.rate * e : t.rate * t.rate * e;
  }
};

struct TermDescribe {
  std::ostringstream& os;
  void operator()(const ConstantTerm& t) const { os << "const(" << t.value << ")"; }
  void operator()(const PolynomialTerm& t) const {
    os << "poly(";
    for (std::size_t i = 0; i < t.coeffs.size(); ++i) os << (i ? "," : "") << t.coeffs[i];
    os << ")";
  }
  void operator()(const GaussianTerm& t) const {
    os << "gaussian(amp=" << t.amp << ",width=" << t.width << ",center=" << t.center << ")";
  }
  void operator()(const FourierTerm& t) const {
    os << "fourier(a0=" << t.a0 << ",cos=" << t.cos_coeffs.size() << ",sin=" << t.sin_coeffs.size()
       << ")";
  }
  void operator()(const ExponentialTerm& t) const {
    os << "exp(amp=" << t.amp << ",rate=" << t.rate << ")";
  }
};

double eval_sum(const std::vector<AnalyticTerm>& terms, double x, int order) {
  double s = 0.0;
  for (const auto& t : terms) s += std::visit(TermEval{x, order}, t);
  return s;
}

}  // namespace

double AnalyticFn::value(double x) const { return eval_sum(terms_, x, 0); }
double AnalyticFn::d1(double x) const { return eval_sum(terms_, x, 1); }
double AnalyticFn::d2(double x) const { return eval_sum(terms_, x, 2); }

std::string AnalyticFn::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    std::visit(TermDescribe{os}, terms_[i]);
  }
  return os.str();
}

// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(const SampledFn1D& samples)
    : h_(samples.grid().spacing()),
      y_(samples.values().begin(), samples.values().end()),
      m_(samples.size(), 0.0) {
  const std::size_t n = y_.size();
  const double h2 = h_ * h_;
  auto dd = [&](std::size_t i) { return (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / h2; };
  if (n == 3) {
    std::fill(m_.begin(), m_.end(), dd(1));
    return;
  }
  // Not-a-knot at x_1 and x_{n-2} pins M_1 and M_{n-2}; the rest is tridiagonal.
  m_[1] = dd(1);
  m_[n - 2] = dd(n - 2);
  if (n > 4) {
    const std::size_t lo = 2, hi = n - 3;  // unknowns M_lo..M_hi
    const std::size_t k = hi - lo + 1;
    std::vector<double> c(k), d(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = lo + r;
      double rhs = 6.0 * dd(i);
      if (i == lo) rhs -= m_[1];
      if (i == hi) rhs -= m_[n - 2];
      // Thomas sweep with diagonal 4 and unit off-diagonals.
      const double denom = 4.0 - (r ? c[r - 1] : 0.0);
      c[r] = 1.0 / denom;
      d[r] = (rhs - (r ? d[r - 1] : 0.0)) / denom;
    }
    m_[hi] = d[k - 1];
    for (std::size_t r = k - 1; r-- > 0;) m_[lo + r] = d[r] - c[r] * m_[lo + r + 1];
  }
  m_[0] = 2.0 * m_[1] - m_[2];
  m_[n - 1] = 2.0 * m_[n - 2] - m_[n - 3];
}

std::size_t CubicSpline::locate(double x, double& t) const {
  const std::size_t last = y_.size() - 2;
  const double s = x / h_;
  std::size_t i = s <= 0.0 ? 0 : static_cast<std::size_t>(s);
  if (i > last) i = last;
  t = s - static_cast<double>(i);
  return i;
}

double CubicSpline::value(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  const double u = 1.0 - t;
  return u * y_[i] + t * y_[i + 1] +
         h_ * h_ / 6.0 * ((u * u * u - u) * m_[i] + (t * t * t - t) * m_[i + 1]);
}

double CubicSpline::d1(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  const double u = 1.0 - t;
  return (y_[i + 1] - y_[i]) / h_ +
         h_ / 6.0 * ((1.0 - 3.0 * u * u) * m_[i] + (3.0 * t * t - 1.0) * m_[i + 1]);
}

double CubicSpline::d2(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  return (1.0 - t) * m_[i] + t * m_[i + 1];
}

// ---------------------------------------------------------------------------

namespace {

struct AnalyticImpl final : Function1D::Impl {
  AnalyticFn fn;
  explicit AnalyticImpl(AnalyticFn f) : fn(std::move(f)) {}
  double value(double x) const override { return fn.value(x); }
  double d1(double x) const override { return fn.d1(x); }
  double d2(double x) const override { return fn.d2(x); }
  bool exact_derivatives() const override { return true; }
  std::string describe() const override { return fn.describe(); }
};

struct SampledImpl final : Function1D::Impl {
  SampledFn1D samples_;
  CubicSpline spline;
  explicit SampledImpl(SampledFn1D s) : samples_(std::move(s)), spline(samples_) {}
  double value(double x) const override { return spline.value(x); }
  double d1(double x) const override { return spline.d1(x); }
  double d2(double x) const override { return spline.d2(x); }
  bool exact_derivatives() const override { return false; }
  const SampledFn1D* samples() const override { return &samples_; }
  std::string describe() const override {
    return "samples(" + std::to_string(samples_.size()) + ")";
  }
};

}  // namespace

Function1D::Function1D(AnalyticFn fn) : impl_(std::make_shared<AnalyticImpl>(std::move(fn))) {}

Function1D Function1D::from_samples(SampledFn1D samples) {
  return Function1D(std::make_shared<SampledImpl>(std::move(samples)));
}

Function1D Function1D::from_impl(std::shared_ptr<const Impl> impl) {
  if (!impl) throw InvalidInput("Function1D: null implementation");
  return Function1D(std::move(impl));
}

double Function1D::operator()(double x) const { return impl_->value(x); }
double Function1D::d1(double x) const { return impl_->d1(x); }
double Function1D::d2(double x) const { return impl_->d2(x); }
bool Function1D::exact_derivatives() const { return impl_->exact_derivatives(); }
const SampledFn1D* Function1D::samples() const { return impl_->samples(); }
std::string Function1D::describe() const { return impl_->describe(); }

SampledFn1D Function1D::sample(const Grid1D& grid) const {
  if (const SampledFn1D* s = samples(); s && s->grid() == grid) return *s;
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = impl_->value(grid.x(i));
  return SampledFn1D(grid, std::move(v));
}

}  // namespace dnlab

#include "dnlab/scaled_real.hpp"

#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dnlab {

ScaledReal ScaledReal::from_parts(double mantissa, std::int64_t exponent) {
  ScaledReal r;
  if (mantissa == 0.0) return r;
  if (!std::isfinite(mantissa)) throw std::domain_error("ScaledReal: non-finite mantissa");
  int fe = 0;
  const double fr = std::frexp(mantissa, &fe);  // |fr| in [0.5, 1)
  r.mantissa_ = 2.0 * fr;
  r.exponent_ = exponent + fe - 1;
  return r;
}

ScaledReal ScaledReal::from_double(double v) { return from_parts(v, 0); }

double ScaledReal::to_double() const {
  if (mantissa_ == 0.0) return 0.0;
  if (exponent_ > 1100) return mantissa_ > 0 ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity();
  if (exponent_ < -1200) return mantissa_ > 0 ? 0.0 : -0.0;
  return std::ldexp(mantissa_, static_cast<int>(exponent_));
}

double ScaledReal::log_abs() const {
  if (mantissa_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::fabs(mantissa_)) + static_cast<double>(exponent_) * std::numbers::ln2;
}

ScaledReal ScaledReal::abs() const {
  ScaledReal r = *this;
  r.mantissa_ = std::fabs(r.mantissa_);
  return r;
}

ScaledReal ScaledReal::operator-() const {
  ScaledReal r = *this;
  r.mantissa_ = -r.mantissa_;
  return r;
}

ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return ScaledReal::from_parts(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) {
  if (b.is_zero()) throw std::domain_error("ScaledReal: division by zero");
  if (a.is_zero()) return {};
  return ScaledReal::from_parts(a.mantissa_ / b.mantissa_, a.exponent_ - b.exponent_);
}

ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const ScaledReal& big = a.exponent_ >= b.exponent_ ? a : b;
  const ScaledReal& small = a.exponent_ >= b.exponent_ ? b : a;
  const std::int64_t shift = big.exponent_ - small.exponent_;
  if (shift > 64) return big;
  const double m = big.mantissa_ + std::ldexp(small.mantissa_, -static_cast<int>(shift));
  return ScaledReal::from_parts(m, big.exponent_);
}

ScaledReal operator-(const ScaledReal& a, const ScaledReal& b) { return a + (-b); }

double ratio(const ScaledReal& a, const ScaledReal& b) { return (a / b).to_double(); }

std::partial_ordering operator<=>(const ScaledReal& a, const ScaledReal& b) {
  if (a.sign() != b.sign()) return a.sign() <=> b.sign();
  if (a.is_zero()) return std::partial_ordering::equivalent;
  if (a.exponent_ != b.exponent_) {
    const auto by_exp = a.exponent_ <=> b.exponent_;
    // Larger exponent means larger magnitude; flip for negatives.
    if (a.sign() > 0) return by_exp;
    return 0 <=> by_exp;
  }
  return a.mantissa_ <=> b.mantissa_;
}

std::string ScaledReal::to_string() const {
  char buf[64];
  const double d = to_double();
  if (is_zero() || (std::isfinite(d) && d != 0.0 && std::fabs(d) > 1e-300)) {
    std::snprintf(buf, sizeof buf, "%.14e", d);
    return buf;
  }
  // Out of double range: rebuild a decimal mantissa from log10|x|.
  const double l10 = (std::log10(std::fabs(mantissa_)) +
                      static_cast<double>(exponent_) * std::numbers::log10e * std::numbers::ln2);
  const double e10 = std::floor(l10);
  double m10 = std::pow(10.0, l10 - e10);
  if (mantissa_ < 0) m10 = -m10;
  std::snprintf(buf, sizeof buf, "%.14fe%+.0f", m10, e10);
  return buf;
}

}  // namespace dnlab

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace dnlab {

/// Real number stored as mantissa * 2^exponent with |mantissa| in [1,2).
///
/// Characteristic functions grow like sinh(sqrt(mu)) and leave the double
/// range for large transverse eigenvalues; this type keeps them exact up to
/// mantissa rounding.
class ScaledReal {
 public:
  constexpr ScaledReal() = default;

  /// Exact for every finite double.
  static ScaledReal from_double(double v);
  /// mantissa * 2^exponent, renormalized.
  static ScaledReal from_parts(double mantissa, std::int64_t exponent);

  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }
  bool is_zero() const { return mantissa_ == 0.0; }
  int sign() const { return (mantissa_ > 0.0) - (mantissa_ < 0.0); }

  /// Saturates to +-inf / 0 outside the double range.
  double to_double() const;
  /// log|x|; -inf for zero.
  double log_abs() const;

  ScaledReal abs() const;
  ScaledReal operator-() const;

  friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b);
  friend ScaledReal operator/(const ScaledReal& a, const ScaledReal& b);
  friend ScaledReal operator+(const ScaledReal& a, const ScaledReal& b);
  friend ScaledReal operator-(const ScaledReal& a, const ScaledReal& b);

  /// Ratio a/b as an ordinary double; the exponents cancel first.
  friend double ratio(const ScaledReal& a, const ScaledReal& b);

  /// Orders by value.
  friend std::partial_ordering operator<=>(const ScaledReal& a, const ScaledReal& b);
  friend bool operator==(const ScaledReal& a, const ScaledReal& b) = default;

  std::string to_string() const;

 private:
  double mantissa_ = 0.0;
  std::int64_t exponent_ = 0;
};

}  // namespace dnlab

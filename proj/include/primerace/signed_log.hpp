#pragma once

#include <complex>
#include <limits>

namespace primerace {

/// A complex number r e^{i phase} stored as (log r, phase) so that magnitudes
/// like x^{sigma} with log x = 65536 stay representable.  Real values use
/// phase 0 or pi exactly and stay real under addition.
class SignedLogValue {
 public:
  /// Sums whose magnitude drops below this fraction of the largest summand
  /// are flagged as cancelling.
  static constexpr double kCancellationRatio = 1e-6;

  SignedLogValue() = default;  // zero

  static SignedLogValue from_log(double log_magnitude, double phase);
  static SignedLogValue from_real_log(double log_magnitude, int sign);
  static SignedLogValue from_real(double v);
  static SignedLogValue from_complex(std::complex<double> z);

  double log_magnitude() const noexcept { return log_mag_; }
  double phase() const noexcept { return phase_; }
  bool is_zero() const noexcept { return log_mag_ == -std::numeric_limits<double>::infinity(); }
  bool is_real() const noexcept;
  /// -1, 0 or +1; only meaningful for real values.
  int sign() const;
  bool cancellation() const noexcept { return cancellation_; }

  /// Value as a double (may overflow to +-inf or underflow to 0).
  double to_double() const;
  std::complex<double> to_complex() const;

  SignedLogValue operator+(const SignedLogValue& o) const;
  SignedLogValue& operator+=(const SignedLogValue& o) { return *this = *this + o; }
  SignedLogValue operator*(const SignedLogValue& o) const;
  SignedLogValue operator-() const;

 private:
  double log_mag_ = -std::numeric_limits<double>::infinity();
  double phase_ = 0.0;
  bool cancellation_ = false;
};

}  // namespace primerace

#include "primerace/signed_log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr double kPi = std::numbers::pi;

double normalize_phase(double p) {
  p = std::fmod(p, 2 * kPi);
  if (p < 0) p += 2 * kPi;
  if (p >= 2 * kPi) p -= 2 * kPi;
  return p;
}

}  // namespace

SignedLogValue SignedLogValue::from_log(double log_magnitude, double phase) {
  SignedLogValue v;
  v.log_mag_ = log_magnitude;
  v.phase_ = (phase == 0.0 || phase == kPi) ? phase : normalize_phase(phase);
  if (v.is_zero()) v.phase_ = 0.0;
  return v;
}

SignedLogValue SignedLogValue::from_real_log(double log_magnitude, int sign) {
  if (sign == 0) return {};
  return from_log(log_magnitude, sign > 0 ? 0.0 : kPi);
}

SignedLogValue SignedLogValue::from_real(double v) {
  if (v == 0.0) return {};
  return from_real_log(std::log(std::abs(v)), v > 0 ? 1 : -1);
}

SignedLogValue SignedLogValue::from_complex(std::complex<double> z) {
  if (z.imag() == 0.0) return from_real(z.real());
  return from_log(std::log(std::abs(z)), std::arg(z));
}

bool SignedLogValue::is_real() const noexcept { return phase_ == 0.0 || phase_ == kPi; }

int SignedLogValue::sign() const {
  if (is_zero()) return 0;
  if (!is_real()) throw DomainError("sign() of a non-real SignedLogValue");
  return phase_ == 0.0 ? 1 : -1;
}

double SignedLogValue::to_double() const {
  if (is_zero()) return 0.0;
  if (is_real()) return sign() * std::exp(log_mag_);
  return std::exp(log_mag_) * std::cos(phase_);
}

std::complex<double> SignedLogValue::to_complex() const {
  if (is_zero()) return {};
  if (is_real()) return {to_double(), 0.0};
  return std::polar(std::exp(log_mag_), phase_);
}

SignedLogValue SignedLogValue::operator+(const SignedLogValue& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  const double top = std::max(log_mag_, o.log_mag_);
  SignedLogValue out;
  if (is_real() && o.is_real()) {
    const double s = sign() * std::exp(log_mag_ - top) + o.sign() * std::exp(o.log_mag_ - top);
    out = (s == 0.0) ? SignedLogValue{} : from_real_log(top + std::log(std::abs(s)), s > 0 ? 1 : -1);
    out.cancellation_ = cancellation_ || o.cancellation_ || std::abs(s) < kCancellationRatio;
    return out;
  }
  const std::complex<double> s =
      std::polar(std::exp(log_mag_ - top), phase_) + std::polar(std::exp(o.log_mag_ - top), o.phase_);
  out = (s == 0.0) ? SignedLogValue{} : from_log(top + std::log(std::abs(s)), std::arg(s));
  out.cancellation_ = cancellation_ || o.cancellation_ || std::abs(s) < kCancellationRatio;
  return out;
}

SignedLogValue SignedLogValue::operator*(const SignedLogValue& o) const {
  if (is_zero() || o.is_zero()) return {};
  SignedLogValue out;
  if (is_real() && o.is_real()) {
    out = from_real_log(log_mag_ + o.log_mag_, sign() * o.sign());
  } else {
    out = from_log(log_mag_ + o.log_mag_, phase_ + o.phase_);
  }
  out.cancellation_ = cancellation_ || o.cancellation_;
  return out;
}

SignedLogValue SignedLogValue::operator-() const {
  if (is_zero()) return *this;
  SignedLogValue out = is_real() ? from_real_log(log_mag_, -sign()) : from_log(log_mag_, phase_ + kPi);
  out.cancellation_ = cancellation_;
  return out;
}

}  // namespace primerace

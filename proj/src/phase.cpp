#include "primerace/phase.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr unsigned kGuardBits = 80;

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;

  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace

unsigned phase_bits_needed(const GammaSpec& frequency, double multiplier) {
  const double log_value = frequency.log_gamma() + std::log(std::abs(multiplier));
  const double int_bits = std::max(0.0, std::ceil(log_value / std::numbers::ln2));
  if (!std::isfinite(int_bits) || int_bits > 1e9) return ~0u;
  return static_cast<unsigned>(int_bits) + kGuardBits;
}

ReducedPhase reduce_phase(const GammaSpec& frequency, double multiplier, unsigned max_bits) {
  if (!(frequency.factor > 0.0) || !std::isfinite(frequency.log_base) || !std::isfinite(multiplier)) {
    throw DomainError("reduce_phase: non-finite frequency or multiplier");
  }
  if (multiplier == 0.0) return {0.0, 0};
  const unsigned bits = phase_bits_needed(frequency, multiplier);
  if (bits > max_bits) {
    throw PrecisionError("phase reduction needs " + std::to_string(bits) + " bits of precision, cap is " +
                         std::to_string(max_bits));
  }
  const auto prec = static_cast<mpfr_prec_t>(bits);
  MpfrValue value(prec), two_pi(prec);
  mpfr_set_d(value.get(), frequency.log_base, MPFR_RNDN);
  mpfr_exp(value.get(), value.get(), MPFR_RNDN);
  mpfr_mul_d(value.get(), value.get(), frequency.factor, MPFR_RNDN);
  mpfr_mul_d(value.get(), value.get(), multiplier, MPFR_RNDN);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
  mpfr_fmod(value.get(), value.get(), two_pi.get(), MPFR_RNDN);
  double r = mpfr_get_d(value.get(), MPFR_RNDN);
  if (r < 0.0) r += 2 * std::numbers::pi;
  if (r >= 2 * std::numbers::pi) r -= 2 * std::numbers::pi;
  return {r, bits};
}

ReducedPhase reduce_log_phase(double gamma, double x, unsigned max_bits) {
  if (!std::isfinite(gamma) || !(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("reduce_log_phase: non-finite gamma or non-positive x");
  }
  if (gamma == 0.0 || x == 1.0) return {0.0, 0};
  const double magnitude = std::abs(gamma * std::log(x));
  const unsigned bits =
      static_cast<unsigned>(std::max(0.0, std::ceil(std::log2(std::max(magnitude, 1.0))))) + kGuardBits;
  if (bits > max_bits) {
    throw PrecisionError("phase reduction needs " + std::to_string(bits) + " bits of precision, cap is " +
                         std::to_string(max_bits));
  }
  const auto prec = static_cast<mpfr_prec_t>(bits);
  MpfrValue value(prec), two_pi(prec);
  mpfr_set_d(value.get(), x, MPFR_RNDN);
  mpfr_log(value.get(), value.get(), MPFR_RNDN);
  mpfr_mul_d(value.get(), value.get(), gamma, MPFR_RNDN);
  mpfr_const_pi(two_pi.get(), MPFR_RNDN);
  mpfr_mul_2ui(two_pi.get(), two_pi.get(), 1, MPFR_RNDN);
  mpfr_fmod(value.get(), value.get(), two_pi.get(), MPFR_RNDN);
  double r = mpfr_get_d(value.get(), MPFR_RNDN);
  if (r < 0.0) r += 2 * std::numbers::pi;
  if (r >= 2 * std::numbers::pi) r -= 2 * std::numbers::pi;
  return {r, bits};
}

}  // namespace primerace

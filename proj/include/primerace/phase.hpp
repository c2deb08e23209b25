#pragma once

#include <cstdint>

#include "primerace/zeros.hpp"

namespace primerace {

inline constexpr unsigned kDefaultMaxPhaseBits = 4096;

struct ReducedPhase {
  double radians = 0.0;  // in [0, 2 pi)
  unsigned bits = 0;     // working precision used
};

/// (factor * exp(log_base)) * multiplier mod 2 pi, evaluated with
/// ceil(log2 |value|) + 80 bits of working precision so the result is correct
/// to about 2^-64 absolute.  Throws PrecisionError when that exceeds max_bits.
ReducedPhase reduce_phase(const GammaSpec& frequency, double multiplier, unsigned max_bits = kDefaultMaxPhaseBits);

/// gamma * ln(x) mod 2 pi with ln(x) evaluated in extended precision, so the
/// phase of x^{i gamma} is not limited by the rounding of log(x) in double.
ReducedPhase reduce_log_phase(double gamma, double x, unsigned max_bits = kDefaultMaxPhaseBits);

/// Working precision reduce_phase would pick (may exceed any cap).
unsigned phase_bits_needed(const GammaSpec& frequency, double multiplier);

}  // namespace primerace

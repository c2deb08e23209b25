#pragma once

// Densities of race sets: exact Lebesgue measures from the true prime race,
// and Monte Carlo estimates for the hypothetical main term and for Omega.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "primerace/characters.hpp"
#include "primerace/phase.hpp"
#include "primerace/sieve.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

enum class DensityKind { exact_race, hypothetical_sign, omega };
std::string_view to_string(DensityKind k);

struct DensityResult {
  DensityKind kind = DensityKind::exact_race;
  double X = 0.0;      // range end; +inf when only log X is representable
  double X_log = 0.0;  // log X
  double measure = 0.0;
  double density = 0.0;
  std::size_t sample_count = 0;    // 0 for exact results
  double confidence_radius = 0.0;  // 95% normal-approximation radius
};

/// Measures of {D > 0}, {D < 0}, {D = 0} on [2, X].  Breakpoints are
/// integers, so these are exact and sum to X - 2.
struct RaceSignMeasure {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
  std::uint64_t zero = 0;
};
RaceSignMeasure race_sign_measure(const RaceSeries& rs);

/// mu{x in [2, X] : D(x) > 0} / X.
DensityResult exact_race_density(const RaceSeries& rs);

struct SamplingOptions {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  unsigned max_phase_bits = kDefaultMaxPhaseBits;
  /// Keep one record per sample (for CSV dumps).
  bool keep_samples = false;
};

struct SampleRecord {
  double x_log = 0.0;
  double main_log_magnitude = 0.0;  // -inf when the main term is 0
  int main_sign = 0;
  bool in_omega = false;
};

struct HypotheticalSampleResult {
  DensityResult sign;   // fraction of samples with negative main term
  DensityResult omega;  // fraction of samples in Omega
  /// Samples whose main-term window lies inside the Omega window, so that
  /// Omega membership alone forces a negative main term.
  std::size_t implication_checked = 0;
  /// Of those, Omega members whose main term is not negative.
  std::size_t implication_violations = 0;
  std::size_t cancellation_flags = 0;
  std::vector<SampleRecord> samples;
};

/// log x for sample index i: x uniform on [sqrt(X), X], drawn by inverting
/// the CDF in log space, so X itself never needs to be representable.
/// Samples come in fixed blocks with independent seeded generators; the
/// result does not depend on the worker count.
double sample_log_x(double X_log, std::uint64_t seed, std::size_t index);

HypotheticalSampleResult sample_hypothetical(const HypotheticalConstruction& c, const RacePhase& race, double X_log,
                                             std::size_t n_samples, const SamplingOptions& opt = {});

/// Fraction of x in [sqrt(X), X] where the main term is negative.
DensityResult hypothetical_sign_density(const HypotheticalConstruction& c, const RacePhase& race, double X_log,
                                        std::size_t n_samples, const SamplingOptions& opt = {});

/// Fraction of x in [sqrt(X), X] lying in Omega.
DensityResult omega_density(const HypotheticalConstruction& c, double X_log, std::size_t n_samples,
                            const SamplingOptions& opt = {});

/// 1.96 sqrt(p (1 - p) / n)
double confidence_radius(double p, std::size_t n);

}  // namespace primerace

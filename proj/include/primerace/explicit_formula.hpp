#pragma once

// The explicit formula for phi(q) (pi(x;q,a) - pi(x;q,b)) as a sum of
//
//   f(rho) = x^rho / (rho log x) + (1/rho) int_2^x t^rho / (t log^2 t) dt
//
// over zero multisets, and the level-by-level main term of the hypothetical
// construction evaluated entirely in log space.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "primerace/characters.hpp"
#include "primerace/fejer.hpp"
#include "primerace/phase.hpp"
#include "primerace/signed_log.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

struct FormulaConfig {
  /// Zeros with beta >= beta_cut enter the sum.
  double beta_cut = 0.5;
  /// log x'.  Unset: x' = max(x, max{j^3 gamma_j : gamma_j <= x}) over
  /// `levels` (which reduces to x' = x for loaded tables).
  std::optional<double> x_prime_log;
  /// (j, log gamma_j) of a hypothetical construction, for the default x' rule.
  std::vector<std::pair<int, double>> levels;
  double quadrature_tol = 1e-10;  // relative to |x^rho / (rho log x)|
  /// Above this |rho| the integral term is dropped and bounded instead.
  double gamma_asymptotic_threshold = 1e6;
  std::size_t max_panels = std::size_t{1} << 20;
  unsigned workers = 1;
  unsigned max_phase_bits = kDefaultMaxPhaseBits;

  void validate() const;
};

struct FRhoResult {
  std::complex<double> value;
  std::complex<double> leading;  // x^rho / (rho log x)
  double error_bound = 0.0;      // on |value - f(rho)|
  bool asymptotic = false;       // integral term replaced by its bound
  bool converged = true;         // quadrature met its tolerance
  std::size_t panels = 0;
};

/// Upper bound for |(1/rho) int_2^x t^rho / (t log^2 t) dt| by two
/// integrations by parts in u = log t (U = log x, u0 = log 2):
///
///   |rho|^-2 (x^b/U^2 + 2^b/u0^2)
///   + 2 |rho|^-3 (x^b/U^3 + 2^b/u0^3)
///   + 6 |rho|^-3 (U - u0) max(x^b/U^4, 2^b/u0^4).
double integral_term_bound(std::complex<double> rho, double x);

/// f(rho) at x >= 4.  rho may have negative imaginary part.
FRhoResult f_rho(std::complex<double> rho, double x, const FormulaConfig& cfg = {});
inline FRhoResult f_rho(const Zero& z, double x, const FormulaConfig& cfg = {}) { return f_rho(z.rho(), x, cfg); }

/// log x' under the configured rule.
double x_prime_log(double x_log, const FormulaConfig& cfg);

struct ExplicitResult {
  double value = 0.0;
  /// Quadrature and asymptotic-bound errors, summed with multiplicity.
  double certified_error = 0.0;
  /// x^beta_cut log^2 x with constant 1; the size of the formula's own O-term,
  /// not a certified bound.
  double diagnostic_error = 0.0;
  /// |Im| of the sum taken over rho and conj(rho) separately.
  double imaginary_residue = 0.0;
  std::size_t zeros_used = 0;
  std::uint64_t multiplicity_used = 0;
  double x_prime_log = 0.0;
  /// Levels of `cfg.levels` with some but not all of their ordinates below x'.
  std::vector<int> partially_truncated_levels;
};

/// -2 Re( sum_chi (conj chi(a) - conj chi(b)) sum_{rho in zs(chi), beta >= beta_cut, Im rho <= x'} m f(rho) ).
/// Zeros attached to the principal character are rejected.  Throws
/// ConsistencyError if the conjugate sums fail to cancel to 1e-9 relative.
ExplicitResult delta_explicit(double x, const CharacterTable& table, const RacePhase& race, const ZeroMultiset& zs,
                              const FormulaConfig& cfg = {});

/// J(x) = floor((log x)^{1/16}), computed exactly.
int level_J(double x_log);

/// Levels summed by the main term: |j - J| <= J^{3/4} within the j-range, or
/// the whole j-range in scale mode.
LevelWindow main_term_window(const HypotheticalConstruction& c, double x_log);

/// log( 2 |chi(a) - chi(b)| x^{sigma - delta_j} / (gamma_j log x) ).
double level_log_magnitude(const HypotheticalConstruction& c, int j, double x_log, double race_magnitude);

struct LevelTerm {
  int j = 0;
  double log_magnitude = 0.0;
  double fejer = 0.0;  // F_{gamma_j, j^3}(x)
  SignedLogValue term;
};

struct MainTerm {
  SignedLogValue value;
  int J = 0;
  LevelWindow window;
  std::vector<LevelTerm> levels;
};

/// 2 |chi(a) - chi(b)| sum_{j in window} x^{sigma - delta_j} / (gamma_j log x) F_{gamma_j, j^3}(x)
/// at log x = x_log.  Throws PrecisionError if a phase needs more than max_bits.
MainTerm delta_main_hypothetical(double x_log, const HypotheticalConstruction& c, const RacePhase& race,
                                 unsigned max_bits = kDefaultMaxPhaseBits);

}  // namespace primerace

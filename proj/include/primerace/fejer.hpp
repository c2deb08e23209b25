#pragma once

// Fejer-weighted cosine sums
//
//   F_{gamma,L}(x) = sum_{k=1}^{L-1} (L - k) cos(k gamma log x)
//                  = sin^2(L theta / 2) / (2 sin^2(theta / 2)) - L/2,   theta = gamma log x,
//
// and the Lebesgue measure of {x in [1, X] : F >= threshold}.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "primerace/phase.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

struct FejerParams {
  double gamma = 1.0;
  std::uint64_t L = 4;

  /// Throws DomainError unless gamma >= 1 and L >= 4.
  void validate() const;
};

/// Direct O(L) summation.  Any L >= 1 is accepted (L = 1 is the empty sum).
double fejer_direct(std::uint64_t L, double theta);
/// Closed form; series expansion near theta = 0 mod 2 pi.
double fejer_closed(std::uint64_t L, double theta);
inline double fejer_direct(const FejerParams& p, double theta) { return fejer_direct(p.L, theta); }
inline double fejer_closed(const FejerParams& p, double theta) { return fejer_closed(p.L, theta); }

/// A closed interval of angles.
struct ThetaInterval {
  double lo;
  double hi;
};

/// {theta in [-pi, pi] : F_L(theta) >= threshold} as disjoint sorted
/// intervals, endpoints located to `tol` by bisection on each monotone piece.
std::vector<ThetaInterval> superlevel_intervals(std::uint64_t L, double threshold, double tol = 1e-12);

/// Measure of {x in [1, X] : gamma log x mod 2 pi lies in the given set}.
/// `set` must be disjoint intervals inside [-pi, pi].  Second member is a
/// bound on the error caused by an endpoint error of `theta_tol`.
std::pair<double, double> theta_set_measure(double gamma, double X, const std::vector<ThetaInterval>& set,
                                            double theta_tol = 0.0);

/// Measure of {x in [1, X] : || gamma log x / 2 pi || <= eps}.
double theta_band_measure(double gamma, double X, double eps);

enum class SublevelMethod { analytic_intervals, adaptive_grid };
std::string_view to_string(SublevelMethod m);

struct SublevelReport {
  double X = 0.0;
  double threshold = 0.0;
  double measure = 0.0;  // of {x in [1, X] : F(x) >= threshold}
  double density = 0.0;  // measure / X
  SublevelMethod method = SublevelMethod::analytic_intervals;
  double error_bound = 0.0;
};

struct SublevelOptions {
  SublevelMethod method = SublevelMethod::analytic_intervals;
  std::size_t grid_cells = 10'000'000;
};

/// Measure of the set where F_{gamma,L} is at least `threshold` on [1, X].
///
/// analytic_intervals maps the exact angle set to x-intervals; adaptive_grid
/// samples a uniform x-grid whose cells are split until each spans at most a
/// quarter of a Fejer lobe in angle, and refines sign changes by bisection.
SublevelReport sublevel_measure(const FejerParams& p, double X, double threshold, const SublevelOptions& opt = {});

/// Runs both methods and throws ConsistencyError if they differ by more than
/// the sum of their error bounds.  Returns the analytic report.
SublevelReport checked_sublevel_measure(const FejerParams& p, double X, double threshold,
                                        std::size_t grid_cells = 10'000'000);

/// Inclusive range of levels j; empty when lo > hi.
struct LevelWindow {
  int lo = 1;
  int hi = 0;

  bool empty() const noexcept { return lo > hi; }
  bool contains(int j) const noexcept { return lo <= j && j <= hi; }
};

/// [ceil(log(X)^{1/16} / 4), floor(4 log(X)^{1/16})]
LevelWindow standard_omega_window(double X_log);

/// The levels tested for membership in Omega: the standard window intersected
/// with the construction's j-range, or the whole j-range in scale mode.
LevelWindow omega_window(const HypotheticalConstruction& c, double X_log);

/// F_{gamma_j, j^3}(x) at log x = x_log, with the phase reduced in extended precision.
double level_fejer(const HypotheticalConstruction& c, int j, double x_log, unsigned max_bits = kDefaultMaxPhaseBits);

/// True iff F_{gamma_j, j^3}(x) <= -j^3/4 for every j in the window (vacuously
/// true for an empty window).
bool omega_membership(const HypotheticalConstruction& c, double x_log, const LevelWindow& window,
                      unsigned max_bits = kDefaultMaxPhaseBits);

}  // namespace primerace

#include "primerace/fejer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

// sin^2(L t/2) / (2 sin^2(t/2)), i.e. F + L/2.
double half_kernel(std::uint64_t L, double theta) {
  const double t = std::remainder(theta, kTwoPi);
  const double Ld = static_cast<double>(L);
  const double s = std::sin(0.5 * t);
  if (std::abs(s) < 1e-8) {
    return 0.5 * Ld * Ld * (1.0 - (Ld * Ld - 1.0) * t * t / 12.0);
  }
  const double n = std::sin(0.5 * Ld * t);
  return n * n / (2.0 * s * s);
}

// Derivative sign of log K on (0, pi): L cot(L t/2) - cot(t/2), strictly
// decreasing on each lobe between consecutive zeros of sin(L t/2).
double log_slope(std::uint64_t L, double t) {
  const double Ld = static_cast<double>(L);
  return Ld * std::cos(0.5 * Ld * t) / std::sin(0.5 * Ld * t) - std::cos(0.5 * t) / std::sin(0.5 * t);
}

template <class Pred>
double bisect(double lo, double hi, double tol, Pred lo_side) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lo_side(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void FejerParams::validate() const {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw DomainError("Fejer parameters need gamma >= 1 (got " + std::to_string(gamma) + ")");
  }
  if (L < 4) throw DomainError("Fejer parameters need L >= 4 (got " + std::to_string(L) + ")");
}

double fejer_direct(std::uint64_t L, double theta) {
  double sum = 0.0;
  for (std::uint64_t k = 1; k < L; ++k) {
    sum += static_cast<double>(L - k) * std::cos(static_cast<double>(k) * theta);
  }
  return sum;
}

double fejer_closed(std::uint64_t L, double theta) { return half_kernel(L, theta) - 0.5 * static_cast<double>(L); }

std::vector<ThetaInterval> superlevel_intervals(std::uint64_t L, double threshold, double tol) {
  if (L == 0) throw DomainError("superlevel_intervals needs L >= 1");
  const double Ld = static_cast<double>(L);
  const double kappa = threshold + 0.5 * Ld;
  if (kappa <= 0.0) return {{-kPi, kPi}};
  if (L == 1) {
    if (kappa <= 0.5) return {{-kPi, kPi}};
    return {};
  }
  if (kappa > 0.5 * Ld * Ld) return {};

  auto K = [L](double t) { return half_kernel(L, t); };
  std::vector<double> edges{0.0};
  for (std::uint64_t m = 1; 2 * m <= L; ++m) edges.push_back(kTwoPi * static_cast<double>(m) / Ld);
  if (edges.back() < kPi) edges.push_back(kPi);

  // Main lobe: K decreases from L^2/2 to 0.
  const double r0 = bisect(0.0, edges[1], tol, [&](double t) { return K(t) >= kappa; });

  std::vector<ThetaInterval> upper;  // within (0, pi]
  for (std::size_t m = 1; m + 1 < edges.size(); ++m) {
    const double a = edges[m];
    const double b = edges[m + 1];
    const bool ends_at_pi = b == kPi && 2 * (m + 1) > L;
    double peak = ends_at_pi && log_slope(L, std::nextafter(b, a)) >= 0.0
                      ? b
                      : bisect(a, b, tol * 1e-2, [&](double t) { return log_slope(L, t) > 0.0; });
    if (K(peak) < kappa) continue;
    const double lo = bisect(a, peak, tol, [&](double t) { return K(t) < kappa; });
    const double hi = (peak == b && K(b) >= kappa) ? b : bisect(peak, b, tol, [&](double t) { return K(t) >= kappa; });
    upper.push_back({lo, hi});
  }

  std::vector<ThetaInterval> out;
  out.reserve(2 * upper.size() + 1);
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) out.push_back({-it->hi, -it->lo});
  out.push_back({-r0, r0});
  out.insert(out.end(), upper.begin(), upper.end());
  return out;
}

std::pair<double, double> theta_set_measure(double gamma, double X, const std::vector<ThetaInterval>& set,
                                            double theta_tol) {
  if (!(gamma > 0.0) || !(X >= 1.0)) throw DomainError("theta_set_measure needs gamma > 0 and X >= 1");
  const double Theta = gamma * std::log(X);
  const auto periods = static_cast<std::uint64_t>(std::ceil(Theta / kTwoPi)) + 1;
  double measure = 0.0;
  double err = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::uint64_t k = 0; k <= periods; ++k) {
    const double shift = kTwoPi * static_cast<double>(k);
    for (const ThetaInterval& iv : set) {
      const double a_raw = iv.lo + shift;
      const double b_raw = iv.hi + shift;
      const double a = std::max(a_raw, 0.0);
      const double b = std::min(b_raw, Theta);
      if (!(b > a)) continue;
      const double ea = std::exp(a / gamma);
      const double len = ea * std::expm1((b - a) / gamma);
      measure += len;
      err += 4 * eps * (len + ea);
      if (a == a_raw) err += ea * theta_tol / gamma;
      if (b == b_raw) err += std::exp(b / gamma) * theta_tol / gamma;
    }
  }
  return {std::min(measure, X - 1.0), err};
}

double theta_band_measure(double gamma, double X, double eps) {
  if (!(eps >= 0.0)) throw DomainError("theta_band_measure needs eps >= 0");
  if (eps >= 0.5) return X - 1.0;
  return theta_set_measure(gamma, X, {{-kTwoPi * eps, kTwoPi * eps}}).first;
}

std::string_view to_string(SublevelMethod m) {
  return m == SublevelMethod::analytic_intervals ? "analytic-intervals" : "adaptive-grid";
}

namespace {

SublevelReport analytic_measure(const FejerParams& p, double X, double threshold) {
  constexpr double tol = 1e-12;
  SublevelReport r;
  r.X = X;
  r.threshold = threshold;
  r.method = SublevelMethod::analytic_intervals;
  const auto set = superlevel_intervals(p.L, threshold, tol);
  if (set.size() == 1 && set.front().lo == -kPi && set.front().hi == kPi) {
    r.measure = X - 1.0;
  } else {
    // Endpoints are within tol/2 of the true roots.
    std::tie(r.measure, r.error_bound) = theta_set_measure(p.gamma, X, set, tol);
  }
  r.density = r.measure / X;
  return r;
}

SublevelReport grid_measure(const FejerParams& p, double X, double threshold, std::size_t cells) {
  if (cells == 0) throw DomainError("adaptive grid needs at least one cell");
  SublevelReport r;
  r.X = X;
  r.threshold = threshold;
  r.method = SublevelMethod::adaptive_grid;

  const double Ld = static_cast<double>(p.L);
  const double max_span = kPi / (2.0 * Ld);  // a quarter of a lobe
  auto inside = [&](double x) { return fejer_closed(p.L, p.gamma * std::log(x)) >= threshold; };
  const double h = (X - 1.0) / static_cast<double>(cells);
  double measure = 0.0;
  double err = 0.0;
  // Adds the part of [u, v] inside the set, bisecting a single crossing.
  auto piece = [&](double u, bool u_in, double v, bool v_in) {
    if (u_in && v_in) {
      measure += v - u;
    } else if (u_in != v_in) {
      double lo = u, hi = v;
      for (int it = 0; it < 60 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside(mid) == u_in) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double c = 0.5 * (lo + hi);
      measure += u_in ? c - u : v - c;
      err += hi - lo;
    }
  };
  const double lobe = kTwoPi / Ld;
  double u = 1.0;
  bool u_in = inside(u);
  for (std::size_t i = 0; i < cells; ++i) {
    const double x0 = 1.0 + h * static_cast<double>(i);
    const double x1 = i + 1 == cells ? X : 1.0 + h * static_cast<double>(i + 1);
    const double span = p.gamma * std::log1p((x1 - x0) / x0);
    const auto pieces = static_cast<std::size_t>(std::min(65536.0, std::max(1.0, std::ceil(span / max_span))));
    const double w = (x1 - x0) / static_cast<double>(pieces);
    for (std::size_t s = 0; s < pieces; ++s) {
      const double v = s + 1 == pieces ? x1 : x0 + w * static_cast<double>(s + 1);
      const bool v_in = inside(v);
      // The kernel vanishes at theta = 2 pi m / L (m not a multiple of L) and
      // peaks near the lobe midpoints; components and gaps around those points
      // can be far narrower than a sample spacing.
      const double tu = p.gamma * std::log(u) / lobe;
      const double tv = p.gamma * std::log(v) / lobe;
      double pts[4] = {u, 0.0, 0.0, v};
      bool ins[4] = {u_in, false, false, v_in};
      std::size_t n = 1;
      const double zero_m = std::floor(tv);
      const double peak_m = std::floor(tv - 0.5);
      const bool has_zero = zero_m > std::floor(tu) && std::fmod(zero_m, Ld) != 0.0 && threshold > -0.5 * Ld;
      const bool has_peak = peak_m > std::floor(tu - 0.5);
      const double z = has_zero ? std::clamp(std::exp(zero_m * lobe / p.gamma), u, v) : 0.0;
      const double pk = has_peak ? std::clamp(std::exp((peak_m + 0.5) * lobe / p.gamma), u, v) : 0.0;
      if (has_zero && has_peak && pk < z) {
        pts[n] = pk;
        ins[n++] = inside(pk);
        pts[n] = z;
        ins[n++] = false;
      } else {
        if (has_zero) {
          pts[n] = z;
          ins[n++] = false;
        }
        if (has_peak) {
          pts[n] = pk;
          ins[n++] = inside(pk);
        }
      }
      pts[n] = v;
      ins[n] = v_in;
      for (std::size_t k = 0; k < n; ++k) piece(pts[k], ins[k], pts[k + 1], ins[k + 1]);
      u = v;
      u_in = v_in;
    }
  }
  err += 4 * std::numeric_limits<double>::epsilon() * X * std::sqrt(static_cast<double>(cells));
  r.measure = std::min(measure, X - 1.0);
  r.error_bound = err;
  r.density = r.measure / X;
  return r;
}

}  // namespace

SublevelReport sublevel_measure(const FejerParams& p, double X, double threshold, const SublevelOptions& opt) {
  p.validate();
  if (!(X >= 2.0) || !std::isfinite(X)) throw DomainError("sublevel_measure needs finite X >= 2");
  if (std::isnan(threshold)) throw DomainError("sublevel_measure threshold is NaN");
  return opt.method == SublevelMethod::analytic_intervals ? analytic_measure(p, X, threshold)
                                                          : grid_measure(p, X, threshold, opt.grid_cells);
}

SublevelReport checked_sublevel_measure(const FejerParams& p, double X, double threshold, std::size_t grid_cells) {
  const SublevelReport a = sublevel_measure(p, X, threshold, {SublevelMethod::analytic_intervals, grid_cells});
  const SublevelReport g = sublevel_measure(p, X, threshold, {SublevelMethod::adaptive_grid, grid_cells});
  if (std::abs(a.measure - g.measure) > a.error_bound + g.error_bound) {
    throw ConsistencyError("sublevel methods disagree: analytic " + std::to_string(a.measure) + " vs grid " +
                           std::to_string(g.measure) + " (bounds " + std::to_string(a.error_bound) + ", " +
                           std::to_string(g.error_bound) + ")");
  }
  return a;
}

LevelWindow standard_omega_window(double X_log) {
  if (!(X_log > 0.0)) throw DomainError("standard_omega_window needs log X > 0");
  const double root = std::pow(X_log, 1.0 / 16.0);
  return {static_cast<int>(std::ceil(root / 4.0 - 1e-12)), static_cast<int>(std::floor(4.0 * root + 1e-12))};
}

LevelWindow omega_window(const HypotheticalConstruction& c, double X_log) {
  if (c.scaled()) return {c.j_min, c.j_max};
  const LevelWindow w = standard_omega_window(X_log);
  return {std::max(w.lo, c.j_min), std::min(w.hi, c.j_max)};
}

double level_fejer(const HypotheticalConstruction& c, int j, double x_log, unsigned max_bits) {
  const LevelParams lv = c.level(j);
  const double theta = reduce_phase(lv.gamma, x_log, max_bits).radians;
  return fejer_closed(lv.size(), theta);
}

bool omega_membership(const HypotheticalConstruction& c, double x_log, const LevelWindow& window, unsigned max_bits) {
  for (int j = window.lo; j <= window.hi; ++j) {
    const double L = static_cast<double>(c.level(j).size());
    if (level_fejer(c, j, x_log, max_bits) > -L / 4.0) return false;
  }
  return true;
}

}  // namespace primerace

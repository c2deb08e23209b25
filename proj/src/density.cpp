#include "primerace/density.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "primerace/errors.hpp"
#include "primerace/explicit_formula.hpp"
#include "primerace/fejer.hpp"

namespace primerace {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr std::size_t kMinSamples = 1000;

double uniform_open_closed(std::mt19937_64& g) {
  // (0, 1] with 53 random bits
  return static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;
}

struct BlockStats {
  std::size_t negative = 0;
  std::size_t omega = 0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t cancellations = 0;
};

void check_sampling_args(double X_log, std::size_t n) {
  if (!(X_log > 0.0) || !std::isfinite(X_log)) throw DomainError("sampling needs finite log X > 0");
  if (n < kMinSamples) throw DomainError("sampling needs at least 1000 samples");
}

DensityResult make_fraction(DensityKind kind, double X_log, std::size_t hits, std::size_t n) {
  DensityResult r;
  r.kind = kind;
  r.X_log = X_log;
  r.X = std::exp(X_log);
  r.sample_count = n;
  r.density = static_cast<double>(hits) / static_cast<double>(n);
  // Measure of the sampled range [sqrt(X), X]; NaN when X overflows.
  r.measure = std::isfinite(r.X) ? r.density * (r.X - std::sqrt(r.X)) : std::numeric_limits<double>::quiet_NaN();
  r.confidence_radius = confidence_radius(r.density, n);
  return r;
}

std::mt19937_64 block_generator(std::uint64_t seed, std::size_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

// x uniform on [sqrt(X), X]:  log x = log X + log(X^{-1/2} + v (1 - X^{-1/2})).
double log_x_from_uniform(double X_log, double v) {
  const double h = 0.5 * X_log;
  return X_log + std::log(std::exp(-h) + v * -std::expm1(-h));
}

// Runs body(block) for every block, spread over workers; rethrows the first
// failure in worker order.
template <class F>
void for_each_block(std::size_t blocks, unsigned workers, F&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = w; b < blocks; b += workers) body(b);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string_view to_string(DensityKind k) {
  switch (k) {
    case DensityKind::exact_race: return "exact-race";
    case DensityKind::hypothetical_sign: return "hypothetical-sign";
    case DensityKind::omega: return "omega";
  }
  return "unknown";
}

RaceSignMeasure race_sign_measure(const RaceSeries& rs) {
  RaceSignMeasure m;
  if (rs.X < 2) return m;
  auto add = [&m](std::int64_t d, std::uint64_t len) {
    if (d > 0) {
      m.positive += len;
    } else if (d < 0) {
      m.negative += len;
    } else {
      m.zero += len;
    }
  };
  std::uint64_t at = 2;
  std::int64_t diff = 0;
  for (const auto& bp : rs.breakpoints) {
    const std::uint64_t x = std::min(bp.x, rs.X);
    add(diff, x - at);
    at = x;
    diff = bp.diff;
  }
  add(diff, rs.X - at);
  return m;
}

DensityResult exact_race_density(const RaceSeries& rs) {
  DensityResult r;
  r.kind = DensityKind::exact_race;
  r.X = static_cast<double>(rs.X);
  r.X_log = std::log(r.X);
  r.measure = static_cast<double>(race_sign_measure(rs).positive);
  r.density = rs.X == 0 ? 0.0 : r.measure / r.X;
  return r;
}

double confidence_radius(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double sample_log_x(double X_log, std::uint64_t seed, std::size_t index) {
  std::mt19937_64 g = block_generator(seed, index / kBlock);
  g.discard(index % kBlock);
  return log_x_from_uniform(X_log, uniform_open_closed(g));
}

HypotheticalSampleResult sample_hypothetical(const HypotheticalConstruction& c, const RacePhase& race, double X_log,
                                             std::size_t n, const SamplingOptions& opt) {
  check_sampling_args(X_log, n);
  const auto problems = validate(c);
  if (!problems.empty()) throw DomainError("invalid construction: " + problems.front());
  const LevelWindow omega_win = omega_window(c, X_log);

  HypotheticalSampleResult out;
  if (opt.keep_samples) out.samples.resize(n);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<BlockStats> stats(blocks);
  for_each_block(blocks, opt.workers, [&](std::size_t b) {
    std::mt19937_64 g = block_generator(opt.seed, b);
    BlockStats& s = stats[b];
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const double x_log = log_x_from_uniform(X_log, uniform_open_closed(g));
      const MainTerm main = delta_main_hypothetical(x_log, c, race, opt.max_phase_bits);
      const bool in_omega = omega_membership(c, x_log, omega_win, opt.max_phase_bits);
      const int sign = main.value.sign();
      if (sign < 0) ++s.negative;
      if (in_omega) ++s.omega;
      if (main.value.cancellation()) ++s.cancellations;
      const bool covered =
          !main.window.empty() && omega_win.contains(main.window.lo) && omega_win.contains(main.window.hi);
      if (covered) {
        ++s.checked;
        if (in_omega && sign >= 0) ++s.violations;
      }
      if (opt.keep_samples) out.samples[i] = {x_log, main.value.log_magnitude(), sign, in_omega};
    }
  });

  BlockStats total;
  for (const BlockStats& s : stats) {
    total.negative += s.negative;
    total.omega += s.omega;
    total.checked += s.checked;
    total.violations += s.violations;
    total.cancellations += s.cancellations;
  }
  out.sign = make_fraction(DensityKind::hypothetical_sign, X_log, total.negative, n);
  out.omega = make_fraction(DensityKind::omega, X_log, total.omega, n);
  out.implication_checked = total.checked;
  out.implication_violations = total.violations;
  out.cancellation_flags = total.cancellations;
  return out;
}

DensityResult hypothetical_sign_density(const HypotheticalConstruction& c, const RacePhase& race, double X_log,
                                        std::size_t n, const SamplingOptions& opt) {
  SamplingOptions o = opt;
  o.keep_samples = false;
  return sample_hypothetical(c, race, X_log, n, o).sign;
}

DensityResult omega_density(const HypotheticalConstruction& c, double X_log, std::size_t n,
                            const SamplingOptions& opt) {
  check_sampling_args(X_log, n);
  const auto problems = validate(c);
  if (!problems.empty()) throw DomainError("invalid construction: " + problems.front());
  const LevelWindow win = omega_window(c, X_log);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::size_t> hits(blocks, 0);
  for_each_block(blocks, opt.workers, [&](std::size_t b) {
    std::mt19937_64 g = block_generator(opt.seed, b);
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const double x_log = log_x_from_uniform(X_log, uniform_open_closed(g));
      if (omega_membership(c, x_log, win, opt.max_phase_bits)) ++hits[b];
    }
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  return make_fraction(DensityKind::omega, X_log, total, n);
}

}  // namespace primerace

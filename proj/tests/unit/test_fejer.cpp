#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "primerace/errors.hpp"
#include "primerace/fejer.hpp"

using namespace primerace;

namespace {

constexpr double kPi = std::numbers::pi;

// sum_{k=1}^{L-1} (L - k) cos(k theta), in long double.
double naive_fejer(std::uint64_t L, double theta) {
  long double s = 0;
  for (std::uint64_t k = 1; k < L; ++k) {
    s += static_cast<long double>(L - k) * std::cos(static_cast<long double>(k) * theta);
  }
  return static_cast<double>(s);
}

bool in_set(const std::vector<ThetaInterval>& set, double t) {
  for (const auto& iv : set) {
    if (iv.lo <= t && t <= iv.hi) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("direct and closed forms agree with a long-double sum") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> th(-10.0, 10.0);
  for (std::uint64_t L : {1u, 2u, 4u, 5u, 16u, 333u, 1000u}) {
    for (int i = 0; i < 50; ++i) {
      const double t = th(g);
      const double ref = naive_fejer(L, t);
      const double tol = 1e-10 * static_cast<double>(L * L) + 1e-12;
      CHECK(std::abs(fejer_direct(L, t) - ref) <= tol);
      CHECK(std::abs(fejer_closed(L, t) - ref) <= tol);
    }
  }
}

TEST_CASE("closed form near multiples of 2 pi") {
  for (std::uint64_t L : {4u, 64u, 4096u}) {
    const double Ld = static_cast<double>(L);
    CHECK(fejer_closed(L, 0.0) == doctest::Approx(Ld * (Ld - 1) / 2));
    for (double t : {1e-12, 1e-9, 3e-8, 1e-7, 2 * kPi + 1e-10, -4 * kPi - 5e-9}) {
      CHECK(std::abs(fejer_closed(L, t) - naive_fejer(L, t)) <= 1e-9 * Ld * Ld);
    }
  }
}

TEST_CASE("mean of F over a period is zero and F >= -L/2") {
  const std::uint64_t L = 37;
  double sum = 0;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    const double v = fejer_closed(L, 2 * kPi * (i + 0.5) / N);
    CHECK(v >= -static_cast<double>(L) / 2 - 1e-12);
    sum += v;
  }
  CHECK(std::abs(sum / N) < 1e-9);
}

TEST_CASE("superlevel intervals match dense sampling") {
  for (std::uint64_t L : {4u, 7u, 16u, 100u}) {
    for (double frac : {-0.45, -0.25, 0.0, 0.3, 2.0}) {
      const double thr = frac * static_cast<double>(L);
      const auto set = superlevel_intervals(L, thr, 1e-13);
      for (std::size_t i = 1; i < set.size(); ++i) CHECK(set[i - 1].hi < set[i].lo);
      const int N = 20000;
      int mismatches = 0;
      for (int i = 0; i <= N; ++i) {
        const double t = -kPi + 2 * kPi * i / N;
        const double v = fejer_closed(L, t);
        if (std::abs(v - thr) < 1e-6) continue;
        mismatches += (v >= thr) != in_set(set, t);
      }
      CAPTURE(L);
      CAPTURE(thr);
      CHECK(mismatches == 0);
    }
  }
  CHECK(superlevel_intervals(16, -9.0).size() == 1);
  CHECK(superlevel_intervals(16, 121.0).empty());
}

TEST_CASE("theta set measure against direct x integration") {
  const double gamma = 3.0, X = 500.0;
  const std::vector<ThetaInterval> set{{-2.0, -1.0}, {0.5, 1.5}};
  const auto [measure, err] = theta_set_measure(gamma, X, set, 0.0);
  const int N = 2'000'000;
  double hits = 0;
  for (int i = 0; i < N; ++i) {
    const double x = 1.0 + (X - 1.0) * (i + 0.5) / N;
    hits += in_set(set, std::remainder(gamma * std::log(x), 2 * kPi));
  }
  CHECK(measure == doctest::Approx(hits * (X - 1.0) / N).epsilon(1e-5));
  CHECK(err < 1e-9);
  CHECK(theta_band_measure(gamma, X, 0.5) == doctest::Approx(X - 1.0));
}

TEST_CASE("sublevel densities") {
  // Midpoint-rule indicator integral on 10^7 points of [1, 10^4].
  struct Case {
    double gamma;
    std::uint64_t L;
    double density;
  };
  for (const Case c : {Case{2, 16, 0.102509784}, Case{2, 64, 0.012898284}, Case{10, 16, 0.139406878},
                       Case{10, 256, 0.031900936}, Case{10, 4096, 0.007980938}}) {
    const FejerParams p{c.gamma, c.L};
    const double thr = -static_cast<double>(c.L) / 4;
    const SublevelReport a = sublevel_measure(p, 1e4, thr);
    CHECK(a.density == doctest::Approx(c.density).epsilon(1e-6));
    CHECK(a.method == SublevelMethod::analytic_intervals);
    CHECK(a.measure == doctest::Approx(a.density * 1e4));
  }
}

TEST_CASE("analytic and grid methods agree within their bounds") {
  for (std::uint64_t L : {4u, 16u, 1024u}) {
    const FejerParams p{2.5, L};
    const SublevelReport a = checked_sublevel_measure(p, 3000.0, -static_cast<double>(L) / 4, 200'000);
    const SublevelReport g = sublevel_measure(p, 3000.0, -static_cast<double>(L) / 4, {SublevelMethod::adaptive_grid, 200'000});
    CHECK(std::abs(a.measure - g.measure) <= a.error_bound + g.error_bound);
    CHECK(g.method == SublevelMethod::adaptive_grid);
  }
}

TEST_CASE("threshold extremes") {
  const FejerParams p{2.0, 16};
  CHECK(sublevel_measure(p, 100.0, -100.0).measure == doctest::Approx(99.0));
  CHECK(sublevel_measure(p, 100.0, 1000.0).measure == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(FejerParams({2.0, 3}).validate(), DomainError);
  CHECK_THROWS_AS(FejerParams({0.5, 16}).validate(), DomainError);
  CHECK_THROWS_AS(sublevel_measure({2.0, 16}, 1.5, 0.0), DomainError);
  CHECK_THROWS_AS(sublevel_measure({2.0, 16}, 100.0, NAN), DomainError);
  CHECK_THROWS_AS(superlevel_intervals(0, 0.0), DomainError);
  CHECK(to_string(SublevelMethod::adaptive_grid) == "adaptive-grid");
}

TEST_CASE("omega windows") {
  const LevelWindow w = standard_omega_window(65536.0);
  CHECK(w.lo == 1);
  CHECK(w.hi == 8);
  HypotheticalConstruction c;
  c.j_min = 1;
  c.j_max = 2;
  const LevelWindow cw = omega_window(c, 65536.0);
  CHECK(cw.lo == 1);
  CHECK(cw.hi == 2);
  c.scale_mode = ScaleMode{};
  CHECK(omega_window(c, 10.0).hi == 2);
}

TEST_CASE("omega membership") {
  HypotheticalConstruction c;
  c.xi = kPi;
  c.j_min = c.j_max = 4;
  c.scale_mode = ScaleMode{1.0, 8.0, 5.0, 0.1};
  const LevelWindow w{4, 4};
  for (double x_log = 1.0; x_log < 20.0; x_log += 0.173) {
    const double F = level_fejer(c, 4, x_log);
    CHECK(F == doctest::Approx(naive_fejer(64, 5.0 * x_log)).epsilon(1e-9));
    CHECK(omega_membership(c, x_log, w) == (F <= -16.0));
  }
  CHECK(omega_membership(c, 3.0, LevelWindow{}));
  // F_{gamma,1} vanishes identically, so level 1 excludes every x.
  c.j_min = 1;
  CHECK_FALSE(omega_membership(c, 3.0, LevelWindow{1, 1}));
}

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "primerace/errors.hpp"
#include "primerace/explicit_formula.hpp"

using namespace primerace;
using cplx = std::complex<double>;

namespace {

// f(rho) = x^rho/(rho log x) + (1/rho) int_2^x t^rho/(t log^2 t) dt, evaluated
// at 40 digits through the exponential integral.
struct FRhoCase {
  cplx rho;
  double x;
  cplx full;
  cplx leading;
};

const FRhoCase kCases[] = {
    {{0.5, 14.13}, 1e4, {-0.76562759329471168, 0.15383966573222404}, {-0.75281372306258746, 0.15151749201710655}},
    {{0.5, 14.134725141734693}, 1e4, {-0.77148541603284916, 0.12090591688017592}, {-0.75843819410326872, 0.11859114751749551}},
    {{0.5, 6.0209489046976}, 1e5, {1.1731343990373196, -4.434187279260504}, {1.2849876962931162, -4.360911349081917}},
    {{0.75, 0.0}, 1e3, {48.677270652788095, 0.0}, {34.32430822498108, 0.0}},
    {{0.6, 250.0}, 5e5, {0.55741875480096032, -0.57468422292119785}, {0.55763804108346746, -0.57449006673995135}},
    {{0.5, 6.0209489046976}, 4.0, {0.16172246967146072, 0.053487947626689281}, {0.20030299813288955, 0.12999870951726253}},
    {{0.5, 1e6}, 1e4, {1.0277699958678263e-5, -3.5001760684437084e-6}, {1.0277699427775572e-5, -3.5001721535562952e-6}},
};

HypotheticalConstruction standard_construction() {
  HypotheticalConstruction c;
  c.xi = std::numbers::pi;
  c.j_min = 1;
  c.j_max = 2;
  c.delta_selector = clamped_delta_selector(c.delta);
  return c;
}

}  // namespace

TEST_CASE("f_rho against high-precision values") {
  FormulaConfig cfg;
  cfg.gamma_asymptotic_threshold = 1e7;
  for (const FRhoCase& c : kCases) {
    CAPTURE(c.rho);
    CAPTURE(c.x);
    const FRhoResult r = f_rho(c.rho, c.x, cfg);
    CHECK(r.converged);
    CHECK_FALSE(r.asymptotic);
    CHECK(std::abs(r.leading - c.leading) <= 1e-13 * std::abs(c.leading));
    CHECK(std::abs(r.value - c.full) <= cfg.quadrature_tol * std::abs(c.leading) + 1e-13 * std::abs(c.full));
    CHECK(std::abs(r.value - c.full) <= r.error_bound + 1e-14 * std::abs(c.full));
  }
}

TEST_CASE("f_rho of a conjugate zero is the conjugate") {
  const FRhoResult a = f_rho(cplx(0.5, 21.0), 3e4);
  const FRhoResult b = f_rho(cplx(0.5, -21.0), 3e4);
  CHECK(std::abs(a.value - std::conj(b.value)) < 1e-13 * std::abs(a.value));
}

TEST_CASE("large ordinates use the certified bound") {
  const FRhoCase& c = kCases[6];
  const FRhoResult r = f_rho(c.rho, c.x);
  CHECK(r.asymptotic);
  CHECK(r.value == r.leading);
  CHECK(std::abs(r.value - c.full) <= r.error_bound);
  CHECK(r.error_bound == integral_term_bound(c.rho, c.x));
}

TEST_CASE("the integral bound dominates the integral") {
  for (const FRhoCase& c : kCases) {
    if (c.rho.imag() == 0.0) continue;
    CHECK(std::abs(c.full - c.leading) <= integral_term_bound(c.rho, c.x));
  }
}

TEST_CASE("f_rho argument checks") {
  CHECK_THROWS_AS(f_rho(cplx(0.5, 14.0), 3.9), DomainError);
  CHECK_THROWS_AS(f_rho(cplx(NAN, 14.0), 10.0), DomainError);
  FormulaConfig bad;
  bad.beta_cut = 0.4;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = {};
  bad.quadrature_tol = 1e-3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("single-zero explicit sum") {
  const CharacterTable t(4);
  const RacePhase race = select_race_character(t, 3, 1);
  ZeroMultiset zs;
  zs.add(1, {0.5, std::log(14.13), 1});
  const ExplicitResult r = delta_explicit(1e4, t, race, zs);
  // -(conj chi(3) - conj chi(1)) * 2 Re f(rho) with chi(3) = -1, chi(1) = 1.
  CHECK(r.value == doctest::Approx(4 * -0.76562759329471168).epsilon(1e-12));
  CHECK(r.zeros_used == 1);
  CHECK(r.multiplicity_used == 1);
  CHECK(r.imaginary_residue < 1e-12);
  CHECK(r.diagnostic_error == doctest::Approx(100.0 * std::pow(std::log(1e4), 2)));

  zs.add(1, {0.5, std::log(14.13), 2});
  CHECK(delta_explicit(1e4, t, race, zs).value == doctest::Approx(3 * r.value).epsilon(1e-12));
  CHECK(delta_explicit(1e4, t, select_race_character(t, 1, 3), zs).value ==
        doctest::Approx(-3 * r.value).epsilon(1e-12));
}

TEST_CASE("filters by real part and ordinate") {
  const CharacterTable t(4);
  const RacePhase race = select_race_character(t, 3, 1);
  ZeroMultiset zs;
  zs.add(1, {0.5, std::log(10.0), 1});
  zs.add(1, {0.7, std::log(20.0), 1});
  zs.add(1, {0.5, std::log(2e4), 1});
  FormulaConfig cfg;
  CHECK(delta_explicit(1e4, t, race, zs, cfg).zeros_used == 2);
  cfg.beta_cut = 0.6;
  CHECK(delta_explicit(1e4, t, race, zs, cfg).zeros_used == 1);
  cfg.beta_cut = 0.5;
  cfg.x_prime_log = std::log(3e4);
  CHECK(delta_explicit(1e4, t, race, zs, cfg).zeros_used == 3);
}

TEST_CASE("sums over every character with zeros") {
  const CharacterTable t(5);
  const RacePhase race = select_race_character(t, 2, 1);
  ZeroMultiset zs;
  for (std::size_t chi = 1; chi < 4; ++chi) zs.add(chi, {0.5, std::log(7.0 + static_cast<double>(chi)), 1});
  const ExplicitResult all = delta_explicit(5e3, t, race, zs);
  double parts = 0;
  for (std::size_t chi = 1; chi < 4; ++chi) {
    ZeroMultiset one;
    one.add(chi, {0.5, std::log(7.0 + static_cast<double>(chi)), 1});
    parts += delta_explicit(5e3, t, race, one).value;
  }
  CHECK(all.value == doctest::Approx(parts).epsilon(1e-12));
  CHECK(all.imaginary_residue < 1e-9 * std::abs(all.value) + 1e-12);

  ZeroMultiset principal;
  principal.add(0, {0.5, 2.0, 1});
  CHECK_THROWS_AS(delta_explicit(5e3, t, race, principal), DomainError);
  ZeroMultiset unknown;
  unknown.add(9, {0.5, 2.0, 1});
  CHECK_THROWS_AS(delta_explicit(5e3, t, race, unknown), DomainError);
  CHECK_THROWS_AS(delta_explicit(3.0, t, race, zs), DomainError);
}

TEST_CASE("worker count does not change the sum") {
  const CharacterTable t(4);
  const RacePhase race = select_race_character(t, 3, 1);
  const ZeroMultiset zs = load_zeros(PRIMERACE_TEST_DATA "/l_chi4_zeros.txt", 1);
  FormulaConfig one, many;
  many.workers = 5;
  CHECK(delta_explicit(7.7e5, t, race, zs, one).value == delta_explicit(7.7e5, t, race, zs, many).value);
}

TEST_CASE("x' rule") {
  FormulaConfig cfg;
  CHECK(x_prime_log(10.0, cfg) == 10.0);
  cfg.levels = {{1, std::log(1.5) + 1.0}, {2, 256.0 + std::log(1.5)}};
  CHECK(x_prime_log(10.0, cfg) == 10.0);
  CHECK(x_prime_log(300.0, cfg) == 300.0);
  CHECK(x_prime_log(257.0, cfg) == doctest::Approx(3 * std::log(2.0) + 256.0 + std::log(1.5)));
  cfg.x_prime_log = 5.0;
  CHECK(x_prime_log(10.0, cfg) == 10.0);

  const CharacterTable t(4);
  const RacePhase race = select_race_character(t, 3, 1);
  FormulaConfig lv;
  lv.levels = {{2, std::log(100.0)}};
  ZeroMultiset zs;
  for (int k = 1; k <= 8; ++k) zs.add(1, {0.5, std::log(100.0 * k), 1});
  const ExplicitResult r = delta_explicit(300.0, t, race, zs, lv);
  CHECK(r.zeros_used == 8);
  CHECK(r.partially_truncated_levels.empty());
  lv.x_prime_log = std::log(500.0);
  const ExplicitResult p = delta_explicit(300.0, t, race, zs, lv);
  CHECK(p.zeros_used == 5);
  REQUIRE(p.partially_truncated_levels.size() == 1);
  CHECK(p.partially_truncated_levels[0] == 2);
}

TEST_CASE("J(x) is exact at powers") {
  CHECK(level_J(1.0) == 1);
  CHECK(level_J(65535.999) == 1);
  CHECK(level_J(65536.0) == 2);
  CHECK(level_J(43046720.0) == 2);
  CHECK(level_J(43046721.0) == 3);
}

TEST_CASE("main-term window") {
  const HypotheticalConstruction c = standard_construction();
  LevelWindow w = main_term_window(c, 65536.0);
  CHECK(w.lo == 1);
  CHECK(w.hi == 2);
  w = main_term_window(c, 100.0);
  CHECK(w.lo == 1);
  CHECK(w.hi == 2);
}

TEST_CASE("full-scale main term is finite and matches its levels") {
  const HypotheticalConstruction c = standard_construction();
  const RacePhase race = select_race_character(CharacterTable(4), 3, 1);
  const MainTerm m = delta_main_hypothetical(65536.0, c, race);
  REQUIRE(m.levels.size() == 2);
  CHECK(m.J == 2);
  for (const LevelTerm& t : m.levels) {
    const LevelParams lv = c.level(t.j);
    CHECK(t.log_magnitude == doctest::Approx(std::log(4.0) + (0.75 - lv.delta_j) * 65536.0 - lv.gamma.log_gamma() -
                                             std::log(65536.0)));
    CHECK(t.fejer == doctest::Approx(level_fejer(c, t.j, 65536.0)));
  }
  CHECK(m.levels[0].fejer == 0.0);
  CHECK(std::isfinite(m.value.log_magnitude()));
}

TEST_CASE("scale-mode main term equals a double evaluation") {
  HypotheticalConstruction c;
  c.xi = std::numbers::pi;
  c.sigma = 0.75;
  c.delta = 0.1;
  c.j_min = c.j_max = 10;
  c.scale_mode = ScaleMode{1.0, 8.0, 5.0, 0.1};
  const RacePhase race = select_race_character(CharacterTable(4), 3, 1);
  for (double x_log : {12.0, 15.5, 21.3}) {
    const double x = std::exp(x_log);
    double F = 0;
    for (int k = 1; k < 1000; ++k) F += (1000 - k) * std::cos(k * 5.0 * x_log);
    const double want = 2 * 2.0 * std::pow(x, 0.65) / (5.0 * x_log) * F;
    CHECK(delta_main_hypothetical(x_log, c, race).value.to_double() == doctest::Approx(want).epsilon(1e-8));
  }
  CHECK_THROWS_AS(delta_main_hypothetical(-1.0, c, race), DomainError);
}

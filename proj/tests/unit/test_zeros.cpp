#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "primerace/errors.hpp"
#include "primerace/zeros.hpp"

using namespace primerace;

TEST_CASE("zero table parsing") {
  std::istringstream in(
      "# header\n"
      "14.134725\n"
      "\n"
      "0.5 21.022040  # trailing comment\n"
      "0.75 log:3.5 4\n"
      "0.5 14.134725 2\n");
  const ZeroMultiset zs = parse_zeros(in, 1, "mem");
  const auto list = zs.zeros(1);
  REQUIRE(list.size() == 3);
  CHECK(list[0].gamma() == doctest::Approx(14.134725));
  CHECK(list[0].multiplicity == 3);
  CHECK(list[1].gamma() == doctest::Approx(21.022040));
  CHECK(list[2].beta == 0.75);
  CHECK(list[2].log_gamma == 3.5);
  CHECK(list[2].multiplicity == 4);
  CHECK(zs.distinct_count() == 3);
  CHECK(zs.total_multiplicity() == 8);
  CHECK(zs.zeros(2).empty());
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_zeros(in, 1);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("1.0\n2.0\nabc\n") == 3);
  CHECK(line_of("0.5 1 2 3\n") == 1);
  CHECK(line_of("# c\n-4\n") == 2);
  CHECK(line_of("1.5 10\n") == 1);
  CHECK(line_of("0.5 10 0\n") == 1);
  CHECK(line_of("0.5 10 2.5\n") == 1);
  CHECK(line_of("0.5 10 2\n") == 0);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_zeros("/nonexistent/zeros.txt", 1), IoError);
}

TEST_CASE("fixture loads") {
  const ZeroMultiset zs = load_zeros(PRIMERACE_TEST_DATA "/l_chi4_zeros.txt", 1);
  CHECK(zs.distinct_count() == 120);
  CHECK(zs.zeros(1)[0].gamma() == doctest::Approx(6.0209489046976));
}

TEST_CASE("write then parse round-trips exactly") {
  ZeroMultiset zs;
  zs.add(1, {0.5, std::log(14.134725141734693), 1});
  zs.add(1, {0.6123456789, 1234.5678901234567, 17});
  zs.add(1, {0.5, 0.1, 2});
  std::stringstream buf;
  write_zeros(buf, zs, 1);
  CHECK(parse_zeros(buf, 1) == zs);
}

TEST_CASE("truncation keeps gamma <= x'") {
  ZeroMultiset zs;
  for (double g : {5.0, 10.0, 20.0, 40.0}) zs.add(3, {0.5, std::log(g), 1});
  CHECK(truncate(zs, 20.0).distinct_count() == 3);
  CHECK(truncate(zs, 19.9).distinct_count() == 2);
  CHECK(truncate_log(zs, std::log(4.0)).empty());
  CHECK_THROWS_AS(truncate(zs, 0.5), DomainError);
}

TEST_CASE("level multiplicities") {
  for (int j = 1; j <= 6; ++j) {
    const auto L = static_cast<std::uint64_t>(j * j * j);
    std::uint64_t sum = 0;
    for (std::uint64_t k = 1; k <= L; ++k) {
      const std::uint64_t m = level_multiplicity(j, k);
      CHECK(m == level_multiplicity(j, L + 1 - k));
      sum += m;
    }
    CHECK(sum == level_total_multiplicity(j));
  }
  CHECK(level_total_multiplicity(2) == 120);
  CHECK_THROWS_AS(level_multiplicity(2, 0), DomainError);
  CHECK_THROWS_AS(level_multiplicity(2, 9), DomainError);
}

TEST_CASE("default construction respects the windows") {
  HypotheticalConstruction c;
  c.xi = std::numbers::pi;
  c.j_min = 1;
  c.j_max = 3;
  c.delta_selector = clamped_delta_selector(c.delta);
  CHECK(validate(c).empty());
  const LevelParams l2 = c.level(2);
  CHECK(l2.gamma.log_gamma() == doctest::Approx(256.0 + std::log(1.5)));
  CHECK(l2.delta_j == doctest::Approx(1.0 / 256.0));
  CHECK(l2.theta_j == doctest::Approx((std::numbers::pi / 2) / 65536.0));
  CHECK(l2.size() == 8);
  CHECK(c.level(1).delta_j == doctest::Approx(0.2));
}

TEST_CASE("window-centre delta at j = 1 breaks delta_j <= delta") {
  HypotheticalConstruction c;
  c.j_max = 2;
  const auto bad = validate(c);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0].find("delta_j <= delta") != std::string::npos);
  CHECK(bad[0].find("j=1") != std::string::npos);
  CHECK(bad[1].find("real part") != std::string::npos);
  CHECK_THROWS_AS(build_B(c), DomainError);
}

TEST_CASE("validation names each violated constraint") {
  HypotheticalConstruction c;
  c.sigma = 1.2;
  c.delta = 0.5;
  c.j_max = 2;
  c.gamma_selector = [](int) { return GammaSpec{1.0, 1.0}; };
  c.theta_selector = [](int, double) { return 1.0; };
  const auto bad = validate(c);
  auto mentions = [&](const std::string& s) {
    for (const auto& b : bad) {
      if (b.find(s) != std::string::npos) return true;
    }
    return false;
  };
  CHECK(mentions("sigma"));
  CHECK(mentions("gamma window"));
  CHECK(mentions("theta window"));

  HypotheticalConstruction r;
  r.j_min = 3;
  r.j_max = 2;
  CHECK(validate(r).size() == 1);
}

TEST_CASE("build_B for levels 1 and 2") {
  HypotheticalConstruction c;
  c.xi = std::numbers::pi;
  c.j_max = 2;
  c.delta_selector = clamped_delta_selector(c.delta);
  const ZeroMultiset B = build_B(c, 1);
  CHECK(B.distinct_count() == 9);
  CHECK(B.total_multiplicity() == level_total_multiplicity(1) + level_total_multiplicity(2));
  std::uint64_t peak = 0;
  for (const Zero& z : B.zeros(1)) {
    if (z.log_gamma > 100) peak = std::max(peak, z.multiplicity);
  }
  CHECK(peak == 20);
  CHECK(static_cast<double>(peak) <= std::pow(256.0 + std::log(1.5), 0.75));
  const Zero& top = B.zeros(1).back();
  CHECK(top.log_gamma == doctest::Approx(256.0 + std::log(1.5) + std::log(8.0)));
  CHECK(top.beta == doctest::Approx(0.75 - 1.0 / 256.0));
}

TEST_CASE("scale mode skips the window constraints") {
  HypotheticalConstruction c;
  c.xi = std::numbers::pi;
  c.sigma = 0.75;
  c.delta = 0.1;
  c.j_min = c.j_max = 10;
  c.scale_mode = ScaleMode{1.0, 8.0, 5.0, 0.1};
  CHECK(validate(c).empty());
  const LevelParams lv = c.level(10);
  CHECK(lv.gamma.log_gamma() == doctest::Approx(std::log(5.0)));
  CHECK(lv.delta_j == 0.1);
  CHECK(lv.size() == 1000);
  CHECK(c.describe().find("scale-mode") != std::string::npos);
}

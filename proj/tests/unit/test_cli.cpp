#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "primerace/cli.hpp"

using primerace::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "primerace_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kZeros = PRIMERACE_TEST_DATA "/l_chi4_zeros.txt";

}  // namespace

TEST_CASE("race report") {
  const Outcome o = call({"race", "--q", "4", "--a", "3", "--b", "1", "--x", "1e6"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["command"] == "race");
  CHECK(j["result"]["first_negative_x"] == 26861);
  CHECK(j["result"]["measure_positive"].get<std::uint64_t>() + j["result"]["measure_negative"].get<std::uint64_t>() +
            j["result"]["measure_zero"].get<std::uint64_t>() ==
        999'998);
  CHECK(j["result"]["density"]["kind"] == "exact-race");
}

TEST_CASE("race validation") {
  CHECK(call({"race", "--q", "4", "--a", "3", "--b", "3", "--x", "100"}).code == 2);
  CHECK(call({"race", "--q", "4", "--a", "2", "--b", "1", "--x", "100"}).code == 2);
  CHECK(call({"race", "--q", "4", "--a", "3", "--b", "1", "--x", "100.5"}).code == 2);
  CHECK(call({"race", "--q", "4", "--a", "3", "--b", "1"}).code == 2);
  CHECK(call({"race", "--q", "4", "--a", "3", "--b", "1", "--x", "1e14"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("breakpoint dump and CSV output") {
  const auto dump = scratch("bp.csv");
  const Outcome o = call({"race", "--q", "4", "--a", "3", "--b", "1", "--x", "12", "--dump-breakpoints", dump.string(),
                          "--format", "csv"});
  REQUIRE(o.code == 0);
  CHECK(slurp(dump) == "x,diff\n3,1\n5,0\n7,1\n11,2\n");
  CHECK(o.out == "q,a,b,X,measure,density,final_diff\n4,3,1,12,7,0.5833333333333334,2\n");
}

TEST_CASE("I/O failures exit 3") {
  CHECK(call({"race", "--q", "4", "--a", "3", "--b", "1", "--x", "100", "--output", "/nonexistent/dir/out.json"}).code == 3);
  CHECK(call({"explicit", "--zeros", "/nonexistent/zeros.txt", "--x", "1000"}).code == 3);
  CHECK(call({"--config", "/nonexistent/run.toml", "race"}).code == 3);
}

TEST_CASE("output file receives the report") {
  const auto path = scratch("race.json");
  const Outcome o = call({"--output", path.string(), "race", "--q", "3", "--a", "2", "--b", "1", "--x", "1000"});
  REQUIRE(o.code == 0);
  CHECK(o.out.empty());
  CHECK(nlohmann::json::parse(slurp(path))["config"]["q"] == 3);
}

TEST_CASE("config file with sections; flags override") {
  const auto cfg = scratch("run.toml");
  std::ofstream(cfg) << "format = \"csv\"\n[race]\nq = 4\na = 3\nb = 1\nx = 1000\n";
  Outcome o = call({"--config", cfg.string(), "race"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("q,a,b,X", 0) == 0);
  o = call({"--config", cfg.string(), "race", "--x", "2000"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find(",2000,") != std::string::npos);

  std::ofstream(cfg) << "[race]\nq = 4\na = 3\nb = 1\nx = 1000\nbogus = 1\n";
  CHECK(call({"--config", cfg.string(), "race"}).code == 2);
}

TEST_CASE("hypo") {
  CHECK(call({"hypo", "--x-log", "100"}).code == 2);
  const Outcome bad = call({"hypo", "--j-max", "2", "--x-log", "100", "--delta-rule", "center"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("delta_j <= delta") != std::string::npos);

  const Outcome standard = call({"hypo", "--j-max", "2", "--x-log", "65536", "--samples", "1000"});
  REQUIRE(standard.code == 0);
  const auto j = nlohmann::json::parse(standard.out);
  CHECK(j["result"]["B"]["total_multiplicity"] == 121);
  CHECK(j["result"]["main_term_at_X"]["J"] == 2);
  CHECK(j["assumed_hypotheses"].size() == 3);

  const auto csv = scratch("samples.csv");
  const Outcome demo = call({"hypo", "--scale-mode", "--j-min", "6", "--j-max", "6", "--gamma", "5", "--delta-j", "0.1",
                             "--delta", "0.1", "--x-log", "15", "--samples", "1500", "--samples-csv", csv.string()});
  REQUIRE(demo.code == 0);
  const std::string rows = slurp(csv);
  CHECK(rows.rfind("x_log,main_sign,main_log_magnitude,in_omega\n", 0) == 0);
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 1501);
  CHECK(call({"hypo", "--j-max", "2", "--x-log", "50", "--gamma", "5"}).code == 2);
}

TEST_CASE("hypo reports are identical across worker counts") {
  const std::vector<std::string> base{"hypo", "--scale-mode", "--j-min", "8", "--j-max", "9", "--gamma", "5",
                                      "--delta-j", "0.1", "--delta", "0.1", "--x-log", "20", "--samples", "12000",
                                      "--seed", "5"};
  auto with_workers = base;
  with_workers.insert(with_workers.end(), {"--workers", "6"});
  const Outcome a = call(base), b = call(with_workers);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("fejer sweep") {
  const Outcome o = call({"fejer", "--L", "16,64", "--gamma", "2", "--x", "1e4"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("L,gamma,X,density,method,err\n16,2,10000,0.1025097", 0) == 0);
  CHECK(call({"fejer", "--L", "2,16"}).code == 2);
  CHECK(call({"fejer"}).code == 2);
  CHECK(call({"fejer", "--L", "16", "--gamma", "0.5"}).code == 2);
  const Outcome both = call({"fejer", "--L", "16", "--method", "both", "--grid-cells", "100000", "--format", "json"});
  REQUIRE(both.code == 0);
  CHECK(nlohmann::json::parse(both.out)["result"].size() == 2);
}

TEST_CASE("explicit") {
  const Outcome o = call({"explicit", "--zeros", kZeros, "--x", "1000,12345.5"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("x,delta_explicit,true_delta,sign_agree,certified_error,diagnostic_error\n", 0) == 0);
  CHECK(std::count(o.out.begin(), o.out.end(), '\n') == 3);
  CHECK(call({"explicit", "--zeros", kZeros, "--x", "3"}).code == 2);
  CHECK(call({"explicit", "--zeros", kZeros}).code == 2);
  const Outcome r = call({"explicit", "--zeros", kZeros, "--x-range", "1000,100000,5", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["result"]["rows"].size() == 5);

  const auto bad = scratch("bad_zeros.txt");
  std::ofstream(bad) << "14.1\nnot-a-number\n";
  const Outcome p = call({"explicit", "--zeros", bad.string(), "--x", "1000"});
  CHECK(p.code == 2);
  CHECK(p.err.find("line 2") != std::string::npos);
}

TEST_CASE("precision failures exit 4") {
  CHECK(call({"--max-bits", "100", "hypo", "--j-max", "2", "--x-log", "65536", "--samples", "1000"}).code == 4);
}

#include "primerace/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "primerace/characters.hpp"
#include "primerace/density.hpp"
#include "primerace/errors.hpp"
#include "primerace/explicit_formula.hpp"
#include "primerace/fejer.hpp"
#include "primerace/report.hpp"
#include "primerace/sieve.hpp"
#include "primerace/zeros.hpp"

namespace primerace::cli {

namespace {

constexpr double kMaxRaceX = 1e13;

struct Global {
  std::string output;
  std::string format = "auto";
  std::uint64_t seed = 1;
  unsigned max_bits = kDefaultMaxPhaseBits;
  unsigned workers = 1;
};

struct RaceArgs {
  std::uint64_t q = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  double x = 0.0;
  std::string dump;
};

struct HypoArgs {
  std::uint64_t q = 4;
  std::int64_t a = 3;
  std::int64_t b = 1;
  std::optional<std::size_t> chi;
  double sigma = 0.75;
  double delta = 0.2;
  double A = 1.0;
  int j_min = 1;
  int j_max = 0;
  double x_log = 0.0;
  std::size_t samples = 10'000;
  bool scale_mode = false;
  double growth_c = 1.0;
  double growth_p = 8.0;
  std::optional<double> gamma;
  std::optional<double> delta_j;
  std::string delta_rule = "clamped";
  std::string samples_csv;
};

struct FejerArgs {
  std::vector<std::uint64_t> L;
  std::vector<double> gamma{10.0};
  double x = 1e4;
  std::optional<double> threshold;
  std::string method = "analytic";
  std::size_t grid_cells = 10'000'000;
};

struct ExplicitArgs {
  std::uint64_t q = 4;
  std::int64_t a = 3;
  std::int64_t b = 1;
  std::optional<std::size_t> chi;
  std::string zeros;
  std::vector<double> xs;
  std::vector<double> x_range;
  double beta_cut = 0.5;
  double quad_tol = 1e-10;
  double asymptotic_threshold = 1e6;
};

Json optional_json(const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); }
Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }
Json path_json(const std::string& p) { return p.empty() ? Json(nullptr) : Json(p); }

std::string resolve_format(const Global& g, const char* fallback) {
  if (g.format == "auto") return fallback;
  return g.format;
}

void emit(const Global& g, std::ostream& out, const std::string& text) {
  if (g.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) throw IoError("cannot open output file " + g.output);
  f << text;
  if (!f) throw IoError("failed writing output file " + g.output);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

std::uint64_t integral_bound(double x, const std::string& name) {
  if (!std::isfinite(x) || x < 2.0 || x > kMaxRaceX || x != std::floor(x)) {
    throw DomainError(name + " must be an integer in [2, 1e13], got " + format_double(x));
  }
  return static_cast<std::uint64_t>(x);
}

Json global_json(const Global& g) {
  Json j;
  j["seed"] = g.seed;
  j["max_phase_bits"] = g.max_bits;
  return j;
}

// ---------------------------------------------------------------------------

void cmd_race(const Global& g, const RaceArgs& r, std::ostream& out) {
  const std::uint64_t X = integral_bound(r.x, "--x");
  SieveOptions so;
  so.workers = g.workers;
  const RaceSeries rs = race_series(r.q, r.a, r.b, X, so);
  const RaceSignMeasure m = race_sign_measure(rs);
  const DensityResult d = exact_race_density(rs);
  if (!r.dump.empty()) {
    std::ostringstream csv;
    rs.write_csv(csv);
    write_text_file(r.dump, csv.str());
  }
  Json first_negative = nullptr;
  for (const auto& bp : rs.breakpoints) {
    if (bp.diff < 0) {
      first_negative = bp.x;
      break;
    }
  }

  std::ostringstream text;
  if (resolve_format(g, "json") == "csv") {
    write_csv_row(text, {"q", "a", "b", "X", "measure", "density", "final_diff"});
    write_csv_row(text, {std::to_string(rs.q), std::to_string(rs.a), std::to_string(rs.b), std::to_string(rs.X),
                         format_double(d.measure), format_double(d.density), std::to_string(rs.final_diff())});
  } else {
    Json cfg = global_json(g);
    cfg["q"] = r.q;
    cfg["a"] = r.a;
    cfg["b"] = r.b;
    cfg["X"] = X;
    cfg["dump_breakpoints"] = path_json(r.dump);
    Json res;
    res["final_diff"] = rs.final_diff();
    res["breakpoints"] = rs.breakpoints.size();
    res["first_negative_x"] = first_negative;
    res["measure_positive"] = m.positive;
    res["measure_negative"] = m.negative;
    res["measure_zero"] = m.zero;
    res["density"] = to_json(d);
    write_json(text, make_report("race", std::move(cfg), std::move(res)));
  }
  emit(g, out, text.str());
}

HypotheticalConstruction make_construction(const HypoArgs& h, double xi) {
  HypotheticalConstruction c;
  c.xi = xi;
  c.sigma = h.sigma;
  c.delta = h.delta;
  c.A = h.A;
  c.j_min = h.j_min;
  c.j_max = h.j_max;
  if (h.scale_mode) {
    ScaleMode sm;
    sm.growth_c = h.growth_c;
    sm.growth_p = h.growth_p;
    sm.gamma_override = h.gamma;
    sm.delta_override = h.delta_j;
    c.scale_mode = sm;
  } else {
    if (h.gamma || h.delta_j) throw DomainError("--gamma and --delta-j require --scale-mode");
    if (h.delta_rule == "clamped") {
      c.delta_selector = clamped_delta_selector(h.delta);
    } else if (h.delta_rule != "center") {
      throw DomainError("--delta-rule must be clamped or center");
    }
  }
  const auto problems = validate(c);
  if (!problems.empty()) {
    std::string msg = "construction violates:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DomainError(msg);
  }
  return c;
}

void cmd_hypo(const Global& g, const HypoArgs& h, std::ostream& out) {
  if (!(h.x_log > 0.0) || !std::isfinite(h.x_log)) throw DomainError("--x-log must be finite and positive");
  const CharacterTable table(h.q);
  const RacePhase race = select_race_character(table, h.a, h.b, h.chi);
  const HypotheticalConstruction c = make_construction(h, race.xi);

  Json b_json;
  std::uint64_t distinct = 0;
  for (int j = c.j_min; j <= c.j_max; ++j) distinct += c.level(j).size();
  if (distinct <= 1'000'000) {
    const ZeroMultiset B = build_B(c, race.chi_index);
    b_json["distinct_zeros"] = B.distinct_count();
    b_json["total_multiplicity"] = B.total_multiplicity();
  } else {
    b_json["distinct_zeros"] = distinct;
    b_json["total_multiplicity"] = nullptr;
  }

  SamplingOptions so;
  so.seed = g.seed;
  so.workers = g.workers;
  so.max_phase_bits = g.max_bits;
  so.keep_samples = !h.samples_csv.empty();
  const MainTerm at_X = delta_main_hypothetical(h.x_log, c, race, g.max_bits);
  const HypotheticalSampleResult s = sample_hypothetical(c, race, h.x_log, h.samples, so);

  if (!h.samples_csv.empty()) {
    std::ostringstream csv;
    write_csv_row(csv, {"x_log", "main_sign", "main_log_magnitude", "in_omega"});
    for (const SampleRecord& r : s.samples) {
      write_csv_row(csv, {format_double(r.x_log), std::to_string(r.main_sign), format_double(r.main_log_magnitude),
                          r.in_omega ? "1" : "0"});
    }
    write_text_file(h.samples_csv, csv.str());
  }

  std::ostringstream text;
  if (resolve_format(g, "json") == "csv") {
    write_csv_row(text, {"kind", "X_log", "density", "confidence_radius", "samples"});
    for (const DensityResult* d : {&s.sign, &s.omega}) {
      write_csv_row(text, {std::string(to_string(d->kind)), format_double(d->X_log), format_double(d->density),
                           format_double(d->confidence_radius), std::to_string(d->sample_count)});
    }
  } else {
    Json cfg = global_json(g);
    cfg["q"] = h.q;
    cfg["a"] = h.a;
    cfg["b"] = h.b;
    cfg["chi"] = optional_json(h.chi);
    cfg["sigma"] = h.sigma;
    cfg["delta"] = h.delta;
    cfg["A"] = h.A;
    cfg["j_min"] = h.j_min;
    cfg["j_max"] = h.j_max;
    cfg["x_log"] = h.x_log;
    cfg["samples"] = h.samples;
    cfg["scale_mode"] = h.scale_mode;
    cfg["growth_c"] = h.growth_c;
    cfg["growth_p"] = h.growth_p;
    cfg["gamma"] = optional_json(h.gamma);
    cfg["delta_j"] = optional_json(h.delta_j);
    cfg["delta_rule"] = h.delta_rule;
    cfg["samples_csv"] = path_json(h.samples_csv);
    Json res;
    res["race"] = to_json(race);
    res["construction"] = to_json(c);
    res["B"] = std::move(b_json);
    res["main_term_at_X"] = to_json(at_X);
    const LevelWindow ow = omega_window(c, h.x_log);
    res["omega_window"] = Json::array({ow.lo, ow.hi});
    res["sign_density"] = to_json(s.sign);
    res["omega_density"] = to_json(s.omega);
    res["implication_checked"] = s.implication_checked;
    res["implication_violations"] = s.implication_violations;
    res["cancellation_flags"] = s.cancellation_flags;
    write_json(text, make_report("hypo", std::move(cfg), std::move(res)));
  }
  emit(g, out, text.str());
}

void cmd_fejer(const Global& g, const FejerArgs& f, std::ostream& out) {
  if (f.L.empty()) throw DomainError("the L sweep is empty");
  if (f.gamma.empty()) throw DomainError("the gamma list is empty");
  if (f.method != "analytic" && f.method != "grid" && f.method != "both") {
    throw DomainError("--method must be analytic, grid or both");
  }
  for (std::uint64_t L : f.L) {
    for (double gamma : f.gamma) FejerParams{gamma, L}.validate();
  }
  if (!(f.x >= 2.0) || !std::isfinite(f.x)) throw DomainError("--x must be finite and >= 2");

  struct Row {
    FejerParams p;
    SublevelReport r;
  };
  std::vector<Row> rows;
  for (std::uint64_t L : f.L) {
    for (double gamma : f.gamma) {
      const FejerParams p{gamma, L};
      const double threshold = f.threshold ? *f.threshold : -static_cast<double>(L) / 4.0;
      if (f.method == "analytic") {
        rows.push_back({p, sublevel_measure(p, f.x, threshold)});
      } else if (f.method == "grid") {
        rows.push_back({p, sublevel_measure(p, f.x, threshold, {SublevelMethod::adaptive_grid, f.grid_cells})});
      } else {
        rows.push_back({p, checked_sublevel_measure(p, f.x, threshold, f.grid_cells)});
        rows.push_back({p, sublevel_measure(p, f.x, threshold, {SublevelMethod::adaptive_grid, f.grid_cells})});
      }
    }
  }

  std::ostringstream text;
  if (resolve_format(g, "csv") == "csv") {
    write_csv_row(text, {"L", "gamma", "X", "density", "method", "err"});
    for (const Row& row : rows) {
      write_csv_row(text, {std::to_string(row.p.L), format_double(row.p.gamma), format_double(row.r.X),
                           format_double(row.r.density), std::string(to_string(row.r.method)),
                           format_double(row.r.error_bound / row.r.X)});
    }
  } else {
    Json cfg = global_json(g);
    cfg["L"] = f.L;
    cfg["gamma"] = f.gamma;
    cfg["X"] = f.x;
    cfg["threshold"] = optional_json(f.threshold);
    cfg["method"] = f.method;
    cfg["grid_cells"] = f.grid_cells;
    Json res = Json::array();
    for (const Row& row : rows) res.push_back(to_json(row.r, row.p));
    write_json(text, make_report("fejer", std::move(cfg), std::move(res)));
  }
  emit(g, out, text.str());
}

void cmd_explicit(const Global& g, const ExplicitArgs& e, std::ostream& out) {
  std::vector<double> xs = e.xs;
  if (!e.x_range.empty()) {
    if (e.x_range.size() != 3 || !(e.x_range[2] >= 1.0) || e.x_range[2] != std::floor(e.x_range[2])) {
      throw DomainError("--x-range takes lo,hi,count with count >= 1");
    }
    const double lo = e.x_range[0], hi = e.x_range[1];
    const auto n = static_cast<std::size_t>(e.x_range[2]);
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("--x-range needs 0 < lo <= hi");
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      xs.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    }
  }
  if (xs.empty()) throw DomainError("no evaluation points: give --x or --x-range");
  for (double x : xs) {
    if (!(x >= 4.0) || !std::isfinite(x) || x > kMaxRaceX) {
      throw DomainError("evaluation points must lie in [4, 1e13], got " + format_double(x));
    }
  }
  FormulaConfig fc;
  fc.beta_cut = e.beta_cut;
  fc.quadrature_tol = e.quad_tol;
  fc.gamma_asymptotic_threshold = e.asymptotic_threshold;
  fc.workers = g.workers;
  fc.max_phase_bits = g.max_bits;
  fc.validate();

  const CharacterTable table(e.q);
  const RacePhase race = select_race_character(table, e.a, e.b, e.chi);
  const ZeroMultiset zs = load_zeros(e.zeros, race.chi_index);

  SieveOptions so;
  so.workers = g.workers;
  const auto X = static_cast<std::uint64_t>(std::floor(*std::max_element(xs.begin(), xs.end())));
  const RaceSeries rs = race_series(e.q, e.a, e.b, X, so);
  const auto phi = static_cast<double>(table.phi());

  struct Row {
    double x;
    ExplicitResult r;
    double truth;
    bool agree;
  };
  std::vector<Row> rows;
  std::size_t compared = 0, agreed = 0;
  for (double x : xs) {
    const ExplicitResult r = delta_explicit(x, table, race, zs, fc);
    const std::int64_t D = rs.diff_at(static_cast<std::uint64_t>(std::floor(x)));
    const double truth = phi * static_cast<double>(D);
    const bool agree = (r.value > 0) == (truth > 0) && (r.value < 0) == (truth < 0);
    if (std::abs(D) > 1) {
      ++compared;
      if (agree) ++agreed;
    }
    rows.push_back({x, r, truth, agree});
  }

  std::ostringstream text;
  if (resolve_format(g, "csv") == "csv") {
    write_csv_row(text, {"x", "delta_explicit", "true_delta", "sign_agree", "certified_error", "diagnostic_error"});
    for (const Row& row : rows) {
      write_csv_row(text, {format_double(row.x), format_double(row.r.value), format_double(row.truth),
                           row.agree ? "1" : "0", format_double(row.r.certified_error),
                           format_double(row.r.diagnostic_error)});
    }
  } else {
    Json cfg = global_json(g);
    cfg["q"] = e.q;
    cfg["a"] = e.a;
    cfg["b"] = e.b;
    cfg["chi"] = optional_json(e.chi);
    cfg["zeros"] = e.zeros;
    cfg["x"] = xs;
    cfg["beta_cut"] = e.beta_cut;
    cfg["quadrature_tol"] = e.quad_tol;
    cfg["asymptotic_threshold"] = e.asymptotic_threshold;
    Json res;
    res["race"] = to_json(race);
    res["zeros_provenance"] = zs.provenance();
    res["compared"] = compared;
    res["agreement"] = compared == 0 ? Json(nullptr) : Json(static_cast<double>(agreed) / compared);
    Json arr = Json::array();
    for (const Row& row : rows) {
      Json j;
      j["x"] = row.x;
      j["delta_explicit"] = json_number(row.r.value);
      j["true_delta"] = row.truth;
      j["sign_agree"] = row.agree;
      j["certified_error"] = json_number(row.r.certified_error);
      j["diagnostic_error"] = json_number(row.r.diagnostic_error);
      j["zeros_used"] = row.r.zeros_used;
      arr.push_back(std::move(j));
    }
    res["rows"] = std::move(arr);
    write_json(text, make_report("explicit", std::move(cfg), std::move(res)));
  }
  emit(g, out, text.str());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prime race laboratory: exact races, explicit formulas and Fejer sign bias"};
  app.name("prime_race");
  app.set_config("--config", "", "Read options from a TOML/INI file; sections name subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);

  Global g;
  app.add_option("-o,--output", g.output, "Write the report to this file instead of stdout");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"auto", "csv", "json"}));
  app.add_option("--seed", g.seed, "Random seed for sampling");
  app.add_option("--max-bits", g.max_bits, "Precision cap for phase reduction, in bits")->check(CLI::Range(64u, 1u << 20));
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::Range(1u, 1024u));

  RaceArgs ra;
  auto* race = app.add_subcommand("race", "Exact race pi(x;q,a) - pi(x;q,b) and its positive-set density");
  race->add_option("--q", ra.q, "Modulus")->required();
  race->add_option("--a", ra.a, "Leading residue")->required();
  race->add_option("--b", ra.b, "Trailing residue")->required();
  race->add_option("--x", ra.x, "Upper limit X (integer, may be written 1e6)")->required();
  race->add_option("--dump-breakpoints", ra.dump, "Write the breakpoint CSV to this file");

  HypoArgs ha;
  auto* hypo = app.add_subcommand("hypo", "Sign density of the hypothetical main term and of Omega");
  hypo->add_option("--q", ha.q, "Modulus");
  hypo->add_option("--a", ha.a, "Leading residue");
  hypo->add_option("--b", ha.b, "Trailing residue");
  hypo->add_option("--chi", ha.chi, "Character index override");
  hypo->add_option("--sigma", ha.sigma, "sigma in (1/2, 1)");
  hypo->add_option("--delta", ha.delta, "delta in (0, sigma - 1/2)");
  hypo->add_option("--A", ha.A, "Lower bound A for gamma_j");
  hypo->add_option("--j-min", ha.j_min, "First level");
  hypo->add_option("--j-max", ha.j_max, "Last level")->required();
  hypo->add_option("--x-log", ha.x_log, "log X; samples are drawn uniformly from [sqrt(X), X]")->required();
  hypo->add_option("--samples", ha.samples, "Number of samples (>= 1000)");
  hypo->add_flag("--scale-mode", ha.scale_mode, "Replace the j^8 growth law by c j^p (reduced demo scale)");
  hypo->add_option("--growth-c", ha.growth_c, "Scale mode: c in g(j) = c j^p");
  hypo->add_option("--growth-p", ha.growth_p, "Scale mode: p in g(j) = c j^p");
  hypo->add_option("--gamma", ha.gamma, "Scale mode: fixed gamma_j for every level");
  hypo->add_option("--delta-j", ha.delta_j, "Scale mode: fixed delta_j for every level");
  hypo->add_option("--delta-rule", ha.delta_rule, "delta_j choice: clamped = min(j^-8, delta), center = j^-8")
      ->check(CLI::IsMember({"clamped", "center"}));
  hypo->add_option("--samples-csv", ha.samples_csv, "Write one CSV row per sample to this file");

  FejerArgs fa;
  auto* fejer = app.add_subcommand("fejer", "Measure of {x in [1, X] : F_{gamma,L}(x) >= threshold}");
  fejer->add_option("--L", fa.L, "Comma-separated list of L values (each >= 4)")->delimiter(',');
  fejer->add_option("--gamma", fa.gamma, "Comma-separated list of gamma values (each >= 1)")->delimiter(',');
  fejer->add_option("--x", fa.x, "Range end X");
  fejer->add_option("--threshold", fa.threshold, "Threshold (default -L/4)");
  fejer->add_option("--method", fa.method, "analytic, grid or both")->check(CLI::IsMember({"analytic", "grid", "both"}));
  fejer->add_option("--grid-cells", fa.grid_cells, "Cells of the adaptive grid");

  ExplicitArgs ea;
  auto* expl = app.add_subcommand("explicit", "Explicit-formula sum over a zero table versus the true race");
  expl->add_option("--q", ea.q, "Modulus");
  expl->add_option("--a", ea.a, "Leading residue");
  expl->add_option("--b", ea.b, "Trailing residue");
  expl->add_option("--chi", ea.chi, "Character index override");
  expl->add_option("--zeros", ea.zeros, "Zero table file")->required();
  expl->add_option("--x", ea.xs, "Comma-separated evaluation points")->delimiter(',');
  expl->add_option("--x-range", ea.x_range, "lo,hi,count: log-spaced evaluation points")->delimiter(',');
  expl->add_option("--beta-cut", ea.beta_cut, "Zeros with real part >= beta_cut are summed");
  expl->add_option("--quad-tol", ea.quad_tol, "Relative quadrature tolerance");
  expl->add_option("--asymptotic-threshold", ea.asymptotic_threshold, "|rho| above which the integral is bounded");

  for (CLI::App* sub : {race, hypo, fejer, expl}) sub->allow_config_extras(CLI::config_extras_mode::error);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::FileError& e) {
    err << e.what() << '\n';
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (race->parsed()) cmd_race(g, ra, out);
    if (hypo->parsed()) cmd_hypo(g, ha, out);
    if (fejer->parsed()) cmd_fejer(g, fa, out);
    if (expl->parsed()) cmd_explicit(g, ea, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const PrecisionError& e) {
    err << "precision failure: " << e.what() << '\n';
    return kPrecision;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace primerace::cli

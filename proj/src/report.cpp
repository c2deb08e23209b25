#include "primerace/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace primerace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const DensityResult& r) {
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["X"] = json_number(r.X);
  j["X_log"] = json_number(r.X_log);
  j["measure"] = json_number(r.measure);
  j["density"] = json_number(r.density);
  j["sample_count"] = r.sample_count;
  j["confidence_radius"] = json_number(r.confidence_radius);
  return j;
}

Json to_json(const RacePhase& r) {
  Json j;
  j["q"] = r.q;
  j["a"] = r.a;
  j["b"] = r.b;
  j["chi_index"] = r.chi_index;
  j["xi"] = json_number(r.xi);
  j["magnitude"] = json_number(r.magnitude);
  j["chi_a_turns"] = std::to_string(r.chi_a.num()) + "/" + std::to_string(r.chi_a.den());
  j["chi_b_turns"] = std::to_string(r.chi_b.num()) + "/" + std::to_string(r.chi_b.den());
  return j;
}

Json to_json(const HypotheticalConstruction& c) {
  Json j;
  j["description"] = c.describe();
  j["xi"] = json_number(c.xi);
  j["sigma"] = json_number(c.sigma);
  j["delta"] = json_number(c.delta);
  j["A"] = json_number(c.A);
  j["j_min"] = c.j_min;
  j["j_max"] = c.j_max;
  j["scale_mode"] = c.scaled();
  Json levels = Json::array();
  for (int lv = c.j_min; lv <= c.j_max; ++lv) {
    const LevelParams p = c.level(lv);
    Json l;
    l["j"] = lv;
    l["log_gamma"] = json_number(p.gamma.log_gamma());
    l["delta_j"] = json_number(p.delta_j);
    l["theta_j"] = json_number(p.theta_j);
    l["beta"] = json_number(p.beta(c.sigma));
    l["ordinates"] = p.size();
    l["total_multiplicity"] = level_total_multiplicity(lv);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json to_json(const SublevelReport& r, const FejerParams& p) {
  Json j;
  j["L"] = p.L;
  j["gamma"] = json_number(p.gamma);
  j["X"] = json_number(r.X);
  j["threshold"] = json_number(r.threshold);
  j["measure"] = json_number(r.measure);
  j["density"] = json_number(r.density);
  j["method"] = std::string(to_string(r.method));
  j["error_bound"] = json_number(r.error_bound);
  return j;
}

Json to_json(const MainTerm& m) {
  Json j;
  j["J"] = m.J;
  j["window"] = Json::array({m.window.lo, m.window.hi});
  j["sign"] = m.value.is_zero() ? 0 : m.value.sign();
  j["log_magnitude"] = json_number(m.value.log_magnitude());
  j["cancellation"] = m.value.cancellation();
  Json levels = Json::array();
  for (const LevelTerm& t : m.levels) {
    Json l;
    l["j"] = t.j;
    l["log_prefactor"] = json_number(t.log_magnitude);
    l["fejer"] = json_number(t.fejer);
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j;
}

std::vector<std::string> assumed_hypotheses(std::string_view command) {
  if (command == "explicit") {
    return {
        "every L(s, chi) with chi nonprincipal mod q is zero-free on the real segment beta_cut < s < 1",
        "the zero table lists every zero with real part >= beta_cut and 0 < imaginary part <= x' for its character",
        "characters without a zero table have no zeros with real part >= beta_cut",
    };
  }
  if (command == "hypo") {
    return {
        "the zeros of L(s, chi) with real part > 1/2 are exactly the hypothetical multiset B",
        "L(s, chi') has no zeros with real part > sigma - delta for every other nonprincipal chi' mod q",
        "only the main term is evaluated; the explicit-formula error terms are assumed negligible",
    };
  }
  return {};
}

Json make_report(std::string_view command, Json config, Json result) {
  Json j;
  j["tool"] = "prime_race";
  j["version"] = std::string(kVersion);
  j["command"] = std::string(command);
  j["config"] = std::move(config);
  j["result"] = std::move(result);
  j["assumed_hypotheses"] = assumed_hypotheses(command);
  return j;
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out << ',';
    out << csv_field(f);
    first = false;
  }
  out << '\n';
}

}  // namespace primerace

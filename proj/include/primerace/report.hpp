#pragma once

// JSON and CSV output shared by the command-line tool.

#include <json.hpp>

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "primerace/characters.hpp"
#include "primerace/density.hpp"
#include "primerace/explicit_formula.hpp"
#include "primerace/fejer.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "0.1.0";

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Finite doubles as numbers, anything else as null.
Json json_number(double v);

Json to_json(const DensityResult& r);
Json to_json(const RacePhase& r);
Json to_json(const HypotheticalConstruction& c);
Json to_json(const SublevelReport& r, const FejerParams& p);
Json to_json(const MainTerm& m);

/// Hypotheses a run of `command` relies on but cannot check.
std::vector<std::string> assumed_hypotheses(std::string_view command);

/// {tool, version, command, config, result, assumed_hypotheses}
Json make_report(std::string_view command, Json config, Json result);

/// Two-space indented JSON followed by a newline.
void write_json(std::ostream& out, const Json& j);

/// Quotes a field if it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view s);
void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields);

}  // namespace primerace

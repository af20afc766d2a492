#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitlaw/fitter.hpp"
#include "splitlaw/law.hpp"

namespace splitlaw {

/// JSON document for fitted parameters: law family name plus one
/// {name, constrained_value, raw_value, transform{kind, lower, upper}}
/// entry per parameter, and fit metadata (seed, objective).
nlohmann::ordered_json params_to_json(LawFamily family, std::span<const double> constrained,
                                      std::span<const double> raw, std::uint64_t seed,
                                      double objective);

struct ParsedParams {
  LawFamily family = LawFamily::kSplit;
  std::vector<double> constrained;
  std::vector<double> raw;
  std::uint64_t seed = 0;
  double objective = 0.0;
};

ParsedParams params_from_json(const nlohmann::json& doc);
ParsedParams load_params_file(const std::string& path);

SplitLawParams split_params_from_parsed(const ParsedParams& parsed);

nlohmann::ordered_json metrics_to_json(const Metrics& metrics);

/// Params document plus a metrics object {train, test} and a config echo.
nlohmann::ordered_json fit_result_to_json(const FitResult& result, const FitConfig& config);

void write_json_file(const nlohmann::ordered_json& doc, const std::string& path);

}  // namespace splitlaw

#include "splitlaw/params_io.hpp"

#include <algorithm>
#include <fstream>

#include "splitlaw/errors.hpp"
#include "splitlaw/transforms.hpp"

namespace splitlaw {

nlohmann::ordered_json params_to_json(LawFamily family, std::span<const double> constrained,
                                      std::span<const double> raw, std::uint64_t seed,
                                      double objective) {
  const auto& names = law_param_names(family);
  const auto& specs = law_transforms(family);
  if (constrained.size() != names.size() || raw.size() != names.size())
    throw DomainError("parameter vector length does not match the law family");

  nlohmann::ordered_json doc;
  doc["law"] = to_string(family);
  doc["params"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < names.size(); ++i) {
    nlohmann::ordered_json entry;
    entry["name"] = names[i];
    entry["constrained_value"] = constrained[i];
    entry["raw_value"] = raw[i];
    nlohmann::ordered_json tf;
    tf["kind"] = to_string(specs[i].kind);
    if (specs[i].kind == TransformKind::kSoftplusPositive) {
      tf["lower"] = nullptr;
      tf["upper"] = nullptr;
    } else {
      tf["lower"] = specs[i].lower;
      tf["upper"] = specs[i].upper;
    }
    entry["transform"] = tf;
    doc["params"].push_back(entry);
  }
  doc["seed"] = seed;
  doc["objective"] = objective;
  return doc;
}

ParsedParams params_from_json(const nlohmann::json& doc) {
  ParsedParams out;
  try {
    out.family = law_family_from_string(doc.at("law").get<std::string>());
    const auto& names = law_param_names(out.family);
    const auto& entries = doc.at("params");
    if (entries.size() != names.size())
      throw ParseError("expected " + std::to_string(names.size()) + " parameters for the " +
                       to_string(out.family) + " law, got " + std::to_string(entries.size()));
    out.constrained.resize(names.size());
    out.raw.resize(names.size());
    std::vector<char> seen(names.size(), 0);
    for (const auto& entry : entries) {
      const std::string name = entry.at("name").get<std::string>();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw ParseError("unknown parameter name '" + name + "'");
      const std::size_t idx = static_cast<std::size_t>(it - names.begin());
      seen[idx] = 1;
      out.constrained[idx] = entry.at("constrained_value").get<double>();
      if (entry.contains("raw_value") && !entry.at("raw_value").is_null())
        out.raw[idx] = entry.at("raw_value").get<double>();
      else
        out.raw[idx] = inverse_transform_value(out.constrained[idx], law_transforms(out.family)[idx]);
    }
    for (std::size_t i = 0; i < names.size(); ++i)
      if (!seen[i]) throw ParseError("missing parameter '" + names[i] + "'");
    if (doc.contains("seed")) out.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("objective")) out.objective = doc.at("objective").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid params document: ") + e.what());
  }
  return out;
}

ParsedParams load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
  return params_from_json(doc);
}

SplitLawParams split_params_from_parsed(const ParsedParams& parsed) {
  if (parsed.family != LawFamily::kSplit)
    throw DomainError("expected split-law parameters, got " + to_string(parsed.family));
  return SplitLawParams::from_array(parsed.constrained);
}

nlohmann::ordered_json metrics_to_json(const Metrics& metrics) {
  nlohmann::ordered_json doc;
  doc["mae"] = metrics.mae;
  doc["mre"] = metrics.mre;
  if (metrics.r2)
    doc["r2"] = *metrics.r2;
  else
    doc["r2"] = nullptr;
  if (metrics.pearson_r)
    doc["pearson_r"] = *metrics.pearson_r;
  else
    doc["pearson_r"] = nullptr;
  doc["n"] = metrics.n;
  return doc;
}

nlohmann::ordered_json fit_result_to_json(const FitResult& result, const FitConfig& config) {
  nlohmann::ordered_json doc =
      params_to_json(result.law, result.params, result.raw, result.seed, result.objective);
  doc["metrics"]["train"] = metrics_to_json(result.train_metrics);
  doc["metrics"]["test"] = metrics_to_json(result.test_metrics);
  doc["n_local_solves"] = result.n_local_solves;
  nlohmann::ordered_json cfg;
  cfg["huber_delta"] = config.huber_delta;
  cfg["n_random_starts"] = config.n_random_starts;
  cfg["hops_per_start"] = config.hops_per_start;
  cfg["hop_step"] = config.hop_step;
  cfg["accept_temperature"] = config.accept_temperature;
  cfg["local_max_iter"] = config.local_max_iter;
  cfg["seed"] = config.seed;
  doc["config"] = cfg;
  return doc;
}

void write_json_file(const nlohmann::ordered_json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace splitlaw

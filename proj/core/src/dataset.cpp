#include "splitlaw/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

constexpr const char* kHeader = "n_params,pt_tokens_b,cpt_tokens_b,domain_id,loss,source_tag";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

double parse_double(std::string_view field, long row, const char* column) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("cannot parse number '" + std::string(field) + "'", row, column);
  return value;
}

long parse_int(std::string_view field, long row, const char* column) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("cannot parse integer '" + std::string(field) + "'", row, column);
  return value;
}

/// Lower-rank median: mean of the two middle order statistics for even n.
double rank_median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Dataset subset(const Dataset& ds, const std::vector<char>& keep, bool invert) {
  Dataset out;
  out.n_domains = ds.n_domains;
  out.domain_weights = ds.domain_weights;
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    if (static_cast<bool>(keep[i]) != invert) out.records.push_back(ds.records[i]);
  return out;
}

}  // namespace

Dataset parse_runs(std::istream& in, int n_domains_override) {
  Dataset ds;
  std::string line;
  long row = 0;
  bool header_seen = false;
  int max_domain = -1;

  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      auto fields = split_fields(view);
      if (fields.empty() || fields[0] != "n_params")
        throw ParseError("expected header starting with 'n_params'", row);
      header_seen = true;
      continue;
    }

    auto fields = split_fields(view);
    if (fields.size() < 5 || fields.size() > 6)
      throw ParseError("expected 5 or 6 fields, got " + std::to_string(fields.size()), row);

    RunRecord rec;
    rec.n_params = parse_double(fields[0], row, "n_params");
    rec.pt_tokens = parse_double(fields[1], row, "pt_tokens_b");
    rec.cpt_tokens = parse_double(fields[2], row, "cpt_tokens_b");
    rec.domain_id = static_cast<int>(parse_int(fields[3], row, "domain_id"));
    rec.loss = parse_double(fields[4], row, "loss");
    if (fields.size() == 6) rec.source_tag = std::string(fields[5]);

    if (!(rec.n_params > 0.0) || !std::isfinite(rec.n_params))
      throw ParseError("n_params must be a positive finite number", row, "n_params");
    if (rec.pt_tokens < 0.0 || !std::isfinite(rec.pt_tokens))
      throw ParseError("pt_tokens_b must be nonnegative and finite", row, "pt_tokens_b");
    if (rec.cpt_tokens < 0.0 || !std::isfinite(rec.cpt_tokens))
      throw ParseError("cpt_tokens_b must be nonnegative and finite", row, "cpt_tokens_b");
    if (rec.pt_tokens + rec.cpt_tokens <= 0.0)
      throw ParseError("pt_tokens_b + cpt_tokens_b must be positive", row);
    if (rec.domain_id < 0) throw ParseError("domain_id must be nonnegative", row, "domain_id");
    if (!(rec.loss > 0.0) || !std::isfinite(rec.loss))
      throw ParseError("loss must be a positive finite number", row, "loss");

    max_domain = std::max(max_domain, rec.domain_id);
    ds.records.push_back(std::move(rec));
  }

  if (!header_seen) throw ParseError("empty input: no header row");

  ds.n_domains = n_domains_override >= 1 ? n_domains_override : max_domain + 1;
  if (ds.n_domains > 0) {
    for (const auto& rec : ds.records)
      if (rec.domain_id >= ds.n_domains)
        throw ParseError("domain_id " + std::to_string(rec.domain_id) + " >= K = " +
                         std::to_string(ds.n_domains));
    ds.domain_weights.assign(ds.n_domains, 1.0 / ds.n_domains);
  }
  return ds;
}

Dataset parse_runs_file(const std::string& path, int n_domains_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_runs(in, n_domains_override);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << kHeader << '\n';
  char buf[128];
  for (const auto& rec : ds.records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g", rec.n_params, rec.pt_tokens,
                  rec.cpt_tokens, rec.domain_id, rec.loss);
    out << buf << ',' << rec.source_tag << '\n';
  }
}

void write_csv_file(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_csv(ds, out);
}

FilterResult filter_outliers(const Dataset& ds, double lo, double hi) {
  if (!(lo < hi)) throw DomainError("filter_outliers needs lo < hi");
  FilterResult result;
  result.kept.n_domains = ds.n_domains;
  result.kept.domain_weights = ds.domain_weights;
  for (const auto& rec : ds.records) {
    if (rec.loss > hi || rec.loss < lo) {
      ++result.removed;
    } else {
      result.kept.records.push_back(rec);
    }
  }
  return result;
}

ScenarioSplit scenario_split(const Dataset& ds, int scenario, double size_cutoff) {
  if (ds.empty()) throw DegenerateError("cannot split an empty dataset");
  if (scenario < 1 || scenario > 3) throw DomainError("scenario must be 1, 2 or 3");
  bool cutoff_present = false;
  for (const auto& rec : ds.records) cutoff_present |= rec.n_params == size_cutoff;
  if (!cutoff_present)
    throw DomainError("size_cutoff is not among the dataset's model sizes");

  ScenarioSplit split;
  split.scenario = scenario;
  split.thresholds.size_cutoff = size_cutoff;

  if (scenario >= 2) {
    std::vector<double> pts;
    pts.reserve(ds.size());
    for (const auto& rec : ds.records) pts.push_back(rec.pt_tokens);
    split.thresholds.d_median = rank_median(std::move(pts));
  }
  if (scenario == 3) {
    std::vector<double> cpts;
    cpts.reserve(ds.size());
    for (const auto& rec : ds.records) cpts.push_back(rec.cpt_tokens);
    split.thresholds.dk_median = rank_median(std::move(cpts));
  }

  std::vector<char> in_train(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& rec = ds.records[i];
    bool train = rec.n_params <= size_cutoff;
    if (scenario >= 2) train = train && rec.pt_tokens <= split.thresholds.d_median;
    if (scenario == 3) train = train && rec.cpt_tokens <= split.thresholds.dk_median;
    in_train[i] = train;
  }

  split.train = subset(ds, in_train, false);
  split.test = subset(ds, in_train, true);
  if (split.train.empty() || split.test.empty())
    throw DegenerateError("scenario " + std::to_string(scenario) +
                          " split left an empty side (train=" +
                          std::to_string(split.train.size()) + ", test=" +
                          std::to_string(split.test.size()) + ")");
  return split;
}

}  // namespace splitlaw

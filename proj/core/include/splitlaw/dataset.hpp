#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace splitlaw {

/// One observed training run.
struct RunRecord {
  double n_params = 0.0;    // parameter count, > 0
  double pt_tokens = 0.0;   // pretraining tokens, billions, >= 0
  double cpt_tokens = 0.0;  // continued-pretraining tokens, billions, >= 0
  int domain_id = 0;        // in [0, K)
  double loss = 0.0;        // nats/token, > 0
  std::string source_tag;

  bool operator==(const RunRecord&) const = default;
};

struct Dataset {
  std::vector<RunRecord> records;
  int n_domains = 0;  // K
  std::vector<double> domain_weights;  // nonnegative, sums to 1

  bool operator==(const Dataset&) const = default;
  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

struct SplitThresholds {
  double size_cutoff = 0.0;  // parameter count
  double d_median = 0.0;     // billions, scenario >= 2
  double dk_median = 0.0;    // billions, scenario 3
};

struct ScenarioSplit {
  int scenario = 1;  // 1, 2 or 3
  Dataset train;
  Dataset test;
  SplitThresholds thresholds;
};

/// CSV schema (header mandatory, `#` starts a comment, blank lines ignored):
///   n_params,pt_tokens_b,cpt_tokens_b,domain_id,loss[,source_tag]
/// K is inferred as 1 + max(domain_id) unless n_domains_override >= 1.
/// Domain weights default to uniform.
Dataset parse_runs(std::istream& in, int n_domains_override = 0);
Dataset parse_runs_file(const std::string& path, int n_domains_override = 0);

void write_csv(const Dataset& ds, std::ostream& out);
void write_csv_file(const Dataset& ds, const std::string& path);

struct FilterResult {
  Dataset kept;
  std::size_t removed = 0;
};

/// Removes records with loss > hi or loss < lo (bounds themselves are kept).
FilterResult filter_outliers(const Dataset& ds, double lo = 0.5, double hi = 4.0);

/// Train/test partitions:
///   scenario 1: train has n_params <= size_cutoff, test the rest;
///   scenario 2: train additionally restricted to pt_tokens <= median(pt);
///   scenario 3: train additionally restricted to cpt_tokens <= median(cpt);
/// test is always the complement of train. Medians are rank-based over the
/// whole input and recorded in thresholds. Throws DegenerateError when a
/// side ends up empty.
ScenarioSplit scenario_split(const Dataset& ds, int scenario, double size_cutoff);

}  // namespace splitlaw

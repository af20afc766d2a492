#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splitlaw/dataset.hpp"
#include "splitlaw/law.hpp"

namespace splitlaw {

struct FitConfig {
  double huber_delta = 1e-3;
  int n_random_starts = 64;
  int hops_per_start = 50;
  double hop_step = 0.5;            // unconstrained-space scale
  double accept_temperature = 1e-3; // objective units; rescale for very large datasets
  int local_max_iter = 500;
  std::uint64_t seed = 0;
  int max_threads = 0;              // 0 = hardware concurrency
};

struct Metrics {
  double mae = 0.0;
  double mre = 0.0;
  std::optional<double> r2;         // null when targets are constant
  std::optional<double> pearson_r;  // null when either side is constant
  std::size_t n = 0;
};

struct FitResult {
  LawFamily law = LawFamily::kSplit;
  std::vector<double> params;       // constrained
  std::vector<double> raw;          // unconstrained optimizer point
  double objective = 0.0;           // final Huber sum on the training set
  Metrics train_metrics;
  Metrics test_metrics;
  int n_local_solves = 0;
  std::uint64_t seed = 0;
};

/// Huber penalty: 0.5 r^2 inside |r| <= delta, delta (|r| - delta/2) outside.
double huber(double residual, double delta);
double huber_derivative(double residual, double delta);

/// Sum of Huber penalties of (prediction - observed loss) over the dataset,
/// with prediction through transform then the family's eval. Rows outside
/// the family's domain (D' = 0 for the comparison law) must be dropped
/// before calling; a violating row raises the law's domain error.
double objective(std::span<const double> raw, const Dataset& ds, LawFamily law, double delta);

/// Objective value plus its gradient in unconstrained (raw) space.
double objective_with_grad(std::span<const double> raw, const Dataset& ds, LawFamily law,
                           double delta, std::vector<double>& grad);

struct LocalFitResult {
  std::vector<double> raw;
  double objective = 0.0;
  bool converged = false;  // gradient max-norm <= 1e-6 (1 + |objective|)
  int iterations = 0;
};

/// Quasi-Newton local phase from one unconstrained point. Never returns a
/// point worse than the start.
LocalFitResult fit_local(std::span<const double> init_raw, const Dataset& ds, LawFamily law,
                         const FitConfig& config);

/// Basin-hopping fit, deterministic for a fixed seed. Metrics are left for
/// the caller (see evaluate); train_metrics/test_metrics are filled with the
/// training set only.
FitResult fit_basin_hopping(const Dataset& ds, LawFamily law, const FitConfig& config);

/// MAE / MRE / R^2 / Pearson r of the law's predictions against observed
/// losses. Rows outside the family's domain are skipped; Metrics::n reports
/// the rows actually scored.
Metrics evaluate(std::span<const double> params, LawFamily law, const Dataset& ds);

/// Drops records outside the family's domain (D' = 0 rows for the
/// comparison law). Returns the kept dataset and the number removed.
std::pair<Dataset, std::size_t> restrict_to_domain(const Dataset& ds, LawFamily law);

}  // namespace splitlaw

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "splitlaw/law.hpp"

namespace splitlaw {

/// Fitted per-domain laws plus averaging weights; the loss being optimized is
/// the weighted average of eval_split_law with D_k = d_prime in every domain.
struct DomainLaws {
  std::vector<SplitLawParams> laws;   // one per domain represented
  std::vector<double> weights;        // same length, nonnegative, sums to 1

  static DomainLaws uniform(std::vector<SplitLawParams> laws);
};

double avg_loss(const DomainLaws& domains, double n_params, double pt_tokens, double d_prime);

struct AllocationSolution {
  double budget = 0.0;        // D_T, billions
  int n_domains = 1;          // K
  double pt_tokens = 0.0;     // t_s
  double fraction = 0.0;      // f_s = t_s / D_T
  double d_prime = 0.0;       // (D_T - t_s) / K
  double loss_at_opt = 0.0;
  double band_lo = 0.0;       // f-interval with loss <= loss_at_opt + band_eps
  double band_hi = 1.0;
};

inline constexpr int kAllocationGridPoints = 4097;

/// Minimizes avg_loss(N, f D_T, (1-f) D_T / K) over f in [0, 1]:
/// 4097-point uniform grid scan, then golden-section refinement of the best
/// bracket to |df| <= 1e-6. Ties break toward smaller f.
AllocationSolution solve_allocation(const DomainLaws& domains, double n_params, int n_domains,
                                    double budget, double band_eps = 0.005);

/// The (f, loss) grid scan backing solve_allocation, for plot-data output.
std::vector<std::pair<double, double>> allocation_curve(const DomainLaws& domains,
                                                        double n_params, int n_domains,
                                                        double budget,
                                                        int n_points = kAllocationGridPoints);

enum class SplitPointMethod { kFiniteBudget, kEpsilonDerivative };

struct SplitPoint {
  double d_split = 0.0;       // billions
  double delta_used = 0.0;    // finite-budget token increment (or epsilon)
  SplitPointMethod method = SplitPointMethod::kFiniteBudget;
  double residual = 0.0;      // marginal-value gap at the returned point
  bool no_crossover = false;  // splitting advantageous everywhere or nowhere
};

/// Smallest pretraining token count after which the next delta tokens are
/// better spent split across domains than on more pretraining.
/// Finite-budget method: smallest D with L(D, delta/K) < L(D + delta, 0),
/// doubling search then bisection to |dD| <= 1e-4 d_max.
/// Epsilon-derivative method: root of K dL/dD(D, eps) = dL/dD'(D, eps) with
/// D' pinned at eps = 1e-3 billions.
/// When no crossover exists in [0, d_max], returns the boundary with
/// no_crossover set instead of clamping silently.
SplitPoint minimal_split_point(const DomainLaws& domains, double n_params, int n_domains,
                               double delta, double d_max,
                               SplitPointMethod method = SplitPointMethod::kFiniteBudget);

inline constexpr double kMultiplierCap = 1e6;  // billions

/// Ratio D_req / D_T where pretraining alone for D_req tokens matches the
/// optimal split allocation's loss at budget D_T. Returns +infinity when even
/// kMultiplierCap pretraining tokens cannot reach that loss level.
double compute_multiplier(const DomainLaws& domains, double n_params, int n_domains,
                          double budget, double band_eps = 0.005);

struct PowerLawFit {
  double a = 0.0;  // coefficient, > 0
  double b = 0.0;  // exponent
  double r2 = 0.0; // of the log-log regression
};

/// Least squares of log f on log N. Needs >= 2 points, all N and f positive,
/// not all N equal.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points);

struct ExtrapolationSource {
  double n_params = 0.0;
  double fraction = 0.0;
  double band_lo = 0.0;
  double band_hi = 1.0;
};

struct ExtrapolationResult {
  std::vector<ExtrapolationSource> sources;
  PowerLawFit fit;
  double target_n = 0.0;
  double fraction = 0.0;  // power-law value at target_n, clamped to [0, 1]
  bool clamped = false;
};

/// Computes f_s per source size via solve_allocation, fits f_s(N) = a N^b,
/// and evaluates it at target_n. Sources must all be smaller than target_n.
ExtrapolationResult extrapolate_fraction(
    std::span<const std::pair<double, SplitLawParams>> per_size_laws, double target_n,
    int n_domains, double budget, double band_eps = 0.005);

}  // namespace splitlaw

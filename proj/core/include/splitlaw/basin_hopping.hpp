#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace splitlaw {

struct BasinHoppingConfig {
  int n_starts = 64;            // independent chains
  int hops_per_start = 50;      // perturb/minimize rounds per chain
  double hop_step = 0.5;        // uniform perturbation half-width per coordinate
  double init_range = 4.0;      // chain starts are uniform in [-range, range]^dim
  double accept_temperature = 1e-3;  // Metropolis scale, objective units
  std::uint64_t seed = 0;
  int max_threads = 0;          // 0 = hardware concurrency
};

struct BasinHoppingResult {
  std::vector<double> x;
  double objective = 0.0;
  int n_local_solves = 0;
  int best_chain = -1;
};

/// Local phase callback: minimize from x0, return (argmin, value). May throw;
/// a throwing solve only discards that proposal.
using LocalSolveFn =
    std::function<std::pair<std::vector<double>, double>(const std::vector<double>&)>;

/// Global minimization: independent chains of perturb -> local solve ->
/// Metropolis accept, reduced deterministically by (objective, chain index).
/// Chains run concurrently; per-chain RNG streams are derived from the seed,
/// so the result is identical regardless of scheduling. Throws
/// ConvergenceError when every local solve failed.
BasinHoppingResult basin_hopping(const LocalSolveFn& solve, int dim,
                                 const BasinHoppingConfig& config);

}  // namespace splitlaw

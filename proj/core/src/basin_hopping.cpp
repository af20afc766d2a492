#include "splitlaw/basin_hopping.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "splitlaw/errors.hpp"
#include "splitlaw/rng.hpp"

namespace splitlaw {

namespace {

struct ChainOutcome {
  std::vector<double> x;
  double objective = std::numeric_limits<double>::infinity();
  int local_solves = 0;
  bool ok = false;
};

ChainOutcome run_chain(const LocalSolveFn& solve, int dim, const BasinHoppingConfig& config,
                       int chain) {
  std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(chain)));
  std::uniform_real_distribution<double> init(-config.init_range, config.init_range);
  std::uniform_real_distribution<double> hop(-config.hop_step, config.hop_step);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ChainOutcome out;
  std::vector<double> start(dim);
  for (double& v : start) v = init(rng);

  std::vector<double> current_x;
  double current_f = std::numeric_limits<double>::infinity();
  try {
    auto [x, f] = solve(start);
    ++out.local_solves;
    current_x = std::move(x);
    current_f = f;
    out.x = current_x;
    out.objective = current_f;
    out.ok = true;
  } catch (const Error&) {
    ++out.local_solves;
    return out;  // chain failed at its start
  }

  std::vector<double> proposal(dim);
  for (int h = 0; h < config.hops_per_start; ++h) {
    for (int i = 0; i < dim; ++i) proposal[i] = current_x[i] + hop(rng);
    // Draw the acceptance variate unconditionally to keep the stream
    // independent of whether the solve throws.
    const double u = unit(rng);
    try {
      auto [x, f] = solve(proposal);
      ++out.local_solves;
      const bool accept =
          f <= current_f ||
          (config.accept_temperature > 0.0 &&
           u < std::exp(-(f - current_f) / config.accept_temperature));
      if (accept) {
        current_x = std::move(x);
        current_f = f;
        if (current_f < out.objective) {
          out.objective = current_f;
          out.x = current_x;
        }
      }
    } catch (const Error&) {
      ++out.local_solves;  // rejected proposal
    }
  }
  return out;
}

}  // namespace

BasinHoppingResult basin_hopping(const LocalSolveFn& solve, int dim,
                                 const BasinHoppingConfig& config) {
  if (config.n_starts < 1 || config.hops_per_start < 0)
    throw DomainError("basin_hopping needs n_starts >= 1");

  std::vector<ChainOutcome> outcomes(config.n_starts);
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned n_threads = config.max_threads > 0 ? static_cast<unsigned>(config.max_threads) : hw;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(config.n_starts));

  if (n_threads <= 1) {
    for (int chain = 0; chain < config.n_starts; ++chain)
      outcomes[chain] = run_chain(solve, dim, config, chain);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int chain = next.fetch_add(1);
        if (chain >= config.n_starts) return;
        outcomes[chain] = run_chain(solve, dim, config, chain);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BasinHoppingResult result;
  result.objective = std::numeric_limits<double>::infinity();
  for (int chain = 0; chain < config.n_starts; ++chain) {
    const auto& out = outcomes[chain];
    result.n_local_solves += out.local_solves;
    if (out.ok && out.objective < result.objective) {
      result.objective = out.objective;
      result.x = out.x;
      result.best_chain = chain;
    }
  }
  if (result.best_chain < 0) throw ConvergenceError("all basin-hopping chains failed");
  return result;
}

}  // namespace splitlaw

#include "splitlaw/fitter.hpp"

#include <cmath>
#include <cstdlib>

#include "splitlaw/basin_hopping.hpp"
#include "splitlaw/errors.hpp"
#include "splitlaw/minimize.hpp"
#include "splitlaw/transforms.hpp"

namespace splitlaw {

namespace {

int env_thread_cap() {
  const char* env = std::getenv("SPLITLAW_THREADS");
  if (env == nullptr) return 0;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<int>(v) : 1;
}

int effective_threads(const FitConfig& config) {
  const int cap = env_thread_cap();
  if (cap > 0 && config.max_threads > 0) return std::min(cap, config.max_threads);
  return cap > 0 ? cap : config.max_threads;
}

}  // namespace

double huber(double residual, double delta) {
  if (delta <= 0.0) throw DomainError("huber delta must be positive");
  const double a = std::fabs(residual);
  if (a <= delta) return 0.5 * residual * residual;
  return delta * (a - 0.5 * delta);
}

double huber_derivative(double residual, double delta) {
  if (delta <= 0.0) throw DomainError("huber delta must be positive");
  if (std::fabs(residual) <= delta) return residual;
  return residual > 0.0 ? delta : -delta;
}

double objective(std::span<const double> raw, const Dataset& ds, LawFamily law, double delta) {
  if (ds.empty()) throw DegenerateError("objective needs a nonempty dataset");
  const auto& specs = law_transforms(law);
  const std::vector<double> params = transform(raw, specs);
  double sum = 0.0;
  for (const auto& rec : ds.records) {
    const double pred = law_predict(law, params, rec.n_params, rec.pt_tokens, rec.cpt_tokens);
    sum += huber(pred - rec.loss, delta);
  }
  return sum;
}

double objective_with_grad(std::span<const double> raw, const Dataset& ds, LawFamily law,
                           double delta, std::vector<double>& grad) {
  if (ds.empty()) throw DegenerateError("objective needs a nonempty dataset");
  const auto& specs = law_transforms(law);
  const std::size_t dim = specs.size();
  const std::vector<double> params = transform(raw, specs);

  grad.assign(dim, 0.0);
  double sum = 0.0;
  for (const auto& rec : ds.records) {
    const double pred = law_predict(law, params, rec.n_params, rec.pt_tokens, rec.cpt_tokens);
    const double r = pred - rec.loss;
    sum += huber(r, delta);
    const double w = huber_derivative(r, delta);
    const std::vector<double> pgrad =
        law_param_grad(law, params, rec.n_params, rec.pt_tokens, rec.cpt_tokens);
    for (std::size_t i = 0; i < dim; ++i) grad[i] += w * pgrad[i];
  }
  // Chain through d(constrained)/d(raw).
  for (std::size_t i = 0; i < dim; ++i) grad[i] *= transform_derivative(raw[i], specs[i]);
  return sum;
}

LocalFitResult fit_local(std::span<const double> init_raw, const Dataset& ds, LawFamily law,
                         const FitConfig& config) {
  MinimizeOptions options;
  options.max_iter = config.local_max_iter;
  options.grad_tolerance = 1e-6;

  auto fn = [&](const std::vector<double>& x, std::vector<double>& g) {
    return objective_with_grad(x, ds, law, config.huber_delta, g);
  };
  MinimizeResult res = minimize_lbfgs(fn, {init_raw.begin(), init_raw.end()}, options);

  LocalFitResult out;
  out.raw = std::move(res.x);
  out.objective = res.objective;
  out.converged = res.converged;
  out.iterations = res.iterations;
  return out;
}

FitResult fit_basin_hopping(const Dataset& ds, LawFamily law, const FitConfig& config) {
  if (ds.empty()) throw DegenerateError("cannot fit an empty dataset");
  if (config.n_random_starts < 1 || config.hops_per_start < 1 || config.local_max_iter < 1)
    throw DomainError("fit config counts must be >= 1");
  if (config.huber_delta <= 0.0) throw DomainError("huber delta must be positive");

  BasinHoppingConfig bh;
  bh.n_starts = config.n_random_starts;
  bh.hops_per_start = config.hops_per_start;
  bh.hop_step = config.hop_step;
  bh.accept_temperature = config.accept_temperature;
  bh.seed = config.seed;
  bh.max_threads = effective_threads(config);

  auto solve = [&](const std::vector<double>& start) {
    LocalFitResult local = fit_local(start, ds, law, config);
    return std::make_pair(std::move(local.raw), local.objective);
  };
  BasinHoppingResult best = basin_hopping(solve, law_num_params(law), bh);

  FitResult result;
  result.law = law;
  result.raw = best.x;
  result.params = transform(best.x, law_transforms(law));
  result.objective = best.objective;
  result.n_local_solves = best.n_local_solves;
  result.seed = config.seed;
  result.train_metrics = evaluate(result.params, law, ds);
  return result;
}

Metrics evaluate(std::span<const double> params, LawFamily law, const Dataset& ds) {
  if (ds.empty()) throw DegenerateError("evaluate needs a nonempty dataset");
  std::vector<double> pred, obs;
  pred.reserve(ds.size());
  obs.reserve(ds.size());
  for (const auto& rec : ds.records) {
    if (!law_supports(law, rec.pt_tokens, rec.cpt_tokens)) continue;
    pred.push_back(law_predict(law, params, rec.n_params, rec.pt_tokens, rec.cpt_tokens));
    obs.push_back(rec.loss);
  }
  if (pred.empty()) throw DegenerateError("no records inside the law's domain");

  Metrics m;
  m.n = pred.size();
  const double n = static_cast<double>(pred.size());
  double mean_obs = 0.0, mean_pred = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    m.mae += std::fabs(pred[i] - obs[i]);
    m.mre += std::fabs(pred[i] - obs[i]) / obs[i];
    mean_obs += obs[i];
    mean_pred += pred[i];
  }
  m.mae /= n;
  m.mre /= n;
  mean_obs /= n;
  mean_pred /= n;

  double ss_res = 0.0, ss_tot = 0.0, cov = 0.0, var_pred = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double eo = obs[i] - mean_obs;
    const double ep = pred[i] - mean_pred;
    ss_res += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    ss_tot += eo * eo;
    cov += eo * ep;
    var_pred += ep * ep;
  }
  if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
  if (ss_tot > 0.0 && var_pred > 0.0) m.pearson_r = cov / std::sqrt(ss_tot * var_pred);
  return m;
}

std::pair<Dataset, std::size_t> restrict_to_domain(const Dataset& ds, LawFamily law) {
  Dataset kept;
  kept.n_domains = ds.n_domains;
  kept.domain_weights = ds.domain_weights;
  std::size_t removed = 0;
  for (const auto& rec : ds.records) {
    if (law_supports(law, rec.pt_tokens, rec.cpt_tokens))
      kept.records.push_back(rec);
    else
      ++removed;
  }
  return {std::move(kept), removed};
}

}  // namespace splitlaw

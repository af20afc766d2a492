#include "splitlaw/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

constexpr double kGoldenRatio = 1.6180339887498949;
constexpr double kFractionTolerance = 1e-6;

/// Golden-section minimization of fn over [a, b] to |b - a| <= tol.
std::pair<double, double> golden_section(const std::function<double(double)>& fn, double a,
                                         double b, double tol) {
  double c = b - (b - a) / kGoldenRatio;
  double d = a + (b - a) / kGoldenRatio;
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) / kGoldenRatio;
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) / kGoldenRatio;
      fd = fn(d);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, fn(mid)};
}

void check_domains(const DomainLaws& domains) {
  if (domains.laws.empty()) throw DomainError("need at least one domain law");
  if (domains.laws.size() != domains.weights.size())
    throw DomainError("domain laws/weights length mismatch");
  double total = 0.0;
  for (double w : domains.weights) {
    if (w < 0.0) throw DomainError("domain weights must be nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw DomainError("domain weights must sum to 1");
}

}  // namespace

DomainLaws DomainLaws::uniform(std::vector<SplitLawParams> laws) {
  DomainLaws out;
  out.weights.assign(laws.size(), laws.empty() ? 0.0 : 1.0 / static_cast<double>(laws.size()));
  out.laws = std::move(laws);
  return out;
}

double avg_loss(const DomainLaws& domains, double n_params, double pt_tokens, double d_prime) {
  check_domains(domains);
  double loss = 0.0;
  for (std::size_t k = 0; k < domains.laws.size(); ++k)
    loss += domains.weights[k] * eval_split_law(domains.laws[k], n_params, pt_tokens, d_prime);
  return loss;
}

std::vector<std::pair<double, double>> allocation_curve(const DomainLaws& domains,
                                                        double n_params, int n_domains,
                                                        double budget, int n_points) {
  if (budget <= 0.0) throw DomainError("budget must be positive");
  if (n_domains < 1) throw DomainError("K must be >= 1");
  if (n_points < 2) throw DomainError("curve needs at least 2 points");
  std::vector<std::pair<double, double>> curve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
    const double loss = avg_loss(domains, n_params, f * budget, (1.0 - f) * budget / n_domains);
    curve[i] = {f, loss};
  }
  return curve;
}

AllocationSolution solve_allocation(const DomainLaws& domains, double n_params, int n_domains,
                                    double budget, double band_eps) {
  const auto curve = allocation_curve(domains, n_params, n_domains, budget);
  const int n = static_cast<int>(curve.size());

  int best = 0;
  for (int i = 1; i < n; ++i)
    if (curve[i].second < curve[best].second) best = i;  // ties keep the smaller f

  auto loss_at = [&](double f) {
    return avg_loss(domains, n_params, f * budget, (1.0 - f) * budget / n_domains);
  };

  double f_opt = curve[best].first;
  double loss_opt = curve[best].second;
  const double lo = curve[std::max(0, best - 1)].first;
  const double hi = curve[std::min(n - 1, best + 1)].first;
  const auto [f_ref, loss_ref] = golden_section(loss_at, lo, hi, kFractionTolerance);
  if (loss_ref < loss_opt || (loss_ref == loss_opt && f_ref < f_opt)) {
    f_opt = f_ref;
    loss_opt = loss_ref;
  }

  AllocationSolution sol;
  sol.budget = budget;
  sol.n_domains = n_domains;
  sol.fraction = f_opt;
  sol.pt_tokens = f_opt * budget;
  sol.d_prime = (1.0 - f_opt) * budget / n_domains;
  sol.loss_at_opt = loss_opt;

  // Contiguous near-optimal band around the best grid point, endpoints
  // linearly interpolated between grid samples.
  const double threshold = loss_opt + band_eps;
  int left = best;
  while (left > 0 && curve[left - 1].second <= threshold) --left;
  int right = best;
  while (right < n - 1 && curve[right + 1].second <= threshold) ++right;

  if (left == 0) {
    sol.band_lo = 0.0;
  } else {
    const auto& [f_out, l_out] = curve[left - 1];
    const auto& [f_in, l_in] = curve[left];
    sol.band_lo = l_out == l_in
                      ? f_in
                      : f_out + (threshold - l_out) * (f_in - f_out) / (l_in - l_out);
  }
  if (right == n - 1) {
    sol.band_hi = 1.0;
  } else {
    const auto& [f_in, l_in] = curve[right];
    const auto& [f_out, l_out] = curve[right + 1];
    sol.band_hi = l_out == l_in
                      ? f_in
                      : f_in + (threshold - l_in) * (f_out - f_in) / (l_out - l_in);
  }
  sol.band_lo = std::min(sol.band_lo, sol.fraction);
  sol.band_hi = std::max(sol.band_hi, sol.fraction);
  return sol;
}

namespace {

/// Marginal advantage of splitting the next delta tokens at pretrain count d:
/// positive once continuing each domain on delta/K beats pretraining on delta.
double split_gain(const DomainLaws& domains, double n_params, int n_domains, double delta,
                  double d) {
  const double keep_pretraining = avg_loss(domains, n_params, d + delta, 0.0);
  const double split_now = avg_loss(domains, n_params, d, delta / n_domains);
  return keep_pretraining - split_now;
}

/// Eq-7-style derivative gap at (d, eps): K dL/dD - dL/dD'.
double derivative_gap(const DomainLaws& domains, double n_params, int n_domains, double eps,
                      double d) {
  double d_pt = 0.0, d_cpt = 0.0;
  for (std::size_t k = 0; k < domains.laws.size(); ++k) {
    const TokenPartials tp = partials_tokens(domains.laws[k], n_params, d, eps);
    d_pt += domains.weights[k] * tp.d_pt;
    d_cpt += domains.weights[k] * tp.d_cpt;
  }
  return static_cast<double>(n_domains) * d_pt - d_cpt;
}

}  // namespace

SplitPoint minimal_split_point(const DomainLaws& domains, double n_params, int n_domains,
                               double delta, double d_max, SplitPointMethod method) {
  check_domains(domains);
  if (delta <= 0.0) throw DomainError("delta must be positive");
  if (d_max <= delta) throw DomainError("d_max must exceed delta");
  if (n_domains < 1) throw DomainError("K must be >= 1");

  const bool finite_budget = method == SplitPointMethod::kFiniteBudget;
  const double eps = 1e-3;  // billions; D' pin for the derivative identity
  const double d_floor = finite_budget ? 0.0 : 1e-9;

  auto gap = [&](double d) {
    return finite_budget ? split_gain(domains, n_params, n_domains, delta, d)
                         : derivative_gap(domains, n_params, n_domains, eps, d);
  };
  // gap > 0  <=>  splitting is advantageous at d.

  SplitPoint sp;
  sp.method = method;
  sp.delta_used = finite_budget ? delta : eps;

  if (gap(d_floor) > 0.0) {  // advantageous from the very start
    sp.d_split = 0.0;
    sp.residual = gap(d_floor);
    sp.no_crossover = true;
    return sp;
  }

  // Doubling search for a bracket with gap(lo) <= 0 < gap(hi).
  double lo = d_floor;
  double hi = std::min(delta, d_max);
  while (gap(hi) <= 0.0) {
    if (hi >= d_max) {
      sp.d_split = d_max;
      sp.residual = gap(d_max);
      sp.no_crossover = true;  // never advantageous in range
      return sp;
    }
    lo = hi;
    hi = std::min(hi * 2.0, d_max);
  }

  const double tol = 1e-4 * d_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  sp.d_split = 0.5 * (lo + hi);
  sp.residual = gap(sp.d_split);
  return sp;
}

double compute_multiplier(const DomainLaws& domains, double n_params, int n_domains,
                          double budget, double band_eps) {
  const AllocationSolution sol = solve_allocation(domains, n_params, n_domains, budget, band_eps);
  const double target = sol.loss_at_opt;

  auto pretrain_only = [&](double d) { return avg_loss(domains, n_params, d, 0.0); };

  if (pretrain_only(budget) <= target) return 1.0;  // splitting never helped
  if (pretrain_only(kMultiplierCap) > target)
    return std::numeric_limits<double>::infinity();  // level only reachable by splitting

  double lo = budget, hi = kMultiplierCap;
  while ((hi - lo) > 1e-9 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (pretrain_only(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi) / budget;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw DomainError("power-law fit needs at least 2 points");
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [n, f] = points[i];
    if (n <= 0.0 || f <= 0.0) throw DomainError("power-law fit needs positive N and f");
    xs[i] = std::log(n);
    ys[i] = std::log(f);
  }
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  if (sxx == 0.0) throw DegenerateError("power-law fit: all N equal");

  PowerLawFit fit;
  fit.b = sxy / sxx;
  fit.a = std::exp(mean_y - fit.b * mean_x);

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = std::log(fit.a) + fit.b * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

ExtrapolationResult extrapolate_fraction(
    std::span<const std::pair<double, SplitLawParams>> per_size_laws, double target_n,
    int n_domains, double budget, double band_eps) {
  if (per_size_laws.size() < 2)
    throw DegenerateError("extrapolation needs at least 2 source sizes");
  for (const auto& [n, law] : per_size_laws)
    if (n >= target_n) throw DomainError("all source sizes must be below the target size");

  ExtrapolationResult result;
  result.target_n = target_n;
  std::vector<std::pair<double, double>> points;
  points.reserve(per_size_laws.size());
  for (const auto& [n, law] : per_size_laws) {
    const AllocationSolution sol =
        solve_allocation(DomainLaws::uniform({law}), n, n_domains, budget, band_eps);
    result.sources.push_back({n, sol.fraction, sol.band_lo, sol.band_hi});
    points.emplace_back(n, sol.fraction);
  }
  result.fit = fit_power_law(points);

  const double raw = result.fit.a * std::pow(target_n, result.fit.b);
  result.fraction = std::clamp(raw, 0.0, 1.0);
  result.clamped = raw != result.fraction;
  return result;
}

}  // namespace splitlaw

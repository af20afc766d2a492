#include <cmath>
#include <random>

#include "doctest.h"
#include "splitlaw/allocator.hpp"
#include "splitlaw/errors.hpp"
#include "splitlaw/synth.hpp"
#include "support/test_util.hpp"

using namespace splitlaw;
using namespace splitlaw::testutil;

namespace {

SplitLawParams flat_law() {
  SplitLawParams p;
  p.E_p = 0.0;
  p.A = 0.0;
  p.B = 150.0;
  p.E_0 = 1.8;
  p.kappa = 0.3;
  return p;
}

struct BruteForce {
  double fraction;
  double loss;
};

BruteForce brute_force_allocation(const DomainLaws& domains, double n, int k, double budget,
                                  int points = 100001) {
  BruteForce best{0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    const double loss = avg_loss(domains, n, f * budget, (1.0 - f) * budget / k);
    if (loss < best.loss) best = {f, loss};
  }
  return best;
}

}  // namespace

TEST_CASE("avg_loss trivial reductions and manual weighted sum") {
  const SplitLawParams p = fixture_params();
  const DomainLaws single = DomainLaws::uniform({p});
  CHECK(avg_loss(single, 1e9, 40.0, 5.0) ==
        doctest::Approx(eval_split_law(p, 1e9, 40.0, 5.0)).epsilon(1e-15));

  const DomainLaws same = DomainLaws::uniform({p, p, p, p});
  CHECK(avg_loss(same, 1e9, 40.0, 5.0) ==
        doctest::Approx(eval_split_law(p, 1e9, 40.0, 5.0)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  DomainLaws hetero;
  hetero.laws = {random_inbounds_params(rng), random_inbounds_params(rng),
                 random_inbounds_params(rng)};
  hetero.weights = {0.2, 0.5, 0.3};
  const double manual = 0.2 * eval_split_law(hetero.laws[0], 5e8, 30.0, 7.0) +
                        0.5 * eval_split_law(hetero.laws[1], 5e8, 30.0, 7.0) +
                        0.3 * eval_split_law(hetero.laws[2], 5e8, 30.0, 7.0);
  CHECK(rel_err(avg_loss(hetero, 5e8, 30.0, 7.0), manual) < 1e-12);
}

TEST_CASE("flat objective returns f = 0 by tie-break with a full band") {
  const DomainLaws flat = DomainLaws::uniform({flat_law()});
  const AllocationSolution sol = solve_allocation(flat, 1e9, 4, 100.0);
  CHECK(sol.fraction == 0.0);
  CHECK(sol.pt_tokens == 0.0);
  CHECK(sol.band_lo == 0.0);
  CHECK(sol.band_hi == 1.0);
  CHECK(sol.d_prime == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("solver agrees with a dense grid on the spec's dominated-pretraining law") {
  SplitLawParams p = fixture_params();
  p.E_p = 0.0;
  p.c = 0.5;
  p.alpha2 = 0.1;
  p.alpha1 = 1.0;
  const DomainLaws laws = DomainLaws::uniform({p});
  const AllocationSolution sol = solve_allocation(laws, 1e9, 8, 200.0);
  const BruteForce brute = brute_force_allocation(laws, 1e9, 8, 200.0);
  CHECK(sol.loss_at_opt <= brute.loss + 1e-9);
  CHECK(std::fabs(sol.fraction - brute.fraction) < 1e-4);
}

TEST_CASE("solver never loses to a 100001-point grid on random laws") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const DomainLaws laws = DomainLaws::uniform({random_inbounds_params(rng)});
    const double budget = std::uniform_real_distribution<double>(20.0, 900.0)(rng);
    const int k = std::uniform_int_distribution<int>(1, 16)(rng);
    const AllocationSolution sol = solve_allocation(laws, 1e9, k, budget);
    const BruteForce brute = brute_force_allocation(laws, 1e9, k, budget);
    CHECK(sol.loss_at_opt <= brute.loss + 1e-9);
    // budget conservation
    CHECK(rel_err(sol.pt_tokens + k * sol.d_prime, budget) < 1e-9);
    CHECK(sol.band_lo <= sol.fraction);
    CHECK(sol.band_hi >= sol.fraction);
  }
}

TEST_CASE("fraction decays while pretraining tokens grow with the budget") {
  const DomainLaws laws = DomainLaws::uniform({fixture_params()});
  double prev_f = 2.0, prev_t = -1.0;
  for (double budget : {60.0, 120.0, 240.0, 480.0, 960.0}) {
    const AllocationSolution sol = solve_allocation(laws, 1.3e9, 16, budget);
    CHECK(sol.fraction <= prev_f + 1e-9);
    CHECK(sol.pt_tokens >= prev_t - 1e-6);
    prev_f = sol.fraction;
    prev_t = sol.pt_tokens;
  }
}

TEST_CASE("horizon awareness: optimum stays at or past the minimal split point") {
  const DomainLaws laws = DomainLaws::uniform({fixture_params()});
  const int k = 16;
  const SplitPoint sp = minimal_split_point(laws, 1.3e9, k, 1.0, 2000.0);
  REQUIRE(!sp.no_crossover);

  double prev_t = -1.0;
  const double grid_tol = 1.0 / (kAllocationGridPoints - 1);
  for (int i = 1; i <= 20; ++i) {
    const double budget = sp.d_split + i * 40.0;
    const AllocationSolution sol = solve_allocation(laws, 1.3e9, k, budget);
    CHECK(sol.pt_tokens >= sp.d_split - grid_tol * budget - 1e-6);
    CHECK(sol.pt_tokens >= prev_t - 1e-6);
    prev_t = sol.pt_tokens;
  }
}

TEST_CASE("no-split regime: budgets below d_split keep everything in pretraining") {
  // With alpha1 < 1 the first domain tokens carry unbounded marginal value,
  // so f = 1 is only exactly optimal for finite-derivative laws.
  SplitLawParams p = fixture_params();
  p.alpha1 = 1.0;
  p.gamma2 = 1.0;
  const DomainLaws laws = DomainLaws::uniform({p});
  const int k = 16;
  const SplitPoint sp =
      minimal_split_point(laws, 1.3e9, k, 1.0, 2000.0, SplitPointMethod::kEpsilonDerivative);
  REQUIRE(!sp.no_crossover);
  REQUIRE(sp.d_split > 1.0);

  const double grid_tol = 1.0 / (kAllocationGridPoints - 1);
  for (double frac : {0.3, 0.6, 0.9}) {
    const AllocationSolution sol = solve_allocation(laws, 1.3e9, k, sp.d_split * frac);
    CHECK(sol.fraction >= 1.0 - grid_tol - 1e-9);
  }
}

TEST_CASE("degenerate law hits the no-crossover flag") {
  const DomainLaws flat = DomainLaws::uniform({flat_law()});
  const SplitPoint sp = minimal_split_point(flat, 1e9, 4, 1.0, 500.0);
  CHECK(sp.no_crossover);
}

TEST_CASE("epsilon-derivative root matches a dense sign-change scan") {
  // alpha1 = gamma2 = 1 keeps the token partials finite at D' -> 0.
  SplitLawParams p = fixture_params();
  p.alpha1 = 1.0;
  p.gamma2 = 1.0;
  const DomainLaws laws = DomainLaws::uniform({p});
  const int k = 16;
  const double d_max = 2000.0;
  const double eps = 1e-3;

  const SplitPoint sp =
      minimal_split_point(laws, 1.3e9, k, 1.0, d_max, SplitPointMethod::kEpsilonDerivative);
  REQUIRE(!sp.no_crossover);

  // 10^6-point scan of K dL/dD - dL/dD' for its sign change.
  double scan_root = -1.0;
  double prev_gap = 0.0;
  const int points = 1000000;
  for (int i = 1; i <= points; ++i) {
    const double d = d_max * static_cast<double>(i) / points;
    const TokenPartials tp = partials_tokens(p, 1.3e9, d, eps);
    const double gap = k * tp.d_pt - tp.d_cpt;
    if (i > 1 && prev_gap <= 0.0 && gap > 0.0) {
      scan_root = d;
      break;
    }
    prev_gap = gap;
  }
  REQUIRE(scan_root > 0.0);
  CHECK(rel_err(sp.d_split, scan_root) < 1e-3);
}

TEST_CASE("minimal split point is nondecreasing in model size") {
  const DomainLaws laws = DomainLaws::uniform({fixture_params()});
  double prev = -1.0;
  for (double n : {1e8, 3.5e8, 7.6e8, 1.3e9}) {
    const SplitPoint sp = minimal_split_point(laws, n, 16, 1.0, 2000.0);
    REQUIRE(!sp.no_crossover);
    CHECK(sp.d_split >= prev);
    prev = sp.d_split;
  }
}

TEST_CASE("multiplier is exactly 1 on allocation-flat laws") {
  const DomainLaws flat = DomainLaws::uniform({flat_law()});
  CHECK(compute_multiplier(flat, 1e9, 4, 100.0) == 1.0);
}

TEST_CASE("multiplier is 1 when the optimum never splits") {
  const DomainLaws laws = DomainLaws::uniform({fixture_params()});
  const SplitPoint sp = minimal_split_point(laws, 1.3e9, 16, 1.0, 2000.0);
  const double budget = sp.d_split * 0.4;
  const AllocationSolution sol = solve_allocation(laws, 1.3e9, 16, budget);
  if (sol.fraction > 1.0 - 1e-6) {
    CHECK(compute_multiplier(laws, 1.3e9, 16, budget) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("multiplier grows with the budget and never drops below 1") {
  const DomainLaws laws = DomainLaws::uniform({fixture_params()});
  double prev = 0.0;
  for (double budget : {60.0, 120.0, 240.0, 480.0, 960.0}) {
    const double mult = compute_multiplier(laws, 1.3e9, 16, budget);
    CHECK(mult >= 1.0);
    CHECK(mult >= prev - 1e-9);
    prev = mult;
  }
}

TEST_CASE("multiplier reports +inf when pretraining cannot reach the split loss") {
  // Large pretraining bias that splitting erases: the split optimum sits
  // below the pretrain-only floor E_0 + E_p s_N + B N^-kappa.
  SplitLawParams p = fixture_params();
  p.E_p = 1.5;
  p.N_s = 1e11;  // s_N close to 1
  p.A = 0.3;
  const DomainLaws laws = DomainLaws::uniform({p});
  const double mult = compute_multiplier(laws, 1e8, 2, 2e5);
  CHECK(std::isinf(mult));
}

TEST_CASE("power-law fit recovers exact and noisy data") {
  std::vector<std::pair<double, double>> exact;
  for (double n : {1e8, 3.5e8, 7.6e8, 1.3e9, 2.7e9})
    exact.emplace_back(n, 3.0 * std::pow(n, -0.2));
  const PowerLawFit fit = fit_power_law(exact);
  CHECK(rel_err(fit.a, 3.0) < 1e-9);
  CHECK(rel_err(fit.b, -0.2) < 1e-9);
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<std::pair<double, double>> two = {{1e8, 0.5}, {1e9, 0.3}};
  const PowerLawFit exact2 = fit_power_law(two);
  CHECK(exact2.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact2.a * std::pow(1e8, exact2.b) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(exact2.a * std::pow(1e9, exact2.b) == doctest::Approx(0.3).epsilon(1e-9));

  // Independent normal-equations solve in log space.
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<std::pair<double, double>> noisy;
  for (double n : {1e8, 2e8, 5e8, 1e9, 2e9, 5e9})
    noisy.emplace_back(n, 2.0 * std::pow(n, -0.15) * std::exp(noise(rng)));
  const PowerLawFit noisy_fit = fit_power_law(noisy);

  double s0 = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [n, f] : noisy) {
    const double x = std::log(n), y = std::log(f);
    s0 += 1.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = s0 * sxx - sx * sx;
  const double slope = (s0 * sxy - sx * sy) / det;
  const double intercept = (sxx * sy - sx * sxy) / det;
  CHECK(rel_err(noisy_fit.b, slope) < 1e-10);
  CHECK(rel_err(noisy_fit.a, std::exp(intercept)) < 1e-10);

  CHECK_THROWS_AS(fit_power_law(std::vector<std::pair<double, double>>{{1e8, 0.5}}),
                  DomainError);
  CHECK_THROWS_AS(
      fit_power_law(std::vector<std::pair<double, double>>{{1e8, 0.5}, {1e8, 0.4}}),
      DegenerateError);
}

TEST_CASE("extrapolation predicts the held-out largest size inside its band") {
  const SplitLawParams p = fixture_params();
  std::vector<std::pair<double, SplitLawParams>> sources;
  for (double n : {1e8, 3.5e8, 7.6e8, 1.3e9}) sources.emplace_back(n, p);

  const double target = 2.7e9;
  const ExtrapolationResult res = extrapolate_fraction(sources, target, 16, 240.0);
  REQUIRE(res.sources.size() == 4);
  CHECK(res.fit.a > 0.0);

  const AllocationSolution held_out =
      solve_allocation(DomainLaws::uniform({p}), target, 16, 240.0);
  CHECK(res.fraction >= held_out.band_lo);
  CHECK(res.fraction <= held_out.band_hi);
}

TEST_CASE("extrapolation rejects degenerate inputs") {
  const SplitLawParams p = fixture_params();
  CHECK_THROWS_AS(
      extrapolate_fraction(std::vector<std::pair<double, SplitLawParams>>{{1e8, p}}, 1e9, 4,
                           100.0),
      DegenerateError);
  CHECK_THROWS_AS(
      extrapolate_fraction(std::vector<std::pair<double, SplitLawParams>>{{1e8, p}, {2e9, p}},
                           1e9, 4, 100.0),
      DomainError);
}

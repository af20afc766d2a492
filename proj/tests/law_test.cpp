#include <cmath>
#include <random>

#include "doctest.h"
#include "splitlaw/errors.hpp"
#include "splitlaw/law.hpp"
#include "splitlaw/params_io.hpp"
#include "splitlaw/transforms.hpp"
#include "support/test_util.hpp"

using namespace splitlaw;
using namespace splitlaw::testutil;

namespace {

// Straight-line transcription of the law, kept independent of law.cpp.
double oracle_split_law(const SplitLawParams& p, double n, double d, double dk) {
  const double bias = p.E_p * (1.0 / (1.0 + std::pow(n / p.N_s, p.gamma1))) *
                      (1.0 / (1.0 + std::pow(dk / p.D_s, p.gamma2)));
  return p.E_0 + bias + p.A / (std::pow(dk, p.alpha1) + p.c * std::pow(d, p.alpha2)) +
         p.B * std::pow(n, -p.kappa);
}

double oracle_chinchilla(const ChinchillaParams& p, double n, double d) {
  return p.E + p.A * std::pow(n, -p.alpha) + p.B * std::pow(d, -p.beta);
}

double oracle_liew(const LiewParams& p, double n, double d, double dp) {
  return p.E + p.A * std::pow(dp, -p.alpha1) * std::pow(d, -p.alpha2 + p.alpha3 * std::log(dp)) +
         p.B * std::pow(n, -p.beta);
}

}  // namespace

TEST_CASE("eval_bias half-saturation and zero offset") {
  SplitLawParams p;
  p.E_p = 1.0;
  p.N_s = 4e9;
  p.gamma1 = 0.37;
  CHECK(eval_bias(p, 4e9, 0.0) == doctest::Approx(0.5).epsilon(1e-12));

  p.E_p = 0.0;
  CHECK(eval_bias(p, 1e8, 12.0) == 0.0);
}

TEST_CASE("eval_bias hand-evaluated point") {
  SplitLawParams p;
  p.E_p = 1.0;
  p.N_s = 1e9;
  p.D_s = 600.0;
  p.gamma1 = 0.5;
  p.gamma2 = 0.5;
  // 1/(1+2) * 1/(1+0.5) = 2/9
  CHECK(eval_bias(p, 4e9, 150.0) == doctest::Approx(0.2222222222222222).epsilon(1e-12));
}

TEST_CASE("eval_bias rejects bad domains") {
  SplitLawParams p;
  CHECK_THROWS_AS(eval_bias(p, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_bias(p, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_bias(p, 1e9, -0.5), DomainError);
}

TEST_CASE("eval_split_law trivial reductions") {
  SplitLawParams p;
  p.E_p = 0.0;
  p.A = 0.0;
  p.B = 0.0;
  p.E_0 = 2.0;
  CHECK(eval_split_law(p, 1e9, 40.0, 5.0) == doctest::Approx(2.0).epsilon(1e-15));

  SplitLawParams q;
  q.A = 0.0;
  q.B = 0.0;
  q.E_p = 1.0;
  q.E_0 = 2.0;
  // both sigmoid factors are exactly 1/2 at N = N_s, D_k = D_s
  CHECK(eval_split_law(q, q.N_s, 10.0, q.D_s) == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("eval_split_law frozen grid points") {
  const SplitLawParams p = fixture_params();
  CHECK(rel_err(eval_split_law(p, 1e8, 5.0, 0.0), 2.8491311672435453) < 1e-12);
  CHECK(rel_err(eval_split_law(p, 7.6e8, 48.0, 12.0), 2.2631988542964283) < 1e-12);
  CHECK(rel_err(eval_split_law(p, 2.7e9, 200.0, 30.0), 2.0651631927535863) < 1e-12);
}

TEST_CASE("eval_split_law matches the straight-line oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> tokens(0.5, 400.0);
  std::uniform_real_distribution<double> size(1e7, 1e10);
  for (int i = 0; i < 25; ++i) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng), d = tokens(rng), dk = tokens(rng);
    CHECK(rel_err(eval_split_law(p, n, d, dk), oracle_split_law(p, n, d, dk)) < 1e-12);
  }
}

TEST_CASE("eval_split_law singularity and domain errors") {
  SplitLawParams p;
  CHECK_THROWS_AS(eval_split_law(p, 1e9, 0.0, 0.0), SingularityError);
  CHECK_THROWS_AS(eval_split_law(p, -1e9, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_split_law(p, 1e9, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_split_law(p, 1e9, 1.0, -1.0), DomainError);
  // one-sided zeros are legal
  CHECK_NOTHROW(eval_split_law(p, 1e9, 0.0, 1.0));
  CHECK_NOTHROW(eval_split_law(p, 1e9, 1.0, 0.0));
}

TEST_CASE("eval_chinchilla examples and oracle") {
  ChinchillaParams p;
  p.E = 1.69;
  p.A = 0.0;
  p.B = 0.0;
  CHECK(eval_chinchilla(p, 1e9, 100.0) == doctest::Approx(1.69).epsilon(1e-15));

  ChinchillaParams q{0.0, 1.0, 0.5, 0.0, 0.3};
  CHECK(eval_chinchilla(q, 4.0, 100.0) == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::uniform_real_distribution<double> coeff(0.1, 500.0);
  for (int i = 0; i < 10; ++i) {
    ChinchillaParams r{coeff(rng), coeff(rng), u(rng), coeff(rng), u(rng)};
    const double n = coeff(rng) * 1e7, d = coeff(rng);
    CHECK(rel_err(eval_chinchilla(r, n, d), oracle_chinchilla(r, n, d)) < 1e-12);
  }
  CHECK_THROWS_AS(eval_chinchilla(p, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_chinchilla(p, 1.0, 0.0), DomainError);
}

TEST_CASE("eval_liew examples and oracle") {
  LiewParams p;
  p.E = 2.0;
  p.A = 0.0;
  p.B = 0.0;
  CHECK(eval_liew(p, 1e9, 10.0, 10.0) == doctest::Approx(2.0).epsilon(1e-15));

  LiewParams q{0.0, 1.0, 0.5, 0.5, 0.0, 0.0, 0.3};
  CHECK(eval_liew(q, 1e9, 4.0, 4.0) == doctest::Approx(0.25).epsilon(1e-12));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::uniform_real_distribution<double> a3(-0.3, 0.3);
  std::uniform_real_distribution<double> coeff(0.1, 100.0);
  for (int i = 0; i < 10; ++i) {
    LiewParams r{coeff(rng), coeff(rng), u(rng), u(rng), a3(rng), coeff(rng), u(rng)};
    const double n = coeff(rng) * 1e7, d = coeff(rng), dp = coeff(rng);
    CHECK(rel_err(eval_liew(r, n, d, dp), oracle_liew(r, n, d, dp)) < 1e-12);
  }
  CHECK_THROWS_AS(eval_liew(p, 1e9, 10.0, 0.0), DomainError);
  CHECK_THROWS_AS(eval_liew(p, 1e9, 0.0, 10.0), DomainError);
}

TEST_CASE("transform analytic values") {
  CHECK(transform_value(0.0, TransformSpec::softplus()) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(transform_value(0.0, TransformSpec::sigmoid(1.0, 3.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("transform round-trips to 1e-10 relative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> raw(-8.0, 8.0);
  const std::vector<TransformSpec> specs = {
      TransformSpec::softplus(), TransformSpec::sigmoid(1.0, 3.0), TransformSpec::exponent(),
      TransformSpec::sigmoid(1e7, 1e11), TransformSpec::sigmoid(-1.0, 1.0)};
  for (int i = 0; i < 100; ++i) {
    for (const auto& spec : specs) {
      const double x = raw(rng);
      const double back = inverse_transform_value(transform_value(x, spec), spec);
      CHECK(rel_err(back, x) < 1e-10);
    }
  }
}

TEST_CASE("transformed split-law vectors satisfy the type invariants") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> raw(-6.0, 6.0);
  const auto& specs = SplitLawParams::transforms();
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(specs.size());
    for (auto& v : x) v = raw(rng);
    const SplitLawParams p = SplitLawParams::from_array(transform(x, specs));
    CHECK(p.E_p > 0.0);
    CHECK(p.A > 0.0);
    CHECK(p.B > 0.0);
    CHECK(p.N_s > 0.0);
    CHECK(p.E_0 > 1.0);
    CHECK(p.E_0 < 3.0);
    CHECK(p.D_s > 500.0);
    CHECK(p.D_s < 700.0);
    for (double e : {p.gamma1, p.gamma2, p.alpha1, p.alpha2, p.kappa}) {
      CHECK(e > 0.1);
      CHECK(e < 1.0);
    }
    CHECK(p.c > 0.5);
    CHECK(p.c < 4.0);
  }
}

TEST_CASE("grad_split_law linear components") {
  std::mt19937_64 rng(17);
  const SplitLawParams p = random_inbounds_params(rng);
  const auto g = grad_split_law(p, 3e8, 50.0, 10.0);
  CHECK(g[1] == 1.0);  // dL/dE_0
  CHECK(g[5] == doctest::Approx(std::pow(3e8, -p.kappa)).epsilon(1e-12));  // dL/dB
}

TEST_CASE("grad_split_law matches central finite differences") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> tokens(1.0, 300.0);
  std::uniform_real_distribution<double> size(1e7, 5e9);
  for (int trial = 0; trial < 50; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng), d = tokens(rng), dk = tokens(rng);
    const auto analytic = grad_split_law(p, n, d, dk);
    const auto base = to_quad(p.to_array());
    for (int i = 0; i < SplitLawParams::kNumParams; ++i) {
      const double fd = quad_central_diff(
          [&](quad v) {
            auto arr = base;
            arr[i] = v;
            return quad_split_law(arr, n, d, dk);
          },
          p.to_array()[i]);
      CHECK(rel_err(analytic[i], fd) < 1e-5);
    }
  }
}

TEST_CASE("grad_chinchilla matches finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.15, 0.95);
  std::uniform_real_distribution<double> coeff(0.5, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    ChinchillaParams cp{coeff(rng), coeff(rng), u(rng), coeff(rng), u(rng)};
    const double n = coeff(rng) * 1e7, d = coeff(rng) * 10.0;
    const auto g = grad_chinchilla(cp, n, d);
    const auto base = to_quad(cp.to_array());
    for (int i = 0; i < ChinchillaParams::kNumParams; ++i) {
      const double fd = quad_central_diff(
          [&](quad v) {
            auto arr = base;
            arr[i] = v;
            return quad_chinchilla(arr, n, d);
          },
          cp.to_array()[i]);
      CHECK(rel_err(g[i], fd) < 1e-5);
    }
  }
}

TEST_CASE("grad_liew matches finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.15, 0.95);
  std::uniform_real_distribution<double> a3(-0.3, 0.3);
  std::uniform_real_distribution<double> coeff(0.5, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    LiewParams p{coeff(rng), coeff(rng), u(rng), u(rng), a3(rng), coeff(rng), u(rng)};
    const double n = coeff(rng) * 1e7, d = coeff(rng) * 10.0, dp = coeff(rng);
    const auto g = grad_liew(p, n, d, dp);
    const auto base = to_quad(p.to_array());
    for (int i = 0; i < LiewParams::kNumParams; ++i) {
      const double fd = quad_central_diff(
          [&](quad v) {
            auto arr = base;
            arr[i] = v;
            return quad_liew(arr, n, d, dp);
          },
          p.to_array()[i]);
      CHECK(rel_err(g[i], fd) < 1e-5);
    }
  }
}

TEST_CASE("partials_tokens trivial and sign properties") {
  SplitLawParams flat;
  flat.A = 0.0;
  flat.E_p = 0.0;
  const auto tp = partials_tokens(flat, 1e9, 20.0, 5.0);
  CHECK(tp.d_pt == 0.0);
  CHECK(tp.d_cpt == 0.0);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> tokens(0.5, 300.0);
  std::uniform_real_distribution<double> size(1e7, 5e9);
  for (int i = 0; i < 100; ++i) {
    const SplitLawParams p = random_inbounds_params(rng);
    const auto partials = partials_tokens(p, size(rng), tokens(rng), tokens(rng));
    CHECK(partials.d_pt < 0.0);
    CHECK(partials.d_cpt < 0.0);
  }

  CHECK_THROWS_AS(partials_tokens(flat, 1e9, 0.0, 5.0), SingularityError);
  CHECK_THROWS_AS(partials_tokens(flat, 1e9, 5.0, 0.0), SingularityError);
}

TEST_CASE("partials_tokens matches central finite differences") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> tokens(1.0, 300.0);
  std::uniform_real_distribution<double> size(1e7, 5e9);
  for (int trial = 0; trial < 50; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng), d = tokens(rng), dk = tokens(rng);
    const auto partials = partials_tokens(p, n, d, dk);
    const auto qp = to_quad(p.to_array());
    const double fd_d =
        quad_central_diff([&](quad v) { return quad_split_law(qp, n, v, dk); }, d);
    const double fd_dk =
        quad_central_diff([&](quad v) { return quad_split_law(qp, n, d, v); }, dk);
    CHECK(rel_err(partials.d_pt, fd_d) < 1e-5);
    CHECK(rel_err(partials.d_cpt, fd_dk) < 1e-5);
  }
}

TEST_CASE("split law is strictly decreasing in N, D and D_k") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> tokens(0.1, 500.0);
  std::uniform_real_distribution<double> size(1e7, 1e10);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng), d = tokens(rng), dk = tokens(rng);

    double n2 = size(rng);
    while (n2 == n) n2 = size(rng);
    const double lo_n = std::min(n, n2), hi_n = std::max(n, n2);
    CHECK(eval_split_law(p, hi_n, d, dk) < eval_split_law(p, lo_n, d, dk));

    double d2 = tokens(rng);
    while (d2 == d) d2 = tokens(rng);
    const double lo_d = std::min(d, d2), hi_d = std::max(d, d2);
    CHECK(eval_split_law(p, n, hi_d, dk) < eval_split_law(p, n, lo_d, dk));

    double dk2 = tokens(rng);
    while (dk2 == dk) dk2 = tokens(rng);
    const double lo_dk = std::min(dk, dk2), hi_dk = std::max(dk, dk2);
    CHECK(eval_split_law(p, n, d, hi_dk) < eval_split_law(p, n, d, lo_dk));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("desideratum i: distinct irreducible losses") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> size(1e7, 1e10);
  for (int trial = 0; trial < 100; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng);
    const double s_n = 1.0 / (1.0 + std::pow(n / p.N_s, p.gamma1));
    const double pretrain_floor = p.E_0 + p.E_p * s_n + p.B * std::pow(n, -p.kappa);
    const double domain_floor = p.E_0 + p.B * std::pow(n, -p.kappa);

    const double d_inf = pretrain_asymptote_point(p);
    const double dk_inf = domain_asymptote_point(p);
    CHECK(std::fabs(eval_split_law(p, n, d_inf, 0.0) - pretrain_floor) < 1e-6);
    CHECK(std::fabs(eval_split_law(p, n, 0.0, dk_inf) - domain_floor) < 1e-6);
    CHECK(pretrain_floor > domain_floor);
  }
}

TEST_CASE("desideratum ii: additive Chinchilla-like form at D = 0 and D_k = 0") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> size(1e7, 1e10);
  std::uniform_real_distribution<double> tokens(0.5, 300.0);
  for (int trial = 0; trial < 100; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng), d = tokens(rng), dk = tokens(rng);
    const double s_n = 1.0 / (1.0 + std::pow(n / p.N_s, p.gamma1));
    const double s_d = 1.0 / (1.0 + std::pow(dk / p.D_s, p.gamma2));

    const double at_d0 = p.E_0 + p.E_p * s_n * s_d + p.A * std::pow(dk, -p.alpha1) +
                         p.B * std::pow(n, -p.kappa);
    CHECK(std::fabs(eval_split_law(p, n, 0.0, dk) - at_d0) < 1e-6);

    const double at_dk0 = p.E_0 + p.E_p * s_n + (p.A / p.c) * std::pow(d, -p.alpha2) +
                          p.B * std::pow(n, -p.kappa);
    CHECK(std::fabs(eval_split_law(p, n, d, 0.0) - at_dk0) < 1e-6);
  }
}

TEST_CASE("desideratum iii: D-independence as D_k grows") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> size(1e7, 1e10);
  std::uniform_real_distribution<double> tokens(0.0, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    const SplitLawParams p = random_inbounds_params(rng);
    const double n = size(rng);
    const double dk = d_independence_point(p, 1000.0);
    const double d1 = tokens(rng), d2 = tokens(rng);
    CHECK(std::fabs(eval_split_law(p, n, d1, dk) - eval_split_law(p, n, d2, dk)) < 1e-6);
  }
}

TEST_CASE("params JSON document round-trips") {
  std::mt19937_64 rng(61);
  const SplitLawParams p = random_inbounds_params(rng);
  const auto arr = p.to_array();
  const std::vector<double> constrained(arr.begin(), arr.end());
  const auto raw = inverse_transform(constrained, SplitLawParams::transforms());

  const auto doc = params_to_json(LawFamily::kSplit, constrained, raw, 99, 0.001);
  const ParsedParams back = params_from_json(doc);
  REQUIRE(back.family == LawFamily::kSplit);
  REQUIRE(back.constrained.size() == constrained.size());
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    CHECK(back.constrained[i] == constrained[i]);
    CHECK(back.raw[i] == raw[i]);
  }
  CHECK(back.seed == 99);
  CHECK(back.objective == 0.001);

  const SplitLawParams restored = split_params_from_parsed(back);
  CHECK(restored.E_p == p.E_p);
  CHECK(restored.kappa == p.kappa);
}

#include "splitlaw/law.hpp"

#include <cmath>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

void check_split_domain(double n, double d, double dk) {
  if (n <= 0.0) throw DomainError("model size must be positive");
  if (d < 0.0 || dk < 0.0) throw DomainError("token counts must be nonnegative");
  if (d == 0.0 && dk == 0.0)
    throw SingularityError("data term is singular at D = D_k = 0");
}

}  // namespace

std::array<double, SplitLawParams::kNumParams> SplitLawParams::to_array() const {
  return {E_p, E_0, N_s, D_s, A, B, gamma1, gamma2, alpha1, alpha2, c, kappa};
}

SplitLawParams SplitLawParams::from_array(std::span<const double> v) {
  if (v.size() != kNumParams) throw DomainError("split law expects 12 parameters");
  SplitLawParams p;
  p.E_p = v[0];
  p.E_0 = v[1];
  p.N_s = v[2];
  p.D_s = v[3];
  p.A = v[4];
  p.B = v[5];
  p.gamma1 = v[6];
  p.gamma2 = v[7];
  p.alpha1 = v[8];
  p.alpha2 = v[9];
  p.c = v[10];
  p.kappa = v[11];
  return p;
}

const std::vector<TransformSpec>& SplitLawParams::transforms() {
  static const std::vector<TransformSpec> specs = {
      TransformSpec::softplus(),          // E_p
      TransformSpec::sigmoid(1.0, 3.0),   // E_0
      TransformSpec::sigmoid(1e7, 1e11),  // N_s
      TransformSpec::sigmoid(500, 700),   // D_s
      TransformSpec::softplus(),          // A
      TransformSpec::softplus(),          // B
      TransformSpec::exponent(),          // gamma1
      TransformSpec::exponent(),          // gamma2
      TransformSpec::exponent(),          // alpha1
      TransformSpec::exponent(),          // alpha2
      TransformSpec::sigmoid(0.5, 4.0),   // c
      TransformSpec::exponent(),          // kappa
  };
  return specs;
}

const std::vector<std::string>& SplitLawParams::param_names() {
  static const std::vector<std::string> names = {"E_p",    "E_0",    "N_s",    "D_s",
                                                 "A",      "B",      "gamma1", "gamma2",
                                                 "alpha1", "alpha2", "c",      "kappa"};
  return names;
}

std::array<double, ChinchillaParams::kNumParams> ChinchillaParams::to_array() const {
  return {E, A, alpha, B, beta};
}

ChinchillaParams ChinchillaParams::from_array(std::span<const double> v) {
  if (v.size() != kNumParams) throw DomainError("chinchilla law expects 5 parameters");
  return {v[0], v[1], v[2], v[3], v[4]};
}

const std::vector<TransformSpec>& ChinchillaParams::transforms() {
  static const std::vector<TransformSpec> specs = {
      TransformSpec::softplus(),        // E
      TransformSpec::softplus(),        // A
      TransformSpec::exponent(0, 1),    // alpha
      TransformSpec::softplus(),        // B
      TransformSpec::exponent(0, 1),    // beta
  };
  return specs;
}

const std::vector<std::string>& ChinchillaParams::param_names() {
  static const std::vector<std::string> names = {"E", "A", "alpha", "B", "beta"};
  return names;
}

std::array<double, LiewParams::kNumParams> LiewParams::to_array() const {
  return {E, A, alpha1, alpha2, alpha3, B, beta};
}

LiewParams LiewParams::from_array(std::span<const double> v) {
  if (v.size() != kNumParams) throw DomainError("liew law expects 7 parameters");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

const std::vector<TransformSpec>& LiewParams::transforms() {
  static const std::vector<TransformSpec> specs = {
      TransformSpec::softplus(),         // E
      TransformSpec::softplus(),         // A
      TransformSpec::exponent(0, 1),     // alpha1
      TransformSpec::exponent(0, 1),     // alpha2
      TransformSpec::sigmoid(-1, 1),     // alpha3
      TransformSpec::softplus(),         // B
      TransformSpec::exponent(0, 1),     // beta
  };
  return specs;
}

const std::vector<std::string>& LiewParams::param_names() {
  static const std::vector<std::string> names = {"E", "A", "alpha1", "alpha2", "alpha3", "B", "beta"};
  return names;
}

double eval_bias(const SplitLawParams& p, double n_params, double cpt_tokens) {
  if (n_params <= 0.0) throw DomainError("model size must be positive");
  if (cpt_tokens < 0.0) throw DomainError("D_k must be nonnegative");
  const double size_factor = 1.0 + std::pow(n_params / p.N_s, p.gamma1);
  const double token_factor = 1.0 + std::pow(cpt_tokens / p.D_s, p.gamma2);
  return p.E_p / (size_factor * token_factor);
}

double eval_split_law(const SplitLawParams& p, double n_params, double pt_tokens,
                      double cpt_tokens) {
  check_split_domain(n_params, pt_tokens, cpt_tokens);
  const double bias = eval_bias(p, n_params, cpt_tokens);
  const double data_denom =
      std::pow(cpt_tokens, p.alpha1) + p.c * std::pow(pt_tokens, p.alpha2);
  return p.E_0 + bias + p.A / data_denom + p.B * std::pow(n_params, -p.kappa);
}

double eval_chinchilla(const ChinchillaParams& p, double n_params, double tokens) {
  if (n_params <= 0.0 || tokens <= 0.0)
    throw DomainError("chinchilla law needs N > 0 and D > 0");
  return p.E + p.A * std::pow(n_params, -p.alpha) + p.B * std::pow(tokens, -p.beta);
}

double eval_liew(const LiewParams& p, double n_params, double pt_tokens, double cpt_tokens) {
  if (n_params <= 0.0) throw DomainError("model size must be positive");
  if (pt_tokens <= 0.0 || cpt_tokens <= 0.0)
    throw DomainError("liew law needs D > 0 and D' > 0 (log D' term)");
  const double exponent = -p.alpha2 + p.alpha3 * std::log(cpt_tokens);
  return p.E + p.A * std::pow(cpt_tokens, -p.alpha1) * std::pow(pt_tokens, exponent) +
         p.B * std::pow(n_params, -p.beta);
}

std::array<double, SplitLawParams::kNumParams> grad_split_law(const SplitLawParams& p,
                                                              double n_params, double pt_tokens,
                                                              double cpt_tokens) {
  check_split_domain(n_params, pt_tokens, cpt_tokens);

  const double r = n_params / p.N_s;           // size ratio in the bias
  const double rg = std::pow(r, p.gamma1);
  const double size_den = 1.0 + rg;
  const double s_n = 1.0 / size_den;

  const double rho = cpt_tokens / p.D_s;       // token ratio in the bias
  const double rhog = std::pow(rho, p.gamma2);
  const double token_den = 1.0 + rhog;
  const double s_d = 1.0 / token_den;

  const double dk_a1 = std::pow(cpt_tokens, p.alpha1);
  const double d_a2 = std::pow(pt_tokens, p.alpha2);
  const double q = dk_a1 + p.c * d_a2;
  const double inv_q = 1.0 / q;
  const double inv_q2 = inv_q * inv_q;

  const double n_mk = std::pow(n_params, -p.kappa);

  std::array<double, SplitLawParams::kNumParams> g{};
  g[0] = s_n * s_d;                                             // E_p
  g[1] = 1.0;                                                   // E_0
  g[2] = p.E_p * s_d * p.gamma1 * rg / (p.N_s * size_den * size_den);  // N_s
  g[3] = p.E_p * s_n * p.gamma2 * rhog / (p.D_s * token_den * token_den);  // D_s
  g[4] = inv_q;                                                 // A
  g[5] = n_mk;                                                  // B
  g[6] = -p.E_p * s_d * rg * std::log(r) / (size_den * size_den);  // gamma1
  // rho^gamma2 * log(rho) -> 0 as rho -> 0+
  g[7] = cpt_tokens == 0.0
             ? 0.0
             : -p.E_p * s_n * rhog * std::log(rho) / (token_den * token_den);  // gamma2
  g[8] = cpt_tokens == 0.0 ? 0.0 : -p.A * inv_q2 * dk_a1 * std::log(cpt_tokens);  // alpha1
  g[9] = pt_tokens == 0.0 ? 0.0 : -p.A * inv_q2 * p.c * d_a2 * std::log(pt_tokens);  // alpha2
  g[10] = -p.A * inv_q2 * d_a2;                                 // c
  g[11] = -p.B * n_mk * std::log(n_params);                     // kappa
  return g;
}

std::array<double, ChinchillaParams::kNumParams> grad_chinchilla(const ChinchillaParams& p,
                                                                 double n_params, double tokens) {
  if (n_params <= 0.0 || tokens <= 0.0)
    throw DomainError("chinchilla law needs N > 0 and D > 0");
  const double n_ma = std::pow(n_params, -p.alpha);
  const double d_mb = std::pow(tokens, -p.beta);
  return {
      1.0,                               // E
      n_ma,                              // A
      -p.A * n_ma * std::log(n_params),  // alpha
      d_mb,                              // B
      -p.B * d_mb * std::log(tokens),    // beta
  };
}

std::array<double, LiewParams::kNumParams> grad_liew(const LiewParams& p, double n_params,
                                                     double pt_tokens, double cpt_tokens) {
  if (n_params <= 0.0 || pt_tokens <= 0.0 || cpt_tokens <= 0.0)
    throw DomainError("liew law needs N > 0, D > 0 and D' > 0");
  const double log_dp = std::log(cpt_tokens);
  const double log_d = std::log(pt_tokens);
  const double mid = std::pow(cpt_tokens, -p.alpha1) *
                     std::pow(pt_tokens, -p.alpha2 + p.alpha3 * log_dp);
  const double n_mb = std::pow(n_params, -p.beta);
  return {
      1.0,                          // E
      mid,                          // A
      -p.A * mid * log_dp,          // alpha1
      -p.A * mid * log_d,           // alpha2
      p.A * mid * log_dp * log_d,   // alpha3
      n_mb,                         // B
      -p.B * n_mb * std::log(n_params),  // beta
  };
}

TokenPartials partials_tokens(const SplitLawParams& p, double n_params, double pt_tokens,
                              double cpt_tokens) {
  if (n_params <= 0.0) throw DomainError("model size must be positive");
  if (pt_tokens < 0.0 || cpt_tokens < 0.0) throw DomainError("token counts must be nonnegative");
  if (pt_tokens == 0.0 || cpt_tokens == 0.0)
    throw SingularityError("token partials are singular at D = 0 or D_k = 0");

  const double rg = std::pow(n_params / p.N_s, p.gamma1);
  const double s_n = 1.0 / (1.0 + rg);

  const double rho = cpt_tokens / p.D_s;
  const double rhog = std::pow(rho, p.gamma2);
  const double token_den = 1.0 + rhog;

  const double dk_a1 = std::pow(cpt_tokens, p.alpha1);
  const double d_a2 = std::pow(pt_tokens, p.alpha2);
  const double q = dk_a1 + p.c * d_a2;
  const double inv_q2 = 1.0 / (q * q);

  TokenPartials out;
  out.d_pt = -p.A * inv_q2 * p.c * p.alpha2 * std::pow(pt_tokens, p.alpha2 - 1.0);
  out.d_cpt = -p.A * inv_q2 * p.alpha1 * std::pow(cpt_tokens, p.alpha1 - 1.0) -
              p.E_p * s_n * p.gamma2 * std::pow(rho, p.gamma2 - 1.0) /
                  (p.D_s * token_den * token_den);
  return out;
}

std::string to_string(LawFamily family) {
  switch (family) {
    case LawFamily::kSplit: return "split";
    case LawFamily::kChinchilla: return "chinchilla";
    case LawFamily::kLiew: return "liew";
  }
  return "unknown";
}

LawFamily law_family_from_string(const std::string& s) {
  if (s == "split") return LawFamily::kSplit;
  if (s == "chinchilla") return LawFamily::kChinchilla;
  if (s == "liew") return LawFamily::kLiew;
  throw ParseError("unknown law family '" + s + "'");
}

int law_num_params(LawFamily family) {
  switch (family) {
    case LawFamily::kSplit: return SplitLawParams::kNumParams;
    case LawFamily::kChinchilla: return ChinchillaParams::kNumParams;
    case LawFamily::kLiew: return LiewParams::kNumParams;
  }
  return 0;
}

const std::vector<TransformSpec>& law_transforms(LawFamily family) {
  switch (family) {
    case LawFamily::kChinchilla: return ChinchillaParams::transforms();
    case LawFamily::kLiew: return LiewParams::transforms();
    case LawFamily::kSplit: break;
  }
  return SplitLawParams::transforms();
}

const std::vector<std::string>& law_param_names(LawFamily family) {
  switch (family) {
    case LawFamily::kChinchilla: return ChinchillaParams::param_names();
    case LawFamily::kLiew: return LiewParams::param_names();
    case LawFamily::kSplit: break;
  }
  return SplitLawParams::param_names();
}

double law_predict(LawFamily family, std::span<const double> constrained, double n_params,
                   double pt_tokens, double cpt_tokens) {
  switch (family) {
    case LawFamily::kSplit:
      return eval_split_law(SplitLawParams::from_array(constrained), n_params, pt_tokens,
                            cpt_tokens);
    case LawFamily::kChinchilla:
      return eval_chinchilla(ChinchillaParams::from_array(constrained), n_params,
                             pt_tokens + cpt_tokens);
    case LawFamily::kLiew:
      return eval_liew(LiewParams::from_array(constrained), n_params, pt_tokens, cpt_tokens);
  }
  throw DomainError("unknown law family");
}

std::vector<double> law_param_grad(LawFamily family, std::span<const double> constrained,
                                   double n_params, double pt_tokens, double cpt_tokens) {
  switch (family) {
    case LawFamily::kSplit: {
      auto g = grad_split_law(SplitLawParams::from_array(constrained), n_params, pt_tokens,
                              cpt_tokens);
      return {g.begin(), g.end()};
    }
    case LawFamily::kChinchilla: {
      auto g = grad_chinchilla(ChinchillaParams::from_array(constrained), n_params,
                               pt_tokens + cpt_tokens);
      return {g.begin(), g.end()};
    }
    case LawFamily::kLiew: {
      auto g = grad_liew(LiewParams::from_array(constrained), n_params, pt_tokens, cpt_tokens);
      return {g.begin(), g.end()};
    }
  }
  throw DomainError("unknown law family");
}

bool law_supports(LawFamily family, double pt_tokens, double cpt_tokens) {
  switch (family) {
    case LawFamily::kSplit: return pt_tokens > 0.0 || cpt_tokens > 0.0;
    case LawFamily::kChinchilla: return pt_tokens + cpt_tokens > 0.0;
    case LawFamily::kLiew: return pt_tokens > 0.0 && cpt_tokens > 0.0;
  }
  return false;
}

}  // namespace splitlaw

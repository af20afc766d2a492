#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "splitlaw/transforms.hpp"

namespace splitlaw {

// Token counts (D, D_k, D_T) are in billions of tokens throughout.
// Model sizes (N, N_s) are raw parameter counts.

/// Twelve constrained parameters of the split-training law:
///   L(N, D, D_k) = E_0 + E_delta + A * (D_k^alpha1 + c * D^alpha2)^-1 + B * N^-kappa
///   E_delta      = E_p / (1 + (N/N_s)^gamma1) / (1 + (D_k/D_s)^gamma2)
struct SplitLawParams {
  double E_p = 0.0;     // loss offset between pretrain-only and domain-saturated floors
  double E_0 = 2.0;     // irreducible loss
  double N_s = 1e9;     // bias half-saturation, parameters
  double D_s = 600.0;   // bias half-saturation, billions of domain tokens
  double A = 1.0;       // data-term coefficient
  double B = 100.0;     // size-term coefficient
  double gamma1 = 0.5;  // bias exponent on N
  double gamma2 = 0.5;  // bias exponent on D_k
  double alpha1 = 0.5;  // domain-token exponent
  double alpha2 = 0.5;  // pretrain-token exponent
  double c = 1.0;       // pretrain-token discount
  double kappa = 0.5;   // size exponent

  static constexpr int kNumParams = 12;

  std::array<double, kNumParams> to_array() const;
  static SplitLawParams from_array(std::span<const double> v);
  static const std::vector<TransformSpec>& transforms();
  static const std::vector<std::string>& param_names();
};

/// Chinchilla baseline: L(N, D) = E + A * N^-alpha + B * D^-beta.
struct ChinchillaParams {
  double E = 1.69;
  double A = 400.0;
  double alpha = 0.34;
  double B = 410.0;
  double beta = 0.28;

  static constexpr int kNumParams = 5;

  std::array<double, kNumParams> to_array() const;
  static ChinchillaParams from_array(std::span<const double> v);
  static const std::vector<TransformSpec>& transforms();
  static const std::vector<std::string>& param_names();
};

/// Comparison law for two-stage training:
///   L = E + A * D'^-alpha1 * D^(-alpha2 + alpha3 * log D') + B * N^-beta.
struct LiewParams {
  double E = 1.8;
  double A = 1.0;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double alpha3 = 0.0;
  double B = 100.0;
  double beta = 0.5;

  static constexpr int kNumParams = 7;

  std::array<double, kNumParams> to_array() const;
  static LiewParams from_array(std::span<const double> v);
  static const std::vector<TransformSpec>& transforms();
  static const std::vector<std::string>& param_names();
};

/// Sigmoid bias term E_delta, in (0, E_p]. N in parameters, D_k in billions.
double eval_bias(const SplitLawParams& p, double n_params, double cpt_tokens);

/// Split-training law, nats/token. Singular at D = D_k = 0.
double eval_split_law(const SplitLawParams& p, double n_params, double pt_tokens,
                      double cpt_tokens);

double eval_chinchilla(const ChinchillaParams& p, double n_params, double tokens);

double eval_liew(const LiewParams& p, double n_params, double pt_tokens, double cpt_tokens);

/// Analytic partials of eval_split_law with respect to the 12 constrained
/// parameters, in to_array() order.
std::array<double, SplitLawParams::kNumParams> grad_split_law(const SplitLawParams& p,
                                                              double n_params, double pt_tokens,
                                                              double cpt_tokens);

std::array<double, ChinchillaParams::kNumParams> grad_chinchilla(const ChinchillaParams& p,
                                                                 double n_params, double tokens);

std::array<double, LiewParams::kNumParams> grad_liew(const LiewParams& p, double n_params,
                                                     double pt_tokens, double cpt_tokens);

struct TokenPartials {
  double d_pt;   // dL/dD
  double d_cpt;  // dL/dD_k
};

/// Analytic derivatives in the two token arguments. Both strictly negative
/// for in-bounds parameters with A, E_p > 0. Singular at D = 0 or D_k = 0.
TokenPartials partials_tokens(const SplitLawParams& p, double n_params, double pt_tokens,
                              double cpt_tokens);

enum class LawFamily { kSplit, kChinchilla, kLiew };

std::string to_string(LawFamily family);
LawFamily law_family_from_string(const std::string& s);

int law_num_params(LawFamily family);
const std::vector<TransformSpec>& law_transforms(LawFamily family);
const std::vector<std::string>& law_param_names(LawFamily family);

/// Evaluates any family from a constrained parameter vector on one
/// (N, D, D_k) observation. Chinchilla reads total tokens D + D_k.
double law_predict(LawFamily family, std::span<const double> constrained, double n_params,
                   double pt_tokens, double cpt_tokens);

/// Parameter gradient counterpart of law_predict, constrained space.
std::vector<double> law_param_grad(LawFamily family, std::span<const double> constrained,
                                   double n_params, double pt_tokens, double cpt_tokens);

/// True when the observation lies in the family's domain (used to drop
/// D' = 0 rows for the comparison law before fitting).
bool law_supports(LawFamily family, double pt_tokens, double cpt_tokens);

}  // namespace splitlaw

#pragma once

#include <span>
#include <string>
#include <vector>

namespace splitlaw {

/// How one unconstrained optimizer variable maps to a constrained parameter.
enum class TransformKind {
  kSoftplusPositive,  // R -> (0, inf)
  kScaledSigmoid,     // R -> (lower, upper)
  kBoundedExponent,   // scaled sigmoid reserved for power-law exponents
};

std::string to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& s);

struct TransformSpec {
  TransformKind kind = TransformKind::kSoftplusPositive;
  double lower = 0.0;  // unused for softplus
  double upper = 0.0;

  static TransformSpec softplus() { return {TransformKind::kSoftplusPositive, 0.0, 0.0}; }
  static TransformSpec sigmoid(double lo, double hi) { return {TransformKind::kScaledSigmoid, lo, hi}; }
  static TransformSpec exponent(double lo = 0.1, double hi = 1.0) {
    return {TransformKind::kBoundedExponent, lo, hi};
  }
};

/// Maps one unconstrained value into the spec's range. Strictly monotone and
/// smooth; total on finite inputs.
double transform_value(double raw, const TransformSpec& spec);

/// Inverse of transform_value. Round-trips to 1e-10 relative for raw values
/// away from sigmoid saturation.
double inverse_transform_value(double constrained, const TransformSpec& spec);

/// d(constrained)/d(raw), used to chain parameter gradients into raw space.
double transform_derivative(double raw, const TransformSpec& spec);

std::vector<double> transform(std::span<const double> raw, std::span<const TransformSpec> specs);
std::vector<double> inverse_transform(std::span<const double> constrained,
                                      std::span<const TransformSpec> specs);

}  // namespace splitlaw

#include "splitlaw/transforms.hpp"

#include <cmath>
#include <cstddef>

#include "splitlaw/errors.hpp"

namespace splitlaw {

namespace {

// Overflow-safe softplus: log(1 + e^x) = max(x, 0) + log1p(e^-|x|).
double softplus(double x) { return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

// Inverse softplus: log(e^y - 1) = y + log(1 - e^-y).
double softplus_inverse(double y) { return y + std::log(-std::expm1(-y)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::kSoftplusPositive: return "softplus-positive";
    case TransformKind::kScaledSigmoid: return "scaled-sigmoid";
    case TransformKind::kBoundedExponent: return "bounded-exponent";
  }
  return "unknown";
}

TransformKind transform_kind_from_string(const std::string& s) {
  if (s == "softplus-positive") return TransformKind::kSoftplusPositive;
  if (s == "scaled-sigmoid") return TransformKind::kScaledSigmoid;
  if (s == "bounded-exponent") return TransformKind::kBoundedExponent;
  throw ParseError("unknown transform kind '" + s + "'");
}

double transform_value(double raw, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kSoftplusPositive:
      return softplus(raw);
    case TransformKind::kScaledSigmoid:
    case TransformKind::kBoundedExponent:
      return spec.lower + (spec.upper - spec.lower) * sigmoid(raw);
  }
  return raw;
}

double inverse_transform_value(double constrained, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kSoftplusPositive: {
      if (constrained <= 0.0) throw DomainError("softplus inverse needs a positive value");
      return softplus_inverse(constrained);
    }
    case TransformKind::kScaledSigmoid:
    case TransformKind::kBoundedExponent: {
      if (constrained <= spec.lower || constrained >= spec.upper)
        throw DomainError("sigmoid inverse needs a value strictly inside (" +
                          std::to_string(spec.lower) + ", " + std::to_string(spec.upper) + ")");
      const double p = (constrained - spec.lower) / (spec.upper - spec.lower);
      return std::log(p) - std::log1p(-p);
    }
  }
  return constrained;
}

double transform_derivative(double raw, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kSoftplusPositive:
      return sigmoid(raw);
    case TransformKind::kScaledSigmoid:
    case TransformKind::kBoundedExponent: {
      const double s = sigmoid(raw);
      return (spec.upper - spec.lower) * s * (1.0 - s);
    }
  }
  return 1.0;
}

std::vector<double> transform(std::span<const double> raw, std::span<const TransformSpec> specs) {
  if (raw.size() != specs.size()) throw DomainError("transform: raw/spec length mismatch");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = transform_value(raw[i], specs[i]);
  return out;
}

std::vector<double> inverse_transform(std::span<const double> constrained,
                                      std::span<const TransformSpec> specs) {
  if (constrained.size() != specs.size())
    throw DomainError("inverse_transform: value/spec length mismatch");
  std::vector<double> out(constrained.size());
  for (std::size_t i = 0; i < constrained.size(); ++i)
    out[i] = inverse_transform_value(constrained[i], specs[i]);
  return out;
}

}  // namespace splitlaw

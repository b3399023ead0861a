#pragma once

#include <cmath>
#include <cstdint>

#include "gradlayer/errors.hpp"

namespace gradlayer {

enum class ActivationKind : std::uint8_t {
  identity = 0,
  relu = 1,
  leaky_relu = 2,
  tanh = 3,
  softplus = 4,
};

/// Scalar activation with value and first/second derivatives.
/// tanh and softplus are twice differentiable everywhere; relu and
/// leaky_relu have a kink at 0 (second derivative taken as 0 a.e.).
struct Activation {
  ActivationKind kind = ActivationKind::identity;
  double slope = 0.0;  // leaky_relu only, must lie in (0,1)

  static Activation identity() { return {ActivationKind::identity, 0.0}; }
  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation leaky_relu(double slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
      throw ShapeError("leaky_relu slope must lie in (0,1)");
    }
    return {ActivationKind::leaky_relu, slope};
  }
  static Activation tanh() { return {ActivationKind::tanh, 0.0}; }
  static Activation softplus() { return {ActivationKind::softplus, 0.0}; }

  bool operator==(const Activation&) const = default;

  bool smooth() const { return kind != ActivationKind::relu && kind != ActivationKind::leaky_relu; }

  double value(double z) const {
    switch (kind) {
      case ActivationKind::identity: return z;
      case ActivationKind::relu: return z > 0.0 ? z : 0.0;
      case ActivationKind::leaky_relu: return z > 0.0 ? z : slope * z;
      case ActivationKind::tanh: return std::tanh(z);
      case ActivationKind::softplus:
        // stable log(1+e^z)
        return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return z;
  }

  double deriv(double z) const {
    switch (kind) {
      case ActivationKind::identity: return 1.0;
      case ActivationKind::relu: return z > 0.0 ? 1.0 : 0.0;
      case ActivationKind::leaky_relu: return z > 0.0 ? 1.0 : slope;
      case ActivationKind::tanh: {
        const double t = std::tanh(z);
        return 1.0 - t * t;
      }
      case ActivationKind::softplus: return 1.0 / (1.0 + std::exp(-z));
    }
    return 1.0;
  }

  double deriv2(double z) const {
    switch (kind) {
      case ActivationKind::identity:
      case ActivationKind::relu:
      case ActivationKind::leaky_relu:
        return 0.0;
      case ActivationKind::tanh: {
        const double t = std::tanh(z);
        return -2.0 * t * (1.0 - t * t);
      }
      case ActivationKind::softplus: {
        const double s = 1.0 / (1.0 + std::exp(-z));
        return s * (1.0 - s);
      }
    }
    return 0.0;
  }
};

}  // namespace gradlayer

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"

namespace gradlayer {

enum class OptimizerKind { sgd_momentum, rmsprop, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double lr = 1e-4;      // alpha for adam
  double momentum = 0.9; // sgd_momentum
  double decay = 0.9;    // rmsprop
  double beta1 = 0.5;    // adam
  double beta2 = 0.9;    // adam
  double eps = 1e-8;     // rmsprop / adam, added after the square root

  static OptimizerConfig adam(double alpha, double beta1, double beta2, double eps = 1e-8) {
    OptimizerConfig c;
    c.kind = OptimizerKind::adam;
    c.lr = alpha;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.eps = eps;
    return c;
  }
  static OptimizerConfig sgd_momentum(double lr, double momentum) {
    OptimizerConfig c;
    c.kind = OptimizerKind::sgd_momentum;
    c.lr = lr;
    c.momentum = momentum;
    return c;
  }
  static OptimizerConfig rmsprop(double lr, double decay, double eps = 1e-8) {
    OptimizerConfig c;
    c.kind = OptimizerKind::rmsprop;
    c.lr = lr;
    c.decay = decay;
    c.eps = eps;
    return c;
  }
};

/// One step of a gradient-based method on a flat parameter vector.
/// Value semantics: copying the optimizer snapshots its moment state, so a
/// step sequence replayed from a copy reproduces parameters bit-exactly.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t param_count)
      : config_(config), m_(param_count, 0.0) {
    if (config.kind != OptimizerKind::sgd_momentum) v_.assign(param_count, 0.0);
  }

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t step_count() const { return step_count_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

  void step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw ShapeError("optimizer step: length mismatch");
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        throw NumericError("optimizer step: non-finite gradient entry", static_cast<std::ptrdiff_t>(i));
      }
    }
    step_count_ += 1;
    switch (config_.kind) {
      case OptimizerKind::sgd_momentum:
        for (std::size_t i = 0; i < params.size(); ++i) {
          m_[i] = config_.momentum * m_[i] + grad[i];
          params[i] -= config_.lr * m_[i];
        }
        break;
      case OptimizerKind::rmsprop:
        for (std::size_t i = 0; i < params.size(); ++i) {
          v_[i] = config_.decay * v_[i] + (1.0 - config_.decay) * grad[i] * grad[i];
          params[i] -= config_.lr * grad[i] / (std::sqrt(v_[i]) + config_.eps);
        }
        break;
      case OptimizerKind::adam: {
        const double t = static_cast<double>(step_count_);
        const double bc1 = 1.0 - std::pow(config_.beta1, t);
        const double bc2 = 1.0 - std::pow(config_.beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
          m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
          v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
          const double mhat = m_[i] / bc1;
          const double vhat = v_[i] / bc2;
          params[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
        }
        break;
      }
    }
  }

 private:
  OptimizerConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_count_ = 0;
};

}  // namespace gradlayer

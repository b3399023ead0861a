#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/measure.hpp"
#include "gradlayer/net.hpp"

namespace gradlayer {

/// One gradient layer G_eta(z) = z + eta * grad_z f(g1(z)) for a critic f and
/// optional upper network g1 (absent means g1 = identity).
struct GradientLayer {
  DenseNet critic;
  std::optional<DenseNet> upper;
  double eta = 0.1;

  GradientLayer(DenseNet critic_, double eta_) : critic(std::move(critic_)), eta(eta_) { validate(); }
  GradientLayer(DenseNet critic_, DenseNet upper_, double eta_)
      : critic(std::move(critic_)), upper(std::move(upper_)), eta(eta_) {
    validate();
  }

  int input_dim() const { return upper ? upper->input_dim() : critic.input_dim(); }

  void validate() const {
    if (!(eta > 0.0)) throw ShapeError("GradientLayer: eta must be positive");
    if (critic.output_dim() != 1) throw ShapeError("GradientLayer: critic output must be scalar");
    if (upper && upper->output_dim() != critic.input_dim()) {
      throw ShapeError("GradientLayer: upper output dim != critic input dim");
    }
  }
};

/// In-place layer application to a batch of n points (row-major).
inline void apply_batch(const GradientLayer& layer, double* Z, std::size_t n) {
  const std::size_t d = static_cast<std::size_t>(layer.input_dim());
  std::vector<double> field(n * d);
  if (layer.upper) {
    Composite fg(layer.critic, *layer.upper);
    fg.grad_input_batch(Z, n, field.data());
  } else {
    grad_input_batch(layer.critic, Z, n, field.data());
  }
  for (std::size_t i = 0; i < n * d; ++i) Z[i] += layer.eta * field[i];
}

inline std::vector<double> apply(const GradientLayer& layer, std::span<const double> z) {
  if (static_cast<int>(z.size()) != layer.input_dim()) throw ShapeError("apply: input dim mismatch");
  std::vector<double> out(z.begin(), z.end());
  apply_batch(layer, out.data(), 1);
  return out;
}

/// Ordered critic checkpoints (tau_1 ... tau_T) sharing one learning rate and
/// base architecture; realizes the composition G_eta^{tau_T} o ... o
/// G_eta^{tau_1}. Checkpoints are deep copies taken at append time.
class GradientLayerStack {
 public:
  GradientLayerStack(double eta, NetSpec base_spec) : eta_(eta), base_spec_(std::move(base_spec)) {
    if (!(eta_ > 0.0)) throw ShapeError("GradientLayerStack: eta must be positive");
    base_spec_.validate();
    if (base_spec_.output_dim() != 1) {
      throw ShapeError("GradientLayerStack: base spec output must be scalar");
    }
  }

  double eta() const { return eta_; }
  const NetSpec& base_spec() const { return base_spec_; }
  std::size_t size() const { return checkpoints_.size(); }
  const DenseNet& checkpoint(std::size_t i) const { return checkpoints_[i]; }

  void append(const DenseNet& critic) {
    if (!(critic.spec() == base_spec_)) {
      throw ShapeError("GradientLayerStack: checkpoint spec differs from base spec");
    }
    checkpoints_.push_back(critic);
  }

  bool operator==(const GradientLayerStack&) const = default;

 private:
  double eta_;
  NetSpec base_spec_;
  std::vector<DenseNet> checkpoints_ = {};
};

/// Pushes a batch through the first `depth` checkpoints in order (in place).
/// `upper` threads a shared g1 network into every layer when the pipeline
/// composes the critics with one (e.g. an output squashing stage).
inline void push_batch(const GradientLayerStack& stack, double* Z, std::size_t n, std::size_t depth,
                       const DenseNet* upper = nullptr) {
  if (depth > stack.size()) throw ShapeError("push: depth exceeds stack size");
  for (std::size_t k = 0; k < depth; ++k) {
    const DenseNet& critic = stack.checkpoint(k);
    const std::size_t d = static_cast<std::size_t>(upper ? upper->input_dim() : critic.input_dim());
    std::vector<double> field(n * d);
    if (upper) {
      Composite fg(critic, *upper);
      fg.grad_input_batch(Z, n, field.data());
    } else {
      grad_input_batch(critic, Z, n, field.data());
    }
    for (std::size_t i = 0; i < n * d; ++i) Z[i] += stack.eta() * field[i];
  }
}

/// Sequential application of all checkpoints; the empty stack is the identity.
inline std::vector<double> push(const GradientLayerStack& stack, std::span<const double> z) {
  const int dim = stack.base_spec().input_dim();
  if (static_cast<int>(z.size()) != dim) throw ShapeError("push: input dim mismatch");
  std::vector<double> out(z.begin(), z.end());
  push_batch(stack, out.data(), 1, stack.size());
  return out;
}

struct InjectivityReport {
  std::vector<double> ratios;  // ||G(z) - G(z')|| / ||z - z'|| per pair
  double min_ratio = 0.0;
};

/// Displacement ratios of a layer over sampled point pairs; ratios bounded
/// away from zero witness injectivity on the sample.
inline InjectivityReport injectivity_margin(const GradientLayer& layer, const EmpiricalMeasure& zs,
                                            const EmpiricalMeasure& zs_prime) {
  if (zs.size() != zs_prime.size() || zs.dim != zs_prime.dim) {
    throw ShapeError("injectivity_margin: pair sets must align");
  }
  if (zs.empty()) throw ShapeError("injectivity_margin: no pairs given");
  InjectivityReport report;
  report.ratios.reserve(zs.size());
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double base = distance(zs.point(i), zs_prime.point(i));
    if (base == 0.0) throw ShapeError("injectivity_margin: zero-distance pair");
    const auto a = apply(layer, zs.point(i));
    const auto b = apply(layer, zs_prime.point(i));
    const double ratio = distance(a, b) / base;
    report.ratios.push_back(ratio);
    min_ratio = std::min(min_ratio, ratio);
  }
  report.min_ratio = min_ratio;
  return report;
}

}  // namespace gradlayer

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/gradient_layer.hpp"
#include "gradlayer/measure.hpp"
#include "gradlayer/metrics.hpp"
#include "gradlayer/net.hpp"
#include "gradlayer/optimizer.hpp"
#include "gradlayer/penalty.hpp"
#include "gradlayer/rng.hpp"
#include "gradlayer/transport.hpp"

namespace gradlayer {

/// Output squashing of the generation pipeline. With tanh_output the layers
/// act below the squashing: fields are taken through tanh (upper network) and
/// samples are squashed after the push.
enum class Squash { none, tanh_output };

struct TrainConfig {
  int batch = 50;           // b
  int outer_iters = 100;    // T
  int critic_iters = 50;    // T0
  double lambda = 10.0;     // gradient-penalty weight
  double eta = 0.1;         // gradient-layer learning rate
  PenaltyKind penalty = PenaltyKind::one_sided;
  OptimizerConfig optimizer = OptimizerConfig::adam(1e-4, 0.5, 0.9);
  std::uint64_t seed = 0;
  int assist_layers = 0;    // l, assist mode only
  Squash squash = Squash::none;
  int w1_every = 0;         // record W1 to data every this many outer steps; 0 disables

  void validate() const {
    if (batch < 1) throw ShapeError("TrainConfig: batch must be >= 1");
    if (outer_iters < 0) throw ShapeError("TrainConfig: outer iterations must be >= 0");
    if (critic_iters < 1) throw ShapeError("TrainConfig: critic iterations must be >= 1");
    if (lambda < 0.0) throw ShapeError("TrainConfig: lambda must be >= 0");
    if (!(eta > 0.0)) throw ShapeError("TrainConfig: eta must be > 0");
    if (assist_layers < 0) throw ShapeError("TrainConfig: assist layer count must be >= 0");
    if (w1_every < 0) throw ShapeError("TrainConfig: w1_every must be >= 0");
  }
};

/// Seeded sampler for the base measure; fill writes n points row-major.
struct BaseSampler {
  int dim = 0;
  std::function<void(Prng&, std::size_t, double*)> fill;
};

inline BaseSampler gaussian_base(int dim, double stddev) {
  return {dim, [dim, stddev](Prng& rng, std::size_t n, double* out) {
            for (std::size_t i = 0; i < n * static_cast<std::size_t>(dim); ++i) {
              out[i] = stddev * rng.normal();
            }
          }};
}

/// An elementwise tanh stage as a dense net (identity weights, tanh output).
inline DenseNet tanh_stage(int dim) {
  NetSpec spec;
  spec.layer_dims = {dim, dim};
  spec.output = Activation::tanh();
  DenseNet net(spec);
  auto p = net.params();
  for (int i = 0; i < dim; ++i) p[net.weight_offset(0) + static_cast<std::size_t>(i) * dim + i] = 1.0;
  return net;
}

struct CriticStep {
  double loss = 0.0;
  double penalty_mean = 0.0;
  std::vector<double> grad;
  bool zero_norm_hit = false;
};

/// WGAN-GP critic objective and its parameter gradient on one minibatch:
/// mean f(fake) - mean f(real) + lambda * mean penalty(interp), with
/// interp_i = eps_i * real_i + (1 - eps_i) * fake_i. Accumulation runs in
/// fixed order (fakes, then reals, then penalties).
inline CriticStep critic_loss_and_grad(const DenseNet& critic, const double* real,
                                       const double* fake, std::size_t b, double lambda,
                                       PenaltyKind kind, std::span<const double> eps_draws) {
  if (critic.output_dim() != 1) throw ShapeError("critic_loss_and_grad: critic output must be scalar");
  if (eps_draws.size() != b || b == 0) throw ShapeError("critic_loss_and_grad: batch size mismatch");
  const int d = critic.input_dim();
  const double inv_b = 1.0 / static_cast<double>(b);

  CriticStep step;
  step.grad.assign(critic.params().size(), 0.0);

  std::vector<double> values(b), ones(b, 1.0), coeff(b);

  forward_batch(critic, fake, b, values.data());
  double fake_mean = 0.0;
  for (double v : values) fake_mean += v * inv_b;
  std::fill(coeff.begin(), coeff.end(), inv_b);
  backward_params_accum(critic, fake, b, ones.data(), coeff.data(), step.grad.data());

  forward_batch(critic, real, b, values.data());
  double real_mean = 0.0;
  for (double v : values) real_mean += v * inv_b;
  std::fill(coeff.begin(), coeff.end(), -inv_b);
  backward_params_accum(critic, real, b, ones.data(), coeff.data(), step.grad.data());

  step.loss = fake_mean - real_mean;

  if (lambda > 0.0) {
    std::vector<double> interp(b * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < b; ++i) {
      const double e = eps_draws[i];
      for (int j = 0; j < d; ++j) {
        interp[i * d + j] = e * real[i * d + j] + (1.0 - e) * fake[i * d + j];
      }
    }
    const auto vals =
        detail::penalty_accum(critic, interp.data(), b, kind, lambda * inv_b, step.grad.data());
    for (const auto& v : vals) {
      step.penalty_mean += v.value * inv_b;
      step.zero_norm_hit = step.zero_norm_hit || v.zero_norm;
    }
    step.loss += lambda * step.penalty_mean;
  }

  if (!std::isfinite(step.loss)) throw NumericError("critic_loss_and_grad: non-finite loss");
  return step;
}

struct FinetuneResult {
  GradientLayerStack stack;
  std::vector<FinetuneRow> metrics;
};

/// Observer invoked with the depth-k stack before outer step k, and once more
/// with k = T after the loop. Must not mutate run state.
using OuterHook = std::function<void(int, const GradientLayerStack&)>;

namespace detail {

inline void squash_batch(const DenseNet* upper, const double* Z, std::size_t count, double* out) {
  if (!upper) {
    std::copy(Z, Z + count, out);
    return;
  }
  for (std::size_t i = 0; i < count; ++i) out[i] = std::tanh(Z[i]);
}

inline double field_norm_sq_mean(const DenseNet& critic, const DenseNet* upper, const double* Z,
                                 std::size_t n, int dim) {
  std::vector<double> field(n * static_cast<std::size_t>(dim));
  if (upper) {
    Composite fg(critic, *upper);
    fg.grad_input_batch(Z, n, field.data());
  } else {
    grad_input_batch(critic, Z, n, field.data());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += field[i * dim + j] * field[i * dim + j];
    acc += s;
  }
  return acc / static_cast<double>(n);
}

}  // namespace detail

/// Finetunes by stacking gradient layers: T outer iterations, each training
/// the warm-started critic for T0 minibatch steps against fakes pushed through
/// the current stack, then appending the critic as the next checkpoint.
inline FinetuneResult finetune(const TrainConfig& cfg, const EmpiricalMeasure& data,
                               const BaseSampler& base, const DenseNet& critic_init,
                               const OuterHook& hook = {}) {
  cfg.validate();
  if (data.empty()) throw ShapeError("finetune: data must be nonempty");
  if (base.dim != data.dim) throw ShapeError("finetune: base sampler dim != data dim");
  if (critic_init.input_dim() != data.dim) throw ShapeError("finetune: critic input dim != data dim");
  if (critic_init.output_dim() != 1) throw ShapeError("finetune: critic output must be scalar");

  const int dim = data.dim;
  const std::size_t b = static_cast<std::size_t>(cfg.batch);
  std::optional<DenseNet> upper;
  if (cfg.squash == Squash::tanh_output) upper = tanh_stage(dim);
  const DenseNet* upper_ptr = upper ? &*upper : nullptr;

  Prng real_rng(cfg.seed, Stream::real_batch);
  Prng base_rng(cfg.seed, Stream::base_batch);
  Prng eps_rng(cfg.seed, Stream::epsilon);
  Prng metrics_rng(cfg.seed, Stream::metrics);

  DenseNet critic = critic_init;
  Optimizer opt(cfg.optimizer, critic.params().size());
  FinetuneResult result{GradientLayerStack(cfg.eta, critic_init.spec()), {}};

  std::vector<double> real(b * static_cast<std::size_t>(dim));
  std::vector<double> fake(b * static_cast<std::size_t>(dim));
  std::vector<double> fake_data(b * static_cast<std::size_t>(dim));
  std::vector<double> eps(b);

  for (int k = 0; k < cfg.outer_iters; ++k) {
    if (hook) hook(k, result.stack);
    double last_loss = 0.0, last_penalty = 0.0;
    for (int k0 = 0; k0 < cfg.critic_iters; ++k0) {
      try {
        for (std::size_t i = 0; i < b; ++i) {
          const auto x = data.point(real_rng.below(data.size()));
          std::copy(x.begin(), x.end(), real.begin() + i * dim);
        }
        base.fill(base_rng, b, fake.data());
        for (std::size_t i = 0; i < b; ++i) eps[i] = eps_rng.uniform01();

        push_batch(result.stack, fake.data(), b, result.stack.size(), upper_ptr);
        detail::squash_batch(upper_ptr, fake.data(), fake.size(), fake_data.data());

        const CriticStep step = critic_loss_and_grad(critic, real.data(), fake_data.data(), b,
                                                     cfg.lambda, cfg.penalty, eps);
        opt.step(critic.params(), step.grad);
        last_loss = step.loss;
        last_penalty = step.penalty_mean;
      } catch (const NumericError& e) {
        throw NumericError("finetune: outer step " + std::to_string(k) + ", critic step " +
                           std::to_string(k0) + ": " + e.what());
      }
    }

    FinetuneRow row;
    row.outer_step = k;
    row.critic_loss = last_loss;
    row.penalty_mean = last_penalty;
    {
      base.fill(metrics_rng, b, fake.data());
      push_batch(result.stack, fake.data(), b, result.stack.size(), upper_ptr);
      row.fgrad_norm_sq = detail::field_norm_sq_mean(critic, upper_ptr, fake.data(), b, dim);
    }
    if (cfg.w1_every > 0 && k % cfg.w1_every == 0) {
      EmpiricalMeasure gen(dim);
      gen.data.resize(data.data.size());
      base.fill(metrics_rng, data.size(), gen.data.data());
      push_batch(result.stack, gen.data.data(), data.size(), result.stack.size(), upper_ptr);
      detail::squash_batch(upper_ptr, gen.data.data(), gen.data.size(), gen.data.data());
      row.w1_to_data = wasserstein(1, gen, data).cost;
    }
    result.metrics.push_back(row);
    result.stack.append(critic);
  }
  if (hook) hook(cfg.outer_iters, result.stack);
  return result;
}

/// Draws n base samples and pushes them through the whole stack
/// (Algorithm 2 of the fine-tuning scheme); applies the pipeline squashing
/// after the push when one is declared.
inline EmpiricalMeasure generate(const GradientLayerStack& stack, std::size_t n,
                                 const BaseSampler& base, std::uint64_t seed,
                                 Squash squash = Squash::none) {
  if (n == 0) throw ShapeError("generate: n must be >= 1");
  std::optional<DenseNet> upper;
  if (squash == Squash::tanh_output) upper = tanh_stage(base.dim);
  Prng rng(seed, Stream::generation);
  EmpiricalMeasure out(base.dim);
  out.data.resize(n * static_cast<std::size_t>(base.dim));
  base.fill(rng, n, out.data.data());
  push_batch(stack, out.data.data(), n, stack.size(), upper ? &*upper : nullptr);
  if (upper) {
    for (double& v : out.data) v = std::tanh(v);
  }
  return out;
}

struct AssistResult {
  DenseNet critic;
  DenseNet generator;
  std::vector<FinetuneRow> metrics;
};

namespace detail {

// l-fold application of the noise-space layer G_eta^{tau,theta}:
// z += eta * grad_z f_tau(g_theta(z)).
inline void assist_push(const DenseNet& critic, const DenseNet& generator, double eta, int l,
                        double* Z, std::size_t n) {
  if (l == 0) return;
  Composite fg(critic, generator);
  const std::size_t h = static_cast<std::size_t>(generator.input_dim());
  std::vector<double> field(n * h);
  for (int j = 0; j < l; ++j) {
    fg.grad_input_batch(Z, n, field.data());
    for (std::size_t i = 0; i < n * h; ++i) Z[i] += eta * field[i];
  }
}

}  // namespace detail

/// Assist mode: a fixed number l of gradient layers with the latest
/// parameters below the generator. Alternates T0 critic steps on fakes
/// g(pushed z) with one generator step on freshly pushed noise; pushed points
/// are treated as constants in the generator step. Returns final parameters
/// only (no history is kept).
inline AssistResult assist_train(const TrainConfig& cfg, const EmpiricalMeasure& data,
                                 const BaseSampler& noise, const DenseNet& critic_init,
                                 const DenseNet& generator_init) {
  cfg.validate();
  if (data.empty()) throw ShapeError("assist_train: data must be nonempty");
  if (critic_init.output_dim() != 1) throw ShapeError("assist_train: critic output must be scalar");
  if (generator_init.output_dim() != data.dim) {
    throw ShapeError("assist_train: generator output dim != data dim");
  }
  if (generator_init.input_dim() != noise.dim) {
    throw ShapeError("assist_train: generator input dim != noise dim");
  }
  if (critic_init.input_dim() != data.dim) throw ShapeError("assist_train: critic input dim != data dim");

  const int v = data.dim;
  const int h = noise.dim;
  const std::size_t b = static_cast<std::size_t>(cfg.batch);
  const int l = cfg.assist_layers;

  Prng real_rng(cfg.seed, Stream::real_batch);
  Prng noise_rng(cfg.seed, Stream::base_batch);
  Prng eps_rng(cfg.seed, Stream::epsilon);

  AssistResult result{critic_init, generator_init, {}};
  Optimizer critic_opt(cfg.optimizer, result.critic.params().size());
  Optimizer gen_opt(cfg.optimizer, result.generator.params().size());

  std::vector<double> real(b * static_cast<std::size_t>(v));
  std::vector<double> z(b * static_cast<std::size_t>(h));
  std::vector<double> fake(b * static_cast<std::size_t>(v));
  std::vector<double> eps(b);
  std::vector<double> ones(b, 1.0);
  std::vector<double> coeff(b);

  for (int k = 0; k < cfg.outer_iters; ++k) {
    double last_loss = 0.0, last_penalty = 0.0;
    for (int k0 = 0; k0 < cfg.critic_iters; ++k0) {
      try {
        for (std::size_t i = 0; i < b; ++i) {
          const auto x = data.point(real_rng.below(data.size()));
          std::copy(x.begin(), x.end(), real.begin() + i * v);
        }
        noise.fill(noise_rng, b, z.data());
        for (std::size_t i = 0; i < b; ++i) eps[i] = eps_rng.uniform01();

        detail::assist_push(result.critic, result.generator, cfg.eta, l, z.data(), b);
        forward_batch(result.generator, z.data(), b, fake.data());

        const CriticStep step = critic_loss_and_grad(result.critic, real.data(), fake.data(), b,
                                                     cfg.lambda, cfg.penalty, eps);
        critic_opt.step(result.critic.params(), step.grad);
        last_loss = step.loss;
        last_penalty = step.penalty_mean;
      } catch (const NumericError& e) {
        throw NumericError("assist_train: outer step " + std::to_string(k) + ", critic step " +
                           std::to_string(k0) + ": " + e.what());
      }
    }

    try {
      noise.fill(noise_rng, b, z.data());
      detail::assist_push(result.critic, result.generator, cfg.eta, l, z.data(), b);

      // v <- -grad_theta (1/b) sum f_tau(g_theta(z_i)), pushed z_i fixed.
      std::vector<double> gen_grad(result.generator.params().size(), 0.0);
      Composite fg(result.critic, result.generator);
      const double inv_b = -1.0 / static_cast<double>(b);
      for (std::size_t i = 0; i < b; ++i) {
        const auto g = fg.backward_params_inner({z.data() + i * h, static_cast<std::size_t>(h)},
                                                std::span<const double>(ones.data(), 1));
        for (std::size_t j = 0; j < gen_grad.size(); ++j) gen_grad[j] += inv_b * g[j];
      }
      gen_opt.step(result.generator.params(), gen_grad);

      FinetuneRow row;
      row.outer_step = k;
      row.critic_loss = last_loss;
      row.penalty_mean = last_penalty;
      row.fgrad_norm_sq = detail::field_norm_sq_mean(result.critic, nullptr, fake.data(), b, v);
      result.metrics.push_back(row);
    } catch (const NumericError& e) {
      throw NumericError("assist_train: outer step " + std::to_string(k) + ", generator step: " +
                         e.what());
    }
  }
  return result;
}

/// Assist-mode generation: push z through l layers with the given parameters,
/// then return g_theta(z').
inline EmpiricalMeasure generate_assist(const DenseNet& critic, const DenseNet& generator,
                                        double eta, int l, std::size_t n, const BaseSampler& noise,
                                        std::uint64_t seed) {
  if (n == 0) throw ShapeError("generate_assist: n must be >= 1");
  if (l < 0) throw ShapeError("generate_assist: l must be >= 0");
  Prng rng(seed, Stream::generation);
  std::vector<double> z(n * static_cast<std::size_t>(noise.dim));
  noise.fill(rng, n, z.data());
  detail::assist_push(critic, generator, eta, l, z.data(), n);
  EmpiricalMeasure out(generator.output_dim());
  out.data.resize(n * static_cast<std::size_t>(generator.output_dim()));
  forward_batch(generator, z.data(), n, out.data.data());
  return out;
}

/// Closed-form critic oracle for functional gradient descent: f and its exact
/// gradient field, plus the pointwise loss whose mean is the objective and
/// the objective's infimum.
struct ExactOracle {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> grad;
  std::function<double(std::span<const double>)> point_loss;
  double loss_floor = 0.0;
};

/// Quadratic well: f(x) = -||x - c||^2 / 2, objective E||x - c||^2 / 2
/// (1-smooth, floor 0). The gradient step contracts toward c by (1 - eta).
inline ExactOracle quadratic_oracle(std::vector<double> center) {
  auto c = std::make_shared<std::vector<double>>(std::move(center));
  ExactOracle o;
  o.value = [c](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - (*c)[j];
      s += d * d;
    }
    return -0.5 * s;
  };
  o.grad = [c](std::span<const double> x) {
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = (*c)[j] - x[j];
    return g;
  };
  o.point_loss = [o_value = o.value](std::span<const double> x) { return -o_value(x); };
  o.loss_floor = 0.0;
  return o;
}

/// Two quadratic wells: f(x) = -min_j ||x - c_j||^2 / 2 (smooth a.e.).
inline ExactOracle two_well_oracle(std::vector<double> center_a, std::vector<double> center_b) {
  auto ca = std::make_shared<std::vector<double>>(std::move(center_a));
  auto cb = std::make_shared<std::vector<double>>(std::move(center_b));
  auto dist2 = [](std::span<const double> x, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double d = x[j] - c[j];
      s += d * d;
    }
    return s;
  };
  ExactOracle o;
  o.value = [ca, cb, dist2](std::span<const double> x) {
    return -0.5 * std::min(dist2(x, *ca), dist2(x, *cb));
  };
  o.grad = [ca, cb, dist2](std::span<const double> x) {
    const auto& c = dist2(x, *ca) <= dist2(x, *cb) ? *ca : *cb;
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = c[j] - x[j];
    return g;
  };
  o.point_loss = [value = o.value](std::span<const double> x) { return -value(x); };
  o.loss_floor = 0.0;
  return o;
}

struct FgdResult {
  std::vector<EmpiricalMeasure> trajectory;  // particle sets at steps 0..T
  RunMetrics metrics;                        // records 0..T
};

/// Functional gradient descent with an exact critic oracle: every particle
/// moves by eta * grad f(x) per step. Records the objective and the squared
/// functional-gradient norm (particle mean of ||grad f||^2) at steps 0..T.
inline FgdResult fgd_exact(const ExactOracle& oracle, EmpiricalMeasure particles, double eta,
                           int T) {
  if (!(eta > 0.0)) throw ShapeError("fgd: eta must be positive");
  if (T < 0) throw ShapeError("fgd: T must be >= 0");
  if (particles.empty()) throw ShapeError("fgd: particle set must be nonempty");

  FgdResult result;
  const std::size_t n = particles.size();
  const int d = particles.dim;

  auto record = [&](int step) {
    RunRecord r;
    r.step = step;
    double obj = 0.0, fg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = particles.point(i);
      obj += oracle.point_loss(x);
      const auto g = oracle.grad(x);
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += g[j] * g[j];
      fg += s;
    }
    r.objective = obj / static_cast<double>(n);
    r.fgrad_norm_sq = fg / static_cast<double>(n);
    result.metrics.append(r);
  };

  result.trajectory.push_back(particles);
  for (int k = 0; k < T; ++k) {
    record(k);
    for (std::size_t i = 0; i < n; ++i) {
      auto x = particles.point(i);
      const auto g = oracle.grad(x);
      for (int j = 0; j < d; ++j) {
        if (!std::isfinite(g[j])) {
          throw NumericError("fgd: non-finite field value at particle", static_cast<std::ptrdiff_t>(i));
        }
        x[j] += eta * g[j];
      }
    }
    result.trajectory.push_back(particles);
  }
  record(T);
  return result;
}

/// Learned-oracle functional gradient descent. The inner critic loop makes
/// this the same procedure as finetune, so it delegates to finetune and reads
/// the particle trajectory back by pushing the seed particles through the
/// growing stack.
inline FgdResult fgd_learned(const TrainConfig& cfg, const EmpiricalMeasure& data,
                             const BaseSampler& base, const DenseNet& critic_init,
                             const EmpiricalMeasure& seed_particles) {
  FgdResult result;
  const FinetuneResult ft = finetune(cfg, data, base, critic_init);
  const DenseNet* upper = nullptr;
  std::optional<DenseNet> tanh_net;
  if (cfg.squash == Squash::tanh_output) {
    tanh_net = tanh_stage(base.dim);
    upper = &*tanh_net;
  }
  for (std::size_t depth = 0; depth <= ft.stack.size(); ++depth) {
    EmpiricalMeasure particles = seed_particles;
    push_batch(ft.stack, particles.data.data(), particles.size(), depth, upper);
    result.trajectory.push_back(std::move(particles));
  }
  for (std::size_t k = 0; k < ft.metrics.size(); ++k) {
    RunRecord r;
    r.step = static_cast<int>(k);
    r.objective = ft.metrics[k].critic_loss;  // critic-gap trend, not a true objective
    r.fgrad_norm_sq = ft.metrics[k].fgrad_norm_sq;
    r.w1_to_data = ft.metrics[k].w1_to_data;
    result.metrics.append(r);
  }
  return result;
}

}  // namespace gradlayer

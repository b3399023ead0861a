#include "gradlayer/wgan.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gradlayer/datasets.hpp"
#include "gradlayer/stack_io.hpp"
#include "testing.hpp"

using namespace gradlayer;
using gltest::fd_gradient;
using gltest::rel_err;

namespace {

DenseNet linear_critic(std::vector<double> a, double bias = 0.0) {
  NetSpec spec;
  spec.layer_dims = {static_cast<int>(a.size()), 1};
  a.push_back(bias);
  return DenseNet(spec, std::move(a));
}

NetSpec small_critic_spec(int dim = 2, int hidden = 8) {
  NetSpec spec;
  spec.layer_dims = {dim, hidden, hidden, 1};
  spec.hidden = Activation::leaky_relu(0.2);
  return spec;
}

TrainConfig tiny_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.batch = 8;
  cfg.outer_iters = 3;
  cfg.critic_iters = 4;
  cfg.lambda = 10.0;
  cfg.eta = 0.1;
  cfg.seed = seed;
  cfg.optimizer = OptimizerConfig::adam(1e-3, 0.5, 0.9);
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(CriticLoss, LinearCriticByHand) {
  const auto critic = linear_critic({1.0, 1.0});
  const std::vector<double> real{1.0, 0.0};
  const std::vector<double> fake{0.0, 0.0};
  const std::vector<double> eps{0.5};
  const auto step = critic_loss_and_grad(critic, real.data(), fake.data(), 1, 0.0,
                                         PenaltyKind::one_sided, eps);
  EXPECT_DOUBLE_EQ(step.loss, -1.0);
  // d loss / d a = fake - real; d loss / d bias = 0
  EXPECT_DOUBLE_EQ(step.grad[0], -1.0);
  EXPECT_DOUBLE_EQ(step.grad[1], 0.0);
  EXPECT_DOUBLE_EQ(step.grad[2], 0.0);
}

TEST(CriticLoss, IdenticalBatchesCancel) {
  Prng rng(5);
  auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  std::vector<double> batch(16);
  for (double& v : batch) v = rng.normal();
  std::vector<double> eps(8);
  for (double& e : eps) e = rng.uniform01();
  const auto step =
      critic_loss_and_grad(critic, batch.data(), batch.data(), 8, 0.0, PenaltyKind::one_sided, eps);
  EXPECT_NEAR(step.loss, 0.0, 1e-12);
  for (double g : step.grad) EXPECT_NEAR(g, 0.0, 1e-12);
}

TEST(CriticLoss, GradMatchesFiniteDifferencesOfFullLoss) {
  Prng rng(9);
  NetSpec spec;
  spec.layer_dims = {2, 6, 5, 1};
  spec.hidden = Activation::tanh();
  auto critic = DenseNet::glorot_uniform_init(spec, rng);
  const std::size_t b = 6;
  std::vector<double> real(2 * b), fake(2 * b), eps(b);
  for (double& v : real) v = rng.normal();
  for (double& v : fake) v = rng.normal();
  for (double& e : eps) e = rng.uniform01();

  for (auto kind : {PenaltyKind::two_sided, PenaltyKind::one_sided}) {
    const auto step = critic_loss_and_grad(critic, real.data(), fake.data(), b, 10.0, kind, eps);
    DenseNet probe = critic;
    const auto fd = fd_gradient(
        [&](std::span<const double> p) {
          std::copy(p.begin(), p.end(), probe.params().begin());
          return critic_loss_and_grad(probe, real.data(), fake.data(), b, 10.0, kind, eps).loss;
        },
        critic.params());
    EXPECT_LE(rel_err(step.grad, fd), 1e-4);
  }
}

TEST(CriticLoss, BatchSizeMismatchRejected) {
  const auto critic = linear_critic({1.0, 0.0});
  const std::vector<double> pts{0.0, 0.0};
  const std::vector<double> eps{0.5, 0.5};
  EXPECT_THROW(critic_loss_and_grad(critic, pts.data(), pts.data(), 1, 0.0,
                                    PenaltyKind::one_sided, eps),
               ShapeError);
}

TEST(Finetune, ZeroOuterItersLeavesBaseSampling) {
  Prng rng(12);
  auto cfg = tiny_config(101);
  cfg.outer_iters = 0;
  const auto data = gaussian_noise(2, 1.0, 32, 7);
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);

  const auto result = finetune(cfg, data, base, critic);
  EXPECT_EQ(result.stack.size(), 0u);
  EXPECT_TRUE(result.metrics.empty());

  const auto gen = generate(result.stack, 16, base, 555);
  EmpiricalMeasure expected(2);
  expected.data.resize(32);
  Prng gen_rng(555, Stream::generation);
  base.fill(gen_rng, 16, expected.data.data());
  EXPECT_EQ(gen.data, expected.data);
}

TEST(Finetune, DeterministicStackBytes) {
  Prng rng(13);
  const auto data = eight_gaussians(64, 3).points;
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  const auto cfg = tiny_config(2024);

  const auto a = finetune(cfg, data, base, critic);
  const auto b = finetune(cfg, data, base, critic);

  const auto dir = std::filesystem::temp_directory_path();
  const auto pa = dir / "gradlayer_ft_a.glstk";
  const auto pb = dir / "gradlayer_ft_b.glstk";
  save_stack(a.stack, pa.string());
  save_stack(b.stack, pb.string());
  EXPECT_EQ(slurp(pa), slurp(pb));
  EXPECT_EQ(finetune_metrics_csv(a.metrics), finetune_metrics_csv(b.metrics));
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
}

TEST(Finetune, MetricsHaveExactlyTOuterRecords) {
  Prng rng(14);
  const auto data = eight_gaussians(64, 3).points;
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  auto cfg = tiny_config(77);
  cfg.outer_iters = 5;
  cfg.w1_every = 2;

  const auto result = finetune(cfg, data, base, critic);
  ASSERT_EQ(result.metrics.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(result.metrics[static_cast<std::size_t>(k)].outer_step, k);
    EXPECT_EQ(result.metrics[static_cast<std::size_t>(k)].w1_to_data.has_value(), k % 2 == 0);
  }
  EXPECT_EQ(result.stack.size(), 5u);
}

TEST(Finetune, HookSeesGrowingStack) {
  Prng rng(15);
  const auto data = gaussian_noise(2, 1.0, 24, 4);
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  auto cfg = tiny_config(31);
  cfg.outer_iters = 3;

  std::vector<std::pair<int, std::size_t>> seen;
  finetune(cfg, data, base, critic,
           [&](int k, const GradientLayerStack& s) { seen.emplace_back(k, s.size()); });
  ASSERT_EQ(seen.size(), 4u);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    EXPECT_EQ(seen[i].first, static_cast<int>(i));
    EXPECT_EQ(seen[i].second, i);
  }
}

TEST(Finetune, NumericFailureCarriesStepIndices) {
  Prng rng(16);
  EmpiricalMeasure data(2);
  for (int i = 0; i < 8; ++i) {
    data.data.push_back(std::nan(""));
    data.data.push_back(0.0);
  }
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  auto cfg = tiny_config(1);
  try {
    finetune(cfg, data, base, critic);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("outer step 0"), std::string::npos);
  }
}

TEST(Finetune, TanhSquashKeepsSamplesBounded) {
  Prng rng(18);
  const auto data = eight_gaussians(64, 3).points;
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  auto cfg = tiny_config(99);
  cfg.squash = Squash::tanh_output;

  const auto result = finetune(cfg, data, base, critic);
  const auto gen = generate(result.stack, 32, base, 1234, Squash::tanh_output);
  for (double v : gen.data) {
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }

  // squashing happens after the push: tanh(push(z)) reproduces generate()
  Prng gen_rng(1234, Stream::generation);
  EmpiricalMeasure manual(2);
  manual.data.resize(64);
  base.fill(gen_rng, 32, manual.data.data());
  const auto tanh_net = tanh_stage(2);
  push_batch(result.stack, manual.data.data(), 32, result.stack.size(), &tanh_net);
  for (double& v : manual.data) v = std::tanh(v);
  EXPECT_EQ(gen.data, manual.data);
}

TEST(Generate, SingleLinearLayerShiftsEverySample) {
  const double eta = 0.1;
  const std::vector<double> a{0.6, -0.3};
  GradientLayerStack stack(eta, linear_critic(a).spec());
  stack.append(linear_critic(a));
  const auto base = gaussian_base(2, 0.5);

  const auto shifted = generate(stack, 20, base, 42);
  GradientLayerStack empty(eta, linear_critic(a).spec());
  const auto plain = generate(empty, 20, base, 42);
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(shifted.point(i)[j], plain.point(i)[j] + eta * a[static_cast<std::size_t>(j)]);
    }
  }
}

TEST(Generate, FixedSeedReproduces) {
  Prng rng(21);
  const auto spec = small_critic_spec();
  GradientLayerStack stack(0.1, spec);
  stack.append(DenseNet::glorot_uniform_init(spec, rng));
  const auto base = gaussian_base(2, 0.5);
  const auto a = generate(stack, 50, base, 7);
  const auto b = generate(stack, 50, base, 7);
  EXPECT_EQ(a.data, b.data);
}

TEST(FgdExact, QuadraticContractsGeometrically) {
  const auto oracle = quadratic_oracle({1.0, -0.5});
  Prng rng(22);
  EmpiricalMeasure particles(2);
  for (int i = 0; i < 40; ++i) {
    particles.data.push_back(rng.normal());
    particles.data.push_back(rng.normal());
  }
  const double eta = 0.1;
  const int T = 50;
  const auto run = fgd_exact(oracle, particles, eta, T);
  ASSERT_EQ(run.trajectory.size(), static_cast<std::size_t>(T + 1));
  ASSERT_EQ(run.metrics.size(), static_cast<std::size_t>(T + 1));

  for (int k = 0; k <= T; ++k) {
    const double factor = std::pow(1.0 - eta, k);
    for (std::size_t i = 0; i < particles.size(); ++i) {
      for (int j = 0; j < 2; ++j) {
        const double c = j == 0 ? 1.0 : -0.5;
        const double want = c + factor * (particles.point(i)[j] - c);
        const double got = run.trajectory[static_cast<std::size_t>(k)].point(i)[j];
        EXPECT_LE(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(FgdExact, ConstantOracleFreezesParticles) {
  ExactOracle oracle;
  oracle.value = [](std::span<const double>) { return 3.0; };
  oracle.grad = [](std::span<const double> x) { return std::vector<double>(x.size(), 0.0); };
  oracle.point_loss = [](std::span<const double>) { return -3.0; };
  oracle.loss_floor = -3.0;

  EmpiricalMeasure particles(2, {0.5, -0.5, 1.0, 2.0});
  const auto run = fgd_exact(oracle, particles, 0.5, 10);
  for (const auto& snap : run.trajectory) EXPECT_EQ(snap.data, particles.data);
  for (const auto& rec : run.metrics.records()) EXPECT_EQ(rec.fgrad_norm_sq, 0.0);
}

TEST(FgdExact, StationarityBoundFromTheRun) {
  const auto oracle = quadratic_oracle({0.0, 0.0});
  Prng rng(23);
  EmpiricalMeasure particles(2);
  for (int i = 0; i < 64; ++i) {
    particles.data.push_back(2.0 * rng.normal());
    particles.data.push_back(2.0 * rng.normal());
  }
  const double eta = 0.1;
  const int T = 50;
  const auto run = fgd_exact(oracle, particles, eta, T);

  double lhs = run.metrics[0].fgrad_norm_sq;
  for (int k = 1; k < T; ++k) lhs = std::min(lhs, run.metrics[static_cast<std::size_t>(k)].fgrad_norm_sq);
  const double rhs = 2.0 / (eta * T) * (run.metrics[0].objective - oracle.loss_floor);
  EXPECT_LE(lhs, rhs);

  // per-step descent inequality at 1e-9
  for (int k = 0; k < T; ++k) {
    const auto& cur = run.metrics[static_cast<std::size_t>(k)];
    const auto& next = run.metrics[static_cast<std::size_t>(k + 1)];
    EXPECT_LE(next.objective, cur.objective - 0.5 * eta * cur.fgrad_norm_sq + 1e-9);
  }
}

TEST(FgdExact, NonFiniteFieldReported) {
  ExactOracle oracle;
  oracle.value = [](std::span<const double>) { return 0.0; };
  oracle.grad = [](std::span<const double> x) {
    return std::vector<double>{1.0 / (x[0] - x[0]), 0.0};  // NaN
  };
  oracle.point_loss = [](std::span<const double>) { return 0.0; };
  EmpiricalMeasure particles(2, {1.0, 1.0});
  EXPECT_THROW(fgd_exact(oracle, particles, 0.1, 1), NumericError);
}

TEST(FgdLearned, MatchesFinetunePrefixPushes) {
  Prng rng(24);
  const auto data = eight_gaussians(48, 5).points;
  const auto base = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  const auto cfg = tiny_config(404);

  EmpiricalMeasure seeds(2);
  Prng seed_rng(9, Stream::particles);
  for (int i = 0; i < 12; ++i) {
    seeds.data.push_back(0.5 * seed_rng.normal());
    seeds.data.push_back(0.5 * seed_rng.normal());
  }

  const auto run = fgd_learned(cfg, data, base, critic, seeds);
  const auto ft = finetune(cfg, data, base, critic);
  ASSERT_EQ(run.trajectory.size(), ft.stack.size() + 1);
  for (std::size_t depth = 0; depth <= ft.stack.size(); ++depth) {
    EmpiricalMeasure manual = seeds;
    push_batch(ft.stack, manual.data.data(), manual.size(), depth);
    EXPECT_EQ(run.trajectory[depth].data, manual.data) << "depth " << depth;
  }
}

namespace {

// Straight-line WGAN-GP loop with no gradient-layer code, mirroring the
// stream discipline of assist_train. Reference for the l = 0 case.
AssistResult plain_wgan_reference(const TrainConfig& cfg, const EmpiricalMeasure& data,
                                  const BaseSampler& noise, const DenseNet& critic_init,
                                  const DenseNet& generator_init) {
  Prng real_rng(cfg.seed, Stream::real_batch);
  Prng noise_rng(cfg.seed, Stream::base_batch);
  Prng eps_rng(cfg.seed, Stream::epsilon);

  AssistResult result{critic_init, generator_init, {}};
  Optimizer critic_opt(cfg.optimizer, result.critic.params().size());
  Optimizer gen_opt(cfg.optimizer, result.generator.params().size());
  const std::size_t b = static_cast<std::size_t>(cfg.batch);
  const int v = data.dim, h = noise.dim;

  std::vector<double> real(b * v), z(b * h), fake(b * v), eps(b);
  const std::vector<double> one{1.0};
  for (int k = 0; k < cfg.outer_iters; ++k) {
    for (int k0 = 0; k0 < cfg.critic_iters; ++k0) {
      for (std::size_t i = 0; i < b; ++i) {
        const auto x = data.point(real_rng.below(data.size()));
        std::copy(x.begin(), x.end(), real.begin() + i * v);
      }
      noise.fill(noise_rng, b, z.data());
      for (std::size_t i = 0; i < b; ++i) eps[i] = eps_rng.uniform01();
      forward_batch(result.generator, z.data(), b, fake.data());
      const auto step = critic_loss_and_grad(result.critic, real.data(), fake.data(), b,
                                             cfg.lambda, cfg.penalty, eps);
      critic_opt.step(result.critic.params(), step.grad);
    }
    noise.fill(noise_rng, b, z.data());
    std::vector<double> grad(result.generator.params().size(), 0.0);
    Composite fg(result.critic, result.generator);
    for (std::size_t i = 0; i < b; ++i) {
      const auto gi = fg.backward_params_inner({z.data() + i * h, static_cast<std::size_t>(h)}, one);
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += -gi[j] / static_cast<double>(b);
    }
    gen_opt.step(result.generator.params(), grad);
  }
  return result;
}

}  // namespace

TEST(Assist, ZeroLayersEqualsPlainWganGp) {
  Prng rng(25);
  const auto data = eight_gaussians(48, 5).points;
  const auto noise = gaussian_base(3, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  NetSpec gen_spec;
  gen_spec.layer_dims = {3, 8, 2};
  gen_spec.hidden = Activation::tanh();
  const auto generator = DenseNet::glorot_uniform_init(gen_spec, rng);

  auto cfg = tiny_config(3030);
  cfg.assist_layers = 0;

  const auto got = assist_train(cfg, data, noise, critic, generator);
  const auto want = plain_wgan_reference(cfg, data, noise, critic, generator);
  EXPECT_EQ(std::vector<double>(got.critic.params().begin(), got.critic.params().end()),
            std::vector<double>(want.critic.params().begin(), want.critic.params().end()));
  EXPECT_EQ(std::vector<double>(got.generator.params().begin(), got.generator.params().end()),
            std::vector<double>(want.generator.params().begin(), want.generator.params().end()));
}

TEST(Assist, TinyEtaStaysNearZeroLayerTrajectory) {
  Prng rng(26);
  const auto data = eight_gaussians(48, 5).points;
  const auto noise = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  NetSpec gen_spec;
  gen_spec.layer_dims = {2, 6, 2};
  gen_spec.hidden = Activation::tanh();
  const auto generator = DenseNet::glorot_uniform_init(gen_spec, rng);

  auto cfg0 = tiny_config(777);
  cfg0.assist_layers = 0;
  auto cfg1 = cfg0;
  cfg1.assist_layers = 1;
  cfg1.eta = 1e-12;

  const auto a = assist_train(cfg0, data, noise, critic, generator);
  const auto b = assist_train(cfg1, data, noise, critic, generator);
  for (std::size_t i = 0; i < a.generator.params().size(); ++i) {
    EXPECT_NEAR(a.generator.params()[i], b.generator.params()[i], 1e-6);
  }
}

TEST(Assist, DeterministicReplay) {
  Prng rng(27);
  const auto data = eight_gaussians(32, 5).points;
  const auto noise = gaussian_base(2, 0.5);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  NetSpec gen_spec;
  gen_spec.layer_dims = {2, 6, 2};
  gen_spec.hidden = Activation::tanh();
  const auto generator = DenseNet::glorot_uniform_init(gen_spec, rng);

  auto cfg = tiny_config(909);
  cfg.assist_layers = 2;

  const auto a = assist_train(cfg, data, noise, critic, generator);
  const auto b = assist_train(cfg, data, noise, critic, generator);
  EXPECT_EQ(std::vector<double>(a.generator.params().begin(), a.generator.params().end()),
            std::vector<double>(b.generator.params().begin(), b.generator.params().end()));
  EXPECT_EQ(std::vector<double>(a.critic.params().begin(), a.critic.params().end()),
            std::vector<double>(b.critic.params().begin(), b.critic.params().end()));
}

TEST(GenerateAssist, ZeroLayersIsPlainGenerator) {
  Prng rng(28);
  NetSpec gen_spec;
  gen_spec.layer_dims = {2, 5, 2};
  gen_spec.hidden = Activation::softplus();
  const auto generator = DenseNet::glorot_uniform_init(gen_spec, rng);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  const auto noise = gaussian_base(2, 0.5);

  const auto out = generate_assist(critic, generator, 0.1, 0, 10, noise, 88);
  Prng gen_rng(88, Stream::generation);
  std::vector<double> z(20);
  noise.fill(gen_rng, 10, z.data());
  std::vector<double> want(20);
  forward_batch(generator, z.data(), 10, want.data());
  EXPECT_EQ(out.data, want);
}

TEST(GenerateAssist, LinearCompositeAddsConstantDrift) {
  // critic a . x, generator W z + c: each layer application adds eta * W^T a.
  const auto critic = linear_critic({0.5, -1.0});
  NetSpec gen_spec;
  gen_spec.layer_dims = {2, 2};
  DenseNet generator(gen_spec, {1.0, 2.0, 0.0, 1.0, 0.3, -0.3});  // W rows (1,2),(0,1)
  const std::vector<double> wta{0.5 * 1.0 + (-1.0) * 0.0, 0.5 * 2.0 + (-1.0) * 1.0};

  const auto noise = gaussian_base(2, 0.5);
  const double eta = 0.05;
  const int l = 3;
  const auto out = generate_assist(critic, generator, eta, l, 6, noise, 31);

  Prng gen_rng(31, Stream::generation);
  std::vector<double> z(12);
  noise.fill(gen_rng, 6, z.data());
  for (std::size_t i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j) z[i * 2 + j] += l * eta * wta[static_cast<std::size_t>(j)];
  }
  std::vector<double> want(12);
  forward_batch(generator, z.data(), 6, want.data());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(out.data[i], want[i], 1e-12);
}

TEST(GenerateAssist, MatchesTrainingTimeSamplePath) {
  Prng rng(29);
  const auto critic = DenseNet::glorot_uniform_init(small_critic_spec(), rng);
  NetSpec gen_spec;
  gen_spec.layer_dims = {2, 7, 2};
  gen_spec.hidden = Activation::tanh();
  const auto generator = DenseNet::glorot_uniform_init(gen_spec, rng);
  const auto noise = gaussian_base(2, 0.5);
  const double eta = 0.1;
  const int l = 2;

  const auto out = generate_assist(critic, generator, eta, l, 5, noise, 64);

  // replay of the training-loop sample path on the same draws
  Prng gen_rng(64, Stream::generation);
  std::vector<double> z(10);
  noise.fill(gen_rng, 5, z.data());
  const Composite fg = compose(critic, generator);
  for (int step = 0; step < l; ++step) {
    for (std::size_t i = 0; i < 5; ++i) {
      const auto g = fg.grad_input({z.data() + i * 2, 2});
      for (int j = 0; j < 2; ++j) z[i * 2 + j] += eta * g[static_cast<std::size_t>(j)];
    }
  }
  std::vector<double> want(10);
  forward_batch(generator, z.data(), 5, want.data());
  EXPECT_EQ(out.data, want);
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  cfg.eta = 0.0;
  EXPECT_THROW(cfg.validate(), ShapeError);
  cfg = TrainConfig{};
  cfg.batch = 0;
  EXPECT_THROW(cfg.validate(), ShapeError);
  cfg = TrainConfig{};
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), ShapeError);
  cfg = TrainConfig{};
  EXPECT_NO_THROW(cfg.validate());
}

#include "gradlayer/net.hpp"

#include <gtest/gtest.h>

#include "testing.hpp"

using namespace gradlayer;
using gltest::fd_gradient;
using gltest::rel_err;

TEST(Forward, SingleAffineLayerByHand) {
  NetSpec spec;
  spec.layer_dims = {1, 1};
  DenseNet net(spec, {2.0, 1.0});  // W=[[2]], b=[1]
  const auto y = forward(net, std::vector<double>{3.0});
  ASSERT_EQ(y.size(), 1u);
  EXPECT_DOUBLE_EQ(y[0], 7.0);
}

TEST(Forward, ZeroNetIsZero) {
  NetSpec spec;
  spec.layer_dims = {3, 4, 2};
  spec.hidden = Activation::tanh();
  spec.output = Activation::tanh();
  DenseNet net(spec);  // all-zero params
  const auto y = forward(net, std::vector<double>{0.3, -1.2, 5.0});
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(Forward, MatchesNaiveEvaluator) {
  Prng rng(42);
  auto net = gltest::random_net(rng, {3, 16, 12, 8, 2}, Activation::tanh(), Activation::identity());
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = gltest::random_point(rng, 3);
    const auto got = forward(net, x);
    const auto want = gltest::naive_forward(net, x);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_LE(std::abs(got[i] - want[i]), 1e-12 * std::max(1.0, std::abs(want[i])));
    }
  }
}

TEST(Forward, InputShapeError) {
  NetSpec spec;
  spec.layer_dims = {2, 1};
  DenseNet net(spec);
  EXPECT_THROW(forward(net, std::vector<double>{1.0, 2.0, 3.0}), ShapeError);
}

TEST(Forward, Deterministic) {
  Prng rng(7);
  auto net = gltest::random_net(rng, {2, 8, 1}, Activation::softplus(), Activation::identity());
  const std::vector<double> x{0.4, -0.9};
  const auto a = forward(net, x);
  const auto b = forward(net, x);
  EXPECT_EQ(a, b);
}

TEST(BackwardParams, LinearModel) {
  NetSpec spec;
  spec.layer_dims = {2, 1};
  DenseNet net(spec, {0.5, -0.25, 2.0});  // w=(0.5,-0.25), b=2
  const std::vector<double> x{3.0, 4.0};
  const auto grad = backward_params(net, x, std::vector<double>{1.0});
  ASSERT_EQ(grad.size(), 3u);
  EXPECT_DOUBLE_EQ(grad[0], 3.0);
  EXPECT_DOUBLE_EQ(grad[1], 4.0);
  EXPECT_DOUBLE_EQ(grad[2], 1.0);
}

TEST(BackwardParams, ZeroUpstreamGivesZeroGrad) {
  Prng rng(3);
  auto net = gltest::random_net(rng, {2, 5, 3}, Activation::tanh(), Activation::identity());
  const auto x = gltest::random_point(rng, 2);
  const auto grad = backward_params(net, x, std::vector<double>{0.0, 0.0, 0.0});
  for (double g : grad) EXPECT_EQ(g, 0.0);
}

TEST(BackwardParams, MatchesFiniteDifferences) {
  Prng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto net = gltest::random_net(rng, {3, 7, 6, 1}, Activation::tanh(), Activation::tanh());
    const auto x = gltest::random_point(rng, 3);
    const std::vector<double> upstream{1.0};
    const auto grad = backward_params(net, x, upstream);

    DenseNet probe = net;
    const auto fd = fd_gradient(
        [&](std::span<const double> p) {
          std::copy(p.begin(), p.end(), probe.params().begin());
          return forward(probe, x)[0];
        },
        net.params());
    EXPECT_LE(rel_err(grad, fd), 1e-5);
  }
}

TEST(GradInput, LinearIsConstant) {
  NetSpec spec;
  spec.layer_dims = {3, 1};
  DenseNet net(spec, {1.5, -2.0, 0.25, 7.0});
  const auto g1 = grad_input(net, std::vector<double>{0.0, 0.0, 0.0});
  const auto g2 = grad_input(net, std::vector<double>{3.0, -1.0, 2.0});
  EXPECT_EQ(g1, (std::vector<double>{1.5, -2.0, 0.25}));
  EXPECT_EQ(g1, g2);
}

TEST(GradInput, ConstantNetHasZeroGradient) {
  NetSpec spec;
  spec.layer_dims = {2, 4, 1};
  spec.hidden = Activation::tanh();
  DenseNet net(spec);
  auto p = net.params();
  p[net.bias_offset(1)] = 3.0;  // output bias only; weights into output stay zero
  const auto g = grad_input(net, std::vector<double>{0.7, -0.1});
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.0}));
}

TEST(GradInput, MatchesFiniteDifferences) {
  Prng rng(13);
  auto net = gltest::random_net(rng, {4, 10, 8, 1}, Activation::softplus(), Activation::identity());
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = gltest::random_point(rng, 4);
    const auto g = grad_input(net, x);
    const auto fd = fd_gradient([&](std::span<const double> p) { return forward(net, p)[0]; }, x);
    EXPECT_LE(rel_err(g, fd), 1e-5);
  }
}

TEST(GradInput, RejectsVectorOutput) {
  NetSpec spec;
  spec.layer_dims = {2, 2};
  DenseNet net(spec);
  EXPECT_THROW(grad_input(net, std::vector<double>{0.0, 0.0}), ShapeError);
}

TEST(Compose, IdentityInnerIsTransparent) {
  Prng rng(5);
  auto outer = gltest::random_net(rng, {3, 6, 1}, Activation::tanh(), Activation::identity());
  NetSpec id_spec;
  id_spec.layer_dims = {3, 3};
  DenseNet inner(id_spec);
  auto p = inner.params();
  for (int i = 0; i < 3; ++i) p[inner.weight_offset(0) + static_cast<std::size_t>(i) * 3 + i] = 1.0;

  const Composite fg = compose(outer, inner);
  const auto x = gltest::random_point(rng, 3);
  EXPECT_EQ(fg.forward(x), forward(outer, x));
  EXPECT_EQ(fg.grad_input(x), grad_input(outer, x));
  EXPECT_EQ(fg.backward_params_outer(x, std::vector<double>{1.0}),
            backward_params(outer, x, std::vector<double>{1.0}));
}

TEST(Compose, LinearChain) {
  // f(g(x)) = a . (W x + c) with a=(1,2), W=[[0,1],[1,0]], c=(0.5,-0.5)
  NetSpec f_spec;
  f_spec.layer_dims = {2, 1};
  DenseNet f(f_spec, {1.0, 2.0, 0.0});
  NetSpec g_spec;
  g_spec.layer_dims = {2, 2};
  DenseNet g(g_spec, {0.0, 1.0, 1.0, 0.0, 0.5, -0.5});
  const Composite fg = compose(f, g);
  const auto grad = fg.grad_input(std::vector<double>{0.3, 0.4});
  // W^T a = (2, 1)
  EXPECT_DOUBLE_EQ(grad[0], 2.0);
  EXPECT_DOUBLE_EQ(grad[1], 1.0);
}

TEST(Compose, GradMatchesFiniteDifferences) {
  Prng rng(17);
  auto outer = gltest::random_net(rng, {3, 8, 1}, Activation::tanh(), Activation::identity());
  auto inner = gltest::random_net(rng, {2, 6, 3}, Activation::softplus(), Activation::tanh());
  const Composite fg = compose(outer, inner);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = gltest::random_point(rng, 2);
    const auto g = fg.grad_input(x);
    const auto fd = fd_gradient([&](std::span<const double> p) { return fg.forward(p)[0]; }, x);
    EXPECT_LE(rel_err(g, fd), 1e-5);
  }
}

TEST(Compose, PartwiseParamGradsMatchFiniteDifferences) {
  Prng rng(19);
  auto outer = gltest::random_net(rng, {2, 5, 1}, Activation::tanh(), Activation::identity());
  auto inner = gltest::random_net(rng, {2, 4, 2}, Activation::tanh(), Activation::tanh());
  const Composite fg = compose(outer, inner);
  const auto x = gltest::random_point(rng, 2);
  const std::vector<double> upstream{1.0};

  const auto g_outer = fg.backward_params_outer(x, upstream);
  DenseNet outer_probe = outer;
  const auto fd_outer = fd_gradient(
      [&](std::span<const double> p) {
        std::copy(p.begin(), p.end(), outer_probe.params().begin());
        return compose(outer_probe, inner).forward(x)[0];
      },
      outer.params());
  EXPECT_LE(rel_err(g_outer, fd_outer), 1e-5);

  const auto g_inner = fg.backward_params_inner(x, upstream);
  DenseNet inner_probe = inner;
  const auto fd_inner = fd_gradient(
      [&](std::span<const double> p) {
        std::copy(p.begin(), p.end(), inner_probe.params().begin());
        return compose(outer, inner_probe).forward(x)[0];
      },
      inner.params());
  EXPECT_LE(rel_err(g_inner, fd_inner), 1e-5);
}

TEST(Compose, ChainRuleAgainstExplicitJacobian) {
  Prng rng(23);
  auto outer = gltest::random_net(rng, {3, 7, 1}, Activation::softplus(), Activation::identity());
  auto inner = gltest::random_net(rng, {2, 5, 3}, Activation::tanh(), Activation::tanh());
  const Composite fg = compose(outer, inner);
  const auto x = gltest::random_point(rng, 2);

  const auto lhs = fg.grad_input(x);

  // J_g^T * grad f(g(x)) with the Jacobian assembled row by row via
  // per-output-coordinate input gradients of the inner net.
  const auto mid = forward(inner, x);
  const auto gf = grad_input(outer, mid);
  std::vector<double> rhs(2, 0.0);
  for (int o = 0; o < 3; ++o) {
    std::vector<double> basis(3, 0.0);
    basis[o] = 1.0;
    const auto jrow = input_vjp(inner, x, basis);
    for (int j = 0; j < 2; ++j) rhs[j] += jrow[j] * gf[o];
  }
  EXPECT_LE(rel_err(lhs, rhs), 1e-12);
}

TEST(Compose, DimensionMismatchRejected) {
  NetSpec a;
  a.layer_dims = {3, 1};
  NetSpec b;
  b.layer_dims = {2, 2};
  DenseNet outer(a), inner(b);
  EXPECT_THROW(compose(outer, inner), ShapeError);
}

TEST(DenseNet, ParamCountInvariant) {
  NetSpec spec;
  spec.layer_dims = {2, 128, 128, 128, 1};
  spec.hidden = Activation::leaky_relu(0.2);
  EXPECT_EQ(spec.param_count(), 2u * 128 + 128 + 128u * 128 + 128 + 128u * 128 + 128 + 128u + 1);
  EXPECT_THROW(DenseNet(spec, std::vector<double>(5, 0.0)), ShapeError);
}

TEST(DenseNet, BatchedPathMatchesSingle) {
  Prng rng(29);
  auto net = gltest::random_net(rng, {2, 9, 1}, Activation::leaky_relu(0.2), Activation::identity());
  const std::size_t n = 17;
  std::vector<double> X(n * 2);
  for (double& v : X) v = rng.normal();
  std::vector<double> Y(n), G(n * 2);
  forward_batch(net, X.data(), n, Y.data());
  grad_input_batch(net, X.data(), n, G.data());
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> x(X.data() + i * 2, 2);
    EXPECT_EQ(forward(net, x)[0], Y[i]);
    const auto g = grad_input(net, x);
    EXPECT_EQ(g[0], G[i * 2]);
    EXPECT_EQ(g[1], G[i * 2 + 1]);
  }
}

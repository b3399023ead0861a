#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/net.hpp"

namespace gradlayer {

enum class PenaltyKind { two_sided, one_sided };

struct PenaltyValue {
  double value = 0.0;
  // Set when ||grad_x f|| is exactly zero under the two-sided kind, where the
  // norm direction is not differentiable; the subgradient choice 0 is used.
  bool zero_norm = false;
};

struct PenaltyResult {
  double value = 0.0;
  std::vector<double> grad_params;
  bool zero_norm = false;
};

namespace detail {

// Parameter gradient of the gradient penalty, batched, via an analytic
// forward-over-reverse pass (no nested numerical differentiation).
//
// Writing g(tau) = grad_x f_tau(x) and rho for the penalty profile, the chain
// rule gives d rho(||g||)/d tau = (rho'(n)/n) * d(g . u)/d tau with u = g held
// fixed at its current value. The inner scalar s = u . grad_x f(x) is the
// directional derivative of f along u, computed by a tangent-augmented forward
// pass; one reverse sweep over that augmented program yields d s/d tau. Each
// layer carries a value stream (z, a) and a tangent stream (zdot, t):
//
//   z = W a_prev + b        zdot = W t_prev
//   a = act(z)              t    = act'(z) * zdot
//
// and the reverse recursion for adjoint pairs (abar, tbar) seeded with
// abar_L = 0, tbar_L = rho'(n)/n per sample is
//
//   zbar    = abar * act'(z) + tbar * act''(z) * zdot
//   zdotbar = tbar * act'(z)
//   dW     += zbar (x) a_prev + zdotbar (x) t_prev ,  db += zbar
//   abar_prev = W^T zbar ,  tbar_prev = W^T zdotbar
//
// The per-sample seed absorbs both the caller's coefficient and rho'(n)/n, so
// clamped samples (seed 0) contribute nothing.
inline std::vector<PenaltyValue> penalty_accum(const DenseNet& net, const double* X, std::size_t n,
                                               PenaltyKind kind, double coeff, double* grad) {
  if (net.output_dim() != 1) throw ShapeError("penalty_and_grad: net output must be scalar");
  const auto& dims = net.spec().layer_dims;
  const std::size_t L = net.num_affine();
  const int d = net.input_dim();

  ForwardTrace tr;
  forward_trace(net, X, n, tr);

  std::vector<double> G(n * static_cast<std::size_t>(d));
  {
    std::vector<double> ones(n, 1.0);
    reverse_pass(net, tr, ones.data(), G.data(), nullptr, nullptr);
  }

  std::vector<PenaltyValue> values(n);
  std::vector<double> seed(n, 0.0);  // coeff * rho'(norm)/norm per sample
  bool any_seed = false;
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double gij = G[i * d + j];
      norm2 += gij * gij;
    }
    const double norm = std::sqrt(norm2);
    if (kind == PenaltyKind::two_sided) {
      const double excess = norm - 1.0;
      values[i].value = excess * excess;
      if (norm == 0.0) {
        values[i].zero_norm = true;  // subgradient 0 for the norm direction
      } else {
        seed[i] = coeff * 2.0 * excess / norm;
      }
    } else {
      const double excess = norm > 1.0 ? norm - 1.0 : 0.0;
      values[i].value = excess * excess;
      if (excess > 0.0) seed[i] = coeff * 2.0 * excess / norm;
    }
    if (seed[i] != 0.0) any_seed = true;
  }
  if (!grad || !any_seed) return values;

  // Tangent forward with t_0 = G.
  std::vector<std::vector<double>> zdot(L), tstream(L + 1);
  tstream[0] = G;
  {
    std::vector<double> wt;
    for (std::size_t l = 0; l < L; ++l) {
      const int in = dims[l], out = dims[l + 1];
      zdot[l].resize(n * static_cast<std::size_t>(out));
      std::vector<double> zero_bias(out, 0.0);
      affine_forward(tstream[l].data(), n, in, out, net.weights(l), zero_bias.data(), zdot[l].data(), wt);
      const Activation& a = net.spec().activation_at(l);
      tstream[l + 1].resize(zdot[l].size());
      for (std::size_t i = 0; i < zdot[l].size(); ++i) {
        tstream[l + 1][i] = a.deriv(tr.pre[l][i]) * zdot[l][i];
      }
    }
  }

  // Reverse sweep over the augmented program.
  std::vector<double> abar(n, 0.0), tbar = seed;
  std::vector<double> zbar, zdotbar, abar_prev, tbar_prev;
  for (std::size_t l = L; l-- > 0;) {
    const int in = dims[l], out = dims[l + 1];
    const Activation& a = net.spec().activation_at(l);
    const std::size_t count = n * static_cast<std::size_t>(out);
    zbar.resize(count);
    zdotbar.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double d1 = a.deriv(tr.pre[l][i]);
      const double d2 = a.deriv2(tr.pre[l][i]);
      zbar[i] = abar[i] * d1 + tbar[i] * d2 * zdot[l][i];
      zdotbar[i] = tbar[i] * d1;
    }
    affine_accum_params(tr.act[l].data(), n, in, out, zbar.data(), nullptr,
                        grad + net.weight_offset(l), grad + net.bias_offset(l));
    affine_accum_params(tstream[l].data(), n, in, out, zdotbar.data(), nullptr,
                        grad + net.weight_offset(l), nullptr);
    if (l == 0) break;
    abar_prev.resize(n * static_cast<std::size_t>(in));
    tbar_prev.resize(n * static_cast<std::size_t>(in));
    affine_backward_input(zbar.data(), n, in, out, net.weights(l), abar_prev.data());
    affine_backward_input(zdotbar.data(), n, in, out, net.weights(l), tbar_prev.data());
    abar.swap(abar_prev);
    tbar.swap(tbar_prev);
  }
  return values;
}

}  // namespace detail

/// Gradient penalty at one interpolate: (||grad_x f(x)|| - 1)^2 two-sided, or
/// its one-sided clamp, together with its parameter gradient via double
/// backprop.
inline PenaltyResult penalty_and_grad(const DenseNet& net, std::span<const double> x,
                                      PenaltyKind kind) {
  if (static_cast<int>(x.size()) != net.input_dim()) {
    throw ShapeError("penalty_and_grad: input dim mismatch");
  }
  PenaltyResult res;
  res.grad_params.assign(net.params().size(), 0.0);
  const auto vals = detail::penalty_accum(net, x.data(), 1, kind, 1.0, res.grad_params.data());
  res.value = vals[0].value;
  res.zero_norm = vals[0].zero_norm;
  return res;
}

}  // namespace gradlayer

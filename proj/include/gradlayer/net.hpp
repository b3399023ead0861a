#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gradlayer/activation.hpp"
#include "gradlayer/errors.hpp"
#include "gradlayer/rng.hpp"

namespace gradlayer {

/// Architecture of a dense feed-forward network. layer_dims runs from input
/// to output; the hidden activation applies to every affine layer except the
/// last, which gets the output activation.
struct NetSpec {
  std::vector<int> layer_dims;
  Activation hidden = Activation::identity();
  Activation output = Activation::identity();

  bool operator==(const NetSpec&) const = default;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t num_affine() const { return layer_dims.size() - 1; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
      n += static_cast<std::size_t>(layer_dims[l]) * layer_dims[l + 1] + layer_dims[l + 1];
    }
    return n;
  }

  const Activation& activation_at(std::size_t layer) const {
    return layer + 1 == num_affine() ? output : hidden;
  }

  void validate() const {
    if (layer_dims.size() < 2) throw ShapeError("NetSpec: need at least input and output dims");
    for (int d : layer_dims) {
      if (d <= 0) throw ShapeError("NetSpec: layer dims must be positive");
    }
  }
};

/// Dense feed-forward network over a single flat parameter vector.
/// Per affine layer the layout is the weight matrix row-major (out x in)
/// followed by the bias, layers in input-to-output order.
class DenseNet {
 public:
  DenseNet() = default;

  explicit DenseNet(NetSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    params_.assign(spec_.param_count(), 0.0);
    index_offsets();
  }

  DenseNet(NetSpec spec, std::vector<double> params)
      : spec_(std::move(spec)), params_(std::move(params)) {
    spec_.validate();
    if (params_.size() != spec_.param_count()) {
      throw ShapeError("DenseNet: params length does not match spec");
    }
    index_offsets();
  }

  /// Weights ~ uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(...)), biases zero.
  static DenseNet glorot_uniform_init(NetSpec spec, Prng& rng) {
    DenseNet net(std::move(spec));
    const auto& dims = net.spec_.layer_dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      const double bound = std::sqrt(6.0 / (dims[l] + dims[l + 1]));
      double* w = net.params_.data() + net.weight_offsets_[l];
      const std::size_t count = static_cast<std::size_t>(dims[l]) * dims[l + 1];
      for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-bound, bound);
    }
    return net;
  }

  bool operator==(const DenseNet& other) const {
    return spec_ == other.spec_ && params_ == other.params_;
  }

  const NetSpec& spec() const { return spec_; }
  int input_dim() const { return spec_.input_dim(); }
  int output_dim() const { return spec_.output_dim(); }
  std::size_t num_affine() const { return spec_.num_affine(); }

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  const double* weights(std::size_t layer) const { return params_.data() + weight_offsets_[layer]; }
  const double* biases(std::size_t layer) const { return params_.data() + bias_offsets_[layer]; }
  std::size_t weight_offset(std::size_t layer) const { return weight_offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return bias_offsets_[layer]; }

 private:
  void index_offsets() {
    const auto& dims = spec_.layer_dims;
    weight_offsets_.clear();
    bias_offsets_.clear();
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      weight_offsets_.push_back(off);
      off += static_cast<std::size_t>(dims[l]) * dims[l + 1];
      bias_offsets_.push_back(off);
      off += dims[l + 1];
    }
  }

  NetSpec spec_;
  std::vector<double> params_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> bias_offsets_;
};

namespace detail {

// Z = X * W^T + b. X is n x in, W is out x in row-major. The weight matrix is
// transposed into scratch so the inner accumulation runs over contiguous
// independent outputs (vectorizes without reassociating any single sum).
inline void affine_forward(const double* X, std::size_t n, int in, int out, const double* W,
                           const double* b, double* Z, std::vector<double>& wt) {
  wt.resize(static_cast<std::size_t>(in) * out);
  for (int o = 0; o < out; ++o) {
    for (int k = 0; k < in; ++k) wt[static_cast<std::size_t>(k) * out + o] = W[static_cast<std::size_t>(o) * in + k];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = X + i * in;
    double* z = Z + i * out;
    std::copy(b, b + out, z);
    for (int k = 0; k < in; ++k) {
      const double xk = x[k];
      const double* wrow = wt.data() + static_cast<std::size_t>(k) * out;
      for (int o = 0; o < out; ++o) z[o] += xk * wrow[o];
    }
  }
}

// dX = dZ * W (overwrites dX). dZ is n x out, W is out x in row-major.
inline void affine_backward_input(const double* dZ, std::size_t n, int in, int out, const double* W,
                                  double* dX) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* dz = dZ + i * out;
    double* dx = dX + i * in;
    std::fill(dx, dx + in, 0.0);
    for (int o = 0; o < out; ++o) {
      const double c = dz[o];
      const double* wrow = W + static_cast<std::size_t>(o) * in;
      for (int k = 0; k < in; ++k) dx[k] += c * wrow[k];
    }
  }
}

// gW[o][k] += c_i * dz[o] * x[k] and, when gb is given, gb[o] += c_i * dz[o],
// accumulated in sample order. gb stays null for bias-free affine maps
// (tangent streams).
inline void affine_accum_params(const double* X, std::size_t n, int in, int out, const double* dZ,
                                const double* coeff, double* gW, double* gb) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ci = coeff ? coeff[i] : 1.0;
    const double* x = X + i * in;
    const double* dz = dZ + i * out;
    for (int o = 0; o < out; ++o) {
      const double c = ci * dz[o];
      double* grow = gW + static_cast<std::size_t>(o) * in;
      for (int k = 0; k < in; ++k) grow[k] += c * x[k];
      if (gb) gb[o] += c;
    }
  }
}

/// Batched forward pass keeping pre-activations and activations per layer.
/// act[0] holds the input batch; act[l] / pre[l] correspond to affine layer l-1.
struct ForwardTrace {
  std::size_t n = 0;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

inline void forward_trace(const DenseNet& net, const double* X, std::size_t n, ForwardTrace& tr) {
  const auto& dims = net.spec().layer_dims;
  const std::size_t L = net.num_affine();
  tr.n = n;
  tr.pre.resize(L);
  tr.act.resize(L + 1);
  tr.act[0].assign(X, X + n * static_cast<std::size_t>(dims[0]));
  std::vector<double> wt;
  for (std::size_t l = 0; l < L; ++l) {
    const int in = dims[l], out = dims[l + 1];
    tr.pre[l].resize(n * static_cast<std::size_t>(out));
    affine_forward(tr.act[l].data(), n, in, out, net.weights(l), net.biases(l), tr.pre[l].data(), wt);
    const Activation& a = net.spec().activation_at(l);
    tr.act[l + 1].resize(tr.pre[l].size());
    for (std::size_t i = 0; i < tr.pre[l].size(); ++i) tr.act[l + 1][i] = a.value(tr.pre[l][i]);
  }
}

// Shared reverse pass over a traced forward. upstream is n x out_dim.
// Writes input gradients (n x in_dim) when input_grads != nullptr and
// accumulates parameter gradients (with optional per-sample coefficients)
// when param_grad != nullptr.
inline void reverse_pass(const DenseNet& net, const ForwardTrace& tr, const double* upstream,
                         double* input_grads, double* param_grad, const double* coeff) {
  const auto& dims = net.spec().layer_dims;
  const std::size_t L = net.num_affine();
  const std::size_t n = tr.n;

  std::vector<double> dz(tr.pre[L - 1].size());
  {
    const Activation& a = net.spec().activation_at(L - 1);
    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = upstream[i] * a.deriv(tr.pre[L - 1][i]);
  }

  std::vector<double> dx;
  for (std::size_t l = L; l-- > 0;) {
    const int in = dims[l], out = dims[l + 1];
    if (param_grad) {
      affine_accum_params(tr.act[l].data(), n, in, out, dz.data(), coeff,
                          param_grad + net.weight_offset(l), param_grad + net.bias_offset(l));
    }
    if (l == 0 && !input_grads) break;
    dx.resize(n * static_cast<std::size_t>(in));
    affine_backward_input(dz.data(), n, in, out, net.weights(l), dx.data());
    if (l == 0) {
      std::copy(dx.begin(), dx.end(), input_grads);
      break;
    }
    const Activation& a = net.spec().activation_at(l - 1);
    dz.resize(dx.size());
    for (std::size_t i = 0; i < dx.size(); ++i) dz[i] = dx[i] * a.deriv(tr.pre[l - 1][i]);
  }
}

}  // namespace detail

inline void forward_batch(const DenseNet& net, const double* X, std::size_t n, double* Y) {
  detail::ForwardTrace tr;
  detail::forward_trace(net, X, n, tr);
  std::copy(tr.act.back().begin(), tr.act.back().end(), Y);
}

inline std::vector<double> forward(const DenseNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim()) throw ShapeError("forward: input dim mismatch");
  std::vector<double> y(net.output_dim());
  forward_batch(net, x.data(), 1, y.data());
  return y;
}

/// Gradient of upstream . net(x) with respect to the flat parameter vector.
inline std::vector<double> backward_params(const DenseNet& net, std::span<const double> x,
                                           std::span<const double> upstream) {
  if (static_cast<int>(x.size()) != net.input_dim()) throw ShapeError("backward_params: input dim mismatch");
  if (static_cast<int>(upstream.size()) != net.output_dim()) {
    throw ShapeError("backward_params: upstream dim mismatch");
  }
  detail::ForwardTrace tr;
  detail::forward_trace(net, x.data(), 1, tr);
  std::vector<double> grad(net.params().size(), 0.0);
  detail::reverse_pass(net, tr, upstream.data(), nullptr, grad.data(), nullptr);
  return grad;
}

/// Batched parameter-gradient accumulation: grad += sum_i coeff[i] *
/// d(upstream_i . net(X_i))/dparams, in fixed sample order.
inline void backward_params_accum(const DenseNet& net, const double* X, std::size_t n,
                                  const double* upstream, const double* coeff, double* grad) {
  detail::ForwardTrace tr;
  detail::forward_trace(net, X, n, tr);
  detail::reverse_pass(net, tr, upstream, nullptr, grad, coeff);
}

/// d net(x) / dx for scalar-output nets, batched over rows of X.
inline void grad_input_batch(const DenseNet& net, const double* X, std::size_t n, double* G) {
  if (net.output_dim() != 1) throw ShapeError("grad_input: net output must be scalar");
  detail::ForwardTrace tr;
  detail::forward_trace(net, X, n, tr);
  std::vector<double> ones(n, 1.0);
  detail::reverse_pass(net, tr, ones.data(), G, nullptr, nullptr);
}

inline std::vector<double> grad_input(const DenseNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.input_dim()) throw ShapeError("grad_input: input dim mismatch");
  std::vector<double> g(net.input_dim());
  grad_input_batch(net, x.data(), 1, g.data());
  return g;
}

/// Vector-Jacobian product through the input: d(upstream . net(x))/dx.
inline std::vector<double> input_vjp(const DenseNet& net, std::span<const double> x,
                                     std::span<const double> upstream) {
  if (static_cast<int>(x.size()) != net.input_dim()) throw ShapeError("input_vjp: input dim mismatch");
  if (static_cast<int>(upstream.size()) != net.output_dim()) throw ShapeError("input_vjp: upstream dim mismatch");
  detail::ForwardTrace tr;
  detail::forward_trace(net, x.data(), 1, tr);
  std::vector<double> g(net.input_dim());
  detail::reverse_pass(net, tr, upstream.data(), g.data(), nullptr, nullptr);
  return g;
}

/// Two nets chained as outer(inner(x)). Non-owning views; parameter gradients
/// stay separable per part.
class Composite {
 public:
  Composite(const DenseNet& outer, const DenseNet& inner) : outer_(&outer), inner_(&inner) {
    if (inner.output_dim() != outer.input_dim()) {
      throw ShapeError("compose: inner output dim != outer input dim");
    }
  }

  const DenseNet& outer() const { return *outer_; }
  const DenseNet& inner() const { return *inner_; }
  int input_dim() const { return inner_->input_dim(); }
  int output_dim() const { return outer_->output_dim(); }

  std::vector<double> forward(std::span<const double> x) const {
    const auto mid = gradlayer::forward(*inner_, x);
    return gradlayer::forward(*outer_, mid);
  }

  std::vector<double> grad_input(std::span<const double> x) const {
    if (outer_->output_dim() != 1) throw ShapeError("grad_input: composite output must be scalar");
    const auto mid = gradlayer::forward(*inner_, x);
    const auto g_mid = gradlayer::grad_input(*outer_, mid);
    return gradlayer::input_vjp(*inner_, x, g_mid);
  }

  void grad_input_batch(const double* X, std::size_t n, double* G) const {
    if (outer_->output_dim() != 1) throw ShapeError("grad_input: composite output must be scalar");
    const std::size_t mid_dim = static_cast<std::size_t>(inner_->output_dim());
    detail::ForwardTrace tin;
    detail::forward_trace(*inner_, X, n, tin);
    detail::ForwardTrace tout;
    detail::forward_trace(*outer_, tin.act.back().data(), n, tout);
    std::vector<double> ones(n, 1.0);
    std::vector<double> g_mid(n * mid_dim);
    detail::reverse_pass(*outer_, tout, ones.data(), g_mid.data(), nullptr, nullptr);
    detail::reverse_pass(*inner_, tin, g_mid.data(), G, nullptr, nullptr);
  }

  std::vector<double> backward_params_outer(std::span<const double> x,
                                            std::span<const double> upstream) const {
    const auto mid = gradlayer::forward(*inner_, x);
    return gradlayer::backward_params(*outer_, mid, upstream);
  }

  std::vector<double> backward_params_inner(std::span<const double> x,
                                            std::span<const double> upstream) const {
    const auto mid = gradlayer::forward(*inner_, x);
    const auto d_mid = gradlayer::input_vjp(*outer_, mid, upstream);
    return gradlayer::backward_params(*inner_, x, d_mid);
  }

 private:
  const DenseNet* outer_;
  const DenseNet* inner_;
};

inline Composite compose(const DenseNet& outer, const DenseNet& inner) { return {outer, inner}; }

}  // namespace gradlayer

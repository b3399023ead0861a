#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gradlayer/activation.hpp"
#include "gradlayer/errors.hpp"
#include "gradlayer/wgan.hpp"

namespace gradlayer {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Flat key = value file. '#' starts a comment, blank lines are ignored,
/// duplicate keys keep the last value.
class KvConfig {
 public:
  static KvConfig parse(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = std::string(trim(trimmed.substr(0, eq)));
      const std::string value = std::string(trim(trimmed.substr(eq + 1)));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      }
      cfg.set(key, value);
    }
    return cfg;
  }

  static KvConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
  }

  void set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(key, value);
  }

  const std::string* find(std::string_view key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  std::string get(const std::string& key) const {
    if (const auto* v = find(key)) return *v;
    throw ConfigError("missing config key: " + key);
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& key, std::optional<double> fallback = {}) const {
    const auto* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing config key: " + key);
    }
    return parse_double(key, *v);
  }

  long long get_int(const std::string& key, std::optional<long long> fallback = {}) const {
    const auto* v = find(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing config key: " + key);
    }
    try {
      std::size_t used = 0;
      const long long out = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": not an integer: " + *v);
    }
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": not a number: " + v);
    }
  }

  std::vector<std::pair<std::string, std::string>> entries_;
};

namespace detail {

inline Activation parse_activation(const std::string& text) {
  if (text == "identity") return Activation::identity();
  if (text == "relu") return Activation::relu();
  if (text == "tanh") return Activation::tanh();
  if (text == "softplus") return Activation::softplus();
  if (text.rfind("leaky_relu", 0) == 0) {
    double slope = 0.2;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
      try {
        slope = std::stod(text.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError("bad leaky_relu slope: " + text);
      }
    }
    try {
      return Activation::leaky_relu(slope);
    } catch (const ShapeError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown activation: " + text);
}

inline std::string activation_name(const Activation& a) {
  switch (a.kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "leaky_relu:%.17g", a.slope);
      return buf;
    }
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::softplus: return "softplus";
  }
  return "identity";
}

}  // namespace detail

/// Fully resolved run settings. `dataset` and `seed` must be present in the
/// config file; everything else defaults to the toy-experiment values.
struct RunSetup {
  std::string dataset;
  std::size_t data_size = 500;
  double noise_std = 0.5;
  int noise_dim = 2;  // latent dimension, assist mode
  int critic_hidden = 128;
  int critic_hidden_layers = 3;
  Activation critic_activation = Activation::leaky_relu(0.2);
  int generator_hidden = 32;
  int generator_hidden_layers = 2;
  TrainConfig train;

  static const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "dataset",       "seed",
        "data_size",     "noise_std",
        "noise_dim",     "critic_hidden",
        "critic_hidden_layers", "critic_activation",
        "generator_hidden", "generator_hidden_layers",
        "batch",         "T",
        "T0",            "lambda",
        "penalty",       "eta",
        "optimizer",     "adam_alpha",
        "adam_beta1",    "adam_beta2",
        "adam_eps",      "rmsprop_lr",
        "rmsprop_decay", "rmsprop_eps",
        "momentum_lr",   "momentum",
        "assist_layers", "squash",
        "w1_every",
    };
    return keys;
  }

  static RunSetup from_config(const KvConfig& cfg) {
    for (const auto& [key, value] : cfg.entries()) {
      (void)value;
      const auto& keys = known_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ConfigError("unknown config key: " + key);
      }
    }

    RunSetup s;
    s.dataset = cfg.get("dataset");
    if (s.dataset != "eight_gaussians" && s.dataset != "twenty_five_gaussians" &&
        s.dataset != "swiss_roll") {
      throw ConfigError("unknown dataset: " + s.dataset);
    }
    s.train.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    s.data_size = static_cast<std::size_t>(cfg.get_int("data_size", 500));
    s.noise_std = cfg.get_double("noise_std", 0.5);
    s.noise_dim = static_cast<int>(cfg.get_int("noise_dim", 2));
    s.critic_hidden = static_cast<int>(cfg.get_int("critic_hidden", 128));
    s.critic_hidden_layers = static_cast<int>(cfg.get_int("critic_hidden_layers", 3));
    s.critic_activation = detail::parse_activation(cfg.get_or("critic_activation", "leaky_relu:0.2"));
    s.generator_hidden = static_cast<int>(cfg.get_int("generator_hidden", 32));
    s.generator_hidden_layers = static_cast<int>(cfg.get_int("generator_hidden_layers", 2));

    s.train.batch = static_cast<int>(cfg.get_int("batch", 50));
    s.train.outer_iters = static_cast<int>(cfg.get_int("T", 100));
    s.train.critic_iters = static_cast<int>(cfg.get_int("T0", 50));
    s.train.lambda = cfg.get_double("lambda", 10.0);
    s.train.eta = cfg.get_double("eta", 0.1);
    s.train.assist_layers = static_cast<int>(cfg.get_int("assist_layers", 1));
    s.train.w1_every = static_cast<int>(cfg.get_int("w1_every", 10));

    const std::string penalty = cfg.get_or("penalty", "one_sided");
    if (penalty == "one_sided") {
      s.train.penalty = PenaltyKind::one_sided;
    } else if (penalty == "two_sided") {
      s.train.penalty = PenaltyKind::two_sided;
    } else {
      throw ConfigError("unknown penalty kind: " + penalty);
    }

    const std::string squash = cfg.get_or("squash", "none");
    if (squash == "none") {
      s.train.squash = Squash::none;
    } else if (squash == "tanh") {
      s.train.squash = Squash::tanh_output;
    } else {
      throw ConfigError("unknown squash mode: " + squash);
    }

    const std::string opt = cfg.get_or("optimizer", "adam");
    if (opt == "adam") {
      s.train.optimizer = OptimizerConfig::adam(
          cfg.get_double("adam_alpha", 1e-4), cfg.get_double("adam_beta1", 0.5),
          cfg.get_double("adam_beta2", 0.9), cfg.get_double("adam_eps", 1e-8));
    } else if (opt == "rmsprop") {
      s.train.optimizer = OptimizerConfig::rmsprop(cfg.get_double("rmsprop_lr", 1e-4),
                                                   cfg.get_double("rmsprop_decay", 0.9),
                                                   cfg.get_double("rmsprop_eps", 1e-8));
    } else if (opt == "sgd_momentum") {
      s.train.optimizer = OptimizerConfig::sgd_momentum(cfg.get_double("momentum_lr", 1e-4),
                                                        cfg.get_double("momentum", 0.9));
    } else {
      throw ConfigError("unknown optimizer: " + opt);
    }

    try {
      s.train.validate();
    } catch (const ShapeError& e) {
      throw ConfigError(e.what());
    }
    if (s.data_size == 0) throw ConfigError("data_size must be >= 1");
    if (s.critic_hidden < 1 || s.critic_hidden_layers < 1) {
      throw ConfigError("critic architecture fields must be >= 1");
    }
    return s;
  }

  NetSpec critic_spec(int data_dim) const {
    NetSpec spec;
    spec.layer_dims.push_back(data_dim);
    for (int i = 0; i < critic_hidden_layers; ++i) spec.layer_dims.push_back(critic_hidden);
    spec.layer_dims.push_back(1);
    spec.hidden = critic_activation;
    spec.output = Activation::identity();
    return spec;
  }

  NetSpec generator_spec(int data_dim) const {
    NetSpec spec;
    spec.layer_dims.push_back(noise_dim);
    for (int i = 0; i < generator_hidden_layers; ++i) spec.layer_dims.push_back(generator_hidden);
    spec.layer_dims.push_back(data_dim);
    spec.hidden = Activation::tanh();
    spec.output = Activation::identity();
    return spec;
  }

  /// Canonical text covering every numerics-relevant field; its FNV-1a hash
  /// is the run's config hash.
  std::string canonical() const {
    std::vector<std::pair<std::string, std::string>> kv;
    const auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    kv.emplace_back("dataset", dataset);
    kv.emplace_back("data_size", std::to_string(data_size));
    kv.emplace_back("noise_std", num(noise_std));
    kv.emplace_back("noise_dim", std::to_string(noise_dim));
    kv.emplace_back("critic_hidden", std::to_string(critic_hidden));
    kv.emplace_back("critic_hidden_layers", std::to_string(critic_hidden_layers));
    kv.emplace_back("critic_activation", detail::activation_name(critic_activation));
    kv.emplace_back("generator_hidden", std::to_string(generator_hidden));
    kv.emplace_back("generator_hidden_layers", std::to_string(generator_hidden_layers));
    kv.emplace_back("batch", std::to_string(train.batch));
    kv.emplace_back("T", std::to_string(train.outer_iters));
    kv.emplace_back("T0", std::to_string(train.critic_iters));
    kv.emplace_back("lambda", num(train.lambda));
    kv.emplace_back("eta", num(train.eta));
    kv.emplace_back("penalty", train.penalty == PenaltyKind::one_sided ? "one_sided" : "two_sided");
    kv.emplace_back("squash", train.squash == Squash::none ? "none" : "tanh");
    kv.emplace_back("assist_layers", std::to_string(train.assist_layers));
    kv.emplace_back("w1_every", std::to_string(train.w1_every));
    kv.emplace_back("seed", std::to_string(train.seed));
    switch (train.optimizer.kind) {
      case OptimizerKind::adam:
        kv.emplace_back("optimizer", "adam");
        kv.emplace_back("adam_alpha", num(train.optimizer.lr));
        kv.emplace_back("adam_beta1", num(train.optimizer.beta1));
        kv.emplace_back("adam_beta2", num(train.optimizer.beta2));
        kv.emplace_back("adam_eps", num(train.optimizer.eps));
        break;
      case OptimizerKind::rmsprop:
        kv.emplace_back("optimizer", "rmsprop");
        kv.emplace_back("rmsprop_lr", num(train.optimizer.lr));
        kv.emplace_back("rmsprop_decay", num(train.optimizer.decay));
        kv.emplace_back("rmsprop_eps", num(train.optimizer.eps));
        break;
      case OptimizerKind::sgd_momentum:
        kv.emplace_back("optimizer", "sgd_momentum");
        kv.emplace_back("momentum_lr", num(train.optimizer.lr));
        kv.emplace_back("momentum", num(train.optimizer.momentum));
        break;
    }
    // fixed toy-geometry constants participate in the hash as well
    kv.emplace_back("toy_rescale", "2.1");
    kv.emplace_back("eight_gaussians_layout", "radius2_std0.02");
    kv.emplace_back("twenty_five_gaussians_layout", "grid2_std0.05");
    kv.emplace_back("swiss_roll_layout", "turns1.5-4.5pi_std0.01");

    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) {
      out += k;
      out += '=';
      out += v;
      out += '\n';
    }
    return out;
  }

  std::uint64_t config_hash() const { return fnv1a64(canonical()); }
};

}  // namespace gradlayer

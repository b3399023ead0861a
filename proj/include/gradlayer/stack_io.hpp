#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gradlayer/gradient_layer.hpp"

namespace gradlayer {

/// Stack file errors, one kind per failure mode so callers can tell a missing
/// file from a corrupt one.
class StackIoError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, bad_version, truncated };

  StackIoError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

constexpr char kStackMagic[5] = {'G', 'L', 'S', 'T', 'K'};
constexpr std::uint32_t kStackVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  std::uint32_t u32() {
    const char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
  }

  double f64() {
    const char* p = take(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return std::bit_cast<double>(bits);
  }

  const char* take(std::size_t n) {
    if (pos_ + n > size_) throw StackIoError(StackIoError::Kind::truncated, "stack file: truncated payload");
    const char* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  bool exhausted() const { return pos_ == size_; }

 private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Serializes a stack to the self-describing binary layout:
/// magic "GLSTK", version u32, eta f64, hidden-activation tag u8 (+ slope f64
/// for leaky_relu), layer count u32 and dims u32[], checkpoint count u32, then
/// each checkpoint's flat f64 parameter vector. Little-endian throughout.
/// The format carries a single activation tag, so stacks require critics with
/// an identity output activation (the usual scalar critic head).
inline void save_stack(const GradientLayerStack& stack, const std::string& path) {
  const NetSpec& spec = stack.base_spec();
  if (!(spec.output == Activation::identity())) {
    throw StackIoError(StackIoError::Kind::io,
                       "stack file: format only represents critics with identity output activation");
  }
  std::string buf;
  buf.append(detail::kStackMagic, sizeof(detail::kStackMagic));
  detail::put_u32(buf, detail::kStackVersion);
  detail::put_f64(buf, stack.eta());
  buf.push_back(static_cast<char>(spec.hidden.kind));
  if (spec.hidden.kind == ActivationKind::leaky_relu) detail::put_f64(buf, spec.hidden.slope);
  detail::put_u32(buf, static_cast<std::uint32_t>(spec.layer_dims.size()));
  for (int d : spec.layer_dims) detail::put_u32(buf, static_cast<std::uint32_t>(d));
  detail::put_u32(buf, static_cast<std::uint32_t>(stack.size()));
  for (std::size_t k = 0; k < stack.size(); ++k) {
    for (double v : stack.checkpoint(k).params()) detail::put_f64(buf, v);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StackIoError(StackIoError::Kind::io, "stack file: cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw StackIoError(StackIoError::Kind::io, "stack file: write failed: " + path);
}

namespace detail {

constexpr char kNetMagic[5] = {'G', 'L', 'N', 'E', 'T'};

inline void put_activation(std::string& buf, const Activation& a) {
  buf.push_back(static_cast<char>(a.kind));
  if (a.kind == ActivationKind::leaky_relu) put_f64(buf, a.slope);
}

inline Activation read_activation(Reader& r) {
  switch (static_cast<ActivationKind>(r.u8())) {
    case ActivationKind::identity: return Activation::identity();
    case ActivationKind::relu: return Activation::relu();
    case ActivationKind::leaky_relu: return Activation::leaky_relu(r.f64());
    case ActivationKind::tanh: return Activation::tanh();
    case ActivationKind::softplus: return Activation::softplus();
    default:
      throw StackIoError(StackIoError::Kind::truncated, "net file: unknown activation tag");
  }
}

}  // namespace detail

/// Single-network container (assist-mode critics and generators): magic
/// "GLNET", version u32, hidden and output activations, dims, flat params.
inline void save_net(const DenseNet& net, const std::string& path) {
  std::string buf;
  buf.append(detail::kNetMagic, sizeof(detail::kNetMagic));
  detail::put_u32(buf, detail::kStackVersion);
  detail::put_activation(buf, net.spec().hidden);
  detail::put_activation(buf, net.spec().output);
  detail::put_u32(buf, static_cast<std::uint32_t>(net.spec().layer_dims.size()));
  for (int d : net.spec().layer_dims) detail::put_u32(buf, static_cast<std::uint32_t>(d));
  for (double v : net.params()) detail::put_f64(buf, v);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StackIoError(StackIoError::Kind::io, "net file: cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw StackIoError(StackIoError::Kind::io, "net file: write failed: " + path);
}

inline DenseNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StackIoError(StackIoError::Kind::io, "net file: cannot open for reading: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw StackIoError(StackIoError::Kind::io, "net file: read failed: " + path);

  detail::Reader r(buf.data(), buf.size());
  if (std::memcmp(r.take(sizeof(detail::kNetMagic)), detail::kNetMagic, sizeof(detail::kNetMagic)) != 0) {
    throw StackIoError(StackIoError::Kind::bad_magic, "net file: bad magic bytes");
  }
  const std::uint32_t version = r.u32();
  if (version != detail::kStackVersion) {
    throw StackIoError(StackIoError::Kind::bad_version,
                       "net file: unsupported version " + std::to_string(version));
  }
  NetSpec spec;
  spec.hidden = detail::read_activation(r);
  spec.output = detail::read_activation(r);
  const std::uint32_t layer_count = r.u32();
  if (layer_count < 2) throw StackIoError(StackIoError::Kind::truncated, "net file: bad layer count");
  for (std::uint32_t i = 0; i < layer_count; ++i) spec.layer_dims.push_back(static_cast<int>(r.u32()));
  try {
    spec.validate();
  } catch (const ShapeError& e) {
    throw StackIoError(StackIoError::Kind::truncated, std::string("net file: ") + e.what());
  }
  std::vector<double> params(spec.param_count());
  for (double& v : params) v = r.f64();
  if (!r.exhausted()) {
    throw StackIoError(StackIoError::Kind::truncated, "net file: trailing bytes after payload");
  }
  return DenseNet(std::move(spec), std::move(params));
}

inline GradientLayerStack load_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StackIoError(StackIoError::Kind::io, "stack file: cannot open for reading: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw StackIoError(StackIoError::Kind::io, "stack file: read failed: " + path);

  detail::Reader r(buf.data(), buf.size());
  const char* magic = r.take(sizeof(detail::kStackMagic));
  if (std::memcmp(magic, detail::kStackMagic, sizeof(detail::kStackMagic)) != 0) {
    throw StackIoError(StackIoError::Kind::bad_magic, "stack file: bad magic bytes");
  }
  const std::uint32_t version = r.u32();
  if (version != detail::kStackVersion) {
    throw StackIoError(StackIoError::Kind::bad_version,
                       "stack file: unsupported version " + std::to_string(version));
  }
  const double eta = r.f64();
  NetSpec spec;
  const auto tag = static_cast<ActivationKind>(r.u8());
  switch (tag) {
    case ActivationKind::identity: spec.hidden = Activation::identity(); break;
    case ActivationKind::relu: spec.hidden = Activation::relu(); break;
    case ActivationKind::leaky_relu: spec.hidden = Activation::leaky_relu(r.f64()); break;
    case ActivationKind::tanh: spec.hidden = Activation::tanh(); break;
    case ActivationKind::softplus: spec.hidden = Activation::softplus(); break;
    default:
      throw StackIoError(StackIoError::Kind::truncated, "stack file: unknown activation tag");
  }
  spec.output = Activation::identity();
  const std::uint32_t layer_count = r.u32();
  if (layer_count < 2) throw StackIoError(StackIoError::Kind::truncated, "stack file: bad layer count");
  for (std::uint32_t i = 0; i < layer_count; ++i) spec.layer_dims.push_back(static_cast<int>(r.u32()));

  GradientLayerStack stack = [&] {
    try {
      return GradientLayerStack(eta, spec);
    } catch (const ShapeError& e) {
      throw StackIoError(StackIoError::Kind::truncated, std::string("stack file: ") + e.what());
    }
  }();

  const std::uint32_t checkpoints = r.u32();
  const std::size_t param_count = spec.param_count();
  for (std::uint32_t k = 0; k < checkpoints; ++k) {
    std::vector<double> params(param_count);
    for (std::size_t i = 0; i < param_count; ++i) params[i] = r.f64();
    stack.append(DenseNet(spec, std::move(params)));
  }
  if (!r.exhausted()) {
    throw StackIoError(StackIoError::Kind::truncated, "stack file: trailing bytes after payload");
  }
  return stack;
}

}  // namespace gradlayer

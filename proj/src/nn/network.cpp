// Copyright 2026 The UTI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uti/nn/network.hpp"

#include <cmath>
#include <optional>

#include "uti/binio.hpp"
#include "uti/error.hpp"
#include "uti/simd/kernels.hpp"

namespace uti::nn {

Network::Network(const Shape& input, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_(input), specs_(std::move(specs)), rng_(seed) {
  if (specs_.empty()) throw Error(ErrorCode::Shape, "network needs at least one layer");
  if (input.channels < 1 || input.height < 1 || input.width < 1)
    throw Error(ErrorCode::Shape, "input shape must be positive");
  Shape cur = input;
  for (const auto& s : specs_) {
    layers_.push_back(make_layer(s, cur));
    cur = layers_.back()->output_shape();
  }
  for (auto& l : layers_) l->init(rng_);
  acts_.resize(layers_.size() + 1);
}

Network::Network(const Network& other)
    : input_(other.input_), specs_(other.specs_), rng_(other.rng_) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
  acts_.resize(layers_.size() + 1);
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

std::vector<Param> Network::params() {
  std::vector<Param> out;
  for (auto& l : layers_)
    for (auto& p : l->params()) out.push_back(p);
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_)
    for (const auto& p : const_cast<Layer&>(*l).params()) n += p.value.size();
  return n;
}

void Network::zero_grads() {
  for (auto& p : params()) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

const Matrix& Network::forward(const Matrix& batch, Mode mode) {
  if (batch.cols() != input_.size())
    throw Error(ErrorCode::Shape, "network expects " + std::to_string(input_.size()) +
                                      " input features, got " + std::to_string(batch.cols()));
  const Matrix* cur = &batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->forward(*cur, acts_[i + 1], mode, rng_);
    cur = &acts_[i + 1];
  }
  return *cur;
}

double l2_penalty(Network& net) {
  double s = 0.0;
  for (const auto& p : net.params())
    if (p.is_weight) s += simd::kernels().dot(p.value.data(), p.value.data(), p.value.size());
  return s;
}

double Network::loss_and_grads(const Matrix& batch, std::span<const int> labels, double l2, Mode mode) {
  if (labels.size() != batch.rows())
    throw Error(ErrorCode::Shape, "label count does not match batch size");
  if (specs_.back().kind != LayerKind::SoftmaxOutput)
    throw Error(ErrorCode::Shape, "loss requires a SoftmaxOutput final layer");
  const int classes = specs_.back().a;
  for (int y : labels)
    if (y < 1 || y > classes) throw Error(ErrorCode::Shape, "label outside 1.." + std::to_string(classes));

  zero_grads();
  const Matrix& probs = forward(batch, mode);
  const std::size_t n = batch.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  double loss = 0.0;
  // Softmax and cross-entropy combine to (p - y) / n at the logits.
  Matrix* g = &grad_a_;
  Matrix* g_next = &grad_b_;
  g->resize(n, classes);
  for (std::size_t r = 0; r < n; ++r) {
    const auto p = probs.row(r);
    const int y = labels[r] - 1;
    loss -= std::log(std::max(p[y], 1e-300));
    auto gr = g->row(r);
    for (int j = 0; j < classes; ++j) gr[j] = (p[j] - (j == y ? 1.0 : 0.0)) * inv_n;
  }
  loss *= inv_n;

  // The SoftmaxOutput layer is folded into the logits gradient above.
  for (std::size_t i = layers_.size() - 1; i-- > 0;) {
    Matrix* din = i > 0 ? g_next : nullptr;
    layers_[i]->backward(i == 0 ? batch : acts_[i], acts_[i + 1], *g, din);
    if (din) std::swap(g, g_next);
  }

  if (l2 > 0.0) {
    for (auto& p : params()) {
      if (!p.is_weight) continue;
      loss += 0.5 * l2 * simd::kernels().dot(p.value.data(), p.value.data(), p.value.size());
      simd::kernels().axpy(l2, p.value.data(), p.grad.data(), p.value.size());
    }
  }
  return loss;
}

void validate(const SgdConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw Error(ErrorCode::Config, "learning_rate must be > 0");
  if (!(cfg.decay > 0.0 && cfg.decay <= 1.0)) throw Error(ErrorCode::Config, "decay must be in (0,1]");
  if (!(cfg.l2 >= 0.0)) throw Error(ErrorCode::Config, "l2 must be >= 0");
  if (cfg.batch_size < 1) throw Error(ErrorCode::Config, "batch_size must be >= 1");
  if (cfg.epochs < 0) throw Error(ErrorCode::Config, "epochs must be >= 0");
}

double effective_lr(const SgdConfig& cfg, int epoch) {
  return cfg.learning_rate * std::pow(cfg.decay, epoch);
}

void sgd_step(Network& net, double lr) {
  for (auto& p : net.params()) simd::kernels().axpy(-lr, p.grad.data(), p.value.data(), p.value.size());
}

// ---- architectures ----------------------------------------------------------

std::vector<LayerSpec> architecture(features::Variant variant, bool with_mean) {
  std::vector<LayerSpec> s;
  if (features::is_cnn(variant)) {
    s = {LayerSpec::conv2d(kCnnFilters, 8, 8), LayerSpec::relu(), LayerSpec::max_pool(2, 2),
         LayerSpec::conv2d(kCnnFilters, 4, 4), LayerSpec::relu(), LayerSpec::max_pool(2, 2),
         LayerSpec::flatten(),
         LayerSpec::dense(kHiddenUnits), LayerSpec::relu(), LayerSpec::dropout(kCnnDropout),
         LayerSpec::dense(kHiddenUnits), LayerSpec::relu(), LayerSpec::dropout(kCnnDropout),
         LayerSpec::dense(corpus::kNumClasses), LayerSpec::softmax(corpus::kNumClasses)};
    return s;
  }
  const int width = variant == features::Variant::DnnRaw && with_mean ? kHiddenUnitsRawWithMean
                                                                      : kHiddenUnits;
  for (int i = 0; i < 3; ++i) {
    s.push_back(LayerSpec::dense(width));
    s.push_back(LayerSpec::relu());
  }
  s.push_back(LayerSpec::dense(corpus::kNumClasses));
  s.push_back(LayerSpec::softmax(corpus::kNumClasses));
  return s;
}

Shape to_shape(const features::InputShape& s) { return {s.channels, s.height, s.width}; }

Network build_model(features::Variant variant, bool with_mean, const Shape& input, std::uint64_t seed) {
  if (features::is_cnn(variant)) {
    if (input.channels != (with_mean ? 2 : 1))
      throw Error(ErrorCode::Shape, "CNN input must have " + std::to_string(with_mean ? 2 : 1) +
                                        " channel(s), got " + to_string(input));
  } else if (input.channels != 1 || input.height != 1) {
    throw Error(ErrorCode::Shape, "DNN input must be a flat vector, got " + to_string(input));
  }
  return Network(input, architecture(variant, with_mean), seed);
}

// ---- checkpoints ------------------------------------------------------------

namespace {
constexpr std::string_view kMagic = "UTIC";
}

std::vector<std::uint8_t> serialize(Network& net) {
  binio::Writer w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  const Shape& in = net.input_shape();
  w.u32(static_cast<std::uint32_t>(in.channels));
  w.u32(static_cast<std::uint32_t>(in.height));
  w.u32(static_cast<std::uint32_t>(in.width));
  w.u32(static_cast<std::uint32_t>(net.specs().size()));
  for (const auto& s : net.specs()) {
    w.u32(static_cast<std::uint32_t>(s.kind));
    w.u32(static_cast<std::uint32_t>(s.a));
    w.u32(static_cast<std::uint32_t>(s.b));
    w.u32(static_cast<std::uint32_t>(s.c));
    w.f64(s.p);
  }
  const auto params = net.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) w.blob(p.value);
  return w.data();
}

Network deserialize(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes, ErrorCode::CorruptCheckpoint);
  if (r.bytes(4) != kMagic) r.fail("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::VersionMismatch, "checkpoint version " + std::to_string(version) +
                                                ", expected " + std::to_string(kCheckpointVersion));
  Shape in;
  in.channels = static_cast<int>(r.u32());
  in.height = static_cast<int>(r.u32());
  in.width = static_cast<int>(r.u32());
  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 4096) r.fail("bad layer count");
  std::vector<LayerSpec> specs;
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    LayerSpec s;
    const std::uint32_t kind = r.u32();
    if (kind < 1 || kind > static_cast<std::uint32_t>(LayerKind::SoftmaxOutput)) r.fail("bad layer kind");
    s.kind = static_cast<LayerKind>(kind);
    s.a = static_cast<int>(r.u32());
    s.b = static_cast<int>(r.u32());
    s.c = static_cast<int>(r.u32());
    s.p = r.f64();
    specs.push_back(s);
  }
  std::optional<Network> net;
  try {
    net.emplace(in, std::move(specs), 0);
  } catch (const Error& e) {
    r.fail(std::string("layer table does not build: ") + e.what());
  }
  auto params = net->params();
  if (r.u32() != params.size()) r.fail("parameter tensor count mismatch");
  for (auto& p : params) {
    const std::uint64_t n = r.u64();
    if (n != p.value.size()) r.fail("parameter tensor size mismatch");
    const auto values = r.f64s(n);
    std::copy(values.begin(), values.end(), p.value.begin());
  }
  if (!r.done()) r.fail("trailing bytes");
  return std::move(*net);
}

void save_checkpoint(Network& net, const std::filesystem::path& path) {
  binio::write_file(path, serialize(net));
}

Network load_checkpoint(const std::filesystem::path& path) {
  return deserialize(binio::read_file(path));
}

}  // namespace uti::nn

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "uti/features.hpp"
#include "uti/matrix.hpp"
#include "uti/nn/layers.hpp"

namespace uti::nn {

class Network {
 public:
  // Builds the layer stack, validating every shape, and initializes
  // parameters from `seed`.
  Network(const Shape& input, std::vector<LayerSpec> specs, std::uint64_t seed);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const Shape& input_shape() const { return input_; }
  const Shape& output_shape() const { return layers_.back()->output_shape(); }
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::size_t num_layers() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

  std::vector<Param> params();
  std::size_t parameter_count() const;
  void zero_grads();

  Rng& rng() { return rng_; }

  // Rows of `batch` are flattened inputs. Returns the final layer output
  // (class probabilities when the stack ends in SoftmaxOutput).
  const Matrix& forward(const Matrix& batch, Mode mode);

  // Mean cross-entropy over the batch plus (l2/2) * sum of squared weights.
  // Labels are class numbers 1..n. Gradients are left in params().grad.
  double loss_and_grads(const Matrix& batch, std::span<const int> labels, double l2,
                        Mode mode = Mode::Train);

 private:
  Shape input_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Matrix> acts_;
  Matrix grad_a_, grad_b_;
  Rng rng_;
};

// Sum of squared weights (biases excluded).
double l2_penalty(Network& net);

struct SgdConfig {
  double learning_rate = 1e-2;
  double decay = 0.95;  // per-epoch multiplicative LR decay, in (0, 1]
  double l2 = 1e-4;
  int batch_size = 32;
  int epochs = 40;
};

void validate(const SgdConfig& cfg);

// learning_rate * decay^epoch, epoch counted from 0.
double effective_lr(const SgdConfig& cfg, int epoch);

// w <- w - lr * grad for every parameter.
void sgd_step(Network& net, double lr);

// ---- architectures ----------------------------------------------------------

inline constexpr int kHiddenUnits = 512;
inline constexpr int kHiddenUnitsRawWithMean = 1024;
inline constexpr int kCnnFilters = 16;
inline constexpr double kCnnDropout = 0.2;

std::vector<LayerSpec> architecture(features::Variant variant, bool with_mean);
Network build_model(features::Variant variant, bool with_mean, const Shape& input, std::uint64_t seed);
Shape to_shape(const features::InputShape& s);

// ---- checkpoints ------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize(Network& net);
Network deserialize(std::span<const std::uint8_t> bytes);
void save_checkpoint(Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace uti::nn

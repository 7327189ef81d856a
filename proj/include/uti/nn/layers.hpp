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

// Layer kernels with exact reverse-mode gradients. Activations travel as
// Matrix batches: one row per example, features channel-major (c, y, x).

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uti/matrix.hpp"

namespace uti::nn {

using Rng = std::mt19937_64;

enum class Mode { Train, Eval };

struct Shape {
  int channels = 1;
  int height = 1;
  int width = 1;
  std::size_t size() const { return static_cast<std::size_t>(channels) * height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

enum class LayerKind : std::uint32_t {
  Dense = 1,
  Conv2d = 2,
  MaxPool2d = 3,
  ReLU = 4,
  Dropout = 5,
  Flatten = 6,
  SoftmaxOutput = 7,
};

struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  int a = 0;  // Dense: units; Conv2d: filters; MaxPool2d: ph; SoftmaxOutput: classes
  int b = 0;  // Conv2d: kh; MaxPool2d: pw
  int c = 0;  // Conv2d: kw
  double p = 0.0;  // Dropout probability

  static LayerSpec dense(int units) { return {LayerKind::Dense, units}; }
  static LayerSpec conv2d(int filters, int kh, int kw) { return {LayerKind::Conv2d, filters, kh, kw}; }
  static LayerSpec max_pool(int ph, int pw) { return {LayerKind::MaxPool2d, ph, pw}; }
  static LayerSpec relu() { return {LayerKind::ReLU}; }
  static LayerSpec dropout(double p) { return {LayerKind::Dropout, 0, 0, 0, p}; }
  static LayerSpec flatten() { return {LayerKind::Flatten}; }
  static LayerSpec softmax(int classes) { return {LayerKind::SoftmaxOutput, classes}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

std::string to_string(const LayerSpec& s);

struct Param {
  std::span<double> value;
  std::span<double> grad;
  bool is_weight = true;  // false for biases; L2 applies to weights only
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  const Shape& input_shape() const { return in_; }
  const Shape& output_shape() const { return out_; }

  virtual void forward(const Matrix& in, Matrix& out, Mode mode, Rng& rng) = 0;
  // Given dL/d(out), accumulates parameter gradients and, when `din` is not
  // null, writes dL/d(in). `in` and `out` are the tensors of the matching
  // forward call.
  virtual void backward(const Matrix& in, const Matrix& out, const Matrix& dout, Matrix* din) = 0;

  virtual std::vector<Param> params() { return {}; }
  virtual void init(Rng& /*rng*/) {}

 protected:
  Shape in_;
  Shape out_;
};

// Throws ShapeError when the layer cannot consume `input`.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input);

// Numerically stable softmax of one row of logits.
void softmax(std::span<const double> logits, std::span<double> probs);

// Glorot-style uniform bound sqrt(6 / (fan_in + fan_out)).
double init_bound(std::size_t fan_in, std::size_t fan_out);

}  // namespace uti::nn

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

#include "uti/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uti/error.hpp"
#include "uti/simd/kernels.hpp"

namespace uti::nn {

using simd::Trans;

std::string to_string(const Shape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

std::string to_string(const LayerSpec& s) {
  switch (s.kind) {
    case LayerKind::Dense: return "Dense(" + std::to_string(s.a) + ")";
    case LayerKind::Conv2d:
      return "Conv2d(" + std::to_string(s.a) + ", " + std::to_string(s.b) + "x" + std::to_string(s.c) + ")";
    case LayerKind::MaxPool2d: return "MaxPool2d(" + std::to_string(s.a) + "x" + std::to_string(s.b) + ")";
    case LayerKind::ReLU: return "ReLU";
    case LayerKind::Dropout: return "Dropout(" + std::to_string(s.p) + ")";
    case LayerKind::Flatten: return "Flatten";
    case LayerKind::SoftmaxOutput: return "SoftmaxOutput(" + std::to_string(s.a) + ")";
  }
  return "?";
}

double init_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void softmax(std::span<const double> logits, std::span<double> probs) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
}

namespace {

void check_rows(const Matrix& in, const Shape& s) {
  if (in.cols() != s.size())
    throw Error(ErrorCode::Shape, "layer expects " + std::to_string(s.size()) + " features, got " +
                                      std::to_string(in.cols()));
}

void fill_uniform(std::span<double> v, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : v) x = dist(rng);
}

// ---- Dense ----------------------------------------------------------------

class Dense final : public Layer {
 public:
  Dense(const Shape& in, int units) : units_(units) {
    if (units < 1) throw Error(ErrorCode::Shape, "Dense needs >= 1 unit");
    in_ = in;
    out_ = {1, 1, units};
    const std::size_t n_in = in.size();
    w_.assign(static_cast<std::size_t>(units) * n_in, 0.0);
    dw_.assign(w_.size(), 0.0);
    b_.assign(units, 0.0);
    db_.assign(units, 0.0);
  }

  LayerSpec spec() const override { return LayerSpec::dense(units_); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  void init(Rng& rng) override {
    fill_uniform(w_, init_bound(in_.size(), units_), rng);
    std::fill(b_.begin(), b_.end(), 0.0);
  }

  std::vector<Param> params() override { return {{w_, dw_, true}, {b_, db_, false}}; }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    const std::size_t batch = in.rows();
    const std::size_t n_in = in_.size();
    out.resize(batch, units_);
    simd::kernels().gemm(Trans::No, Trans::Yes, batch, units_, n_in, 1.0, in.data(), n_in,
                         w_.data(), n_in, 0.0, out.data(), units_);
    for (std::size_t r = 0; r < batch; ++r) {
      auto row = out.row(r);
      for (int j = 0; j < units_; ++j) row[j] += b_[j];
    }
  }

  void backward(const Matrix& in, const Matrix&, const Matrix& dout, Matrix* din) override {
    const std::size_t batch = in.rows();
    const std::size_t n_in = in_.size();
    const auto& k = simd::kernels();
    k.gemm(Trans::Yes, Trans::No, units_, n_in, batch, 1.0, dout.data(), units_, in.data(), n_in,
           1.0, dw_.data(), n_in);
    for (std::size_t r = 0; r < batch; ++r) {
      const auto row = dout.row(r);
      for (int j = 0; j < units_; ++j) db_[j] += row[j];
    }
    if (din) {
      din->resize(batch, n_in);
      k.gemm(Trans::No, Trans::No, batch, n_in, units_, 1.0, dout.data(), units_, w_.data(), n_in,
             0.0, din->data(), n_in);
    }
  }

 private:
  int units_;
  std::vector<double> w_, dw_, b_, db_;
};

// ---- Conv2d -----------------------------------------------------------------
// Valid convolution, stride 1. Weights are [filters][channels * kh * kw].

class Conv2d final : public Layer {
 public:
  Conv2d(const Shape& in, int filters, int kh, int kw) : filters_(filters), kh_(kh), kw_(kw) {
    if (filters < 1 || kh < 1 || kw < 1) throw Error(ErrorCode::Shape, "Conv2d needs positive sizes");
    if (kh > in.height || kw > in.width)
      throw Error(ErrorCode::Shape, "kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                                        " does not fit input " + to_string(in));
    in_ = in;
    out_ = {filters, in.height - kh + 1, in.width - kw + 1};
    patch_ = static_cast<std::size_t>(in.channels) * kh * kw;
    w_.assign(static_cast<std::size_t>(filters) * patch_, 0.0);
    dw_.assign(w_.size(), 0.0);
    b_.assign(filters, 0.0);
    db_.assign(filters, 0.0);
  }

  LayerSpec spec() const override { return LayerSpec::conv2d(filters_, kh_, kw_); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }

  void init(Rng& rng) override {
    fill_uniform(w_, init_bound(patch_, static_cast<std::size_t>(filters_) * kh_ * kw_), rng);
    std::fill(b_.begin(), b_.end(), 0.0);
  }

  std::vector<Param> params() override { return {{w_, dw_, true}, {b_, db_, false}}; }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    const std::size_t batch = in.rows();
    const std::size_t positions = static_cast<std::size_t>(out_.height) * out_.width;
    out.resize(batch, out_.size());
    cols_.resize(patch_ * positions);
    for (std::size_t e = 0; e < batch; ++e) {
      im2col(in.row(e).data());
      double* o = out.row(e).data();
      simd::kernels().gemm(Trans::No, Trans::No, filters_, positions, patch_, 1.0, w_.data(), patch_,
                           cols_.data(), positions, 0.0, o, positions);
      for (int f = 0; f < filters_; ++f) {
        double* plane = o + f * positions;
        for (std::size_t p = 0; p < positions; ++p) plane[p] += b_[f];
      }
    }
  }

  void backward(const Matrix& in, const Matrix&, const Matrix& dout, Matrix* din) override {
    const std::size_t batch = in.rows();
    const std::size_t positions = static_cast<std::size_t>(out_.height) * out_.width;
    const auto& k = simd::kernels();
    cols_.resize(patch_ * positions);
    if (din) {
      din->resize(batch, in_.size());
      dcols_.resize(patch_ * positions);
    }
    for (std::size_t e = 0; e < batch; ++e) {
      const double* g = dout.row(e).data();
      im2col(in.row(e).data());
      k.gemm(Trans::No, Trans::Yes, filters_, patch_, positions, 1.0, g, positions, cols_.data(),
             positions, 1.0, dw_.data(), patch_);
      for (int f = 0; f < filters_; ++f) {
        const double* plane = g + f * positions;
        double s = 0.0;
        for (std::size_t p = 0; p < positions; ++p) s += plane[p];
        db_[f] += s;
      }
      if (din) {
        k.gemm(Trans::Yes, Trans::No, patch_, positions, filters_, 1.0, w_.data(), patch_, g,
               positions, 0.0, dcols_.data(), positions);
        col2im(din->row(e).data());
      }
    }
  }

 private:
  // cols_[(c*kh + i)*kw + j][y*OW + x] = in[c][y + i][x + j]
  void im2col(const double* src) {
    const int oh = out_.height, ow = out_.width;
    double* dst = cols_.data();
    for (int c = 0; c < in_.channels; ++c) {
      const double* plane = src + static_cast<std::size_t>(c) * in_.height * in_.width;
      for (int i = 0; i < kh_; ++i) {
        for (int j = 0; j < kw_; ++j) {
          for (int y = 0; y < oh; ++y) {
            const double* s = plane + static_cast<std::size_t>(y + i) * in_.width + j;
            std::copy(s, s + ow, dst);
            dst += ow;
          }
        }
      }
    }
  }

  void col2im(double* dst) const {
    const int oh = out_.height, ow = out_.width;
    std::fill(dst, dst + in_.size(), 0.0);
    const double* src = dcols_.data();
    for (int c = 0; c < in_.channels; ++c) {
      double* plane = dst + static_cast<std::size_t>(c) * in_.height * in_.width;
      for (int i = 0; i < kh_; ++i) {
        for (int j = 0; j < kw_; ++j) {
          for (int y = 0; y < oh; ++y) {
            double* d = plane + static_cast<std::size_t>(y + i) * in_.width + j;
            for (int x = 0; x < ow; ++x) d[x] += src[x];
            src += ow;
          }
        }
      }
    }
  }

  int filters_, kh_, kw_;
  std::size_t patch_ = 0;
  std::vector<double> w_, dw_, b_, db_;
  std::vector<double> cols_, dcols_;
};

// ---- MaxPool2d ----------------------------------------------------------------
// Stride equals the window; trailing rows/cols that do not fill a window
// are dropped.

class MaxPool2d final : public Layer {
 public:
  MaxPool2d(const Shape& in, int ph, int pw) : ph_(ph), pw_(pw) {
    if (ph < 1 || pw < 1) throw Error(ErrorCode::Shape, "MaxPool2d needs positive window");
    if (in.height / ph < 1 || in.width / pw < 1)
      throw Error(ErrorCode::Shape, "pool window larger than input " + to_string(in));
    in_ = in;
    out_ = {in.channels, in.height / ph, in.width / pw};
  }

  LayerSpec spec() const override { return LayerSpec::max_pool(ph_, pw_); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2d>(*this); }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    const std::size_t batch = in.rows();
    out.resize(batch, out_.size());
    argmax_.resize(batch * out_.size());
    for (std::size_t e = 0; e < batch; ++e) {
      const double* src = in.row(e).data();
      double* dst = out.row(e).data();
      std::uint32_t* arg = argmax_.data() + e * out_.size();
      std::size_t o = 0;
      for (int c = 0; c < out_.channels; ++c) {
        const std::size_t plane = static_cast<std::size_t>(c) * in_.height * in_.width;
        for (int y = 0; y < out_.height; ++y) {
          for (int x = 0; x < out_.width; ++x, ++o) {
            std::size_t best = plane + static_cast<std::size_t>(y * ph_) * in_.width + x * pw_;
            for (int i = 0; i < ph_; ++i) {
              for (int j = 0; j < pw_; ++j) {
                const std::size_t idx = plane + static_cast<std::size_t>(y * ph_ + i) * in_.width + x * pw_ + j;
                if (src[idx] > src[best]) best = idx;
              }
            }
            dst[o] = src[best];
            arg[o] = static_cast<std::uint32_t>(best);
          }
        }
      }
    }
  }

  void backward(const Matrix& in, const Matrix&, const Matrix& dout, Matrix* din) override {
    if (!din) return;
    const std::size_t batch = in.rows();
    din->resize(batch, in_.size());
    std::fill(din->values().begin(), din->values().end(), 0.0);
    for (std::size_t e = 0; e < batch; ++e) {
      const double* g = dout.row(e).data();
      double* d = din->row(e).data();
      const std::uint32_t* arg = argmax_.data() + e * out_.size();
      for (std::size_t o = 0; o < out_.size(); ++o) d[arg[o]] += g[o];
    }
  }

 private:
  int ph_, pw_;
  std::vector<std::uint32_t> argmax_;
};

// ---- ReLU / Flatten -------------------------------------------------------------

class ReLU final : public Layer {
 public:
  explicit ReLU(const Shape& in) {
    in_ = in;
    out_ = in;
  }
  LayerSpec spec() const override { return LayerSpec::relu(); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    out.resize(in.rows(), in.cols());
    const double* s = in.data();
    double* d = out.data();
    for (std::size_t i = 0; i < in.size(); ++i) d[i] = s[i] > 0.0 ? s[i] : 0.0;
  }

  void backward(const Matrix& in, const Matrix&, const Matrix& dout, Matrix* din) override {
    if (!din) return;
    din->resize(in.rows(), in.cols());
    const double* x = in.data();
    const double* g = dout.data();
    double* d = din->data();
    for (std::size_t i = 0; i < in.size(); ++i) d[i] = x[i] > 0.0 ? g[i] : 0.0;
  }
};

class Flatten final : public Layer {
 public:
  explicit Flatten(const Shape& in) {
    in_ = in;
    out_ = {1, 1, static_cast<int>(in.size())};
  }
  LayerSpec spec() const override { return LayerSpec::flatten(); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    out = in;
  }
  void backward(const Matrix&, const Matrix&, const Matrix& dout, Matrix* din) override {
    if (din) *din = dout;
  }
};

// ---- Dropout ----------------------------------------------------------------------
// Inverted dropout: Train scales kept units by 1/(1-p); Eval is identity.

class Dropout final : public Layer {
 public:
  Dropout(const Shape& in, double p) : p_(p) {
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::Shape, "dropout probability must be in [0,1)");
    in_ = in;
    out_ = in;
  }
  LayerSpec spec() const override { return LayerSpec::dropout(p_); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dropout>(*this); }

  void forward(const Matrix& in, Matrix& out, Mode mode, Rng& rng) override {
    check_rows(in, in_);
    train_ = mode == Mode::Train && p_ > 0.0;
    if (!train_) {
      out = in;
      return;
    }
    out.resize(in.rows(), in.cols());
    mask_.resize(in.size());
    const double keep_scale = 1.0 / (1.0 - p_);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < in.size(); ++i) {
      mask_[i] = u(rng) >= p_ ? keep_scale : 0.0;
      out.data()[i] = in.data()[i] * mask_[i];
    }
  }

  void backward(const Matrix& in, const Matrix&, const Matrix& dout, Matrix* din) override {
    if (!din) return;
    if (!train_) {
      *din = dout;
      return;
    }
    din->resize(in.rows(), in.cols());
    for (std::size_t i = 0; i < in.size(); ++i) din->data()[i] = dout.data()[i] * mask_[i];
  }

 private:
  double p_;
  bool train_ = false;
  std::vector<double> mask_;
};

// ---- SoftmaxOutput ------------------------------------------------------------------

class SoftmaxOutput final : public Layer {
 public:
  SoftmaxOutput(const Shape& in, int classes) : classes_(classes) {
    if (classes < 1) throw Error(ErrorCode::Shape, "softmax needs >= 1 class");
    if (in.size() != static_cast<std::size_t>(classes))
      throw Error(ErrorCode::Shape, "softmax over " + std::to_string(classes) +
                                        " classes fed " + std::to_string(in.size()) + " logits");
    in_ = in;
    out_ = {1, 1, classes};
  }
  LayerSpec spec() const override { return LayerSpec::softmax(classes_); }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<SoftmaxOutput>(*this); }

  void forward(const Matrix& in, Matrix& out, Mode, Rng&) override {
    check_rows(in, in_);
    out.resize(in.rows(), in.cols());
    for (std::size_t r = 0; r < in.rows(); ++r) softmax(in.row(r), out.row(r));
  }

  // din = p * (dout - <p, dout>)
  void backward(const Matrix&, const Matrix& out, const Matrix& dout, Matrix* din) override {
    if (!din) return;
    din->resize(out.rows(), out.cols());
    for (std::size_t r = 0; r < out.rows(); ++r) {
      const auto p = out.row(r);
      const auto g = dout.row(r);
      double dotpg = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) dotpg += p[j] * g[j];
      auto d = din->row(r);
      for (std::size_t j = 0; j < p.size(); ++j) d[j] = p[j] * (g[j] - dotpg);
    }
  }

 private:
  int classes_;
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input) {
  switch (spec.kind) {
    case LayerKind::Dense: return std::make_unique<Dense>(input, spec.a);
    case LayerKind::Conv2d: return std::make_unique<Conv2d>(input, spec.a, spec.b, spec.c);
    case LayerKind::MaxPool2d: return std::make_unique<MaxPool2d>(input, spec.a, spec.b);
    case LayerKind::ReLU: return std::make_unique<ReLU>(input);
    case LayerKind::Dropout: return std::make_unique<Dropout>(input, spec.p);
    case LayerKind::Flatten: return std::make_unique<Flatten>(input);
    case LayerKind::SoftmaxOutput: return std::make_unique<SoftmaxOutput>(input, spec.a);
  }
  throw Error(ErrorCode::Shape, "unknown layer kind");
}

}  // namespace uti::nn

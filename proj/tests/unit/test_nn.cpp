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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "gradcheck.hpp"
#include "oracles.hpp"
#include "uti/error.hpp"
#include "uti/nn/network.hpp"

using namespace uti;
using namespace uti::nn;

using gradcheck::random_matrix;
using gradcheck::randomize_params;

TEST_CASE("per-layer gradients match central differences") {
  std::uint64_t seed = 1;
  for (const auto& c : gradcheck::layer_cases()) {
    CAPTURE(c.name);
    CHECK(gradcheck::layer_error(c.spec, c.input, seed++) <= 1e-4);
  }
}

TEST_CASE("toy DNN gradients match central differences") {
  std::mt19937_64 rng(11);
  Network net = gradcheck::toy_dnn(5);
  CHECK(net.parameter_count() < 2000);
  const Matrix x = random_matrix(rng, 5, 12);
  CHECK(gradcheck::network_error(net, x, {1, 2, 3, 4, 2}, 0.01) <= 1e-4);
}

TEST_CASE("toy CNN gradients match central differences, dropout included") {
  std::mt19937_64 rng(12);
  Network net = gradcheck::toy_cnn(6);
  CHECK(net.parameter_count() < 2000);
  const Matrix x = random_matrix(rng, 3, 81);
  CHECK(gradcheck::network_error(net, x, {4, 1, 3}, 0.001) <= 1e-4);
}

TEST_CASE("reported loss matches the cross-entropy plus L2 objective") {
  std::mt19937_64 rng(13);
  Network net = gradcheck::toy_cnn(7);
  const Matrix x = random_matrix(rng, 3, 81);
  const std::vector<int> y{2, 3, 1};
  net.rng() = Rng(5);
  const double loss = net.loss_and_grads(x, y, 0.01);
  net.rng() = Rng(5);
  const Matrix& p = net.forward(x, Mode::Train);
  double expect = 0.0;
  for (std::size_t i = 0; i < 3; ++i) expect -= std::log(p(i, y[i] - 1)) / 3.0;
  expect += 0.005 * l2_penalty(net);
  CHECK(loss == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("convolution matches the quadruple-loop oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    auto layer = make_layer(LayerSpec::conv2d(3, 3, 4), {1, 9, 9});
    randomize_params(*layer, rng);
    const Matrix x = random_matrix(rng, 2, 81);
    Rng r(0);
    Matrix out;
    layer->forward(x, out, Mode::Eval, r);
    const auto ps = layer->params();
    const std::vector<double> w(ps[0].value.begin(), ps[0].value.end());
    const std::vector<double> b(ps[1].value.begin(), ps[1].value.end());
    for (std::size_t n = 0; n < 2; ++n) {
      const std::vector<double> in(x.row(n).begin(), x.row(n).end());
      const auto ref = oracle::conv2d(in, 1, 9, 9, w, b, 3, 3, 4);
      REQUIRE(ref.size() == out.cols());
      for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(out(n, i) - ref[i]) <= 1e-12);
    }
  }
}

TEST_CASE("small layer examples") {
  Rng r(0);
  Matrix out;
  auto relu = make_layer(LayerSpec::relu(), {1, 1, 3});
  relu->forward(Matrix(1, 3, 0.0), out, Mode::Eval, r);
  Matrix x(1, 3);
  x(0, 0) = -1, x(0, 1) = 0, x(0, 2) = 2;
  relu->forward(x, out, Mode::Eval, r);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(0, 1) == 0.0);
  CHECK(out(0, 2) == 2.0);

  auto pool = make_layer(LayerSpec::max_pool(2, 2), {1, 2, 2});
  Matrix p(1, 4);
  p(0, 0) = 1, p(0, 1) = 2, p(0, 2) = 3, p(0, 3) = 4;
  pool->forward(p, out, Mode::Eval, r);
  REQUIRE(out.cols() == 1);
  CHECK(out(0, 0) == 4.0);
  // floor boundary
  CHECK(make_layer(LayerSpec::max_pool(2, 2), {1, 5, 7})->output_shape() == Shape{1, 2, 3});
}

TEST_CASE("softmax sums to one and is permutation-equivariant") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> z(6), p(6);
    for (auto& v : z) v = u(rng);
    softmax(z, p);
    double s = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
    std::vector<int> perm{0, 1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> zp(6), pp(6);
    for (int i = 0; i < 6; ++i) zp[i] = z[perm[i]];
    softmax(zp, pp);
    for (int i = 0; i < 6; ++i) CHECK(pp[i] == doctest::Approx(p[perm[i]]).epsilon(1e-14));
  }
}

TEST_CASE("zero parameters give uniform output and loss ln 4") {
  Network net({1, 1, 6}, architecture(features::Variant::DnnDct, false), 1);
  for (auto& p : net.params()) std::fill(p.value.begin(), p.value.end(), 0.0);
  std::mt19937_64 rng(15);
  const Matrix x = random_matrix(rng, 3, 6);
  const Matrix& probs = net.forward(x, Mode::Eval);
  for (std::size_t i = 0; i < probs.size(); ++i) CHECK(probs.data()[i] == doctest::Approx(0.25).epsilon(1e-15));
  const std::vector<int> labels{1, 2, 3};
  CHECK(net.loss_and_grads(x, labels, 0.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("confident correct prediction gives loss near zero") {
  Network net({1, 1, 1}, {LayerSpec::dense(2), LayerSpec::softmax(2)}, 1);
  auto ps = net.params();
  ps[0].value[0] = 50.0;
  ps[0].value[1] = -50.0;
  Matrix x(1, 1, 1.0);
  const std::vector<int> label{1};
  CHECK(net.loss_and_grads(x, label, 0.0) < 1e-40);
  CHECK_THROWS_AS(net.loss_and_grads(x, std::vector<int>{3}, 0.0), Error);
}

TEST_CASE("sgd step and decay arithmetic") {
  Network net({1, 1, 1}, {LayerSpec::dense(1)}, 1);
  auto ps = net.params();
  ps[0].value[0] = 1.0;
  ps[0].grad[0] = 0.5;
  sgd_step(net, 0.1);
  CHECK(ps[0].value[0] == doctest::Approx(0.95));
  ps[0].value[0] = 1.0;
  ps[0].grad[0] = 0.5 + 0.1 * 1.0;
  sgd_step(net, 0.1);
  CHECK(ps[0].value[0] == doctest::Approx(0.94));

  SgdConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.decay = 0.9;
  CHECK(effective_lr(cfg, 2) == doctest::Approx(0.0081).epsilon(1e-12));
  CHECK(effective_lr(cfg, 0) == 0.01);
}

TEST_CASE("l2 gradient applies to weights only") {
  Network net({1, 1, 2}, {LayerSpec::dense(2), LayerSpec::softmax(2)}, 3);
  auto ps = net.params();
  ps[1].value[0] = 0.7;  // bias
  Matrix x(1, 2, 0.0);
  const std::vector<int> y{1};
  net.loss_and_grads(x, y, 0.0);
  std::vector<double> g0(ps[0].grad.begin(), ps[0].grad.end());
  std::vector<double> b0(ps[1].grad.begin(), ps[1].grad.end());
  net.loss_and_grads(x, y, 0.5);
  for (std::size_t i = 0; i < g0.size(); ++i) CHECK(ps[0].grad[i] == doctest::Approx(g0[i] + 0.5 * ps[0].value[i]));
  for (std::size_t i = 0; i < b0.size(); ++i) CHECK(ps[1].grad[i] == b0[i]);
}

TEST_CASE("sgd config validation") {
  SgdConfig ok;
  CHECK_NOTHROW(validate(ok));
  for (auto mutate : {+[](SgdConfig& c) { c.learning_rate = 0; }, +[](SgdConfig& c) { c.decay = 0; },
                      +[](SgdConfig& c) { c.decay = 1.5; }, +[](SgdConfig& c) { c.l2 = -1; },
                      +[](SgdConfig& c) { c.batch_size = 0; }, +[](SgdConfig& c) { c.epochs = -1; }}) {
    SgdConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), Error);
  }
}

TEST_CASE("dropout: p=0 is exact identity in both modes; train mode is unbiased") {
  Rng r(7);
  Matrix out_t, out_e;
  std::mt19937_64 rng(16);
  const Matrix x = random_matrix(rng, 2, 10);
  auto none = make_layer(LayerSpec::dropout(0.0), {1, 1, 10});
  none->forward(x, out_t, Mode::Train, r);
  none->forward(x, out_e, Mode::Eval, r);
  CHECK(out_t == x);
  CHECK(out_e == x);

  auto drop = make_layer(LayerSpec::dropout(0.2), {1, 1, 10});
  drop->forward(x, out_e, Mode::Eval, r);
  CHECK(out_e == x);
  std::vector<double> sum(x.size(), 0.0);
  const int masks = 20000;
  for (int m = 0; m < masks; ++m) {
    drop->forward(x, out_t, Mode::Train, r);
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] += out_t.data()[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    // std of one masked sample is |x| * sqrt(p / (1 - p)) = |x| / 2
    const double se = std::abs(x.data()[i]) * 0.5 / std::sqrt(static_cast<double>(masks));
    CHECK(std::abs(sum[i] / masks - x.data()[i]) <= 5.0 * se + 1e-15);
  }
  CHECK_THROWS_AS(make_layer(LayerSpec::dropout(1.0), {1, 1, 3}), Error);
}

TEST_CASE("architectures and shape arithmetic") {
  Network cnn = build_model(features::Variant::CnnRaw, false, {1, 63, 412}, 1);
  CHECK(cnn.layer(0).output_shape() == Shape{16, 56, 405});
  CHECK(cnn.layer(2).output_shape() == Shape{16, 28, 202});
  CHECK(cnn.layer(3).output_shape() == Shape{16, 25, 199});
  CHECK(cnn.layer(5).output_shape() == Shape{16, 12, 99});
  CHECK(cnn.layer(6).output_shape().size() == 16u * 12 * 99);
  CHECK(cnn.output_shape() == Shape{1, 1, 4});

  const auto raw_mean = architecture(features::Variant::DnnRaw, true);
  CHECK(raw_mean[0] == LayerSpec::dense(1024));
  CHECK(raw_mean[2] == LayerSpec::dense(1024));
  CHECK(raw_mean[4] == LayerSpec::dense(1024));
  Network dct = build_model(features::Variant::DnnDct, false, {1, 1, 1600}, 1);
  CHECK(dct.layer(0).output_shape().size() == 512);
  CHECK(dct.layer(2).output_shape().size() == 512);
  CHECK(dct.layer(4).output_shape().size() == 512);
  CHECK(dct.output_shape().size() == 4);
  CHECK(dct.parameter_count() == 1600u * 512 + 512 + 2 * (512 * 512 + 512) + 512 * 4 + 4);

  CHECK_THROWS_AS(build_model(features::Variant::CnnRaw, false, {1, 12, 12}, 1), Error);
  CHECK_THROWS_AS(Network({1, 1, 3}, {LayerSpec::dense(0)}, 1), Error);
  CHECK_THROWS_AS(Network({1, 1, 3}, {LayerSpec::dense(5), LayerSpec::softmax(4)}, 1), Error);
}

TEST_CASE("initialization: fan-based bound, zero biases, seed determinism") {
  Network a = build_model(features::Variant::DnnPca, false, {1, 1, 100}, 42);
  Network b = build_model(features::Variant::DnnPca, false, {1, 1, 100}, 42);
  Network c = build_model(features::Variant::DnnPca, false, {1, 1, 100}, 43);
  auto pa = a.params(), pb = b.params(), pc = c.params();
  const double bound = std::sqrt(6.0 / (100 + 512));
  for (double v : pa[0].value) CHECK(std::abs(v) <= bound);
  for (double v : pa[1].value) CHECK(v == 0.0);
  CHECK(std::equal(pa[0].value.begin(), pa[0].value.end(), pb[0].value.begin()));
  CHECK_FALSE(std::equal(pa[0].value.begin(), pa[0].value.end(), pc[0].value.begin()));
}

TEST_CASE("fixed seed gives bit-identical training trajectories") {
  auto run = [] {
    std::mt19937_64 rng(21);
    Network net({1, 9, 9}, {LayerSpec::conv2d(2, 3, 3), LayerSpec::relu(), LayerSpec::flatten(),
                            LayerSpec::dropout(0.3), LayerSpec::dense(4), LayerSpec::softmax(4)},
                8);
    const Matrix x = random_matrix(rng, 6, 81);
    const std::vector<int> y{1, 2, 3, 4, 1, 2};
    for (int step = 0; step < 5; ++step) {
      net.loss_and_grads(x, y, 1e-3);
      sgd_step(net, 0.05);
    }
    std::vector<double> flat;
    for (auto& p : net.params()) flat.insert(flat.end(), p.value.begin(), p.value.end());
    return flat;
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint round trip is bit exact; corrupt and future files are rejected") {
  std::mt19937_64 rng(22);
  Network net({2, 9, 9}, {LayerSpec::conv2d(3, 3, 3), LayerSpec::relu(), LayerSpec::max_pool(2, 2),
                          LayerSpec::flatten(), LayerSpec::dense(5), LayerSpec::relu(), LayerSpec::dropout(0.2),
                          LayerSpec::dense(4), LayerSpec::softmax(4)},
              9);
  const Matrix x = random_matrix(rng, 4, 162);
  const Matrix before = net.forward(x, Mode::Eval);
  const auto bytes = serialize(net);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "UTIC");
  Network back = deserialize(bytes);
  CHECK(back.specs() == net.specs());
  CHECK(back.input_shape() == net.input_shape());
  CHECK(back.forward(x, Mode::Eval) == before);

  const auto path = std::filesystem::temp_directory_path() / "uti_nn_test.utic";
  save_checkpoint(net, path);
  CHECK(load_checkpoint(path).forward(x, Mode::Eval) == before);
  std::filesystem::remove(path);

  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + cut);
    try {
      deserialize(t);
      FAIL("truncated checkpoint accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CorruptCheckpoint);
    }
  }
  auto v = bytes;
  v[4] = static_cast<std::uint8_t>(kCheckpointVersion + 1);
  try {
    deserialize(v);
    FAIL("future version accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VersionMismatch);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(deserialize(extra), Error);
}

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

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "uti/corpus.hpp"
#include "uti/error.hpp"
#include "uti/features.hpp"

using namespace uti;
using namespace uti::features;
using corpus::Frame;

namespace {

Frame frame_from(const oracle::Grid& g) {
  Frame f(static_cast<int>(g.size()), static_cast<int>(g[0].size()));
  for (int r = 0; r < f.height(); ++r)
    for (int c = 0; c < f.width(); ++c) f(r, c) = g[r][c];
  return f;
}

Matrix matrix_from(const oracle::Grid& g) {
  Matrix m(g.size(), g[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = g[r][c];
  return m;
}

std::vector<Frame> random_frames(std::mt19937_64& rng, int n, int h, int w) {
  std::vector<Frame> out;
  for (int i = 0; i < n; ++i) out.push_back(frame_from(oracle::random_grid(rng, h, w, 0.0, 255.0)));
  return out;
}

double frob_reconstruction_error(const Matrix& x, const PcaModel& m) {
  double err = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto z = pca_project(m, x.row(i));
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double rec = m.data_mean[j];
      for (std::size_t k = 0; k < z.size(); ++k) rec += z[k] * m.components(k, j);
      err += (x(i, j) - rec) * (x(i, j) - rec);
    }
  }
  return err;
}

}  // namespace

TEST_CASE("normalizer: two-value pixel, constant pixel, too few frames") {
  std::vector<Frame> frames{Frame(1, 2, {0.0, 7.0}), Frame(1, 2, {2.0, 7.0})};
  const auto st = fit_normalizer(frames);
  CHECK(st.mean[0] == 1.0);
  CHECK(st.std[0] == 1.0);
  CHECK(st.std[1] == kStdFloor);
  const auto a = apply_normalizer(st, frames[0]);
  const auto b = apply_normalizer(st, frames[1]);
  CHECK(a(0, 0) == -1.0);
  CHECK(b(0, 0) == 1.0);
  CHECK(a(0, 1) == 0.0);
  CHECK_THROWS_AS(fit_normalizer(std::span(frames).first(1)), Error);
}

TEST_CASE("normalized training frames have zero mean and unit std per pixel") {
  std::mt19937_64 rng(3);
  auto frames = random_frames(rng, 5, 6, 7);
  const auto st = fit_normalizer(frames);
  std::vector<Frame> normed;
  for (const auto& f : frames) normed.push_back(apply_normalizer(st, f));
  for (std::size_t i = 0; i < st.mean.size(); ++i) {
    double m = 0, v = 0;
    for (const auto& f : normed) m += f.samples()[i] / 5.0;
    for (const auto& f : normed) v += (f.samples()[i] - m) * (f.samples()[i] - m) / 5.0;
    CHECK(std::abs(m) < 1e-9);
    CHECK(std::abs(std::sqrt(v) - 1.0) < 1e-6);
  }
  const auto again = fit_normalizer(normed);
  for (std::size_t i = 0; i < again.mean.size(); ++i) {
    CHECK(std::abs(again.mean[i]) < 1e-9);
    CHECK(std::abs(again.std[i] - 1.0) < 1e-6);
  }
}

TEST_CASE("pca on one-axis data") {
  const Matrix x = matrix_from({{0, 0}, {1, 0}, {2, 0}});
  const auto m = fit_pca(x, 1);
  REQUIRE(m.n_components() == 1);
  CHECK(m.components(0, 0) == doctest::Approx(1.0));
  CHECK(m.components(0, 1) == doctest::Approx(0.0));
  CHECK(pca_project(m, x.row(0))[0] == doctest::Approx(-1.0));
  CHECK(pca_project(m, x.row(1))[0] == doctest::Approx(0.0));
  CHECK(pca_project(m, x.row(2))[0] == doctest::Approx(1.0));
  // k beyond the rank is cut to the rank
  CHECK(fit_pca(x, 5).n_components() == 1);
  CHECK_THROWS_AS(fit_pca(matrix_from({{1, 2}, {1, 2}}), 1), Error);
}

TEST_CASE("pca matches a Jacobi eigendecomposition of the covariance") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_grid(rng, 6, 4);
    const auto model = fit_pca(matrix_from(g), 4);
    const auto ref = oracle::jacobi(oracle::covariance(g));
    REQUIRE(model.n_components() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(model.explained_variance[k] - ref.values[k]) < 1e-8);
      double dot = 0.0;
      for (std::size_t j = 0; j < 4; ++j) dot += model.components(k, j) * ref.vectors[k][j];
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(model.components(k, j) - sign * ref.vectors[k][j]) < 1e-8);
    }
  }
}

TEST_CASE("pca through the Gram route (more dims than rows) agrees with the oracle") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = oracle::random_grid(rng, 5, 9);
    const auto model = fit_pca(matrix_from(g), 10);
    const auto ref = oracle::jacobi(oracle::covariance(g));
    REQUIRE(model.n_components() == 4);  // N - 1
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(model.explained_variance[k] - ref.values[k]) < 1e-8);
      double dot = 0.0;
      for (std::size_t j = 0; j < 9; ++j) dot += model.components(k, j) * ref.vectors[k][j];
      CHECK(std::abs(std::abs(dot) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("pca invariants: orthonormal rows, sorted variance, sign rule, affine projection, error vs K") {
  std::mt19937_64 rng(19);
  const auto g = oracle::random_grid(rng, 30, 12);
  const Matrix x = matrix_from(g);
  const auto m = fit_pca(x, 12);
  for (std::size_t a = 0; a < m.n_components(); ++a) {
    for (std::size_t b = 0; b < m.n_components(); ++b) {
      double d = 0.0;
      for (std::size_t j = 0; j < m.dim(); ++j) d += m.components(a, j) * m.components(b, j);
      CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
    if (a > 0) CHECK(m.explained_variance[a] <= m.explained_variance[a - 1]);
    CHECK(m.explained_variance[a] >= 0.0);
    double big = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j)
      if (std::abs(m.components(a, j)) > std::abs(big)) big = m.components(a, j);
    CHECK(big > 0.0);
  }
  std::vector<double> delta(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& d : delta) d = u(rng);
  std::vector<double> moved(x.row(3).begin(), x.row(3).end());
  for (std::size_t j = 0; j < 12; ++j) moved[j] += delta[j];
  const auto z0 = pca_project(m, x.row(3));
  const auto z1 = pca_project(m, moved);
  for (std::size_t k = 0; k < m.n_components(); ++k) {
    double expect = 0.0;
    for (std::size_t j = 0; j < 12; ++j) expect += m.components(k, j) * delta[j];
    CHECK(std::abs((z1[k] - z0[k]) - expect) < 1e-9);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 12; ++k) {
    const double e = frob_reconstruction_error(x, fit_pca(x, k));
    CHECK(e <= prev + 1e-9);
    prev = e;
  }
}

TEST_CASE("dct: constant and scalar frames") {
  const auto y = dct2(Matrix(2, 2, 1.0));
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(std::abs(y(0, 1)) < 1e-15);
  CHECK(std::abs(y(1, 0)) < 1e-15);
  CHECK(std::abs(y(1, 1)) < 1e-15);
  CHECK(dct2(Matrix(1, 1, 5.0))(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("dct matches the double-sum definition and inverts") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_grid(rng, 8, 8, 0.0, 255.0);
    const Matrix x = matrix_from(g);
    const auto y = dct2(x);
    const auto ref = oracle::dct2(g);
    double e_in = 0.0, e_out = 0.0;
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        CHECK(std::abs(y(r, c) - ref[r][c]) < 1e-9);
        e_in += x(r, c) * x(r, c);
        e_out += y(r, c) * y(r, c);
      }
    CHECK(std::abs(std::sqrt(e_in) - std::sqrt(e_out)) < 1e-9);
    const auto back = idct2(y);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) CHECK(std::abs(back(r, c) - x(r, c)) < 1e-9);
  }
  // non-square
  const auto g = oracle::random_grid(rng, 5, 11);
  const auto y = dct2(matrix_from(g));
  const auto ref = oracle::dct2(g);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 11; ++c) CHECK(std::abs(y(r, c) - ref[r][c]) < 1e-9);
}

TEST_CASE("dct truncation keeps the upper-left block row-major") {
  std::mt19937_64 rng(29);
  const auto g = oracle::random_grid(rng, 10, 12);
  const auto full = dct2(matrix_from(g));
  const auto t = truncate_dct(full, 3, 4);
  REQUIRE(t.size() == 12);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) CHECK(t[r * 4 + c] == doctest::Approx(full(r, c)).epsilon(1e-12));
  std::vector<double> fast(12);
  std::vector<double> flat;
  for (const auto& row : g) flat.insert(flat.end(), row.begin(), row.end());
  dct2_truncated(flat, 10, 12, 3, 4, fast);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(fast[i] - t[i]) < 1e-9);
  CHECK_THROWS_AS(truncate_dct(full, 11, 4), Error);
  try {
    truncate_dct(full, 40, 40);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FrameTooSmall);
  }
}

TEST_CASE("speaker means") {
  Frame a(2, 2, {0, 2, 4, 6});
  Frame b(2, 2, {2, 0, 0, 2});
  SpeakerFrames g{"S1", {&a, &b}};
  const auto m = compute_speaker_means(std::span(&g, 1), Partition::Train);
  REQUIRE(m.size() == 1);
  CHECK(m[0].mean_frame == Frame(2, 2, {1, 1, 2, 4}));
  CHECK(m[0].source_partition == Partition::Train);
  SpeakerFrames single{"S2", {&a}};
  CHECK(compute_speaker_means(std::span(&single, 1), Partition::Test)[0].mean_frame == a);
  SpeakerFrames none{"S3", {}};
  try {
    compute_speaker_means(std::span(&none, 1), Partition::All);
    FAIL("empty group accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoFrames);
  }
}

TEST_CASE("a probe offset shifts the speaker mean by the same amount") {
  // One class frame rendered plainly and with a +3 column offset.
  corpus::SpeakerTraits shift;
  shift.offset_cols = 3.0;
  const auto plain = corpus::render_class_frame(40, 56, corpus::ArticulationClass::Velar);
  const auto moved = corpus::render_class_frame(40, 56, corpus::ArticulationClass::Velar, shift);
  std::vector<const Frame*> p{&plain}, q{&moved};
  SpeakerFrames gp{"p", p}, gq{"q", q};
  const auto mp = compute_speaker_means(std::span(&gp, 1), Partition::All)[0].mean_frame;
  const auto mq = compute_speaker_means(std::span(&gq, 1), Partition::All)[0].mean_frame;
  // cross-correlate along columns: the best lag is +3
  int best_lag = 0;
  double best = -1e300;
  for (int lag = -6; lag <= 6; ++lag) {
    double s = 0.0;
    for (int r = 0; r < 40; ++r)
      for (int c = 0; c < 56; ++c)
        if (c + lag >= 0 && c + lag < 56) s += mp(r, c) * mq(r, c + lag);
    if (s > best) best = s, best_lag = lag;
  }
  CHECK(best_lag == 3);
}

TEST_CASE("mean PCA is rank limited by the number of training speakers") {
  std::mt19937_64 rng(31);
  std::vector<SpeakerMean> means;
  for (int s = 0; s < 3; ++s) means.push_back({"S" + std::to_string(s), random_frames(rng, 1, 4, 5)[0], Partition::Train});
  CHECK(fit_mean_pca(means).n_components() == 2);
  CHECK_THROWS_AS(fit_mean_pca(std::span(means).first(1)), Error);
}

TEST_CASE("variant naming and combinations") {
  CHECK(make_variant("dnn", "raw") == Variant::DnnRaw);
  CHECK(make_variant("dnn", "pca") == Variant::DnnPca);
  CHECK(make_variant("dnn", "dct") == Variant::DnnDct);
  CHECK(make_variant("cnn", "raw") == Variant::CnnRaw);
  for (const char* in : {"pca", "dct"}) {
    try {
      make_variant("cnn", in);
      FAIL("cnn accepted non-raw input");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidCombination);
    }
  }
  for (auto v : {Variant::DnnRaw, Variant::DnnPca, Variant::DnnDct, Variant::CnnRaw})
    CHECK(parse_variant(variant_name(v)) == v);
}

namespace {

Transforms real_geometry(Variant v, bool with_mean) {
  Transforms t;
  t.variant = v;
  t.with_mean = with_mean;
  t.norm.height = corpus::kScanLines;
  t.norm.width = corpus::kEchoReturns;
  const std::size_t d = static_cast<std::size_t>(corpus::kScanLines) * corpus::kEchoReturns;
  t.norm.mean.assign(d, 0.0);
  t.norm.std.assign(d, 1.0);
  if (v == Variant::DnnPca) {
    PcaModel p;
    p.data_mean.assign(d, 0.0);
    p.components = Matrix(kPcaComponents, d);
    p.explained_variance.assign(kPcaComponents, 1.0);
    t.pca = p;
    if (with_mean) {
      PcaModel q;
      q.data_mean.assign(d, 0.0);
      q.components = Matrix(kMeanPcaComponents, d);
      q.explained_variance.assign(kMeanPcaComponents, 1.0);
      t.mean_pca = q;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("input dimensions on real-geometry frames") {
  const Frame frame(corpus::kScanLines, corpus::kEchoReturns);
  struct Case {
    Variant v;
    bool mean;
    InputShape shape;
  };
  const Case cases[] = {
      {Variant::DnnRaw, false, {1, 1, 25956}}, {Variant::DnnRaw, true, {1, 1, 51912}},
      {Variant::DnnPca, false, {1, 1, 1000}},  {Variant::DnnPca, true, {1, 1, 1050}},
      {Variant::DnnDct, false, {1, 1, 1600}},  {Variant::DnnDct, true, {1, 1, 3200}},
      {Variant::CnnRaw, false, {1, 63, 412}},  {Variant::CnnRaw, true, {2, 63, 412}},
  };
  for (const auto& c : cases) {
    CAPTURE(variant_name(c.v));
    CAPTURE(c.mean);
    const auto t = real_geometry(c.v, c.mean);
    CHECK(input_shape(t) == c.shape);
    std::optional<std::vector<double>> mf;
    if (c.mean) mf = mean_features(t, frame);
    const auto in = assemble_input(t, frame, mf ? std::optional<std::span<const double>>(*mf) : std::nullopt);
    CHECK(in.shape == c.shape);
    CHECK(in.values.size() == c.shape.size());
  }
  const auto t = real_geometry(Variant::DnnDct, true);
  CHECK_THROWS_AS(assemble_input(t, frame, std::nullopt), Error);
  std::vector<double> wrong(10);
  CHECK_THROWS_AS(assemble_input(t, frame, std::span<const double>(wrong)), Error);
}

TEST_CASE("mean segment follows the base feature") {
  Transforms t;
  t.variant = Variant::DnnRaw;
  t.with_mean = true;
  t.norm = {1, 2, {0, 0}, {1, 1}};
  const Frame f(1, 2, {3, 4});
  const std::vector<double> mean{7, 8};
  const auto in = assemble_input(t, f, std::span<const double>(mean));
  CHECK(in.values == std::vector<double>{3, 4, 7, 8});
}

TEST_CASE("transform files round trip and applying them leaves the state hash unchanged") {
  std::mt19937_64 rng(37);
  auto frames = random_frames(rng, 12, 6, 8);
  Transforms t;
  t.variant = Variant::DnnPca;
  t.with_mean = true;
  t.norm = fit_normalizer(frames);
  Matrix x(frames.size(), 48);
  for (std::size_t i = 0; i < frames.size(); ++i) apply_normalizer(t.norm, frames[i].samples(), x.row(i));
  t.pca = fit_pca(x, 5);
  std::vector<SpeakerMean> means;
  for (int s = 0; s < 3; ++s) means.push_back({"S" + std::to_string(s), apply_normalizer(t.norm, frames[s]), Partition::Train});
  t.mean_pca = fit_mean_pca(means);

  const auto before = state_hash(t);
  const auto mf = mean_features(t, means[0].mean_frame);
  for (const auto& f : frames) assemble_input(t, apply_normalizer(t.norm, f), std::span<const double>(mf));
  CHECK(state_hash(t) == before);

  const auto bytes = serialize(t, means);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "UTIF");
  std::vector<SpeakerMean> back_means;
  const auto back = deserialize(bytes, &back_means);
  CHECK(state_hash(back) == before);
  CHECK(back.pca->components == t.pca->components);
  REQUIRE(back_means.size() == 3);
  CHECK(back_means[1].mean_frame == means[1].mean_frame);
  CHECK(back_means[1].speaker_id == "S1");

  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  CHECK_THROWS_AS(deserialize(truncated), Error);
  auto versioned = bytes;
  versioned[4] = 9;
  try {
    deserialize(versioned);
    FAIL("future version accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VersionMismatch);
  }
  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize(magic), Error);

  const auto path = std::filesystem::temp_directory_path() / "uti_transforms_test.utif";
  save_transforms(path, t, means);
  CHECK(state_hash(load_transforms(path)) == before);
  std::filesystem::remove(path);
}

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

#include "uti/features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "uti/binio.hpp"
#include "uti/error.hpp"
#include "uti/simd/kernels.hpp"

namespace uti::features {

using simd::Trans;

InputFormat input_format(Variant v) {
  switch (v) {
    case Variant::DnnRaw:
    case Variant::CnnRaw: return InputFormat::Raw;
    case Variant::DnnPca: return InputFormat::Pca;
    case Variant::DnnDct: return InputFormat::Dct;
  }
  return InputFormat::Raw;
}

bool is_cnn(Variant v) { return v == Variant::CnnRaw; }

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::DnnRaw: return "dnn_raw";
    case Variant::DnnPca: return "dnn_pca";
    case Variant::DnnDct: return "dnn_dct";
    case Variant::CnnRaw: return "cnn_raw";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::DnnRaw, Variant::DnnPca, Variant::DnnDct, Variant::CnnRaw})
    if (variant_name(v) == name) return v;
  throw Error(ErrorCode::Config, "unknown variant `" + std::string(name) + "`");
}

Variant make_variant(std::string_view model, std::string_view input) {
  if (model != "dnn" && model != "cnn") throw Error(ErrorCode::Config, "model must be dnn or cnn");
  if (input != "raw" && input != "pca" && input != "dct")
    throw Error(ErrorCode::Config, "input must be raw, pca or dct");
  if (model == "cnn") {
    if (input != "raw")
      throw Error(ErrorCode::InvalidCombination, "the CNN is only defined on raw input");
    return Variant::CnnRaw;
  }
  if (input == "raw") return Variant::DnnRaw;
  if (input == "pca") return Variant::DnnPca;
  return Variant::DnnDct;
}

// ---- normalization ----------------------------------------------------------

NormStats fit_normalizer(std::span<const Frame* const> frames) {
  if (frames.size() < 2)
    throw Error(ErrorCode::TooFewFrames, "normalizer needs at least 2 frames");
  NormStats s;
  s.height = frames.front()->height();
  s.width = frames.front()->width();
  const std::size_t d = frames.front()->size();
  s.mean.assign(d, 0.0);
  s.std.assign(d, 0.0);
  for (const Frame* f : frames) {
    if (f->height() != s.height || f->width() != s.width)
      throw Error(ErrorCode::DimensionMismatch, "frames of different geometry");
    simd::axpy(1.0, f->samples(), s.mean);
  }
  const double n = static_cast<double>(frames.size());
  for (double& m : s.mean) m /= n;
  // Two-pass variance.
  for (const Frame* f : frames) {
    const auto x = f->samples();
    for (std::size_t i = 0; i < d; ++i) {
      const double dx = x[i] - s.mean[i];
      s.std[i] += dx * dx;
    }
  }
  for (double& v : s.std) v = std::max(std::sqrt(v / n), kStdFloor);
  return s;
}

NormStats fit_normalizer(std::span<const Frame> frames) {
  std::vector<const Frame*> ptrs;
  ptrs.reserve(frames.size());
  for (const auto& f : frames) ptrs.push_back(&f);
  return fit_normalizer(ptrs);
}

void apply_normalizer(const NormStats& stats, std::span<const double> frame, std::span<double> out) {
  if (frame.size() != stats.mean.size() || out.size() != frame.size())
    throw Error(ErrorCode::DimensionMismatch, "frame does not match normalizer geometry");
  for (std::size_t i = 0; i < frame.size(); ++i) out[i] = (frame[i] - stats.mean[i]) / stats.std[i];
}

Frame apply_normalizer(const NormStats& stats, const Frame& frame) {
  if (frame.height() != stats.height || frame.width() != stats.width)
    throw Error(ErrorCode::DimensionMismatch, "frame does not match normalizer geometry");
  Frame out(frame.height(), frame.width());
  apply_normalizer(stats, frame.samples(), out.samples());
  return out;
}

// ---- PCA --------------------------------------------------------------------

PcaModel fit_pca(const Matrix& data, std::size_t k) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  if (n < 2) throw Error(ErrorCode::TooFewFrames, "PCA needs at least 2 rows");
  if (k == 0) throw Error(ErrorCode::Config, "PCA needs k >= 1");

  PcaModel model;
  model.data_mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) simd::axpy(1.0, data.row(i), model.data_mean);
  for (double& m : model.data_mean) m /= static_cast<double>(n);

  Matrix centered(n, d);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      centered(i, j) = data(i, j) - model.data_mean[j];
      max_abs = std::max(max_abs, std::abs(centered(i, j)));
    }
  }
  if (max_abs == 0.0) throw Error(ErrorCode::DegenerateData, "all rows are identical");

  const auto& kern = simd::kernels();
  // Eigen-decompose the smaller of the covariance (d x d) and Gram (n x n)
  // matrices; both share the non-zero spectrum.
  const bool use_cov = d <= n;
  const std::size_t m = use_cov ? d : n;
  Matrix sym(m, m);
  if (use_cov) {
    kern.gemm(Trans::Yes, Trans::No, d, d, n, 1.0, centered.data(), d, centered.data(), d, 0.0,
              sym.data(), d);
  } else {
    kern.gemm(Trans::No, Trans::Yes, n, n, d, 1.0, centered.data(), d, centered.data(), d, 0.0,
              sym.data(), n);
  }
  Eigen::MatrixXd es_in(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) es_in(i, j) = 0.5 * (sym(i, j) + sym(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(es_in);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::DegenerateData, "eigendecomposition failed");

  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double top = evals(static_cast<Eigen::Index>(m) - 1);
  if (!(top > 0.0)) throw Error(ErrorCode::DegenerateData, "zero variance");
  const double tol = top * 1e-10;
  std::size_t kmax = std::min({k, n - 1, d});

  std::vector<std::vector<double>> comps;
  std::vector<double> variances;
  for (std::size_t r = 0; r < kmax; ++r) {
    const auto idx = static_cast<Eigen::Index>(m - 1 - r);
    const double lambda = evals(idx);
    if (!(lambda > tol)) break;
    std::vector<double> v(d);
    if (use_cov) {
      for (std::size_t j = 0; j < d; ++j) v[j] = es.eigenvectors()(static_cast<Eigen::Index>(j), idx);
    } else {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) u[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), idx);
      kern.gemm(Trans::Yes, Trans::No, d, 1, n, 1.0, centered.data(), d, u.data(), 1, 0.0, v.data(), 1);
      const double norm = std::sqrt(kern.dot(v.data(), v.data(), d));
      for (double& x : v) x /= norm;
    }
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    if (v[arg] < 0.0)
      for (double& x : v) x = -x;
    comps.push_back(std::move(v));
    variances.push_back(lambda / static_cast<double>(n - 1));
  }

  model.components = Matrix(comps.size(), d);
  for (std::size_t r = 0; r < comps.size(); ++r)
    std::copy(comps[r].begin(), comps[r].end(), model.components.row(r).begin());
  model.explained_variance = std::move(variances);
  return model;
}

void pca_project(const PcaModel& model, std::span<const double> x, std::span<double> out) {
  const std::size_t d = model.dim();
  const std::size_t k = model.n_components();
  if (x.size() != d || out.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "PCA projection dimension mismatch");
  std::vector<double> centered(d);
  for (std::size_t j = 0; j < d; ++j) centered[j] = x[j] - model.data_mean[j];
  simd::kernels().gemm(Trans::No, Trans::No, k, 1, d, 1.0, model.components.data(), d,
                       centered.data(), 1, 0.0, out.data(), 1);
}

std::vector<double> pca_project(const PcaModel& model, std::span<const double> x) {
  std::vector<double> out(model.n_components());
  pca_project(model, x, out);
  return out;
}

// ---- DCT --------------------------------------------------------------------

const Matrix& dct_basis(int n) {
  if (n < 1) throw Error(ErrorCode::Shape, "DCT size must be positive");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const Matrix>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    auto b = std::make_unique<Matrix>(n, n);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        (*b)(k, i) = (k == 0 ? a0 : ak) * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    slot = std::move(b);
  }
  return *slot;
}

namespace {

// out[rows x cols] = B_h[:rows] * X * B_w[:cols]^T
void separable(const double* x, int h, int w, int rows, int cols, double* out) {
  const Matrix& bh = dct_basis(h);
  const Matrix& bw = dct_basis(w);
  const auto& kern = simd::kernels();
  std::vector<double> tmp(static_cast<std::size_t>(h) * cols);
  kern.gemm(Trans::No, Trans::Yes, h, cols, w, 1.0, x, w, bw.data(), w, 0.0, tmp.data(), cols);
  kern.gemm(Trans::No, Trans::No, rows, cols, h, 1.0, bh.data(), h, tmp.data(), cols, 0.0, out, cols);
}

}  // namespace

Matrix dct2(const Matrix& x) {
  if (x.empty()) throw Error(ErrorCode::Shape, "empty input");
  const int h = static_cast<int>(x.rows());
  const int w = static_cast<int>(x.cols());
  Matrix out(h, w);
  separable(x.data(), h, w, h, w, out.data());
  return out;
}

Matrix dct2(const Frame& frame) {
  Matrix m(frame.height(), frame.width());
  std::copy(frame.samples().begin(), frame.samples().end(), m.values().begin());
  return dct2(m);
}

Matrix idct2(const Matrix& coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::Shape, "empty input");
  const std::size_t h = coeffs.rows();
  const std::size_t w = coeffs.cols();
  const Matrix& bh = dct_basis(static_cast<int>(h));
  const Matrix& bw = dct_basis(static_cast<int>(w));
  const auto& kern = simd::kernels();
  Matrix tmp(h, w);
  Matrix out(h, w);
  kern.gemm(Trans::No, Trans::No, h, w, w, 1.0, coeffs.data(), w, bw.data(), w, 0.0, tmp.data(), w);
  kern.gemm(Trans::Yes, Trans::No, h, w, h, 1.0, bh.data(), h, tmp.data(), w, 0.0, out.data(), w);
  return out;
}

std::vector<double> truncate_dct(const Matrix& coeffs, int rows, int cols) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::Config, "truncation must keep at least 1x1");
  if (static_cast<std::size_t>(rows) > coeffs.rows() || static_cast<std::size_t>(cols) > coeffs.cols())
    throw Error(ErrorCode::FrameTooSmall, "frame smaller than DCT truncation window");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.push_back(coeffs(r, c));
  return out;
}

void dct2_truncated(std::span<const double> frame, int height, int width, int rows, int cols,
                    std::span<double> out) {
  if (rows > height || cols > width)
    throw Error(ErrorCode::FrameTooSmall, "frame smaller than DCT truncation window");
  if (frame.size() != static_cast<std::size_t>(height) * width ||
      out.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(ErrorCode::DimensionMismatch, "DCT buffer size mismatch");
  separable(frame.data(), height, width, rows, cols, out.data());
}

// ---- speaker means ------------------------------------------------------------

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Dev: return "dev";
    case Partition::Test: return "test";
    case Partition::All: return "all";
  }
  return "?";
}

std::vector<SpeakerMean> compute_speaker_means(std::span<const SpeakerFrames> groups,
                                               Partition partition) {
  std::vector<SpeakerMean> out;
  for (const auto& g : groups) {
    if (g.frames.empty()) throw Error(ErrorCode::NoFrames, g.speaker_id);
    const Frame& first = *g.frames.front();
    Frame mean(first.height(), first.width());
    for (const Frame* f : g.frames) {
      if (f->height() != first.height() || f->width() != first.width())
        throw Error(ErrorCode::DimensionMismatch, "frames of different geometry for " + g.speaker_id);
      simd::axpy(1.0, f->samples(), mean.samples());
    }
    const double n = static_cast<double>(g.frames.size());
    for (double& v : mean.samples()) v /= n;
    out.push_back({g.speaker_id, std::move(mean), partition});
  }
  return out;
}

PcaModel fit_mean_pca(std::span<const SpeakerMean> train_means, std::size_t k) {
  if (train_means.size() < 2)
    throw Error(ErrorCode::TooFewFrames, "speaker-mean PCA needs at least 2 training speakers");
  const std::size_t d = train_means.front().mean_frame.size();
  Matrix m(train_means.size(), d);
  for (std::size_t i = 0; i < train_means.size(); ++i) {
    const auto s = train_means[i].mean_frame.samples();
    if (s.size() != d) throw Error(ErrorCode::DimensionMismatch, "speaker means of different geometry");
    std::copy(s.begin(), s.end(), m.row(i).begin());
  }
  return fit_pca(m, k);
}

// ---- model inputs ---------------------------------------------------------------

std::size_t base_feature_dim(const Transforms& t) {
  const std::size_t pixels = static_cast<std::size_t>(t.norm.height) * t.norm.width;
  switch (input_format(t.variant)) {
    case InputFormat::Raw: return pixels;
    case InputFormat::Pca:
      if (!t.pca) throw Error(ErrorCode::Config, "PCA variant without a fitted PCA");
      return t.pca->n_components();
    case InputFormat::Dct: return static_cast<std::size_t>(t.dct_rows) * t.dct_cols;
  }
  return 0;
}

std::size_t mean_feature_dim(const Transforms& t) {
  if (!t.with_mean) return 0;
  const std::size_t pixels = static_cast<std::size_t>(t.norm.height) * t.norm.width;
  switch (input_format(t.variant)) {
    case InputFormat::Raw: return pixels;
    case InputFormat::Pca:
      if (!t.mean_pca) throw Error(ErrorCode::Config, "PCA variant without a fitted speaker-mean PCA");
      return t.mean_pca->n_components();
    case InputFormat::Dct: return static_cast<std::size_t>(t.dct_rows) * t.dct_cols;
  }
  return 0;
}

InputShape input_shape(const Transforms& t) {
  if (is_cnn(t.variant)) return {t.with_mean ? 2 : 1, t.norm.height, t.norm.width};
  return {1, 1, static_cast<int>(base_feature_dim(t) + mean_feature_dim(t))};
}

std::vector<double> mean_features(const Transforms& t, const Frame& mean_frame) {
  if (mean_frame.height() != t.norm.height || mean_frame.width() != t.norm.width)
    throw Error(ErrorCode::DimensionMismatch, "speaker mean geometry differs from transforms");
  switch (input_format(t.variant)) {
    case InputFormat::Raw:
      return {mean_frame.samples().begin(), mean_frame.samples().end()};
    case InputFormat::Pca:
      if (!t.mean_pca) throw Error(ErrorCode::Config, "no fitted speaker-mean PCA");
      return pca_project(*t.mean_pca, mean_frame.samples());
    case InputFormat::Dct: {
      std::vector<double> out(static_cast<std::size_t>(t.dct_rows) * t.dct_cols);
      dct2_truncated(mean_frame.samples(), mean_frame.height(), mean_frame.width(), t.dct_rows,
                     t.dct_cols, out);
      return out;
    }
  }
  return {};
}

void assemble_input(const Transforms& t, std::span<const double> normalized,
                    std::optional<std::span<const double>> mean_feature, std::span<double> out) {
  const std::size_t pixels = static_cast<std::size_t>(t.norm.height) * t.norm.width;
  if (normalized.size() != pixels)
    throw Error(ErrorCode::DimensionMismatch, "frame does not match transform geometry");
  if (mean_feature.has_value() != t.with_mean)
    throw Error(ErrorCode::DimensionMismatch,
                t.with_mean ? "speaker-mean feature required" : "unexpected speaker-mean feature");
  const std::size_t base = base_feature_dim(t);
  const std::size_t extra = mean_feature_dim(t);
  if (mean_feature && mean_feature->size() != extra)
    throw Error(ErrorCode::DimensionMismatch, "speaker-mean feature has " +
                                                  std::to_string(mean_feature->size()) +
                                                  " values, expected " + std::to_string(extra));
  if (out.size() != base + extra) throw Error(ErrorCode::DimensionMismatch, "output buffer size");

  const auto head = out.subspan(0, base);
  switch (input_format(t.variant)) {
    case InputFormat::Raw:
      std::copy(normalized.begin(), normalized.end(), head.begin());
      break;
    case InputFormat::Pca:
      pca_project(*t.pca, normalized, head);
      break;
    case InputFormat::Dct:
      dct2_truncated(normalized, t.norm.height, t.norm.width, t.dct_rows, t.dct_cols, head);
      break;
  }
  if (mean_feature) std::copy(mean_feature->begin(), mean_feature->end(), out.begin() + base);
}

ModelInput assemble_input(const Transforms& t, const Frame& normalized,
                          std::optional<std::span<const double>> mean_feature) {
  ModelInput in;
  in.shape = input_shape(t);
  in.values.resize(in.shape.size());
  assemble_input(t, normalized.samples(), mean_feature, in.values);
  return in;
}

// ---- UTIF -------------------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "UTIF";

void put_pca(binio::Writer& w, const PcaModel& p) {
  w.u64(p.n_components());
  w.u64(p.dim());
  w.f64s(p.data_mean);
  w.f64s(p.components.values());
  w.f64s(p.explained_variance);
}

PcaModel get_pca(binio::Reader& r) {
  PcaModel p;
  const std::uint64_t k = r.u64();
  const std::uint64_t d = r.u64();
  if (d == 0 || k > d) r.fail("bad PCA dimensions");
  p.data_mean = r.f64s(d);
  if (k > 0 && d > r.remaining() / sizeof(double) / k) r.fail();
  p.components = Matrix(k, d);
  p.components.values() = r.f64s(k * d);
  p.explained_variance = r.f64s(k);
  return p;
}

void section(binio::Writer& w, std::string_view tag, const binio::Writer& body) {
  w.str(tag);
  w.u64(body.size());
  const auto& d = body.data();
  w.bytes(std::string_view(reinterpret_cast<const char*>(d.data()), d.size()));
}

}  // namespace

std::vector<std::uint8_t> serialize(const Transforms& t, std::span<const SpeakerMean> means) {
  binio::Writer w;
  w.bytes(kMagic);
  w.u32(kTransformsVersion);
  w.u32(static_cast<std::uint32_t>(t.variant));
  w.u32(t.with_mean ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(t.dct_rows));
  w.u32(static_cast<std::uint32_t>(t.dct_cols));

  binio::Writer norm;
  norm.u32(static_cast<std::uint32_t>(t.norm.height));
  norm.u32(static_cast<std::uint32_t>(t.norm.width));
  norm.f64s(t.norm.mean);
  norm.f64s(t.norm.std);
  section(w, "NORM", norm);

  if (t.pca) {
    binio::Writer pca;
    put_pca(pca, *t.pca);
    section(w, "PCA", pca);
  }

  if (t.mean_pca || !means.empty()) {
    binio::Writer sm;
    sm.u32(t.mean_pca ? 1 : 0);
    if (t.mean_pca) put_pca(sm, *t.mean_pca);
    sm.u32(static_cast<std::uint32_t>(means.size()));
    for (const auto& m : means) {
      sm.str(m.speaker_id);
      sm.u32(static_cast<std::uint32_t>(m.source_partition));
      sm.u32(static_cast<std::uint32_t>(m.mean_frame.height()));
      sm.u32(static_cast<std::uint32_t>(m.mean_frame.width()));
      sm.f64s(m.mean_frame.samples());
    }
    section(w, "SMEAN", sm);
  }
  return w.data();
}

Transforms deserialize(std::span<const std::uint8_t> bytes, std::vector<SpeakerMean>* means) {
  binio::Reader r(bytes, ErrorCode::CorruptCheckpoint);
  if (r.bytes(4) != kMagic) r.fail("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kTransformsVersion)
    throw Error(ErrorCode::VersionMismatch, "transforms version " + std::to_string(version));
  Transforms t;
  const std::uint32_t variant = r.u32();
  if (variant > static_cast<std::uint32_t>(Variant::CnnRaw)) r.fail("bad variant");
  t.variant = static_cast<Variant>(variant);
  t.with_mean = r.u32() != 0;
  t.dct_rows = static_cast<int>(r.u32());
  t.dct_cols = static_cast<int>(r.u32());
  bool have_norm = false;
  if (means) means->clear();
  while (!r.done()) {
    const std::string tag = r.str();
    const std::uint64_t len = r.u64();
    if (len > r.remaining()) r.fail("section length exceeds file");
    const std::string body_bytes = r.bytes(len);
    const std::span<const std::uint8_t> body_span(
        reinterpret_cast<const std::uint8_t*>(body_bytes.data()), body_bytes.size());
    binio::Reader body(body_span, ErrorCode::CorruptCheckpoint);
    if (tag == "NORM") {
      t.norm.height = static_cast<int>(body.u32());
      t.norm.width = static_cast<int>(body.u32());
      const std::size_t d = static_cast<std::size_t>(t.norm.height) * t.norm.width;
      t.norm.mean = body.f64s(d);
      t.norm.std = body.f64s(d);
      have_norm = true;
    } else if (tag == "PCA") {
      t.pca = get_pca(body);
    } else if (tag == "SMEAN") {
      if (body.u32() != 0) t.mean_pca = get_pca(body);
      const std::uint32_t n = body.u32();
      for (std::uint32_t i = 0; i < n; ++i) {
        SpeakerMean m;
        m.speaker_id = body.str();
        const std::uint32_t part = body.u32();
        if (part > static_cast<std::uint32_t>(Partition::All)) body.fail("bad partition");
        m.source_partition = static_cast<Partition>(part);
        const int h = static_cast<int>(body.u32());
        const int w = static_cast<int>(body.u32());
        if (h < 1 || w < 1) body.fail("bad mean geometry");
        m.mean_frame = Frame(h, w, body.f64s(static_cast<std::size_t>(h) * w));
        if (means) means->push_back(std::move(m));
      }
    } else {
      r.fail("unknown section " + tag);
    }
    if (!body.done()) r.fail("trailing bytes in section " + tag);
  }
  if (!have_norm) r.fail("missing NORM section");
  return t;
}

void save_transforms(const std::filesystem::path& path, const Transforms& t,
                     std::span<const SpeakerMean> means) {
  binio::write_file(path, serialize(t, means));
}

Transforms load_transforms(const std::filesystem::path& path, std::vector<SpeakerMean>* means) {
  return deserialize(binio::read_file(path), means);
}

std::uint64_t state_hash(const Transforms& t) { return binio::fnv1a(serialize(t)); }

}  // namespace uti::features

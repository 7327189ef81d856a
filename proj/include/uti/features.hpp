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

// Per-pixel normalization, eigentongue PCA, truncated 2D DCT, speaker means
// and model-input assembly.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uti/corpus.hpp"
#include "uti/matrix.hpp"

namespace uti::features {

using corpus::Frame;

enum class InputFormat { Raw, Pca, Dct };

enum class Variant { DnnRaw, DnnPca, DnnDct, CnnRaw };

InputFormat input_format(Variant v);
bool is_cnn(Variant v);
std::string_view variant_name(Variant v);  // dnn_raw, dnn_pca, dnn_dct, cnn_raw
Variant parse_variant(std::string_view name);
// (model, input) pair from the CLI; throws InvalidCombination for CNN on
// anything but raw input.
Variant make_variant(std::string_view model, std::string_view input);

inline constexpr int kPcaComponents = 1000;
inline constexpr int kMeanPcaComponents = 50;
inline constexpr int kDctRows = 40;
inline constexpr int kDctCols = 40;
inline constexpr double kStdFloor = 1e-6;

// ---- normalization ----------------------------------------------------------

struct NormStats {
  int height = 0;
  int width = 0;
  std::vector<double> mean;
  std::vector<double> std;  // population std, floored at kStdFloor
};

NormStats fit_normalizer(std::span<const Frame* const> frames);
NormStats fit_normalizer(std::span<const Frame> frames);
Frame apply_normalizer(const NormStats& stats, const Frame& frame);
void apply_normalizer(const NormStats& stats, std::span<const double> frame, std::span<double> out);

// ---- PCA --------------------------------------------------------------------

struct PcaModel {
  std::vector<double> data_mean;          // length D
  Matrix components;                      // K x D, orthonormal rows
  std::vector<double> explained_variance; // length K, non-increasing

  std::size_t dim() const { return data_mean.size(); }
  std::size_t n_components() const { return components.rows(); }
};

// Rows of `data` are observations. K = min(k, N-1, D, rank).
PcaModel fit_pca(const Matrix& data, std::size_t k);
std::vector<double> pca_project(const PcaModel& model, std::span<const double> x);
void pca_project(const PcaModel& model, std::span<const double> x, std::span<double> out);

// ---- DCT --------------------------------------------------------------------

// Orthonormal DCT-II along rows then columns.
Matrix dct2(const Matrix& x);
Matrix dct2(const Frame& frame);
Matrix idct2(const Matrix& coeffs);
// Rows 0..r-1, cols 0..c-1, flattened row-major.
std::vector<double> truncate_dct(const Matrix& coeffs, int rows = kDctRows, int cols = kDctCols);
// Truncated coefficients computed directly, without the full transform.
void dct2_truncated(std::span<const double> frame, int height, int width, int rows, int cols,
                    std::span<double> out);
// N x N orthonormal DCT-II basis, row k = frequency k.
const Matrix& dct_basis(int n);

// ---- speaker means ------------------------------------------------------------

enum class Partition { Train, Dev, Test, All };
std::string_view partition_name(Partition p);

struct SpeakerMean {
  std::string speaker_id;
  Frame mean_frame;  // pixel-wise mean of normalized frames
  Partition source_partition = Partition::Train;
};

struct SpeakerFrames {
  std::string speaker_id;
  std::vector<const Frame*> frames;  // normalized frames
};

std::vector<SpeakerMean> compute_speaker_means(std::span<const SpeakerFrames> groups,
                                               Partition partition);

// PCA over the matrix of training-speaker means, K = min(k, #speakers - 1, D).
PcaModel fit_mean_pca(std::span<const SpeakerMean> train_means,
                      std::size_t k = kMeanPcaComponents);

// ---- model inputs ---------------------------------------------------------------

struct InputShape {
  int channels = 1;
  int height = 1;
  int width = 1;
  std::size_t size() const { return static_cast<std::size_t>(channels) * height * width; }
  friend bool operator==(const InputShape&, const InputShape&) = default;
};

struct ModelInput {
  InputShape shape;
  std::vector<double> values;  // channel-major
};

// The fitted transforms an input variant needs.
struct Transforms {
  Variant variant = Variant::DnnRaw;
  bool with_mean = false;
  NormStats norm;
  std::optional<PcaModel> pca;       // DnnPca
  std::optional<PcaModel> mean_pca;  // DnnPca with mean
  int dct_rows = kDctRows;
  int dct_cols = kDctCols;
};

std::size_t base_feature_dim(const Transforms& t);
std::size_t mean_feature_dim(const Transforms& t);
InputShape input_shape(const Transforms& t);

// Encodes a normalized speaker-mean frame for the variant: flattened for
// raw/CNN, mean-PCA projection for PCA, truncated DCT for DCT.
std::vector<double> mean_features(const Transforms& t, const Frame& mean_frame);

// `mean_feature` must be present iff t.with_mean.
ModelInput assemble_input(const Transforms& t, const Frame& normalized,
                          std::optional<std::span<const double>> mean_feature);
void assemble_input(const Transforms& t, std::span<const double> normalized,
                    std::optional<std::span<const double>> mean_feature, std::span<double> out);

// UTIF container: magic, version, header, then NORM / PCA / SMEAN sections.
inline constexpr std::uint32_t kTransformsVersion = 1;
std::vector<std::uint8_t> serialize(const Transforms& t, std::span<const SpeakerMean> means = {});
Transforms deserialize(std::span<const std::uint8_t> bytes, std::vector<SpeakerMean>* means = nullptr);
void save_transforms(const std::filesystem::path& path, const Transforms& t,
                     std::span<const SpeakerMean> means = {});
Transforms load_transforms(const std::filesystem::path& path, std::vector<SpeakerMean>* means = nullptr);
std::uint64_t state_hash(const Transforms& t);

}  // namespace uti::features

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

// Speakers, utterances, frames and phone labels, plus on-disk ingestion and
// a synthetic corpus generator with controllable inter-speaker variation.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uti::corpus {

inline constexpr int kScanLines = 63;
inline constexpr int kEchoReturns = 412;

// One ultrasound frame: `height` scan lines by `width` echo returns.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width);
  Frame(int height, int width, std::vector<double> samples);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return samples_.size(); }

  double operator()(int r, int c) const { return samples_[static_cast<std::size_t>(r) * width_ + c]; }
  double& operator()(int r, int c) { return samples_[static_cast<std::size_t>(r) * width_ + c]; }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> samples_;
};

enum class Gender { Female, Male };
enum class UtteranceType { A, B };

enum class ArticulationClass : int {
  BilabialLabiodental = 1,
  DentalAlveolarPostalveolar = 2,
  Velar = 3,
  AlveolarApproximant = 4,
};

inline constexpr int kNumClasses = 4;
inline constexpr std::array<ArticulationClass, kNumClasses> kAllClasses{
    ArticulationClass::BilabialLabiodental, ArticulationClass::DentalAlveolarPostalveolar,
    ArticulationClass::Velar, ArticulationClass::AlveolarApproximant};

inline int class_index(ArticulationClass c) { return static_cast<int>(c) - 1; }
ArticulationClass class_from_int(int value);  // 1..4, throws Parse otherwise
std::string_view class_name(ArticulationClass c);

struct Speaker {
  std::string id;
  int age_years = 0;
  Gender gender = Gender::Female;
};

struct PhoneAlignment {
  std::string phone;
  int start_frame = 0;  // inclusive
  int end_frame = 0;    // inclusive

  friend bool operator==(const PhoneAlignment&, const PhoneAlignment&) = default;
};

struct Utterance {
  std::string speaker_id;
  UtteranceType type = UtteranceType::A;
  std::vector<Frame> frames;
  double fps = 121.0;
  std::vector<PhoneAlignment> alignments;
};

struct Corpus {
  int frame_height = kScanLines;
  int frame_width = kEchoReturns;
  std::vector<Speaker> speakers;
  std::vector<Utterance> utterances;

  const Speaker& speaker(std::string_view id) const;
  std::size_t speaker_index(std::string_view id) const;
  bool has_speaker(std::string_view id) const;
  // Utterance indices of one speaker, in corpus order.
  std::vector<std::size_t> utterances_of(std::string_view id) const;
};

// Checks every corpus invariant (geometry, intensity range, unique ids,
// alignment bounds and ordering). Throws on the first violation.
void validate(const Corpus& corpus);

// Phone label -> articulation class table.
class PhoneMap {
 public:
  static PhoneMap defaults();
  // Text table, one `phone<TAB>class` record per line (class 1..4), `#` comments.
  static PhoneMap load(const std::filesystem::path& path);

  PhoneMap() = default;
  void set(std::string phone, ArticulationClass c) { table_[std::move(phone)] = c; }
  std::optional<ArticulationClass> lookup(std::string_view phone) const;
  const std::map<std::string, ArticulationClass, std::less<>>& table() const { return table_; }

 private:
  std::map<std::string, ArticulationClass, std::less<>> table_;
};

std::optional<ArticulationClass> phone_to_class(std::string_view phone, const PhoneMap& mapping);

// ---- raw frames -----------------------------------------------------------

// Unsigned 8-bit samples, frame-major, row-major within a frame.
std::vector<Frame> load_ult(const std::filesystem::path& path, int height, int width);
// Samples must be integral and within [0, 255].
void save_ult(const std::filesystem::path& path, std::span<const Frame> frames);

// ---- alignments -----------------------------------------------------------

std::vector<PhoneAlignment> parse_alignments(std::string_view text);
std::vector<PhoneAlignment> load_alignments(const std::filesystem::path& path);
void save_alignments(const std::filesystem::path& path, std::span<const PhoneAlignment> alignments);

// ---- speaker metadata and manifest ---------------------------------------

std::vector<Speaker> load_speakers_csv(const std::filesystem::path& path);
void save_speakers_csv(const std::filesystem::path& path, std::span<const Speaker> speakers);

struct ManifestEntry {
  std::string speaker_id;
  UtteranceType type = UtteranceType::A;
  std::filesystem::path ult_path;
  std::filesystem::path align_path;
  double fps = 121.0;
};

// Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& manifest, const std::filesystem::path& speakers_csv,
                   int height = kScanLines, int width = kEchoReturns);

// Writes `speakers.csv`, `manifest.tsv`, and per-utterance `.ult`/`.align`
// files under `dir`.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

// ---- synthetic corpora ----------------------------------------------------

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SyntheticConfig {
  int n_speakers = 12;
  int utterances_per_speaker = 20;
  int frame_height = 40;
  int frame_width = 56;
  double probe_offset_range = 4.0;  // pixels, per axis, symmetric
  Range gain_range{0.8, 1.25};
  Range scale_range{0.9, 1.1};      // anatomy scale
  double shape_jitter = 0.08;       // per-token tongue-shape variation
  double anatomy_range = 0.10;      // max |height| of speaker-specific surface bumps
  double noise_sigma = 12.0;
  std::uint64_t seed = 7;
};

// Smooth speaker-specific deformation added to every tongue surface
// (palate and jaw differences), in the same units as the class shapes.
struct AnatomyBump {
  double center = 0.5;
  double width = 0.2;
  double height = 0.0;
};

// Fixed per-speaker transform applied to every frame of that speaker.
struct SpeakerTraits {
  double offset_rows = 0.0;
  double offset_cols = 0.0;
  double gain = 1.0;
  double scale = 1.0;
  std::vector<AnatomyBump> anatomy;
};

void validate(const SyntheticConfig& cfg);

Corpus generate_synthetic_corpus(const SyntheticConfig& cfg);

// Speaker transforms the generator drew for each speaker, in corpus order.
std::vector<SpeakerTraits> synthetic_speaker_traits(const SyntheticConfig& cfg);

// Noise-free frame of the canonical tongue shape for one class at its
// articulation peak, under the given speaker transform.
Frame render_class_frame(int height, int width, ArticulationClass c,
                         const SpeakerTraits& traits = {});

}  // namespace uti::corpus

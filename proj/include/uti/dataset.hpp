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

// Utterance-level splits, mid-phone example extraction, window oversampling
// and the per-scenario example layouts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uti/corpus.hpp"

namespace uti::dataset {

using corpus::ArticulationClass;
using corpus::Corpus;
using corpus::Frame;

enum class Provenance { MidPhone, WindowSampled };

struct LabeledExample {
  std::size_t utterance = 0;  // index into Corpus::utterances
  int frame_index = 0;
  ArticulationClass cls = ArticulationClass::BilabialLabiodental;
  std::string speaker_id;
  Provenance provenance = Provenance::MidPhone;
  // Source phone span, inclusive.
  int span_start = 0;
  int span_end = 0;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

inline const Frame& frame_of(const Corpus& corpus, const LabeledExample& ex) {
  return corpus.utterances[ex.utterance].frames[static_cast<std::size_t>(ex.frame_index)];
}

struct SplitSpec {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  std::uint64_t seed = 1;
};

void validate(const SplitSpec& spec);

// Partition sizes for n utterances: largest remainder, minimum 1 each.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

struct SpeakerSplit {
  std::string speaker_id;
  std::vector<std::size_t> train;  // utterance indices
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

// One entry per corpus speaker, in corpus order.
using Splits = std::vector<SpeakerSplit>;

Splits split_utterances(const Corpus& corpus, const SplitSpec& spec);

std::vector<LabeledExample> extract_mid_examples(const Corpus& corpus,
                                                 std::span<const std::size_t> utterances,
                                                 const corpus::PhoneMap& mapping);

struct OversampleSpec {
  int target = 50;
  int window = 5;
  std::uint64_t seed = 1;
};

// Adds window-sampled examples to each (speaker, class) with fewer than
// `target` examples. Input must be mid-phone training examples; the result
// keeps them first, in order, followed by the sampled ones.
std::vector<LabeledExample> oversample(std::span<const LabeledExample> train_examples,
                                       const Corpus& corpus, const OversampleSpec& spec);

struct SamplingScore {
  std::string speaker_id;
  double score = 0.0;
  std::size_t sampled = 0;
  std::size_t total = 0;
};

// Training examples of a single speaker after oversampling.
SamplingScore sampling_score(std::span<const LabeledExample> speaker_train);

// Threshold above which a speaker is reported as having a high sampling score.
inline constexpr double kHighSamplingScore = 0.5;

// Labeled examples per speaker and partition, oversampling applied to train.
struct SpeakerExamples {
  std::string speaker_id;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> dev;
  std::vector<LabeledExample> test;
};

struct PreparedData {
  Splits splits;
  std::vector<SpeakerExamples> speakers;  // corpus order

  const SpeakerExamples& of(std::string_view speaker_id) const;
  const SpeakerSplit& split_of(std::string_view speaker_id) const;
};

// Extracts and oversamples examples for every speaker. Each speaker's
// oversampling stream depends only on (seed, speaker position), so the
// result for one speaker is independent of which others are included.
PreparedData prepare(const Corpus& corpus, const Splits& splits, const corpus::PhoneMap& mapping,
                     const OversampleSpec& oversample_spec);

enum class ScenarioKind { Dependent, MultiSpeaker, Independent, Adapted };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::MultiSpeaker;
  std::string speaker_id;           // Dependent / Independent / Adapted target
  std::optional<std::size_t> n_adapt;  // Adapted only
};

std::string_view scenario_name(ScenarioKind kind);
ScenarioKind parse_scenario(std::string_view name);  // dependent|multi|independent|adapted

struct ScenarioData {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> dev;
  std::vector<LabeledExample> test;
  // Adapted only: target speaker's own training and development examples.
  std::vector<LabeledExample> adapt_train;
  std::vector<LabeledExample> adapt_dev;

  std::vector<std::string> train_speakers;  // speakers contributing to train/dev
  std::vector<std::string> test_speakers;
};

ScenarioData materialize_scenario(const PreparedData& data, const ScenarioSpec& spec,
                                  std::uint64_t seed = 1);

// Deterministic subset of min(n, size) examples.
std::vector<LabeledExample> truncate_examples(std::span<const LabeledExample> examples,
                                              std::size_t n, std::uint64_t seed);

// Example-set manifest: `speaker<TAB>utt_idx<TAB>frame_idx<TAB>class<TAB>provenance`.
std::string format_manifest(std::span<const LabeledExample> examples);
void save_manifest(const std::filesystem::path& path, std::span<const LabeledExample> examples);
// Span fields are not part of the manifest and are restored from the corpus.
std::vector<LabeledExample> load_manifest(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace uti::dataset

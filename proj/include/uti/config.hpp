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

// Run configuration: INI-style sections of key = value lines.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uti/corpus.hpp"
#include "uti/dataset.hpp"
#include "uti/features.hpp"
#include "uti/training.hpp"

namespace uti::config {

struct CorpusSource {
  // Either an on-disk corpus (manifest + speakers CSV) or a generated one.
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> speakers;
  int height = corpus::kScanLines;
  int width = corpus::kEchoReturns;
  std::optional<corpus::SyntheticConfig> synthetic;
};

struct Cell {
  features::Variant variant = features::Variant::CnnRaw;
  bool with_mean = false;
};

struct RunConfig {
  CorpusSource corpus;
  dataset::SplitSpec split;
  dataset::OversampleSpec oversample;
  std::optional<std::filesystem::path> phone_map;
  std::vector<Cell> cells;  // used when the command line names no cell
  training::HyperProfile profile = training::HyperProfile::defaults();
  training::PipelineOptions pipeline;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::filesystem::path output = "runs";
};

// Throws Error(Config) on unknown sections/keys or invalid values; relative
// paths resolve against the file's directory. UTI_SEED overrides `seed`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
void validate(const RunConfig& cfg);

// Synthetic corpora written by the generator carry their geometry in
// `corpus.cfg` next to the manifest.
std::string format_corpus_info(const corpus::SyntheticConfig& cfg);
CorpusSource read_corpus_dir(const std::filesystem::path& dir);

corpus::Corpus load_corpus(const CorpusSource& source);
corpus::PhoneMap load_phone_map(const RunConfig& cfg);

}  // namespace uti::config

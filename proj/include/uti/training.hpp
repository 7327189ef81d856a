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

// Epoch loop with best-epoch retention, fine-tuning, and the scenario
// orchestration (dependent, multi-speaker, leave-one-speaker-out, adapted).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uti/corpus.hpp"
#include "uti/dataset.hpp"
#include "uti/evaluation.hpp"
#include "uti/features.hpp"
#include "uti/matrix.hpp"
#include "uti/nn/network.hpp"

namespace uti::training {

using features::Variant;
using nn::Network;
using nn::SgdConfig;

struct EpochLog {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  int best_epoch = 0;  // 0 when no epoch ran
  double best_dev_accuracy = 0.0;
  double wall_time = 0.0;  // seconds
};

struct HyperProfile {
  std::map<std::pair<Variant, bool>, SgdConfig> configs;
  int adapt_epochs_dnn = 6;
  int adapt_epochs_cnn = 20;
  double adapt_lr_scale = 0.1;

  static HyperProfile defaults();

  const SgdConfig& sgd(Variant v, bool with_mean) const;
  SgdConfig& sgd(Variant v, bool with_mean);
  int adapt_epochs(Variant v) const;
  // Fine-tuning schedule: scaled LR, adaptation epoch budget.
  SgdConfig adapt_config(Variant v, bool with_mean) const;
};

// Encoded examples: one input row per example, labels 1..4.
struct ExampleSet {
  Matrix x;
  std::vector<int> labels;
  std::vector<std::string> speakers;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
};

// Called after every epoch with the current network and 1-based epoch;
// returns the development accuracy used for best-epoch selection.
using DevEvaluator = std::function<double(Network&, int)>;

std::pair<Network, TrainReport> train(Network net, const ExampleSet& train_set, const ExampleSet& dev_set,
                                      const SgdConfig& cfg, std::uint64_t seed,
                                      const DevEvaluator& evaluator = {});

// Fine-tunes a copy of `pretrained` with `cfg` (normally
// HyperProfile::adapt_config). Zero epochs returns the input unchanged.
std::pair<Network, TrainReport> adapt(const Network& pretrained, const ExampleSet& train_set,
                                      const ExampleSet& dev_set, const SgdConfig& cfg,
                                      std::uint64_t seed, const DevEvaluator& evaluator = {});

// Predicted classes (1..4), argmax with ties to the lowest class.
std::vector<int> predict(Network& net, const Matrix& x);

// ---- feature encoding ---------------------------------------------------------

// Which speakers contributed frames to each fitted stage of one system.
struct FitAudit {
  std::set<std::string> normalizer;
  std::set<std::string> pca;
  std::set<std::string> mean_pca;
  std::set<std::string> speaker_means;  // training-side speaker means
  std::set<std::string> training;       // speakers of train/dev batches
};

struct PipelineOptions {
  int pca_components = features::kPcaComponents;
  int mean_pca_components = features::kMeanPcaComponents;
  int dct_rows = features::kDctRows;
  int dct_cols = features::kDctCols;
};

// Fitted transforms plus the speaker-mean lookup for one trained system.
class FeatureEncoder {
 public:
  // Fits on `train` examples; with_mean additionally uses every frame of
  // each train speaker's training-partition utterances.
  static FeatureEncoder fit(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                            Variant variant, bool with_mean,
                            std::span<const dataset::LabeledExample> train,
                            const PipelineOptions& options);
  // Rebuilds an encoder around already fitted transforms.
  static FeatureEncoder restore(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                                features::Transforms transforms);

  const features::Transforms& transforms() const { return transforms_; }
  const FitAudit& audit() const { return audit_; }
  features::InputShape input_shape() const { return features::input_shape(transforms_); }

  // Normalized mean frame of `speaker` over the utterances of `partition`.
  const features::SpeakerMean& speaker_mean(const std::string& speaker, features::Partition partition);
  std::vector<features::SpeakerMean> cached_means() const;

  // Encodes examples whose speaker means come from `partition`.
  ExampleSet encode(std::span<const dataset::LabeledExample> examples, features::Partition partition);

 private:
  FeatureEncoder(const corpus::Corpus& corpus, const dataset::PreparedData& data)
      : corpus_(&corpus), data_(&data) {}

  const corpus::Corpus* corpus_;
  const dataset::PreparedData* data_;
  features::Transforms transforms_;
  FitAudit audit_;
  std::map<std::pair<std::string, features::Partition>, features::SpeakerMean> means_;
  std::map<std::pair<std::string, features::Partition>, std::vector<double>> mean_features_;
};

// ---- scenarios ------------------------------------------------------------------

struct RunOptions {
  HyperProfile profile = HyperProfile::defaults();
  PipelineOptions pipeline;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<std::size_t> n_adapt;  // Adapted: truncate target train/dev
  bool verbose = false;
};

using SpeakerCount = evaluation::SpeakerScore;

// One trained system: a leave-one-out fold, a dependent speaker, or the
// single multi-speaker model ("all").
struct FoldRun {
  std::string name;
  std::uint64_t seed = 0;
  features::Transforms transforms;
  std::vector<features::SpeakerMean> means;
  std::optional<Network> model;  // always set by run_scenario
  TrainReport report;
  std::optional<Network> pretrained;       // Adapted: the independent model
  std::optional<TrainReport> adapt_report;
  std::map<std::string, SpeakerCount> pretrained_counts;  // Adapted: before fine-tuning
  FitAudit audit;
  std::map<std::string, SpeakerCount> counts;  // test results per speaker
  dataset::ScenarioData data;
};

struct ScenarioRun {
  dataset::ScenarioKind kind = dataset::ScenarioKind::MultiSpeaker;
  Variant variant = Variant::DnnRaw;
  bool with_mean = false;
  std::vector<FoldRun> folds;
};

ScenarioRun run_scenario(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                         dataset::ScenarioKind kind, Variant variant, bool with_mean,
                         const RunOptions& options);

// Fine-tunes a finished Independent fold on its held-out speaker with
// train/dev truncated to n examples (all when nullopt). Returns the
// held-out speaker's test counts. n == 0 evaluates the pretrained model.
SpeakerCount adapt_fold(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                        const FoldRun& independent_fold, Variant variant, bool with_mean,
                        std::optional<std::size_t> n, const RunOptions& options);

evaluation::ScenarioResult to_result(const ScenarioRun& run);

// runs/<scenario>/<variant>[+mean]/fold_<name>/{model.utic,transforms.utif,report.tsv,result.tsv}
std::string scenario_dir_name(dataset::ScenarioKind kind, std::optional<std::size_t> n_adapt);
std::string cell_dir_name(Variant variant, bool with_mean);
void write_run_directory(const ScenarioRun& run, const std::filesystem::path& cell_dir);

std::string format_report(const TrainReport& report);
std::string format_result(const std::map<std::string, SpeakerCount>& counts);
// Inverse of format_result; the pooled line is recomputed, not read.
std::map<std::string, SpeakerCount> parse_result(const std::string& text);

}  // namespace uti::training

namespace uti::evaluation {

// Pooled accuracy of the Independent folds fine-tuned with each n of
// `grid` (kAllExamples = everything available). n == 0 is the
// unadapted baseline.
std::vector<CurvePoint> adaptation_curve(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                                         const training::ScenarioRun& independent,
                                         std::span<const std::size_t> grid,
                                         const training::RunOptions& options);

}  // namespace uti::evaluation

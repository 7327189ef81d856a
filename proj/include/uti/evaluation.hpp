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

// Accuracy, correlations, the results grid, adaptation curves and
// pairwise scatter statistics.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uti/corpus.hpp"
#include "uti/dataset.hpp"
#include "uti/features.hpp"
#include "uti/matrix.hpp"

namespace uti::evaluation {

struct SpeakerScore {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct ScenarioResult {
  dataset::ScenarioKind scenario = dataset::ScenarioKind::MultiSpeaker;
  features::Variant variant = features::Variant::DnnRaw;
  bool with_mean = false;
  std::map<std::string, SpeakerScore> per_speaker;

  std::map<std::string, double> per_speaker_accuracy() const;
  // correct / total over every test example.
  double pooled_accuracy() const;
  std::size_t total() const;
};

// Index of the largest entry, ties toward the lowest index.
std::size_t argmax(std::span<const double> row);
// Class numbers 1..n for each row of class scores.
std::vector<int> predict_classes(const Matrix& scores);

double accuracy(std::span<const int> predictions, std::span<const int> labels);

double pearson(std::span<const double> x, std::span<const double> y);
// Groups are 0/1.
double point_biserial(std::span<const int> groups, std::span<const double> values);

// ---- results grid -------------------------------------------------------------

// Tab-separated grid: header, then Dependent, Multi-speaker, Independent,
// Adapted and the with-mean Multi-speaker/Independent/Adapted rows, each
// listing DNN Raw, DNN PCA, DNN DCT, CNN Raw. Missing cells are `--`.
std::string results_table(std::span<const ScenarioResult> results);
std::string format_percent(double fraction);  // 2 decimals

// ---- scatter ----------------------------------------------------------------------

double round_half_up(double value, int decimals);

struct ScatterPoint {
  std::string speaker_id;
  double acc_a = 0.0;  // rounded
  double acc_b = 0.0;
};

struct ScatterStats {
  std::vector<ScatterPoint> points;
  double percent_above = 0.0;  // acc_b > acc_a
  double percent_below = 0.0;
  double percent_ties = 0.0;
};

ScatterStats scatter_stats(const ScenarioResult& a, const ScenarioResult& b);
std::string format_scatter_csv(const ScatterStats& stats);

// ---- correlations -------------------------------------------------------------

struct CorrelationReport {
  std::optional<double> pearson_age;
  std::optional<double> pearson_sampling;
  std::optional<double> pointbiserial_gender;  // male = 1
  std::size_t n = 0;
};

CorrelationReport correlation_report(const std::map<std::string, double>& accuracies,
                                     const std::vector<corpus::Speaker>& speakers,
                                     const std::map<std::string, double>& sampling_scores);
std::string format_correlation(const CorrelationReport& report);

// ---- adaptation curve ---------------------------------------------------------

inline constexpr std::size_t kAllExamples = static_cast<std::size_t>(-1);
std::vector<std::size_t> default_adaptation_grid();  // 1 5 10 25 50 100 all

struct CurvePoint {
  std::size_t n = 0;  // kAllExamples for "all"
  double pooled_accuracy = 0.0;
  std::map<std::string, SpeakerScore> per_fold;
};

std::string format_curve_csv(std::span<const CurvePoint> curve);

}  // namespace uti::evaluation

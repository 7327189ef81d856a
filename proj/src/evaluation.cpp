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

#include "uti/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "uti/error.hpp"

namespace uti::evaluation {

std::map<std::string, double> ScenarioResult::per_speaker_accuracy() const {
  std::map<std::string, double> out;
  for (const auto& [s, c] : per_speaker) out[s] = c.accuracy();
  return out;
}

std::size_t ScenarioResult::total() const {
  std::size_t t = 0;
  for (const auto& [s, c] : per_speaker) t += c.total;
  return t;
}

double ScenarioResult::pooled_accuracy() const {
  std::size_t c = 0, t = 0;
  for (const auto& [s, n] : per_speaker) c += n.correct, t += n.total;
  if (t == 0) throw Error(ErrorCode::EmptyEval, "no test examples");
  return static_cast<double>(c) / static_cast<double>(t);
}

std::size_t argmax(std::span<const double> row) {
  if (row.empty()) throw Error(ErrorCode::EmptyEval, "empty score row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

std::vector<int> predict_classes(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) out[r] = static_cast<int>(argmax(scores.row(r))) + 1;
  return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw Error(ErrorCode::SizeMismatch, "predictions and labels differ in length");
  if (labels.empty()) throw Error(ErrorCode::EmptyEval, "nothing to evaluate");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) ok += predictions[i] == labels[i];
  return static_cast<double>(ok) / static_cast<double>(labels.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::SizeMismatch, "pearson inputs differ in length");
  if (x.size() < 2) throw Error(ErrorCode::ZeroVariance, "need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0 || syy <= 0) throw Error(ErrorCode::ZeroVariance, "constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double point_biserial(std::span<const int> groups, std::span<const double> values) {
  if (groups.size() != values.size()) throw Error(ErrorCode::SizeMismatch, "groups and values differ in length");
  double m0 = 0, m1 = 0, mean = 0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] != 0 && groups[i] != 1) throw Error(ErrorCode::Config, "groups must be 0 or 1");
    (groups[i] ? m1 : m0) += values[i];
    ++(groups[i] ? n1 : n0);
    mean += values[i];
  }
  if (n0 == 0 || n1 == 0) throw Error(ErrorCode::SingleGroup, "both groups need members");
  const double n = static_cast<double>(values.size());
  mean /= n;
  m0 /= static_cast<double>(n0);
  m1 /= static_cast<double>(n1);
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0) throw Error(ErrorCode::ZeroVariance, "constant values");
  const double p = static_cast<double>(n1) / n, q = static_cast<double>(n0) / n;
  return std::clamp((m1 - m0) / std::sqrt(var) * std::sqrt(p * q), -1.0, 1.0);
}

// ---- results grid -------------------------------------------------------------

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

std::string results_table(std::span<const ScenarioResult> results) {
  using dataset::ScenarioKind;
  using features::Variant;
  struct Row {
    const char* label;
    ScenarioKind kind;
    bool with_mean;
  };
  static const Row rows[] = {
      {"Dependent", ScenarioKind::Dependent, false},
      {"Multi-speaker", ScenarioKind::MultiSpeaker, false},
      {"Independent", ScenarioKind::Independent, false},
      {"Adapted", ScenarioKind::Adapted, false},
      {"Multi-speaker + mean", ScenarioKind::MultiSpeaker, true},
      {"Independent + mean", ScenarioKind::Independent, true},
      {"Adapted + mean", ScenarioKind::Adapted, true},
  };
  static const Variant cols[] = {Variant::DnnRaw, Variant::DnnPca, Variant::DnnDct, Variant::CnnRaw};

  std::string out = "scenario\tDNN Raw\tDNN PCA\tDNN DCT\tCNN Raw\n";
  if (results.empty()) return out;
  for (const auto& row : rows) {
    out += row.label;
    for (Variant v : cols) {
      out += '\t';
      const ScenarioResult* hit = nullptr;
      for (const auto& r : results)
        if (r.scenario == row.kind && r.variant == v && r.with_mean == row.with_mean) hit = &r;
      out += hit && hit->total() ? format_percent(hit->pooled_accuracy()) : "--";
    }
    out += '\n';
  }
  return out;
}

// ---- scatter ----------------------------------------------------------------------

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Nudge by a few ulps so decimal halves stored just below .5 still round up.
  const double scaled = value * scale;
  return std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::fabs(scaled))) / scale;
}

ScatterStats scatter_stats(const ScenarioResult& a, const ScenarioResult& b) {
  std::set<std::string> sa, sb;
  for (const auto& [s, c] : a.per_speaker) sa.insert(s);
  for (const auto& [s, c] : b.per_speaker) sb.insert(s);
  if (sa != sb) throw Error(ErrorCode::SpeakerSetMismatch, "results cover different speakers");
  ScatterStats st;
  if (sa.empty()) return st;
  std::size_t above = 0, below = 0, ties = 0;
  for (const auto& s : sa) {
    ScatterPoint p{s, round_half_up(a.per_speaker.at(s).accuracy(), 2),
                   round_half_up(b.per_speaker.at(s).accuracy(), 2)};
    if (p.acc_b > p.acc_a)
      ++above;
    else if (p.acc_b < p.acc_a)
      ++below;
    else
      ++ties;
    st.points.push_back(std::move(p));
  }
  const double n = static_cast<double>(sa.size());
  st.percent_above = 100.0 * static_cast<double>(above) / n;
  st.percent_below = 100.0 * static_cast<double>(below) / n;
  st.percent_ties = 100.0 - st.percent_above - st.percent_below;
  return st;
}

std::string format_scatter_csv(const ScatterStats& stats) {
  std::string out = "speaker,acc_a,acc_b\n";
  char buf[96];
  for (const auto& p : stats.points) {
    std::snprintf(buf, sizeof buf, ",%.2f,%.2f\n", p.acc_a, p.acc_b);
    out += p.speaker_id + buf;
  }
  std::snprintf(buf, sizeof buf, "# above,%.2f\n# below,%.2f\n# ties,%.2f\n", stats.percent_above,
                stats.percent_below, stats.percent_ties);
  out += buf;
  return out;
}

// ---- correlations -------------------------------------------------------------

CorrelationReport correlation_report(const std::map<std::string, double>& accuracies,
                                     const std::vector<corpus::Speaker>& speakers,
                                     const std::map<std::string, double>& sampling_scores) {
  CorrelationReport r;
  std::vector<double> acc, age, sampling;
  std::vector<int> gender;
  bool have_sampling = true;
  for (const auto& [id, a] : accuracies) {
    const corpus::Speaker* meta = nullptr;
    for (const auto& s : speakers)
      if (s.id == id) meta = &s;
    if (!meta) throw Error(ErrorCode::UnknownSpeaker, "no metadata for " + id);
    acc.push_back(a);
    age.push_back(meta->age_years);
    gender.push_back(meta->gender == corpus::Gender::Male ? 1 : 0);
    if (auto it = sampling_scores.find(id); it != sampling_scores.end())
      sampling.push_back(it->second);
    else
      have_sampling = false;
  }
  r.n = acc.size();
  auto guarded = [](auto&& f) -> std::optional<double> {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ZeroVariance || e.code() == ErrorCode::SingleGroup) return std::nullopt;
      throw;
    }
  };
  r.pearson_age = guarded([&] { return pearson(age, acc); });
  if (have_sampling) r.pearson_sampling = guarded([&] { return pearson(sampling, acc); });
  r.pointbiserial_gender = guarded([&] { return point_biserial(gender, acc); });
  return r;
}

std::string format_correlation(const CorrelationReport& report) {
  auto field = [](const std::optional<double>& v) {
    if (!v) return std::string("undefined");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  return "measure\tvalue\npearson_age\t" + field(report.pearson_age) + "\npearson_sampling\t" +
         field(report.pearson_sampling) + "\npointbiserial_gender\t" + field(report.pointbiserial_gender) +
         "\nn\t" + std::to_string(report.n) + '\n';
}

// ---- adaptation curve ---------------------------------------------------------

std::vector<std::size_t> default_adaptation_grid() { return {1, 5, 10, 25, 50, 100, kAllExamples}; }

std::string format_curve_csv(std::span<const CurvePoint> curve) {
  std::set<std::string> folds;
  for (const auto& p : curve)
    for (const auto& [f, s] : p.per_fold) folds.insert(f);
  std::string out = "n,pooled_accuracy";
  for (const auto& f : folds) out += ',' + f;
  out += '\n';
  char buf[32];
  for (const auto& p : curve) {
    out += p.n == kAllExamples ? std::string("all") : std::to_string(p.n);
    std::snprintf(buf, sizeof buf, ",%.6f", p.pooled_accuracy);
    out += buf;
    for (const auto& f : folds) {
      auto it = p.per_fold.find(f);
      if (it == p.per_fold.end()) {
        out += ",";
        continue;
      }
      std::snprintf(buf, sizeof buf, ",%.6f", it->second.accuracy());
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace uti::evaluation

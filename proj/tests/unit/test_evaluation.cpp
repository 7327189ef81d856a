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
#include <random>

#include "oracles.hpp"
#include "uti/error.hpp"
#include "uti/evaluation.hpp"
#include "uti/training.hpp"

using namespace uti;
using namespace uti::evaluation;
using dataset::ScenarioKind;
using features::Variant;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

ScenarioResult make_result(ScenarioKind k, Variant v, bool m, std::map<std::string, SpeakerScore> s) {
  ScenarioResult r;
  r.scenario = k;
  r.variant = v;
  r.with_mean = m;
  r.per_speaker = std::move(s);
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    out.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("accuracy and argmax") {
  CHECK(accuracy(std::vector<int>{1, 2, 3, 4}, std::vector<int>{1, 2, 3, 1}) == 0.75);
  CHECK(accuracy(std::vector<int>{2, 2}, std::vector<int>{2, 2}) == 1.0);
  CHECK(argmax(std::vector<double>{0.3, 0.3, 0.2, 0.2}) == 0);
  Matrix scores(1, 4);
  scores(0, 0) = 0.3, scores(0, 1) = 0.3, scores(0, 2) = 0.2, scores(0, 3) = 0.2;
  CHECK(predict_classes(scores) == std::vector<int>{1});
  CHECK(code_of([] { accuracy(std::vector<int>{}, std::vector<int>{}); }) == ErrorCode::EmptyEval);
  CHECK(code_of([] { accuracy(std::vector<int>{1}, std::vector<int>{1, 2}); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("pearson examples and oracle agreement") {
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  CHECK(std::abs(pearson(a, b) - oracle::pearson(a, b)) <= 1e-12);
  CHECK(std::abs(pearson(a, b) - 0.8) <= 1e-12);
  CHECK(code_of([] { pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) == ErrorCode::ZeroVariance);
  CHECK(code_of([] { pearson(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorCode::ZeroVariance);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> pos(0.1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 20;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const double r = pearson(x, y);
    CHECK(std::abs(r - oracle::pearson(x, y)) <= 1e-12);
    CHECK(std::abs(r) <= 1.0);
    const double scale = pos(rng), shift = u(rng);
    std::vector<double> ya(n);
    for (std::size_t i = 0; i < n; ++i) ya[i] = scale * y[i] + shift;
    CHECK(std::abs(pearson(x, ya) - r) <= 1e-12);
  }
}

TEST_CASE("point biserial") {
  CHECK(point_biserial(std::vector<int>{1, 1, 0, 0}, std::vector<double>{1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(std::abs(point_biserial(std::vector<int>{1, 1, 0, 0}, std::vector<double>{1, 2, 2, 1})) <= 1e-15);
  const std::vector<int> g{0, 0, 1, 1};
  const std::vector<double> v{0.4, 0.6, 0.5, 0.7};
  const std::vector<double> gd{0, 0, 1, 1};
  CHECK(std::abs(point_biserial(g, v) - oracle::pearson(gd, v)) <= 1e-12);
  CHECK(code_of([] { point_biserial(std::vector<int>{1, 1}, std::vector<double>{1, 2}); }) == ErrorCode::SingleGroup);
  CHECK(code_of([] { point_biserial(std::vector<int>{0, 1}, std::vector<double>{2, 2}); }) == ErrorCode::ZeroVariance);

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> gg{0, 1};
    std::vector<double> vv{u(rng), u(rng)};
    for (int i = 0; i < 8; ++i) {
      gg.push_back(u(rng) < 0.5);
      vv.push_back(u(rng));
    }
    std::vector<double> gdd(gg.begin(), gg.end());
    const double r = point_biserial(gg, vv);
    CHECK(std::abs(r - oracle::pearson(gdd, vv)) <= 1e-12);
    std::vector<double> va(vv.size());
    for (std::size_t i = 0; i < vv.size(); ++i) va[i] = 3.5 * vv[i] - 2.0;
    CHECK(std::abs(point_biserial(gg, va) - r) <= 1e-12);
  }
}

TEST_CASE("pooled accuracy is example weighted") {
  const auto r = make_result(ScenarioKind::Independent, Variant::CnnRaw, false,
                             {{"A", {9, 10}}, {"B", {1, 2}}, {"C", {0, 3}}});
  CHECK(r.pooled_accuracy() == doctest::Approx(10.0 / 15.0).epsilon(1e-15));
  double weighted = 0.0;
  for (const auto& [s, sc] : r.per_speaker) weighted += sc.accuracy() * sc.total / 15.0;
  CHECK(std::abs(weighted - r.pooled_accuracy()) <= 1e-12);
  CHECK(r.total() == 15);
  CHECK(code_of([] { ScenarioResult{}.pooled_accuracy(); }) == ErrorCode::EmptyEval);
}

TEST_CASE("results table layout") {
  const std::string header = "scenario\tDNN Raw\tDNN PCA\tDNN DCT\tCNN Raw";
  CHECK(results_table({}) == header + "\n");

  const std::vector<ScenarioResult> one{
      make_result(ScenarioKind::Independent, Variant::CnnRaw, true, {{"A", {67, 100}}})};
  const auto lines = split_lines(results_table(one));
  REQUIRE(lines.size() >= 8);
  CHECK(lines[0] == header);
  CHECK(lines[1] == "Dependent\t--\t--\t--\t--");
  CHECK(lines[6] == "Independent + mean\t--\t--\t--\t67.00");

  std::vector<ScenarioResult> grid;
  const Variant vs[] = {Variant::DnnRaw, Variant::DnnPca, Variant::DnnDct, Variant::CnnRaw};
  for (auto v : vs) {
    grid.push_back(make_result(ScenarioKind::Dependent, v, false, {{"A", {1, 2}}}));
    for (auto k : {ScenarioKind::MultiSpeaker, ScenarioKind::Independent, ScenarioKind::Adapted})
      for (bool m : {false, true}) grid.push_back(make_result(k, v, m, {{"A", {5942, 10000}}}));
  }
  const auto text = results_table(grid);
  const auto rows = split_lines(text);
  std::size_t data_rows = 0;
  for (const auto& row : rows)
    if (!row.empty() && row != header) {
      ++data_rows;
      CHECK(std::count(row.begin(), row.end(), '\t') == 4);
      CHECK(row.find("--") == std::string::npos);
    }
  CHECK(data_rows == 7);
  CHECK(text.find("59.42") != std::string::npos);
  CHECK(results_table(grid) == text);
}

TEST_CASE("rounding and percent formatting") {
  CHECK(round_half_up(0.604, 2) == doctest::Approx(0.60));
  CHECK(round_half_up(0.125, 2) == doctest::Approx(0.13));
  CHECK(round_half_up(0.675, 2) == doctest::Approx(0.68));
  CHECK(format_percent(0.59424) == "59.42");
  CHECK(format_percent(1.0) == "100.00");
}

TEST_CASE("scatter statistics") {
  const auto a = make_result(ScenarioKind::Independent, Variant::CnnRaw, false,
                             {{"A", {1, 2}}, {"B", {1, 4}}, {"C", {3, 4}}, {"D", {0, 1}}});
  const auto same = scatter_stats(a, a);
  CHECK(same.percent_above == 0.0);
  CHECK(same.percent_below == 0.0);
  CHECK(same.percent_ties == 100.0);

  const auto tie_a = make_result(ScenarioKind::Independent, Variant::CnnRaw, false, {{"S", {604, 1000}}});
  const auto tie_b = make_result(ScenarioKind::Independent, Variant::CnnRaw, true, {{"S", {601, 1000}}});
  const auto t = scatter_stats(tie_a, tie_b);
  CHECK(t.points[0].acc_a == doctest::Approx(0.60));
  CHECK(t.points[0].acc_b == doctest::Approx(0.60));
  CHECK(t.percent_ties == 100.0);

  const auto b = make_result(ScenarioKind::Independent, Variant::CnnRaw, true,
                             {{"A", {2, 2}}, {"B", {2, 4}}, {"C", {4, 4}}, {"D", {0, 2}}});
  auto c = b;
  c.per_speaker["D"] = {0, 1};
  c.per_speaker["A"] = {0, 2};
  const auto s = scatter_stats(a, c);
  CHECK(s.percent_above == 50.0);
  CHECK(s.percent_below == 25.0);
  CHECK(s.percent_above + s.percent_below + s.percent_ties == 100.0);
  auto d = b;
  d.per_speaker["A"] = {2, 2};
  d.per_speaker["D"] = {1, 1};
  const auto three = scatter_stats(a, d);
  CHECK(three.percent_above == 100.0);
  auto e = d;
  e.per_speaker["D"] = {0, 1};
  e.per_speaker["C"] = {0, 4};
  const auto mixed = scatter_stats(a, e);
  CHECK(mixed.percent_above == 50.0);
  CHECK(mixed.percent_below == 25.0);

  auto f = b;
  f.per_speaker.erase("D");
  CHECK(code_of([&] { scatter_stats(a, f); }) == ErrorCode::SpeakerSetMismatch);
  const auto csv = format_scatter_csv(s);
  CHECK(csv.rfind("speaker,acc_a,acc_b\n", 0) == 0);
}

TEST_CASE("three above, one below") {
  const auto a = make_result(ScenarioKind::Independent, Variant::CnnRaw, false,
                             {{"A", {1, 4}}, {"B", {1, 4}}, {"C", {1, 4}}, {"D", {3, 4}}});
  const auto b = make_result(ScenarioKind::Independent, Variant::CnnRaw, true,
                             {{"A", {3, 4}}, {"B", {3, 4}}, {"C", {3, 4}}, {"D", {1, 4}}});
  const auto s = scatter_stats(a, b);
  CHECK(s.percent_above == 75.0);
  CHECK(s.percent_below == 25.0);
  CHECK(s.percent_ties == 0.0);
}

TEST_CASE("correlation report") {
  std::vector<corpus::Speaker> speakers;
  std::map<std::string, double> acc, sampling;
  for (int i = 0; i < 5; ++i) {
    corpus::Speaker s;
    s.id = "S" + std::to_string(i);
    s.age_years = 5.0 + i;
    s.gender = i % 2 ? corpus::Gender::Male : corpus::Gender::Female;
    speakers.push_back(s);
    acc[s.id] = 0.5 + 0.05 * i;
    sampling[s.id] = 0.1 * ((i * 3) % 5);
  }
  const auto r = correlation_report(acc, speakers, sampling);
  REQUIRE(r.pearson_age.has_value());
  CHECK(*r.pearson_age == doctest::Approx(1.0));
  CHECK(r.pearson_sampling.has_value());
  CHECK(r.pointbiserial_gender.has_value());
  CHECK(r.n == 5);

  std::map<std::string, double> flat;
  for (const auto& s : speakers) flat[s.id] = 0.7;
  const auto u = correlation_report(flat, speakers, sampling);
  CHECK_FALSE(u.pearson_age.has_value());
  CHECK_FALSE(u.pearson_sampling.has_value());
  CHECK_FALSE(u.pointbiserial_gender.has_value());
  CHECK(format_correlation(u).find("undefined") != std::string::npos);
}

TEST_CASE("adaptation curve: n = 0 is the baseline, n = all is the adapted result") {
  corpus::SyntheticConfig cfg;
  cfg.n_speakers = 3;
  cfg.utterances_per_speaker = 10;
  cfg.frame_height = 20;
  cfg.frame_width = 24;
  const auto c = corpus::generate_synthetic_corpus(cfg);
  const auto data = dataset::prepare(c, dataset::split_utterances(c, {0.6, 0.2, 0.2, 2}),
                                     corpus::PhoneMap::defaults(), {10, 5, 2});
  training::RunOptions opts;
  opts.pipeline.dct_rows = 8;
  opts.pipeline.dct_cols = 8;
  for (auto& [k, s] : opts.profile.configs) s.epochs = 2;
  opts.profile.adapt_epochs_dnn = 2;

  const auto indep = training::run_scenario(c, data, ScenarioKind::Independent, Variant::DnnDct, false, opts);
  const std::vector<std::size_t> grid{0, 3, kAllExamples};
  const auto curve = adaptation_curve(c, data, indep, grid, opts);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].pooled_accuracy == training::to_result(indep).pooled_accuracy());
  const auto adapted = training::run_scenario(c, data, ScenarioKind::Adapted, Variant::DnnDct, false, opts);
  CHECK(curve[2].pooled_accuracy == training::to_result(adapted).pooled_accuracy());
  CHECK(curve[1].per_fold.size() == 3);
  const auto csv = format_curve_csv(curve);
  CHECK(csv.rfind("n,pooled_accuracy,", 0) == 0);
  CHECK(csv.find("\nall,") != std::string::npos);
  CHECK(default_adaptation_grid() == std::vector<std::size_t>{1, 5, 10, 25, 50, 100, kAllExamples});
}

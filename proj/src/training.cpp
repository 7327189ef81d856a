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

#include "uti/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "uti/error.hpp"

namespace uti::training {

namespace fs = std::filesystem;
using dataset::LabeledExample;
using dataset::ScenarioKind;
using features::Partition;

namespace {

constexpr std::uint64_t kShuffleSalt = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kAdaptSalt = 0xC2B2AE3D27D4EB4Full;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void check_input(const Network& net, const ExampleSet& set, const char* what) {
  if (set.empty()) return;
  if (set.x.cols() != net.input_shape().size())
    throw Error(ErrorCode::Shape, std::string(what) + " width " + std::to_string(set.x.cols()) +
                                      " does not match network input " + nn::to_string(net.input_shape()));
}

std::mutex log_mutex;

void log_line(bool verbose, const std::string& text) {
  if (!verbose) return;
  std::lock_guard lock(log_mutex);
  std::cerr << text << '\n';
}

}  // namespace

// ---- profile ------------------------------------------------------------------

HyperProfile HyperProfile::defaults() {
  HyperProfile p;
  const SgdConfig raw{1e-3, 0.95, 1e-3, 32, 40};
  const SgdConfig reduced{1e-2, 0.95, 1e-4, 32, 40};
  const SgdConfig cnn{5e-3, 0.98, 1e-4, 32, 200};
  for (bool m : {false, true}) {
    p.configs[{Variant::DnnRaw, m}] = raw;
    p.configs[{Variant::DnnPca, m}] = reduced;
    p.configs[{Variant::DnnDct, m}] = reduced;
    p.configs[{Variant::CnnRaw, m}] = cnn;
  }
  return p;
}

const SgdConfig& HyperProfile::sgd(Variant v, bool with_mean) const {
  auto it = configs.find({v, with_mean});
  if (it == configs.end())
    throw Error(ErrorCode::Config, "no training profile for " + std::string(features::variant_name(v)));
  return it->second;
}

SgdConfig& HyperProfile::sgd(Variant v, bool with_mean) { return configs[{v, with_mean}]; }

int HyperProfile::adapt_epochs(Variant v) const {
  return features::is_cnn(v) ? adapt_epochs_cnn : adapt_epochs_dnn;
}

SgdConfig HyperProfile::adapt_config(Variant v, bool with_mean) const {
  SgdConfig c = sgd(v, with_mean);
  c.learning_rate *= adapt_lr_scale;
  c.epochs = adapt_epochs(v);
  return c;
}

// ---- epoch loop ---------------------------------------------------------------

std::vector<int> predict(Network& net, const Matrix& x) {
  constexpr std::size_t kChunk = 128;
  std::vector<int> out;
  out.reserve(x.rows());
  Matrix chunk;
  for (std::size_t start = 0; start < x.rows(); start += kChunk) {
    const std::size_t n = std::min(kChunk, x.rows() - start);
    chunk.resize(n, x.cols());
    std::copy_n(x.data() + start * x.cols(), n * x.cols(), chunk.data());
    const auto cls = evaluation::predict_classes(net.forward(chunk, nn::Mode::Eval));
    out.insert(out.end(), cls.begin(), cls.end());
  }
  return out;
}

namespace {

std::pair<Network, TrainReport> run_epochs(Network net, const ExampleSet& train_set,
                                           const ExampleSet& dev_set, const SgdConfig& cfg,
                                           std::uint64_t seed, const DevEvaluator& evaluator) {
  nn::validate(cfg);
  if (train_set.empty()) throw Error(ErrorCode::EmptySet, "empty training set");
  if (dev_set.empty()) throw Error(ErrorCode::EmptySet, "empty development set");
  if (train_set.labels.size() != train_set.x.rows() || dev_set.labels.size() != dev_set.x.rows())
    throw Error(ErrorCode::SizeMismatch, "labels and inputs differ in length");
  check_input(net, train_set, "training input");
  check_input(net, dev_set, "development input");

  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  TrainReport report;
  std::optional<Network> best;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix batch;
  std::vector<int> labels;
  const std::size_t cols = train_set.x.cols();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);

  for (int e = 0; e < cfg.epochs; ++e) {
    const double lr = nn::effective_lr(cfg, e);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t n = std::min(bs, order.size() - start);
      batch.resize(n, cols);
      labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t src = order[start + i];
        std::copy_n(train_set.x.data() + src * cols, cols, batch.data() + i * cols);
        labels[i] = train_set.labels[src];
      }
      loss_sum += net.loss_and_grads(batch, labels, cfg.l2) * static_cast<double>(n);
      nn::sgd_step(net, lr);
    }
    const double dev_acc = evaluator ? evaluator(net, e + 1)
                                     : evaluation::accuracy(predict(net, dev_set.x), dev_set.labels);
    report.epochs.push_back({e + 1, loss_sum / static_cast<double>(order.size()), dev_acc, lr});
    if (!best || dev_acc > report.best_dev_accuracy) {
      report.best_dev_accuracy = dev_acc;
      report.best_epoch = e + 1;
      best = net;
    }
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!best) return {std::move(net), report};
  return {std::move(*best), report};
}

}  // namespace

std::pair<Network, TrainReport> train(Network net, const ExampleSet& train_set, const ExampleSet& dev_set,
                                      const SgdConfig& cfg, std::uint64_t seed,
                                      const DevEvaluator& evaluator) {
  return run_epochs(std::move(net), train_set, dev_set, cfg, seed, evaluator);
}

std::pair<Network, TrainReport> adapt(const Network& pretrained, const ExampleSet& train_set,
                                      const ExampleSet& dev_set, const SgdConfig& cfg,
                                      std::uint64_t seed, const DevEvaluator& evaluator) {
  nn::validate(cfg);
  if (cfg.epochs == 0) return {pretrained, TrainReport{}};
  return run_epochs(pretrained, train_set, dev_set, cfg, seed, evaluator);
}

// ---- encoder ------------------------------------------------------------------

FeatureEncoder FeatureEncoder::fit(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                                   Variant variant, bool with_mean,
                                   std::span<const LabeledExample> train,
                                   const PipelineOptions& options) {
  FeatureEncoder enc(corpus, data);
  auto& t = enc.transforms_;
  t.variant = variant;
  t.with_mean = with_mean;
  t.dct_rows = options.dct_rows;
  t.dct_cols = options.dct_cols;

  std::vector<const corpus::Frame*> frames;
  frames.reserve(train.size());
  std::set<std::string> speakers;
  for (const auto& ex : train) {
    frames.push_back(&dataset::frame_of(corpus, ex));
    speakers.insert(ex.speaker_id);
  }
  t.norm = features::fit_normalizer(frames);
  enc.audit_.normalizer = speakers;

  if (features::input_format(variant) == features::InputFormat::Pca) {
    Matrix m(frames.size(), frames.front()->size());
    for (std::size_t i = 0; i < frames.size(); ++i)
      features::apply_normalizer(t.norm, frames[i]->samples(), m.row(i));
    t.pca = features::fit_pca(m, static_cast<std::size_t>(options.pca_components));
    enc.audit_.pca = speakers;
  }

  if (with_mean) {
    std::vector<features::SpeakerMean> train_means;
    for (const auto& s : speakers) {
      train_means.push_back(enc.speaker_mean(s, Partition::Train));
      enc.audit_.speaker_means.insert(s);
    }
    if (features::input_format(variant) == features::InputFormat::Pca) {
      t.mean_pca = features::fit_mean_pca(train_means, static_cast<std::size_t>(options.mean_pca_components));
      enc.audit_.mean_pca = speakers;
    }
  }
  return enc;
}

FeatureEncoder FeatureEncoder::restore(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                                       features::Transforms transforms) {
  FeatureEncoder enc(corpus, data);
  enc.transforms_ = std::move(transforms);
  return enc;
}

const features::SpeakerMean& FeatureEncoder::speaker_mean(const std::string& speaker, Partition partition) {
  const auto key = std::make_pair(speaker, partition);
  if (auto it = means_.find(key); it != means_.end()) return it->second;

  std::vector<std::size_t> utts;
  if (partition == Partition::All) {
    utts = corpus_->utterances_of(speaker);
  } else {
    const auto& split = data_->split_of(speaker);
    utts = partition == Partition::Train ? split.train : partition == Partition::Dev ? split.dev : split.test;
  }
  std::vector<corpus::Frame> normalized;
  for (std::size_t u : utts)
    for (const auto& f : corpus_->utterances[u].frames)
      normalized.push_back(features::apply_normalizer(transforms_.norm, f));
  features::SpeakerFrames group{speaker, {}};
  for (const auto& f : normalized) group.frames.push_back(&f);
  auto means = features::compute_speaker_means(std::span(&group, 1), partition);
  return means_.emplace(key, std::move(means.front())).first->second;
}

std::vector<features::SpeakerMean> FeatureEncoder::cached_means() const {
  std::vector<features::SpeakerMean> out;
  for (const auto& [key, m] : means_) out.push_back(m);
  return out;
}

ExampleSet FeatureEncoder::encode(std::span<const LabeledExample> examples, Partition partition) {
  ExampleSet set;
  const std::size_t width = input_shape().size();
  set.x.resize(examples.size(), width);
  set.labels.reserve(examples.size());
  set.speakers.reserve(examples.size());
  std::vector<double> normalized(static_cast<std::size_t>(transforms_.norm.height) * transforms_.norm.width);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    features::apply_normalizer(transforms_.norm, dataset::frame_of(*corpus_, ex).samples(), normalized);
    std::optional<std::span<const double>> mean;
    if (transforms_.with_mean) {
      const auto key = std::make_pair(ex.speaker_id, partition);
      auto it = mean_features_.find(key);
      if (it == mean_features_.end()) {
        auto feat = features::mean_features(transforms_, speaker_mean(ex.speaker_id, partition).mean_frame);
        it = mean_features_.emplace(key, std::move(feat)).first;
      }
      mean = std::span<const double>(it->second);
    }
    features::assemble_input(transforms_, normalized, mean, set.x.row(i));
    set.labels.push_back(corpus::class_index(ex.cls) + 1);
    set.speakers.push_back(ex.speaker_id);
  }
  return set;
}

// ---- scenarios ----------------------------------------------------------------

namespace {

std::map<std::string, SpeakerCount> score(Network& net, const ExampleSet& test) {
  std::map<std::string, SpeakerCount> out;
  const auto pred = predict(net, test.x);
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto& c = out[test.speakers[i]];
    ++c.total;
    if (pred[i] == test.labels[i]) ++c.correct;
  }
  return out;
}

void check_leakage(const FitAudit& audit, const std::string& held_out) {
  auto check = [&](const std::set<std::string>& s, const char* stage) {
    if (s.count(held_out))
      throw Error(ErrorCode::Leakage, "held-out speaker " + held_out + " reached " + stage);
  };
  check(audit.normalizer, "the normalizer");
  check(audit.pca, "the PCA fit");
  check(audit.mean_pca, "the speaker-mean PCA fit");
  check(audit.speaker_means, "the training speaker means");
  check(audit.training, "the training batches");
}

struct AdaptOutcome {
  Network model;
  TrainReport report;
  std::map<std::string, SpeakerCount> counts;
};

// Fine-tunes `pretrained` on the held-out speaker's own train/dev data.
AdaptOutcome adapt_on_target(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                             FeatureEncoder& encoder, const Network& pretrained,
                             const std::string& speaker, std::uint64_t fold_seed,
                             std::optional<std::size_t> n, Variant variant, bool with_mean,
                             const ExampleSet& test, const RunOptions& options) {
  (void)corpus;
  const auto sdata = dataset::materialize_scenario(
      data, {ScenarioKind::Adapted, speaker, n}, fold_seed);
  const auto adapt_train = encoder.encode(sdata.adapt_train, Partition::Train);
  const auto adapt_dev = encoder.encode(sdata.adapt_dev, Partition::Dev);
  auto [model, report] = adapt(pretrained, adapt_train, adapt_dev, options.profile.adapt_config(variant, with_mean),
                               fold_seed ^ kAdaptSalt);
  auto counts = score(model, test);
  return {std::move(model), std::move(report), std::move(counts)};
}

FoldRun run_fold(const corpus::Corpus& corpus, const dataset::PreparedData& data, ScenarioKind kind,
                 const std::string& speaker, std::size_t fold_index, Variant variant, bool with_mean,
                 const RunOptions& options) {
  FoldRun fold;
  fold.name = kind == ScenarioKind::MultiSpeaker ? "all" : speaker;
  fold.seed = options.seed ^ static_cast<std::uint64_t>(fold_index);
  const bool held_out = kind == ScenarioKind::Independent || kind == ScenarioKind::Adapted;

  fold.data = dataset::materialize_scenario(data, {kind, speaker, options.n_adapt}, fold.seed);
  auto encoder = FeatureEncoder::fit(corpus, data, variant, with_mean, fold.data.train, options.pipeline);
  fold.audit = encoder.audit();
  for (const auto& ex : fold.data.train) fold.audit.training.insert(ex.speaker_id);
  for (const auto& ex : fold.data.dev) fold.audit.training.insert(ex.speaker_id);
  if (held_out) check_leakage(fold.audit, speaker);

  const auto train_set = encoder.encode(fold.data.train, Partition::Train);
  const auto dev_set = encoder.encode(fold.data.dev, Partition::Dev);
  const auto test_set = encoder.encode(fold.data.test, Partition::Test);

  auto net = nn::build_model(variant, with_mean, nn::to_shape(encoder.input_shape()), fold.seed);
  auto [best, report] = train(std::move(net), train_set, dev_set, options.profile.sgd(variant, with_mean),
                              fold.seed ^ kShuffleSalt);
  fold.report = std::move(report);

  if (kind == ScenarioKind::Adapted) {
    fold.pretrained_counts = score(best, test_set);
    auto outcome = adapt_on_target(corpus, data, encoder, best, speaker, fold.seed, options.n_adapt, variant,
                                   with_mean, test_set, options);
    fold.pretrained = std::move(best);
    fold.model = std::move(outcome.model);
    fold.adapt_report = std::move(outcome.report);
    fold.counts = std::move(outcome.counts);
  } else {
    fold.counts = score(best, test_set);
    fold.model = std::move(best);
  }
  fold.transforms = encoder.transforms();
  fold.means = encoder.cached_means();
  return fold;
}

}  // namespace

ScenarioRun run_scenario(const corpus::Corpus& corpus, const dataset::PreparedData& data, ScenarioKind kind,
                         Variant variant, bool with_mean, const RunOptions& options) {
  if (kind == ScenarioKind::Dependent && with_mean)
    throw Error(ErrorCode::InvalidCombination, "speaker mean is not defined for the dependent scenario");
  if (options.n_adapt && kind != ScenarioKind::Adapted)
    throw Error(ErrorCode::InvalidCombination, "adaptation size only applies to the adapted scenario");
  if (data.speakers.empty()) throw Error(ErrorCode::EmptySet, "no speakers");
  if ((kind == ScenarioKind::Independent || kind == ScenarioKind::Adapted) && data.speakers.size() < 2)
    throw Error(ErrorCode::EmptySet, "leave-one-speaker-out needs at least 2 speakers");

  struct Job {
    std::string speaker;
    std::size_t index;
  };
  std::vector<Job> jobs;
  if (kind == ScenarioKind::MultiSpeaker) {
    jobs.push_back({data.speakers.front().speaker_id, 0});
  } else {
    for (std::size_t i = 0; i < data.speakers.size(); ++i) jobs.push_back({data.speakers[i].speaker_id, i});
  }

  ScenarioRun run;
  run.kind = kind;
  run.variant = variant;
  run.with_mean = with_mean;
  std::vector<std::optional<FoldRun>> folds(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        folds[j] = run_fold(corpus, data, kind, jobs[j].speaker, jobs[j].index, variant, with_mean, options);
        const auto& f = *folds[j];
        std::size_t c = 0, t = 0;
        for (const auto& [s, n] : f.counts) c += n.correct, t += n.total;
        log_line(options.verbose, std::string(dataset::scenario_name(kind)) + " " + cell_dir_name(variant, with_mean) +
                                      " fold " + f.name + ": best epoch " + std::to_string(f.report.best_epoch) +
                                      ", test " + std::to_string(c) + "/" + std::to_string(t) + " (" +
                                      fmt("%.1f", f.report.wall_time) + " s)");
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(options.jobs, 1, static_cast<int>(jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& f : folds) run.folds.push_back(std::move(*f));
  return run;
}

SpeakerCount adapt_fold(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                        const FoldRun& fold, Variant variant, bool with_mean, std::optional<std::size_t> n,
                        const RunOptions& options) {
  auto encoder = FeatureEncoder::restore(corpus, data, fold.transforms);
  const auto test_set = encoder.encode(fold.data.test, Partition::Test);
  const Network& pretrained = fold.pretrained ? *fold.pretrained : *fold.model;
  if (n && *n == 0) {
    Network net = pretrained;
    return score(net, test_set)[fold.name];
  }
  auto outcome = adapt_on_target(corpus, data, encoder, pretrained, fold.name, fold.seed, n, variant, with_mean,
                                 test_set, options);
  return outcome.counts[fold.name];
}

evaluation::ScenarioResult to_result(const ScenarioRun& run) {
  evaluation::ScenarioResult r;
  r.scenario = run.kind;
  r.variant = run.variant;
  r.with_mean = run.with_mean;
  for (const auto& f : run.folds)
    for (const auto& [s, c] : f.counts) {
      auto& dst = r.per_speaker[s];
      dst.correct += c.correct;
      dst.total += c.total;
    }
  return r;
}

// ---- run directory ------------------------------------------------------------

std::string scenario_dir_name(ScenarioKind kind, std::optional<std::size_t> n_adapt) {
  std::string name(dataset::scenario_name(kind));
  if (kind == ScenarioKind::Adapted && n_adapt) name += "_n" + std::to_string(*n_adapt);
  return name;
}

std::string cell_dir_name(Variant variant, bool with_mean) {
  return std::string(features::variant_name(variant)) + (with_mean ? "+mean" : "");
}

std::string format_report(const TrainReport& report) {
  std::string out = "epoch\ttrain_loss\tdev_accuracy\tlearning_rate\n";
  for (const auto& e : report.epochs)
    out += std::to_string(e.epoch) + '\t' + fmt("%.10f", e.train_loss) + '\t' + fmt("%.6f", e.dev_accuracy) + '\t' +
           fmt("%.8g", e.learning_rate) + '\n';
  out += "# best_epoch\t" + std::to_string(report.best_epoch) + '\n';
  out += "# best_dev_accuracy\t" + fmt("%.6f", report.best_dev_accuracy) + '\n';
  return out;
}

std::string format_result(const std::map<std::string, SpeakerCount>& counts) {
  std::string out = "speaker\tcorrect\ttotal\taccuracy\n";
  std::size_t c = 0, t = 0;
  for (const auto& [s, n] : counts) {
    out += s + '\t' + std::to_string(n.correct) + '\t' + std::to_string(n.total) + '\t' + fmt("%.6f", n.accuracy()) +
           '\n';
    c += n.correct;
    t += n.total;
  }
  out += "pooled\t" + std::to_string(c) + '\t' + std::to_string(t) + '\t' +
         fmt("%.6f", SpeakerCount{c, t}.accuracy()) + '\n';
  return out;
}

std::map<std::string, SpeakerCount> parse_result(const std::string& text) {
  std::map<std::string, SpeakerCount> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1) {
      if (line.rfind("speaker\t", 0) != 0) throw Error(ErrorCode::Parse, "result table lacks its header");
      continue;
    }
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string speaker;
    SpeakerCount c;
    double acc = 0;
    if (!(row >> speaker >> c.correct >> c.total >> acc) || c.correct > c.total)
      throw Error(ErrorCode::Parse, "result table line " + std::to_string(number));
    if (speaker == "pooled") continue;
    out[speaker] = c;
  }
  return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace

void write_run_directory(const ScenarioRun& run, const fs::path& cell_dir) {
  std::error_code ec;
  fs::create_directories(cell_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + cell_dir.string() + ": " + ec.message());
  std::map<std::string, SpeakerCount> all;
  for (const auto& f : run.folds) {
    const fs::path dir = cell_dir / ("fold_" + f.name);
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
    Network model = *f.model;
    nn::save_checkpoint(model, dir / "model.utic");
    features::save_transforms(dir / "transforms.utif", f.transforms, f.means);
    write_text(dir / "report.tsv", format_report(f.report));
    if (f.adapt_report) write_text(dir / "adapt_report.tsv", format_report(*f.adapt_report));
    write_text(dir / "result.tsv", format_result(f.counts));
    dataset::save_manifest(dir / "train.tsv", f.data.train);
    dataset::save_manifest(dir / "dev.tsv", f.data.dev);
    dataset::save_manifest(dir / "test.tsv", f.data.test);
    if (run.kind == ScenarioKind::Adapted) {
      dataset::save_manifest(dir / "adapt_train.tsv", f.data.adapt_train);
      dataset::save_manifest(dir / "adapt_dev.tsv", f.data.adapt_dev);
    }
    for (const auto& [s, c] : f.counts) {
      all[s].correct += c.correct;
      all[s].total += c.total;
    }
  }
  write_text(cell_dir / "result.tsv", format_result(all));
}

}  // namespace uti::training

namespace uti::evaluation {

std::vector<CurvePoint> adaptation_curve(const corpus::Corpus& corpus, const dataset::PreparedData& data,
                                         const training::ScenarioRun& independent,
                                         std::span<const std::size_t> grid,
                                         const training::RunOptions& options) {
  if (independent.kind != dataset::ScenarioKind::Independent && independent.kind != dataset::ScenarioKind::Adapted)
    throw Error(ErrorCode::MissingPrerequisite, "adaptation curve needs leave-one-speaker-out folds");
  std::vector<CurvePoint> out;
  for (std::size_t n : grid) {
    CurvePoint p;
    p.n = n;
    std::size_t c = 0, t = 0;
    for (const auto& fold : independent.folds) {
      const std::optional<std::size_t> limit = n == kAllExamples ? std::nullopt : std::optional(n);
      const auto s = training::adapt_fold(corpus, data, fold, independent.variant, independent.with_mean, limit,
                                          options);
      p.per_fold[fold.name] = s;
      c += s.correct;
      t += s.total;
    }
    p.pooled_accuracy = SpeakerScore{c, t}.accuracy();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace uti::evaluation

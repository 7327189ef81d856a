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

// Command-line front end: synth, run, report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "uti/config.hpp"
#include "uti/corpus.hpp"
#include "uti/dataset.hpp"
#include "uti/error.hpp"
#include "uti/evaluation.hpp"
#include "uti/features.hpp"
#include "uti/training.hpp"

namespace fs = std::filesystem;
using namespace uti;

namespace {

enum Exit { kOk = 0, kIo = 1, kConfig = 2, kInvalid = 3, kMissing = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCombination:
      return kInvalid;
    case ErrorCode::MissingPrerequisite:
      return kMissing;
    case ErrorCode::Config:
    case ErrorCode::TooFewUtterances:
    case ErrorCode::UnknownSpeaker:
    case ErrorCode::FrameTooSmall:
    case ErrorCode::TooFewFrames:
    case ErrorCode::EmptySet:
    case ErrorCode::EmptyTrainingSet:
      return kConfig;
    default:
      return kIo;
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingPrerequisite, "missing " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---- synth --------------------------------------------------------------------

struct SynthArgs {
  corpus::SyntheticConfig cfg;
  fs::path out;
};

int cmd_synth(const SynthArgs& a) {
  corpus::validate(a.cfg);
  const auto c = corpus::generate_synthetic_corpus(a.cfg);
  corpus::save_corpus(c, a.out);
  write_text(a.out / "corpus.cfg", config::format_corpus_info(a.cfg));
  std::cout << "speakers=" << c.speakers.size() << " utterances=" << c.utterances.size() << '\n';
  return kOk;
}

// ---- run ----------------------------------------------------------------------

struct RunArgs {
  fs::path config;
  std::string scenario;
  std::string model;
  std::string input;
  bool speaker_mean = false;
  std::optional<std::size_t> adapt_n;
  int jobs = 0;
  std::string out;
  bool verbose = false;
};

int cmd_run(const RunArgs& a) {
  const auto kind = dataset::parse_scenario(a.scenario);
  std::vector<config::Cell> cells;
  auto cfg = config::load_config(a.config);
  if (!a.model.empty() || !a.input.empty()) {
    if (a.model.empty() || a.input.empty())
      throw Error(ErrorCode::Config, "--model and --input go together");
    cells.push_back({features::make_variant(a.model, a.input), a.speaker_mean});
  } else {
    cells = cfg.cells;
    if (a.speaker_mean)
      for (auto& c : cells) c.with_mean = true;
  }
  if (cells.empty()) throw Error(ErrorCode::Config, "no cell: pass --model/--input or list [cells] in the config");
  if (a.adapt_n && kind != dataset::ScenarioKind::Adapted)
    throw Error(ErrorCode::InvalidCombination, "--adapt-n only applies to --scenario adapted");
  for (const auto& c : cells)
    if (kind == dataset::ScenarioKind::Dependent && c.with_mean)
      throw Error(ErrorCode::InvalidCombination, "speaker mean is not defined for the dependent scenario");

  const auto corpus = config::load_corpus(cfg.corpus);
  corpus::validate(corpus);
  const auto splits = dataset::split_utterances(corpus, cfg.split);
  const auto data = dataset::prepare(corpus, splits, config::load_phone_map(cfg), cfg.oversample);

  training::RunOptions options;
  options.profile = cfg.profile;
  options.pipeline = cfg.pipeline;
  options.seed = cfg.seed;
  options.jobs = a.jobs > 0 ? a.jobs : cfg.jobs;
  options.n_adapt = a.adapt_n;
  options.verbose = a.verbose;
  const fs::path root = a.out.empty() ? cfg.output : fs::path(a.out);

  for (const auto& cell : cells) {
    const auto run = training::run_scenario(corpus, data, kind, cell.variant, cell.with_mean, options);
    const fs::path dir =
        root / training::scenario_dir_name(kind, a.adapt_n) / training::cell_dir_name(cell.variant, cell.with_mean);
    training::write_run_directory(run, dir);
    const auto result = training::to_result(run);
    if (run.folds.size() > 1)
      for (const auto& [speaker, c] : result.per_speaker)
        std::cout << "fold_" << speaker << " accuracy=" << fixed4(c.accuracy()) << '\n';
    if (cells.size() > 1) std::cout << training::cell_dir_name(cell.variant, cell.with_mean) << ' ';
    std::cout << "accuracy=" << fixed4(result.pooled_accuracy()) << std::endl;
  }
  return kOk;
}

// ---- report -------------------------------------------------------------------

struct ReportArgs {
  fs::path runs;
  bool table = false;
  std::vector<std::string> scatter;
  bool curve = false;
  std::string cell = "cnn_raw";
  std::string out;
};

const char* const kScenarioDirs[] = {"dependent", "multi", "independent", "adapted"};

std::optional<evaluation::ScenarioResult> load_cell(const fs::path& runs, const std::string& scenario_dir,
                                                    const std::string& cell) {
  const fs::path file = runs / scenario_dir / cell / "result.tsv";
  if (!fs::exists(file)) return std::nullopt;
  evaluation::ScenarioResult r;
  const auto under = scenario_dir.find('_');
  r.scenario = dataset::parse_scenario(scenario_dir.substr(0, under));
  std::string tag = cell;
  if (tag.ends_with("+mean")) {
    r.with_mean = true;
    tag.resize(tag.size() - 5);
  }
  r.variant = features::parse_variant(tag);
  r.per_speaker = training::parse_result(read_text(file));
  return r;
}

// "independent" or "independent/cnn_raw+mean"
std::pair<std::string, std::string> split_ref(const std::string& ref, const std::string& default_cell) {
  const auto slash = ref.find('/');
  if (slash == std::string::npos) return {ref, default_cell};
  return {ref.substr(0, slash), ref.substr(slash + 1)};
}

int cmd_report(const ReportArgs& a) {
  if (!fs::is_directory(a.runs)) throw Error(ErrorCode::MissingPrerequisite, "no run directory " + a.runs.string());
  if (a.table + !a.scatter.empty() + a.curve != 1)
    throw Error(ErrorCode::Config, "choose exactly one of --table, --scatter, --curve");

  if (a.table) {
    std::vector<evaluation::ScenarioResult> results;
    for (const char* s : kScenarioDirs)
      for (auto v : {features::Variant::DnnRaw, features::Variant::DnnPca, features::Variant::DnnDct,
                     features::Variant::CnnRaw})
        for (bool m : {false, true})
          if (auto r = load_cell(a.runs, s, training::cell_dir_name(v, m))) results.push_back(std::move(*r));
    const auto text = evaluation::results_table(results);
    write_text(a.out.empty() ? a.runs / "results_table.tsv" : fs::path(a.out), text);
    std::cout << text;
    return kOk;
  }

  if (!a.scatter.empty()) {
    const auto [sa, ca] = split_ref(a.scatter[0], a.cell);
    const auto [sb, cb] = split_ref(a.scatter[1], a.cell);
    const auto ra = load_cell(a.runs, sa, ca);
    const auto rb = load_cell(a.runs, sb, cb);
    if (!ra) throw Error(ErrorCode::MissingPrerequisite, "no results for " + sa + "/" + ca);
    if (!rb) throw Error(ErrorCode::MissingPrerequisite, "no results for " + sb + "/" + cb);
    const auto text = evaluation::format_scatter_csv(evaluation::scatter_stats(*ra, *rb));
    auto tag = [](std::string s) {
      for (char& ch : s)
        if (ch == '/') ch = '_';
      return s;
    };
    write_text(a.out.empty() ? a.runs / ("scatter_" + tag(a.scatter[0]) + "_vs_" + tag(a.scatter[1]) + ".csv")
                             : fs::path(a.out),
               text);
    std::cout << text;
    return kOk;
  }

  // Adaptation curve from finished runs: independent (n = 0), adapted_n<N>, adapted (all).
  std::vector<evaluation::CurvePoint> curve;
  auto add = [&](std::size_t n, const evaluation::ScenarioResult& r) {
    evaluation::CurvePoint p;
    p.n = n;
    p.per_fold = r.per_speaker;
    p.pooled_accuracy = r.pooled_accuracy();
    curve.push_back(std::move(p));
  };
  bool any_adapted = false;
  if (auto r = load_cell(a.runs, "independent", a.cell)) add(0, *r);
  std::vector<std::size_t> sizes;
  for (const auto& entry : fs::directory_iterator(a.runs)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("adapted_n", 0) != 0) continue;
    try {
      sizes.push_back(std::stoul(name.substr(9)));
    } catch (const std::exception&) {
    }
  }
  std::sort(sizes.begin(), sizes.end());
  for (std::size_t n : sizes)
    if (auto r = load_cell(a.runs, "adapted_n" + std::to_string(n), a.cell)) {
      add(n, *r);
      any_adapted = true;
    }
  if (auto r = load_cell(a.runs, "adapted", a.cell)) {
    add(evaluation::kAllExamples, *r);
    any_adapted = true;
  }
  if (!any_adapted) throw Error(ErrorCode::MissingPrerequisite, "no adapted runs for " + a.cell);
  const auto text = evaluation::format_curve_csv(curve);
  write_text(a.out.empty() ? a.runs / "adapt_curve.csv" : fs::path(a.out), text);
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultrasound tongue image segment classification"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus");
  s->add_option("--speakers", synth.cfg.n_speakers, "Number of speakers")->check(CLI::PositiveNumber);
  s->add_option("--utts", synth.cfg.utterances_per_speaker, "Utterances per speaker")->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.cfg.seed, "Generator seed");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--height", synth.cfg.frame_height, "Frame height (scan lines)")->check(CLI::PositiveNumber);
  s->add_option("--width", synth.cfg.frame_width, "Frame width (echo returns)")->check(CLI::PositiveNumber);
  s->add_option("--noise", synth.cfg.noise_sigma, "Gaussian noise sigma")->check(CLI::NonNegativeNumber);
  s->add_option("--offset-range", synth.cfg.probe_offset_range, "Probe offset range in pixels")
      ->check(CLI::NonNegativeNumber);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Train and evaluate one scenario");
  r->add_option("--config", run.config, "Run configuration file")->required();
  r->add_option("--scenario", run.scenario, "dependent | multi | independent | adapted")
      ->required()
      ->check(CLI::IsMember({"dependent", "multi", "independent", "adapted"}));
  r->add_option("--model", run.model, "dnn | cnn (default: [cells] of the config)")
      ->check(CLI::IsMember({"dnn", "cnn"}));
  r->add_option("--input", run.input, "raw | pca | dct")->check(CLI::IsMember({"raw", "pca", "dct"}));
  r->add_flag("--speaker-mean", run.speaker_mean, "Add the speaker-mean input");
  r->add_option("--adapt-n", run.adapt_n, "Adaptation examples per set (adapted only)");
  r->add_option("--jobs", run.jobs, "Parallel folds (0: config value)")->check(CLI::NonNegativeNumber);
  r->add_option("--out", run.out, "Run root (default: config output)");
  r->add_flag("--verbose", run.verbose, "Log fold progress to stderr");

  ReportArgs rep;
  auto* p = app.add_subcommand("report", "Summarize finished runs");
  p->add_option("--runs", rep.runs, "Run root")->required();
  p->add_flag("--table", rep.table, "Results grid (results_table.tsv)");
  p->add_option("--scatter", rep.scatter, "Two scenarios, optionally scenario/cell")->expected(2);
  p->add_flag("--curve", rep.curve, "Adaptation-size curve (adapt_curve.csv)");
  p->add_option("--cell", rep.cell, "Cell for --scatter/--curve, e.g. cnn_raw+mean");
  p->add_option("--out", rep.out, "Output file (default: inside the run root)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (s->parsed()) return cmd_synth(synth);
    if (r->parsed()) return cmd_run(run);
    if (p->parsed()) return cmd_report(rep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kConfig;
}

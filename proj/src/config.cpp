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

#include "uti/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "uti/error.hpp"

namespace uti::config {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

template <class T>
T get(const pt::ptree& node, const std::string& section, const std::string& key) {
  const std::string raw = node.get_value<std::string>();
  std::istringstream in(raw);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof())
    throw Error(ErrorCode::Config, section + "." + key + ": bad value '" + raw + "'");
  return value;
}

template <>
std::string get<std::string>(const pt::ptree& node, const std::string&, const std::string&) {
  return node.get_value<std::string>();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

using Handler = std::function<void(const pt::ptree&, const std::string&)>;

// Dispatches every key of `section` to its handler; anything else is an error.
void apply(const pt::ptree& section, const std::string& name, const std::map<std::string, Handler>& handlers) {
  for (const auto& [key, node] : section) {
    auto it = handlers.find(key);
    if (it == handlers.end()) throw Error(ErrorCode::Config, "unknown key " + name + "." + key);
    it->second(node, key);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::Config, std::string("config syntax: ") + e.what());
  }

  RunConfig cfg;
  std::vector<std::string> variants;
  std::vector<bool> means{false};

  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw Error(ErrorCode::Config, "key outside a section: " + name);
    if (name == "corpus") {
      std::optional<fs::path> dir;
      apply(section, name,
            {{"manifest", [&](auto& n, auto& k) { cfg.corpus.manifest = resolve(base_dir, get<std::string>(n, name, k)); }},
             {"speakers", [&](auto& n, auto& k) { cfg.corpus.speakers = resolve(base_dir, get<std::string>(n, name, k)); }},
             {"dir", [&](auto& n, auto& k) { dir = resolve(base_dir, get<std::string>(n, name, k)); }},
             {"height", [&](auto& n, auto& k) { cfg.corpus.height = get<int>(n, name, k); }},
             {"width", [&](auto& n, auto& k) { cfg.corpus.width = get<int>(n, name, k); }}});
      if (dir) {
        auto src = read_corpus_dir(*dir);
        if (!cfg.corpus.manifest) cfg.corpus.manifest = src.manifest;
        if (!cfg.corpus.speakers) cfg.corpus.speakers = src.speakers;
        if (!section.count("height")) cfg.corpus.height = src.height;
        if (!section.count("width")) cfg.corpus.width = src.width;
      }
    } else if (name == "synthetic") {
      corpus::SyntheticConfig s;
      apply(section, name,
            {{"speakers", [&](auto& n, auto& k) { s.n_speakers = get<int>(n, name, k); }},
             {"utterances", [&](auto& n, auto& k) { s.utterances_per_speaker = get<int>(n, name, k); }},
             {"height", [&](auto& n, auto& k) { s.frame_height = get<int>(n, name, k); }},
             {"width", [&](auto& n, auto& k) { s.frame_width = get<int>(n, name, k); }},
             {"offset_range", [&](auto& n, auto& k) { s.probe_offset_range = get<double>(n, name, k); }},
             {"gain_min", [&](auto& n, auto& k) { s.gain_range.lo = get<double>(n, name, k); }},
             {"gain_max", [&](auto& n, auto& k) { s.gain_range.hi = get<double>(n, name, k); }},
             {"scale_min", [&](auto& n, auto& k) { s.scale_range.lo = get<double>(n, name, k); }},
             {"scale_max", [&](auto& n, auto& k) { s.scale_range.hi = get<double>(n, name, k); }},
             {"shape_jitter", [&](auto& n, auto& k) { s.shape_jitter = get<double>(n, name, k); }},
             {"anatomy_range", [&](auto& n, auto& k) { s.anatomy_range = get<double>(n, name, k); }},
             {"noise", [&](auto& n, auto& k) { s.noise_sigma = get<double>(n, name, k); }},
             {"seed", [&](auto& n, auto& k) { s.seed = get<std::uint64_t>(n, name, k); }}});
      cfg.corpus.synthetic = s;
    } else if (name == "split") {
      apply(section, name,
            {{"train", [&](auto& n, auto& k) { cfg.split.train = get<double>(n, name, k); }},
             {"dev", [&](auto& n, auto& k) { cfg.split.dev = get<double>(n, name, k); }},
             {"test", [&](auto& n, auto& k) { cfg.split.test = get<double>(n, name, k); }},
             {"seed", [&](auto& n, auto& k) { cfg.split.seed = get<std::uint64_t>(n, name, k); }}});
    } else if (name == "oversample") {
      apply(section, name,
            {{"target", [&](auto& n, auto& k) { cfg.oversample.target = get<int>(n, name, k); }},
             {"window", [&](auto& n, auto& k) { cfg.oversample.window = get<int>(n, name, k); }},
             {"seed", [&](auto& n, auto& k) { cfg.oversample.seed = get<std::uint64_t>(n, name, k); }}});
    } else if (name == "phones") {
      apply(section, name,
            {{"map", [&](auto& n, auto& k) { cfg.phone_map = resolve(base_dir, get<std::string>(n, name, k)); }}});
    } else if (name == "features") {
      apply(section, name,
            {{"pca_components", [&](auto& n, auto& k) { cfg.pipeline.pca_components = get<int>(n, name, k); }},
             {"mean_pca_components", [&](auto& n, auto& k) { cfg.pipeline.mean_pca_components = get<int>(n, name, k); }},
             {"dct_rows", [&](auto& n, auto& k) { cfg.pipeline.dct_rows = get<int>(n, name, k); }},
             {"dct_cols", [&](auto& n, auto& k) { cfg.pipeline.dct_cols = get<int>(n, name, k); }}});
    } else if (name == "cells") {
      apply(section, name,
            {{"variants", [&](auto& n, auto& k) { variants = split_list(get<std::string>(n, name, k)); }},
             {"with_mean", [&](auto& n, auto& k) {
                means.clear();
                for (const auto& v : split_list(get<std::string>(n, name, k))) {
                  if (v == "true") means.push_back(true);
                  else if (v == "false") means.push_back(false);
                  else throw Error(ErrorCode::Config, "cells.with_mean: expected true/false, got '" + v + "'");
                }
              }}});
    } else if (name == "run") {
      apply(section, name,
            {{"seed", [&](auto& n, auto& k) { cfg.seed = get<std::uint64_t>(n, name, k); }},
             {"jobs", [&](auto& n, auto& k) { cfg.jobs = get<int>(n, name, k); }},
             {"output", [&](auto& n, auto& k) { cfg.output = resolve(base_dir, get<std::string>(n, name, k)); }}});
    } else if (name == "adapt") {
      apply(section, name,
            {{"epochs_dnn", [&](auto& n, auto& k) { cfg.profile.adapt_epochs_dnn = get<int>(n, name, k); }},
             {"epochs_cnn", [&](auto& n, auto& k) { cfg.profile.adapt_epochs_cnn = get<int>(n, name, k); }},
             {"lr_scale", [&](auto& n, auto& k) { cfg.profile.adapt_lr_scale = get<double>(n, name, k); }}});
    } else if (name.rfind("profile.", 0) == 0) {
      // profile.<variant> sets both mean settings; profile.<variant>+mean only the mean one.
      std::string tag = name.substr(8);
      std::vector<bool> which{false, true};
      if (tag.size() > 5 && tag.ends_with("+mean")) {
        tag.resize(tag.size() - 5);
        which = {true};
      }
      features::Variant v;
      try {
        v = features::parse_variant(tag);
      } catch (const Error&) {
        throw Error(ErrorCode::Config, "unknown section [" + name + "]");
      }
      for (bool m : which) {
        auto& s = cfg.profile.sgd(v, m);
        apply(section, name,
              {{"lr", [&](auto& n, auto& k) { s.learning_rate = get<double>(n, name, k); }},
               {"decay", [&](auto& n, auto& k) { s.decay = get<double>(n, name, k); }},
               {"l2", [&](auto& n, auto& k) { s.l2 = get<double>(n, name, k); }},
               {"batch", [&](auto& n, auto& k) { s.batch_size = get<int>(n, name, k); }},
               {"epochs", [&](auto& n, auto& k) { s.epochs = get<int>(n, name, k); }}});
      }
    } else {
      throw Error(ErrorCode::Config, "unknown section [" + name + "]");
    }
  }

  for (const auto& v : variants)
    for (bool m : means) cfg.cells.push_back({features::parse_variant(v), m});

  if (const char* env = std::getenv("UTI_SEED"); env && *env) {
    char* end = nullptr;
    const auto s = std::strtoull(env, &end, 10);
    if (*end != '\0') throw Error(ErrorCode::Config, std::string("UTI_SEED is not an integer: ") + env);
    cfg.seed = s;
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  const auto& c = cfg.corpus;
  if (c.synthetic && c.manifest) throw Error(ErrorCode::Config, "give either [synthetic] or a corpus manifest, not both");
  if (!c.synthetic && !c.manifest) throw Error(ErrorCode::Config, "no corpus: set [corpus] dir/manifest or [synthetic]");
  if (c.manifest && !c.speakers) throw Error(ErrorCode::Config, "corpus.speakers is required with a manifest");
  if (c.height < 1 || c.width < 1) throw Error(ErrorCode::Config, "corpus geometry must be positive");
  if (c.synthetic) corpus::validate(*c.synthetic);
  dataset::validate(cfg.split);
  if (cfg.oversample.target < 0) throw Error(ErrorCode::Config, "oversample.target must be >= 0");
  if (cfg.oversample.window < 1) throw Error(ErrorCode::Config, "oversample.window must be >= 1");
  for (const auto& [key, s] : cfg.profile.configs) nn::validate(s);
  if (cfg.profile.adapt_epochs_dnn < 0 || cfg.profile.adapt_epochs_cnn < 0)
    throw Error(ErrorCode::Config, "adaptation epochs must be >= 0");
  if (!(cfg.profile.adapt_lr_scale > 0)) throw Error(ErrorCode::Config, "adapt.lr_scale must be > 0");
  const auto& p = cfg.pipeline;
  if (p.pca_components < 1 || p.mean_pca_components < 1 || p.dct_rows < 1 || p.dct_cols < 1)
    throw Error(ErrorCode::Config, "feature sizes must be positive");
  if (cfg.jobs < 1) throw Error(ErrorCode::Config, "run.jobs must be >= 1");
}

std::string format_corpus_info(const corpus::SyntheticConfig& s) {
  std::ostringstream out;
  out.precision(15);
  out << "; generated corpus\n[corpus]\nmanifest = manifest.tsv\nspeakers = speakers.csv\nheight = "
      << s.frame_height << "\nwidth = " << s.frame_width << "\n\n[generator]\nspeakers = " << s.n_speakers
      << "\nutterances = " << s.utterances_per_speaker << "\noffset_range = " << s.probe_offset_range
      << "\ngain_min = " << s.gain_range.lo << "\ngain_max = " << s.gain_range.hi
      << "\nscale_min = " << s.scale_range.lo << "\nscale_max = " << s.scale_range.hi
      << "\nshape_jitter = " << s.shape_jitter << "\nanatomy_range = " << s.anatomy_range << "\nnoise = " << s.noise_sigma << "\nseed = " << s.seed << '\n';
  return out.str();
}

CorpusSource read_corpus_dir(const fs::path& dir) {
  CorpusSource src;
  src.manifest = dir / "manifest.tsv";
  src.speakers = dir / "speakers.csv";
  const fs::path info = dir / "corpus.cfg";
  if (fs::exists(info)) {
    pt::ptree tree;
    try {
      pt::ini_parser::read_ini(info.string(), tree);
      src.height = tree.get<int>("corpus.height", src.height);
      src.width = tree.get<int>("corpus.width", src.width);
    } catch (const pt::ptree_error& e) {
      throw Error(ErrorCode::Config, info.string() + ": " + e.what());
    }
  }
  return src;
}

corpus::Corpus load_corpus(const CorpusSource& source) {
  if (source.synthetic) return corpus::generate_synthetic_corpus(*source.synthetic);
  if (!source.manifest || !source.speakers) throw Error(ErrorCode::Config, "no corpus configured");
  return corpus::load_corpus(*source.manifest, *source.speakers, source.height, source.width);
}

corpus::PhoneMap load_phone_map(const RunConfig& cfg) {
  return cfg.phone_map ? corpus::PhoneMap::load(*cfg.phone_map) : corpus::PhoneMap::defaults();
}

}  // namespace uti::config

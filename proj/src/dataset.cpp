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

#include "uti/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "uti/error.hpp"

namespace uti::dataset {
namespace fs = std::filesystem;

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

}  // namespace

void validate(const SplitSpec& spec) {
  if (!(spec.train > 0.0 && spec.dev > 0.0 && spec.test > 0.0))
    throw Error(ErrorCode::Config, "split ratios must all be > 0");
  if (std::abs(spec.train + spec.dev + spec.test - 1.0) > 1e-9)
    throw Error(ErrorCode::Config, "split ratios must sum to 1");
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  validate(spec);
  if (n < 3) throw Error(ErrorCode::TooFewUtterances, "need at least 3 utterances, got " + std::to_string(n));
  const std::array<double, 3> ratios{spec.train, spec.dev, spec.test};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double raw = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(raw));
    frac[i] = raw - std::floor(raw);
    assigned += sizes[i];
  }
  // Largest remainder; ties go to the earlier partition.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
  for (int i = 0; i < 3; ++i) {
    if (sizes[i] > 0) continue;
    const auto donor = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
    --sizes[donor];
    sizes[i] = 1;
  }
  return sizes;
}

Splits split_utterances(const Corpus& corpus, const SplitSpec& spec) {
  validate(spec);
  Splits out;
  for (std::size_t s = 0; s < corpus.speakers.size(); ++s) {
    const std::string& id = corpus.speakers[s].id;
    std::vector<std::size_t> utts = corpus.utterances_of(id);
    if (utts.size() < 3)
      throw Error(ErrorCode::TooFewUtterances,
                  "speaker " + id + " has " + std::to_string(utts.size()) + " utterances");
    const auto sizes = split_sizes(utts.size(), spec);
    auto rng = stream(spec.seed, s);
    std::shuffle(utts.begin(), utts.end(), rng);
    SpeakerSplit split;
    split.speaker_id = id;
    auto it = utts.begin();
    split.train.assign(it, it + sizes[0]);
    it += sizes[0];
    split.dev.assign(it, it + sizes[1]);
    it += sizes[1];
    split.test.assign(it, utts.end());
    for (auto* part : {&split.train, &split.dev, &split.test}) std::sort(part->begin(), part->end());
    out.push_back(std::move(split));
  }
  return out;
}

std::vector<LabeledExample> extract_mid_examples(const Corpus& corpus,
                                                 std::span<const std::size_t> utterances,
                                                 const corpus::PhoneMap& mapping) {
  std::vector<LabeledExample> out;
  for (std::size_t u : utterances) {
    const auto& utt = corpus.utterances.at(u);
    for (const auto& a : utt.alignments) {
      const auto cls = mapping.lookup(a.phone);
      if (!cls) continue;
      LabeledExample ex;
      ex.utterance = u;
      ex.frame_index = (a.start_frame + a.end_frame) / 2;
      ex.cls = *cls;
      ex.speaker_id = utt.speaker_id;
      ex.provenance = Provenance::MidPhone;
      ex.span_start = a.start_frame;
      ex.span_end = a.end_frame;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<LabeledExample> oversample(std::span<const LabeledExample> train_examples,
                                       const Corpus& corpus, const OversampleSpec& spec) {
  if (spec.target < 0 || spec.window < 1)
    throw Error(ErrorCode::Config, "oversampling needs target >= 0 and window >= 1");
  std::vector<LabeledExample> out(train_examples.begin(), train_examples.end());

  std::vector<std::string> speakers;
  for (const auto& ex : train_examples)
    if (std::find(speakers.begin(), speakers.end(), ex.speaker_id) == speakers.end())
      speakers.push_back(ex.speaker_id);

  for (const auto& speaker : speakers) {
    auto rng = stream(spec.seed, corpus.speaker_index(speaker), 0x5a17);
    for (const auto cls : corpus::kAllClasses) {
      std::vector<const LabeledExample*> mids;
      std::size_t count = 0;
      for (const auto& ex : train_examples) {
        if (ex.speaker_id != speaker || ex.cls != cls) continue;
        ++count;
        if (ex.provenance == Provenance::MidPhone) mids.push_back(&ex);
      }
      if (mids.empty() || count >= static_cast<std::size_t>(spec.target)) continue;

      using Key = std::pair<std::size_t, int>;
      std::set<Key> selected;
      for (const auto& ex : train_examples)
        if (ex.speaker_id == speaker && ex.cls == cls) selected.insert({ex.utterance, ex.frame_index});
      std::set<Key> remaining;
      for (const auto* m : mids) {
        for (int o = -spec.window; o <= spec.window; ++o) {
          const int f = m->frame_index + o;
          if (o == 0 || f < m->span_start || f > m->span_end) continue;
          if (!selected.contains({m->utterance, f})) remaining.insert({m->utterance, f});
        }
      }

      std::uniform_int_distribution<std::size_t> pick_mid(0, mids.size() - 1);
      std::uniform_int_distribution<int> pick_offset(0, 2 * spec.window - 1);
      while (count < static_cast<std::size_t>(spec.target) && !remaining.empty()) {
        const LabeledExample& m = *mids[pick_mid(rng)];
        int o = pick_offset(rng) - spec.window;
        if (o >= 0) ++o;  // skip zero
        const int f = m.frame_index + o;
        if (f < m.span_start || f > m.span_end) continue;
        const Key key{m.utterance, f};
        if (!remaining.erase(key)) continue;
        selected.insert(key);
        LabeledExample ex = m;
        ex.frame_index = f;
        ex.provenance = Provenance::WindowSampled;
        out.push_back(std::move(ex));
        ++count;
      }
    }
  }
  return out;
}

SamplingScore sampling_score(std::span<const LabeledExample> speaker_train) {
  if (speaker_train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training examples");
  SamplingScore s;
  s.speaker_id = speaker_train.front().speaker_id;
  s.total = speaker_train.size();
  s.sampled = static_cast<std::size_t>(std::count_if(
      speaker_train.begin(), speaker_train.end(),
      [](const LabeledExample& e) { return e.provenance == Provenance::WindowSampled; }));
  s.score = static_cast<double>(s.sampled) / static_cast<double>(s.total);
  return s;
}

const SpeakerExamples& PreparedData::of(std::string_view speaker_id) const {
  for (const auto& s : speakers)
    if (s.speaker_id == speaker_id) return s;
  throw Error(ErrorCode::UnknownSpeaker, std::string(speaker_id));
}

const SpeakerSplit& PreparedData::split_of(std::string_view speaker_id) const {
  for (const auto& s : splits)
    if (s.speaker_id == speaker_id) return s;
  throw Error(ErrorCode::UnknownSpeaker, std::string(speaker_id));
}

PreparedData prepare(const Corpus& corpus, const Splits& splits, const corpus::PhoneMap& mapping,
                     const OversampleSpec& oversample_spec) {
  PreparedData data;
  data.splits = splits;
  for (const auto& split : splits) {
    SpeakerExamples ex;
    ex.speaker_id = split.speaker_id;
    ex.train = oversample(extract_mid_examples(corpus, split.train, mapping), corpus, oversample_spec);
    ex.dev = extract_mid_examples(corpus, split.dev, mapping);
    ex.test = extract_mid_examples(corpus, split.test, mapping);
    data.speakers.push_back(std::move(ex));
  }
  return data;
}

std::string_view scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Dependent: return "dependent";
    case ScenarioKind::MultiSpeaker: return "multi";
    case ScenarioKind::Independent: return "independent";
    case ScenarioKind::Adapted: return "adapted";
  }
  return "?";
}

ScenarioKind parse_scenario(std::string_view name) {
  if (name == "dependent") return ScenarioKind::Dependent;
  if (name == "multi") return ScenarioKind::MultiSpeaker;
  if (name == "independent") return ScenarioKind::Independent;
  if (name == "adapted") return ScenarioKind::Adapted;
  throw Error(ErrorCode::Config, "unknown scenario `" + std::string(name) + "`");
}

std::vector<LabeledExample> truncate_examples(std::span<const LabeledExample> examples,
                                              std::size_t n, std::uint64_t seed) {
  if (n >= examples.size()) return {examples.begin(), examples.end()};
  std::vector<std::size_t> idx(examples.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto rng = stream(seed, 0x7a0c);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (std::size_t i : idx) out.push_back(examples[i]);
  return out;
}

ScenarioData materialize_scenario(const PreparedData& data, const ScenarioSpec& spec,
                                  std::uint64_t seed) {
  ScenarioData out;
  auto append = [](std::vector<LabeledExample>& dst, const std::vector<LabeledExample>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
  };
  switch (spec.kind) {
    case ScenarioKind::Dependent: {
      const auto& s = data.of(spec.speaker_id);
      out.train = s.train;
      out.dev = s.dev;
      out.test = s.test;
      out.train_speakers = {s.speaker_id};
      out.test_speakers = {s.speaker_id};
      break;
    }
    case ScenarioKind::MultiSpeaker:
      for (const auto& s : data.speakers) {
        append(out.train, s.train);
        append(out.dev, s.dev);
        append(out.test, s.test);
        out.train_speakers.push_back(s.speaker_id);
        out.test_speakers.push_back(s.speaker_id);
      }
      break;
    case ScenarioKind::Independent:
    case ScenarioKind::Adapted: {
      const auto& target = data.of(spec.speaker_id);
      for (const auto& s : data.speakers) {
        if (s.speaker_id == target.speaker_id) continue;
        append(out.train, s.train);
        append(out.dev, s.dev);
        out.train_speakers.push_back(s.speaker_id);
      }
      out.test = target.test;
      out.test_speakers = {target.speaker_id};
      if (spec.kind == ScenarioKind::Adapted) {
        const std::size_t n = spec.n_adapt.value_or(std::max(target.train.size(), target.dev.size()));
        out.adapt_train = truncate_examples(target.train, n, seed);
        out.adapt_dev = truncate_examples(target.dev, n, seed + 1);
      }
      break;
    }
  }
  return out;
}

std::string format_manifest(std::span<const LabeledExample> examples) {
  std::string text;
  for (const auto& ex : examples) {
    text += ex.speaker_id + '\t' + std::to_string(ex.utterance) + '\t' +
            std::to_string(ex.frame_index) + '\t' + std::to_string(static_cast<int>(ex.cls)) + '\t' +
            (ex.provenance == Provenance::MidPhone ? "mid" : "sampled") + '\n';
  }
  return text;
}

void save_manifest(const fs::path& path, std::span<const LabeledExample> examples) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << format_manifest(examples);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<LabeledExample> load_manifest(const fs::path& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<LabeledExample> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ss(line);
    LabeledExample ex;
    int cls = 0;
    std::string prov;
    if (!(ss >> ex.speaker_id >> ex.utterance >> ex.frame_index >> cls >> prov) ||
        (prov != "mid" && prov != "sampled"))
      throw Error(ErrorCode::Parse, path.string() + ": line " + std::to_string(number));
    ex.cls = corpus::class_from_int(cls);
    ex.provenance = prov == "mid" ? Provenance::MidPhone : Provenance::WindowSampled;
    if (ex.utterance >= corpus.utterances.size())
      throw Error(ErrorCode::Parse, path.string() + ": utterance index out of range at line " +
                                        std::to_string(number));
    bool found = false;
    for (const auto& a : corpus.utterances[ex.utterance].alignments) {
      if (ex.frame_index >= a.start_frame && ex.frame_index <= a.end_frame) {
        ex.span_start = a.start_frame;
        ex.span_end = a.end_frame;
        found = true;
        break;
      }
    }
    if (!found)
      throw Error(ErrorCode::Parse, path.string() + ": frame outside any aligned phone at line " +
                                        std::to_string(number));
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace uti::dataset

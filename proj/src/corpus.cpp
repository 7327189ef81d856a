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

#include "uti/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "uti/binio.hpp"
#include "uti/error.hpp"

namespace uti::corpus {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Lines with their 1-based numbers, skipping blanks and `#` comments.
std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> out;
  int number = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++number;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(number, t);
  }
  return out;
}

std::string parse_error_at(int line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

// ---- Frame ------------------------------------------------------------------

Frame::Frame(int height, int width)
    : height_(height), width_(width), samples_(static_cast<std::size_t>(height) * width, 0.0) {
  if (height < 1 || width < 1) throw Error(ErrorCode::Shape, "frame dimensions must be positive");
}

Frame::Frame(int height, int width, std::vector<double> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  if (height < 1 || width < 1) throw Error(ErrorCode::Shape, "frame dimensions must be positive");
  if (samples_.size() != static_cast<std::size_t>(height) * width)
    throw Error(ErrorCode::Shape, "frame sample count does not match dimensions");
}

// ---- classes ------------------------------------------------------------------

ArticulationClass class_from_int(int value) {
  if (value < 1 || value > kNumClasses)
    throw Error(ErrorCode::Parse, "articulation class must be 1..4, got " + std::to_string(value));
  return static_cast<ArticulationClass>(value);
}

std::string_view class_name(ArticulationClass c) {
  switch (c) {
    case ArticulationClass::BilabialLabiodental: return "bilabial/labiodental";
    case ArticulationClass::DentalAlveolarPostalveolar: return "dental/alveolar/postalveolar";
    case ArticulationClass::Velar: return "velar";
    case ArticulationClass::AlveolarApproximant: return "alveolar approximant";
  }
  return "?";
}

PhoneMap PhoneMap::defaults() {
  PhoneMap m;
  for (const char* p : {"p", "b", "m", "f", "v"}) m.set(p, ArticulationClass::BilabialLabiodental);
  for (const char* p : {"th", "dh", "t", "d", "s", "z", "sh", "zh", "n", "l", "ch", "jh"})
    m.set(p, ArticulationClass::DentalAlveolarPostalveolar);
  for (const char* p : {"k", "g", "ng"}) m.set(p, ArticulationClass::Velar);
  m.set("r", ArticulationClass::AlveolarApproximant);
  return m;
}

PhoneMap PhoneMap::load(const fs::path& path) {
  PhoneMap m;
  const std::string text = read_text(path);
  for (const auto& [number, line] : content_lines(text)) {
    const auto fields = split_ws(line);
    int value = 0;
    if (fields.size() != 2 || !parse_number(fields[1], value))
      throw Error(ErrorCode::Parse, parse_error_at(number, "expected `phone<TAB>class`"));
    try {
      m.set(std::string(fields[0]), class_from_int(value));
    } catch (const Error&) {
      throw Error(ErrorCode::Parse, parse_error_at(number, "class must be 1..4"));
    }
  }
  return m;
}

std::optional<ArticulationClass> PhoneMap::lookup(std::string_view phone) const {
  const auto it = table_.find(phone);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::optional<ArticulationClass> phone_to_class(std::string_view phone, const PhoneMap& mapping) {
  return mapping.lookup(phone);
}

// ---- Corpus -------------------------------------------------------------------

std::size_t Corpus::speaker_index(std::string_view id) const {
  for (std::size_t i = 0; i < speakers.size(); ++i)
    if (speakers[i].id == id) return i;
  throw Error(ErrorCode::UnknownSpeaker, std::string(id));
}

const Speaker& Corpus::speaker(std::string_view id) const { return speakers[speaker_index(id)]; }

bool Corpus::has_speaker(std::string_view id) const {
  return std::any_of(speakers.begin(), speakers.end(), [&](const Speaker& s) { return s.id == id; });
}

std::vector<std::size_t> Corpus::utterances_of(std::string_view id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].speaker_id == id) out.push_back(i);
  return out;
}

namespace {

void validate_alignments(std::span<const PhoneAlignment> alignments, int n_frames,
                         const std::string& where) {
  for (std::size_t i = 0; i < alignments.size(); ++i) {
    const auto& a = alignments[i];
    if (a.start_frame < 0 || a.start_frame > a.end_frame)
      throw Error(ErrorCode::Parse, where + ": invalid alignment range for `" + a.phone + "`");
    if (n_frames >= 0 && a.end_frame >= n_frames)
      throw Error(ErrorCode::Parse, where + ": alignment `" + a.phone + "` exceeds frame count");
    if (i > 0 && a.start_frame <= alignments[i - 1].end_frame)
      throw Error(ErrorCode::Overlap, where + ": alignments overlap or are unsorted");
  }
}

}  // namespace

void validate(const Corpus& corpus) {
  if (corpus.frame_height < 1 || corpus.frame_width < 1)
    throw Error(ErrorCode::Shape, "corpus frame geometry must be positive");
  std::set<std::string> ids;
  for (const auto& s : corpus.speakers) {
    if (!ids.insert(s.id).second) throw Error(ErrorCode::Config, "duplicate speaker id " + s.id);
    if (s.age_years < 1) throw Error(ErrorCode::Config, "speaker " + s.id + " has age < 1");
  }
  for (std::size_t u = 0; u < corpus.utterances.size(); ++u) {
    const auto& utt = corpus.utterances[u];
    const std::string where = "utterance " + std::to_string(u);
    if (!ids.contains(utt.speaker_id)) throw Error(ErrorCode::UnknownSpeaker, utt.speaker_id);
    for (const auto& f : utt.frames) {
      if (f.height() != corpus.frame_height || f.width() != corpus.frame_width)
        throw Error(ErrorCode::Shape, where + ": frame geometry differs from corpus");
      for (double v : f.samples())
        if (!(v >= 0.0 && v <= 255.0)) throw Error(ErrorCode::Config, where + ": intensity outside [0,255]");
    }
    validate_alignments(utt.alignments, static_cast<int>(utt.frames.size()), where);
  }
}

// ---- raw frames ---------------------------------------------------------------

std::vector<Frame> load_ult(const fs::path& path, int height, int width) {
  if (height < 1 || width < 1) throw Error(ErrorCode::Shape, "frame dimensions must be positive");
  const auto bytes = binio::read_file(path);
  const std::size_t frame_bytes = static_cast<std::size_t>(height) * width;
  if (bytes.empty() || bytes.size() % frame_bytes != 0)
    throw Error(ErrorCode::SizeMismatch, path.string() + ": " + std::to_string(bytes.size()) +
                                             " bytes is not a positive multiple of " +
                                             std::to_string(frame_bytes));
  std::vector<Frame> frames;
  frames.reserve(bytes.size() / frame_bytes);
  for (std::size_t off = 0; off < bytes.size(); off += frame_bytes) {
    std::vector<double> samples(bytes.begin() + off, bytes.begin() + off + frame_bytes);
    frames.emplace_back(height, width, std::move(samples));
  }
  return frames;
}

void save_ult(const fs::path& path, std::span<const Frame> frames) {
  std::vector<std::uint8_t> bytes;
  for (const auto& f : frames) {
    for (double v : f.samples()) {
      if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v))
        throw Error(ErrorCode::Config, "raw samples must be integers in [0,255]");
      bytes.push_back(static_cast<std::uint8_t>(v));
    }
  }
  binio::write_file(path, bytes);
}

// ---- alignments ---------------------------------------------------------------

std::vector<PhoneAlignment> parse_alignments(std::string_view text) {
  std::vector<PhoneAlignment> out;
  for (const auto& [number, line] : content_lines(text)) {
    const auto fields = split_ws(line);
    PhoneAlignment a;
    if (fields.size() != 3 || !parse_number(fields[1], a.start_frame) ||
        !parse_number(fields[2], a.end_frame))
      throw Error(ErrorCode::Parse, parse_error_at(number, "expected `phone<TAB>start<TAB>end`"));
    if (a.start_frame < 0 || a.start_frame > a.end_frame)
      throw Error(ErrorCode::Parse, parse_error_at(number, "inverted or negative frame range"));
    a.phone = std::string(fields[0]);
    out.push_back(std::move(a));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.start_frame < y.start_frame;
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].start_frame <= out[i - 1].end_frame)
      throw Error(ErrorCode::Overlap, "`" + out[i - 1].phone + "` [" +
                                          std::to_string(out[i - 1].start_frame) + "," +
                                          std::to_string(out[i - 1].end_frame) + "] overlaps `" +
                                          out[i].phone + "`");
  return out;
}

std::vector<PhoneAlignment> load_alignments(const fs::path& path) {
  try {
    return parse_alignments(read_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_alignments(const fs::path& path, std::span<const PhoneAlignment> alignments) {
  std::string text;
  for (const auto& a : alignments)
    text += a.phone + '\t' + std::to_string(a.start_frame) + '\t' + std::to_string(a.end_frame) + '\n';
  write_text(path, text);
}

// ---- metadata -------------------------------------------------------------------

std::vector<Speaker> load_speakers_csv(const fs::path& path) {
  const std::string text = read_text(path);
  const auto lines = content_lines(text);
  if (lines.empty() || trim(lines.front().second) != "id,age_years,gender")
    throw Error(ErrorCode::Parse, path.string() + ": missing header `id,age_years,gender`");
  std::vector<Speaker> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [number, line] = lines[i];
    const auto fields = split_fields(line, ',');
    Speaker s;
    if (fields.size() != 3 || !parse_number(fields[1], s.age_years))
      throw Error(ErrorCode::Parse, parse_error_at(number, "expected `id,age_years,gender`"));
    s.id = std::string(trim(fields[0]));
    const std::string_view g = trim(fields[2]);
    if (g == "female" || g == "F" || g == "f") {
      s.gender = Gender::Female;
    } else if (g == "male" || g == "M" || g == "m") {
      s.gender = Gender::Male;
    } else {
      throw Error(ErrorCode::Parse, parse_error_at(number, "gender must be female or male"));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void save_speakers_csv(const fs::path& path, std::span<const Speaker> speakers) {
  std::string text = "id,age_years,gender\n";
  for (const auto& s : speakers)
    text += s.id + ',' + std::to_string(s.age_years) + ',' +
            (s.gender == Gender::Female ? "female" : "male") + '\n';
  write_text(path, text);
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> out;
  const std::string text = read_text(path);
  for (const auto& [number, line] : content_lines(text)) {
    const auto fields = split_fields(line, '\t');
    ManifestEntry e;
    if (fields.size() != 5 || !parse_number(fields[4], e.fps))
      throw Error(ErrorCode::Parse,
                  parse_error_at(number, "expected `speaker<TAB>type<TAB>ult<TAB>align<TAB>fps`"));
    e.speaker_id = std::string(fields[0]);
    if (fields[1] == "A") {
      e.type = UtteranceType::A;
    } else if (fields[1] == "B") {
      e.type = UtteranceType::B;
    } else {
      throw Error(ErrorCode::Parse, parse_error_at(number, "utterance type must be A or B"));
    }
    e.ult_path = fs::path(std::string(fields[2]));
    e.align_path = fs::path(std::string(fields[3]));
    if (e.ult_path.is_relative()) e.ult_path = base / e.ult_path;
    if (e.align_path.is_relative()) e.align_path = base / e.align_path;
    out.push_back(std::move(e));
  }
  return out;
}

Corpus load_corpus(const fs::path& manifest, const fs::path& speakers_csv, int height, int width) {
  Corpus c;
  c.frame_height = height;
  c.frame_width = width;
  c.speakers = load_speakers_csv(speakers_csv);
  for (auto& e : load_manifest(manifest)) {
    Utterance u;
    u.speaker_id = e.speaker_id;
    u.type = e.type;
    u.fps = e.fps;
    u.frames = load_ult(e.ult_path, height, width);
    u.alignments = load_alignments(e.align_path);
    c.utterances.push_back(std::move(u));
  }
  validate(c);
  return c;
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  save_speakers_csv(dir / "speakers.csv", corpus.speakers);
  std::map<std::string, int> counter;
  std::string manifest;
  for (const auto& u : corpus.utterances) {
    const int idx = counter[u.speaker_id]++;
    char name[32];
    std::snprintf(name, sizeof name, "_%03d", idx);
    const std::string stem = u.speaker_id + "/" + u.speaker_id + name;
    save_ult(dir / (stem + ".ult"), u.frames);
    save_alignments(dir / (stem + ".align"), u.alignments);
    std::ostringstream fps;
    fps << u.fps;
    manifest += u.speaker_id + '\t' + (u.type == UtteranceType::A ? "A" : "B") + '\t' + stem +
                ".ult\t" + stem + ".align\t" + fps.str() + '\n';
  }
  write_text(dir / "manifest.tsv", manifest);
}

// ---- synthetic corpora ----------------------------------------------------------
//
// Frames are rendered analytically. Row r is a scan line at normalized
// position u in [0, 1] (tongue root at 0, tip at 1); column c is depth. The
// tongue surface sits at column (kSurfaceBase + h(u)) * (W - 1), where h is
// a sum of Gaussian bumps describing the tongue shape. Tissue in front of the
// surface echoes moderately, the surface is a bright band, and the air
// beyond it is dark.

namespace {

struct Bump {
  double center;
  double width;
  double height;
};

struct Shape {
  std::vector<Bump> bumps;
};

constexpr double kSurfaceBase = 0.30;
constexpr int kAnatomyBumps = 2;
constexpr double kTissueLevel = 48.0;
constexpr double kAirLevel = 8.0;
constexpr double kBandLevel = 170.0;
constexpr double kBandWidth = 1.3;

const Shape& class_shape(ArticulationClass c) {
  static const std::array<Shape, kNumClasses> shapes{{
      {{{0.50, 0.32, 0.09}}},                       // lips: tongue near rest
      {{{0.78, 0.10, 0.24}, {0.45, 0.25, 0.04}}},   // blade raised near the tip
      {{{0.28, 0.12, 0.26}}},                       // dorsum raised at the back
      {{{0.55, 0.12, 0.16}, {0.88, 0.06, 0.12}}},   // bunched body with raised tip
  }};
  return shapes[class_index(c)];
}

const Shape& neutral_shape() {
  static const Shape s{{{0.50, 0.30, 0.05}}};
  return s;
}

struct VowelDef {
  const char* label;
  Shape shape;
};

const std::vector<VowelDef>& vowels() {
  static const std::vector<VowelDef> v{
      {"a", {{{0.40, 0.25, 0.04}}}},
      {"i", {{{0.65, 0.18, 0.15}}}},
      {"o", {{{0.30, 0.20, 0.11}}}},
      {"e", {{{0.55, 0.22, 0.09}}}},
  };
  return v;
}

const std::array<std::vector<const char*>, kNumClasses>& class_phones() {
  static const std::array<std::vector<const char*>, kNumClasses> p{{
      {"p", "b", "m", "f", "v"},
      {"t", "d", "s", "z", "sh", "th", "n", "l"},
      {"k", "g", "ng"},
      {"r"},
  }};
  return p;
}

// Tongue shape as a weighted mix of shapes, with per-token distortion.
struct ShapeMix {
  struct Term {
    const Shape* shape;
    double weight;
    double amp;    // multiplicative amplitude factor
    double shift;  // additive center shift
  };
  std::vector<Term> terms;

  double height_at(double u) const {
    double h = 0.0;
    for (const auto& t : terms) {
      for (const auto& b : t.shape->bumps) {
        const double d = u - (b.center + t.shift);
        h += t.weight * t.amp * b.height * std::exp(-d * d / (2.0 * b.width * b.width));
      }
    }
    return h;
  }
};

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void render(const ShapeMix& mix, const SpeakerTraits& tr, Frame& out) {
  const int h = out.height();
  const int w = out.width();
  const double row_den = h > 1 ? h - 1 : 1;
  const double col_den = w > 1 ? w - 1 : 1;
  for (int r = 0; r < h; ++r) {
    const double u = (r - tr.offset_rows) / row_den;
    const double ua = 0.5 + (u - 0.5) / tr.scale;
    double base = 0.0;
    for (const auto& b : tr.anatomy) {
      const double d = ua - b.center;
      base += b.height * std::exp(-d * d / (2.0 * b.width * b.width));
    }
    const double surface = (kSurfaceBase + tr.scale * (mix.height_at(ua) + base)) * col_den + tr.offset_cols;
    for (int c = 0; c < w; ++c) {
      const double x = c - surface;
      const double v = kTissueLevel * logistic(-x) + kAirLevel * logistic(x) +
                       kBandLevel * std::exp(-x * x / (2.0 * kBandWidth * kBandWidth));
      out(r, c) = tr.gain * v;
    }
  }
}

void quantize(Frame& f) {
  for (double& v : f.samples()) v = std::clamp(std::round(v), 0.0, 255.0);
}

// Articulation weight of frame t inside a consonant span: 1 at the
// mid-phone frame, falling towards the span edges.
double articulation_weight(int t, int start, int end) {
  const int mid = (start + end) / 2;
  const int half = std::max(mid - start, end - mid);
  const double x = static_cast<double>(std::abs(t - mid)) / (half + 1);
  const double c = std::cos(0.5 * std::numbers::pi * x);
  return c * c;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

double draw(std::mt19937_64& rng, const Range& r) {
  if (r.hi <= r.lo) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

int draw_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

ArticulationClass draw_class(std::mt19937_64& rng) {
  static const std::array<double, kNumClasses> weights{0.30, 0.35, 0.20, 0.15};
  std::discrete_distribution<int> d(weights.begin(), weights.end());
  return kAllClasses[d(rng)];
}

struct Segment {
  std::string label;
  int length = 0;
  const Shape* shape = nullptr;
  bool consonant = false;
  bool aligned = true;
  double amp = 1.0;
  double shift = 0.0;
};

}  // namespace

void validate(const SyntheticConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::Config, what); };
  if (cfg.n_speakers < 1) fail("n_speakers must be >= 1");
  if (cfg.utterances_per_speaker < 1) fail("utterances_per_speaker must be >= 1");
  if (cfg.frame_height < 1 || cfg.frame_width < 1) fail("frame dimensions must be >= 1");
  if (!(cfg.probe_offset_range >= 0.0)) fail("probe_offset_range must be >= 0");
  if (!(cfg.gain_range.lo > 0.0) || cfg.gain_range.hi < cfg.gain_range.lo)
    fail("gain_range must be positive and ordered");
  if (!(cfg.scale_range.lo > 0.0) || cfg.scale_range.hi < cfg.scale_range.lo)
    fail("scale_range must be positive and ordered");
  if (!(cfg.shape_jitter >= 0.0)) fail("shape_jitter must be >= 0");
  if (!(cfg.anatomy_range >= 0.0)) fail("anatomy_range must be >= 0");
  if (!(cfg.noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
}

std::vector<SpeakerTraits> synthetic_speaker_traits(const SyntheticConfig& cfg) {
  validate(cfg);
  auto rng = stream(cfg.seed, 1);
  const Range offset{-cfg.probe_offset_range, cfg.probe_offset_range};
  std::vector<SpeakerTraits> out(cfg.n_speakers);
  for (auto& t : out) {
    t.offset_rows = draw(rng, offset);
    t.offset_cols = draw(rng, offset);
    t.gain = draw(rng, cfg.gain_range);
    t.scale = draw(rng, cfg.scale_range);
    for (int i = 0; i < kAnatomyBumps; ++i) {
      AnatomyBump b;
      b.center = draw(rng, {0.15, 0.85});
      b.width = draw(rng, {0.08, 0.18});
      b.height = draw(rng, {-cfg.anatomy_range, cfg.anatomy_range});
      t.anatomy.push_back(b);
    }
  }
  return out;
}

Frame render_class_frame(int height, int width, ArticulationClass c, const SpeakerTraits& traits) {
  Frame f(height, width);
  render(ShapeMix{{{&class_shape(c), 1.0, 1.0, 0.0}}}, traits, f);
  quantize(f);
  return f;
}

Corpus generate_synthetic_corpus(const SyntheticConfig& cfg) {
  validate(cfg);
  const auto traits = synthetic_speaker_traits(cfg);
  auto meta_rng = stream(cfg.seed, 2);
  auto rng = stream(cfg.seed, 3);

  Corpus corpus;
  corpus.frame_height = cfg.frame_height;
  corpus.frame_width = cfg.frame_width;
  for (int s = 0; s < cfg.n_speakers; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "S%02d", s + 1);
    Speaker sp;
    sp.id = id;
    sp.age_years = draw_int(meta_rng, 5, 12);
    sp.gender = draw_int(meta_rng, 0, 1) == 0 ? Gender::Female : Gender::Male;
    corpus.speakers.push_back(sp);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& vs = vowels();
  auto vowel = [&]() -> const VowelDef& { return vs[draw_int(rng, 0, static_cast<int>(vs.size()) - 1)]; };
  auto consonant = [&](Segment& seg) {
    const ArticulationClass c = draw_class(rng);
    const auto& phones = class_phones()[class_index(c)];
    seg.label = phones[draw_int(rng, 0, static_cast<int>(phones.size()) - 1)];
    seg.shape = &class_shape(c);
    seg.consonant = true;
    seg.length = draw_int(rng, 7, 13);
    seg.amp = 1.0 + cfg.shape_jitter * gauss(rng);
    seg.shift = 0.5 * cfg.shape_jitter * gauss(rng);
  };

  for (int s = 0; s < cfg.n_speakers; ++s) {
    const SpeakerTraits& tr = traits[s];
    for (int k = 0; k < cfg.utterances_per_speaker; ++k) {
      Utterance utt;
      utt.speaker_id = corpus.speakers[s].id;
      utt.type = draw_int(rng, 0, 1) == 0 ? UtteranceType::A : UtteranceType::B;

      // Type A: C V C words; type B: V C V non-words.
      std::vector<Segment> segs;
      Segment sil{"sil", draw_int(rng, 3, 6), &neutral_shape(), false, false};
      segs.push_back(sil);
      const bool consonant_first = utt.type == UtteranceType::A;
      for (int i = 0; i < 3; ++i) {
        Segment seg;
        if ((i % 2 == 0) == consonant_first) {
          consonant(seg);
        } else {
          const VowelDef& v = vowel();
          seg.label = v.label;
          seg.shape = &v.shape;
          seg.length = draw_int(rng, 6, 10);
        }
        segs.push_back(seg);
      }
      sil.length = draw_int(rng, 3, 6);
      segs.push_back(sil);

      int t = 0;
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& seg = segs[i];
        const int start = t;
        const int end = t + seg.length - 1;
        // Consonants blend towards the preceding segment's shape away from
        // the articulation peak.
        const Shape* context = i > 0 ? segs[i - 1].shape : &neutral_shape();
        for (int f = start; f <= end; ++f) {
          ShapeMix mix;
          if (seg.consonant) {
            const double w = articulation_weight(f, start, end);
            mix.terms.push_back({seg.shape, w, seg.amp, seg.shift});
            if (w < 1.0) mix.terms.push_back({context, 1.0 - w, 1.0, 0.0});
          } else {
            mix.terms.push_back({seg.shape, 1.0, 1.0, 0.0});
          }
          Frame frame(cfg.frame_height, cfg.frame_width);
          render(mix, tr, frame);
          if (cfg.noise_sigma > 0.0)
            for (double& v : frame.samples()) v += cfg.noise_sigma * gauss(rng);
          quantize(frame);
          utt.frames.push_back(std::move(frame));
        }
        if (seg.aligned) utt.alignments.push_back({seg.label, start, end});
        t = end + 1;
      }
      corpus.utterances.push_back(std::move(utt));
    }
  }
  validate(corpus);
  return corpus;
}

}  // namespace uti::corpus

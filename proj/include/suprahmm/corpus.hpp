// suprahmm/corpus.hpp

// Copyright 2026  The suprahmm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Labeled corpora: CSV manifests of WAV files, speaker- and text-disjoint
// splits, a seeded synthetic generator, and the on-disk corpus directory
//
//   <dir>/corpus.json          labels, fingerprint, provenance, utterance list
//   <dir>/feats/<id>.feats     observation matrix (binary feature file)
//   <dir>/prosody/<id>.prosody per-frame prosody track (D = 3 feature file)
//
// shared by extracted and synthetic corpora.

#ifndef SUPRAHMM_CORPUS_HPP_
#define SUPRAHMM_CORPUS_HPP_

#include <map>
#include <set>

#include "suprahmm/hmm_json.hpp"
#include "suprahmm/io.hpp"
#include "suprahmm/training.hpp"

namespace suprahmm {

using LabelSet = std::vector<std::string>;

inline LabelSet DefaultEmotionLabels() {
  return {"neutral", "hot_anger", "sadness", "happiness", "disgust", "panic"};
}

inline std::optional<std::size_t> LabelIndex(const LabelSet& labels, std::string_view name) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == name) return i;
  return std::nullopt;
}

inline void ValidateLabels(const LabelSet& labels) {
  if (labels.empty()) throw Error(ErrorKind::kConfig, "empty emotion label set");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw Error(ErrorKind::kConfig, "empty emotion label");
    if (!seen.insert(l).second) throw Error(ErrorKind::kConfig, "duplicate emotion label " + l);
  }
}

struct UtteranceRecord {
  std::string id;
  std::filesystem::path path;  // resolved against the manifest directory
  std::string speaker;
  std::string emotion;
  std::string text;
  int replicate = 0;

  bool operator==(const UtteranceRecord&) const = default;
};

/// A record with its observations loaded.
struct Utterance {
  UtteranceRecord record;
  FeatureSequence features;
  ProsodyTrack prosody;
};

inline const UtteranceRecord& RecordOf(const UtteranceRecord& r) { return r; }
inline const UtteranceRecord& RecordOf(const Utterance& u) { return u.record; }

// ---------------------------------------------------------------------------
// Manifest

namespace detail {

/// One CSV line; double quotes protect commas and "" escapes a quote.
inline std::vector<std::string> SplitCsvLine(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": open quote");
  return out;
}

}  // namespace detail

struct ManifestOptions {
  LabelSet labels = DefaultEmotionLabels();
  bool check_files = true;
};

/// Parses manifest text. Rows whose emotion is outside the label set are
/// dropped with one summary warning.
inline std::vector<UtteranceRecord> ParseManifest(const std::string& text,
                                                  const std::filesystem::path& base_dir,
                                                  const ManifestOptions& opt = {}) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<UtteranceRecord> out;
  bool header_seen = false;
  std::set<std::string> ids;
  std::set<std::tuple<std::string, std::string, std::string, int>> keys;
  std::size_t filtered = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::SplitCsvLine(line, lineno);
    if (!header_seen) {
      const std::vector<std::string> header{"id", "path", "speaker", "emotion", "text", "replicate"};
      if (f != header)
        throw Error(ErrorKind::kParse, "manifest header must be id,path,speaker,emotion,text,replicate");
      header_seen = true;
      continue;
    }
    if (f.size() != 6)
      throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": expected 6 fields");
    UtteranceRecord r;
    r.id = f[0];
    r.path = f[1].empty() ? std::filesystem::path() : base_dir / f[1];
    r.speaker = f[2];
    r.emotion = f[3];
    r.text = f[4];
    try {
      std::size_t used = 0;
      r.replicate = std::stoi(f[5], &used);
      if (used != f[5].size()) throw std::invalid_argument(f[5]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": bad replicate '" + f[5] + "'");
    }
    if (r.id.empty() || r.speaker.empty() || r.emotion.empty() || r.text.empty())
      throw Error(ErrorKind::kParse, "line " + std::to_string(lineno) + ": empty field");
    if (!ids.insert(r.id).second) throw Error(ErrorKind::kDuplicateKey, "duplicate id " + r.id);
    if (!keys.insert({r.speaker, r.text, r.emotion, r.replicate}).second)
      throw Error(ErrorKind::kDuplicateKey, "duplicate (speaker,text,emotion,replicate) at line " +
                                                std::to_string(lineno));
    if (!LabelIndex(opt.labels, r.emotion)) {
      ++filtered;
      continue;
    }
    if (opt.check_files && !std::filesystem::is_regular_file(r.path))
      throw Error(ErrorKind::kIo, "missing audio file " + r.path.string());
    out.push_back(std::move(r));
  }
  if (filtered > 0)
    Warn(std::to_string(filtered) + " manifest rows carry emotions outside the label set; skipped");
  return out;
}

inline std::vector<UtteranceRecord> LoadManifest(const std::filesystem::path& path,
                                                 const ManifestOptions& opt = {}) {
  return ParseManifest(ReadTextFile(path), path.parent_path(), opt);
}

// ---------------------------------------------------------------------------
// Splits

struct SplitSpec {
  std::set<std::string> train_speakers, test_speakers;
  std::set<std::string> train_texts, test_texts;

  void Validate() const {
    for (const auto& s : train_speakers)
      if (test_speakers.count(s)) throw Error(ErrorKind::kConfig, "speaker " + s + " in both sets");
    for (const auto& t : train_texts)
      if (test_texts.count(t)) throw Error(ErrorKind::kConfig, "text " + t + " in both sets");
  }
};

/// First `train_speakers` sorted speakers and first `train_texts` sorted
/// texts train; the rest test.
template <typename T>
SplitSpec FirstKSplit(const std::vector<T>& items, std::size_t train_speakers,
                      std::size_t train_texts) {
  std::set<std::string> speakers, texts;
  for (const auto& it : items) {
    speakers.insert(RecordOf(it).speaker);
    texts.insert(RecordOf(it).text);
  }
  SplitSpec s;
  std::size_t i = 0;
  for (const auto& sp : speakers) (i++ < train_speakers ? s.train_speakers : s.test_speakers).insert(sp);
  i = 0;
  for (const auto& t : texts) (i++ < train_texts ? s.train_texts : s.test_texts).insert(t);
  return s;
}

template <typename T>
struct Split {
  std::vector<T> train, test;
};

/// train = train speaker AND train text; test = test speaker AND test text.
template <typename T>
Split<T> MakeSplit(const std::vector<T>& items, const SplitSpec& spec) {
  spec.Validate();
  Split<T> out;
  for (const auto& it : items) {
    const auto& r = RecordOf(it);
    if (spec.train_speakers.count(r.speaker) && spec.train_texts.count(r.text))
      out.train.push_back(it);
    else if (spec.test_speakers.count(r.speaker) && spec.test_texts.count(r.text))
      out.test.push_back(it);
  }
  if (out.test.empty()) Warn("split leaves the test set empty");
  return out;
}

inline Json SplitToJson(const SplitSpec& s) {
  return Json{{"train_speakers", s.train_speakers},
              {"test_speakers", s.test_speakers},
              {"train_texts", s.train_texts},
              {"test_texts", s.test_texts}};
}

inline SplitSpec SplitFromJson(const Json& j) {
  SplitSpec s;
  auto set = [&](const char* k) {
    return detail::Field(j, k, [](const Json& v) { return v.get<std::set<std::string>>(); });
  };
  s.train_speakers = set("train_speakers");
  s.test_speakers = set("test_speakers");
  s.train_texts = set("train_texts");
  s.test_texts = set("test_texts");
  s.Validate();
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticSpec {
  LabelSet labels = DefaultEmotionLabels();
  int num_speakers = 8;
  int num_texts = 20;
  int num_replicates = 2;
  int min_frames = 80;
  int max_frames = 150;
  int dim = 32;
  int num_states = 6;
  /// Expected distance between two emotions' frame means, in frame SDs.
  double acoustic_separation = 4.0;
  /// SD of the emotion-independent per-state means.
  double state_spread = 2.0;
  /// SD of each speaker's additive frame offset, per dimension.
  double speaker_scale = 0.3;
  /// Scale of emotion-specific F0, voicing and energy offsets.
  double prosody_separation = 1.0;
  /// SD of each speaker's log-F0 offset.
  double speaker_prosody_scale = 0.03;
  /// emotion -> emotion whose generator it reuses.
  std::map<std::string, std::string> tied;
  std::uint64_t seed = 2026;

  void Validate() const {
    ValidateLabels(labels);
    auto bad = [](const std::string& m) { throw Error(ErrorKind::kConfig, "synthetic spec: " + m); };
    if (num_speakers < 1 || num_texts < 1 || num_replicates < 1) bad("counts must be >= 1");
    if (min_frames < 1 || max_frames < min_frames) bad("bad frame range");
    if (dim < 1 || num_states < 1) bad("dim and num_states must be >= 1");
    for (double x : {acoustic_separation, state_spread, speaker_scale, prosody_separation,
                     speaker_prosody_scale})
      if (!(x >= 0.0) || !std::isfinite(x)) bad("scales must be finite and >= 0");
    for (const auto& [a, b] : tied)
      if (!LabelIndex(labels, a) || !LabelIndex(labels, b) || tied.count(b))
        bad("tie " + a + " -> " + b + " must join two labels, one level deep");
  }

  std::string Fingerprint() const { return "synthetic:D=" + std::to_string(dim); }
};

inline Json SyntheticSpecToJson(const SyntheticSpec& s) {
  return Json{{"labels", s.labels},
              {"num_speakers", s.num_speakers},
              {"num_texts", s.num_texts},
              {"num_replicates", s.num_replicates},
              {"min_frames", s.min_frames},
              {"max_frames", s.max_frames},
              {"dim", s.dim},
              {"num_states", s.num_states},
              {"acoustic_separation", s.acoustic_separation},
              {"state_spread", s.state_spread},
              {"speaker_scale", s.speaker_scale},
              {"prosody_separation", s.prosody_separation},
              {"speaker_prosody_scale", s.speaker_prosody_scale},
              {"tied", s.tied},
              {"seed", s.seed}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SyntheticSpec SyntheticSpecFromJson(const Json& j) {
  SyntheticSpec s;
  const Json defaults = SyntheticSpecToJson(s);
  for (const auto& [k, v] : j.items())
    if (!defaults.contains(k)) throw Error(ErrorKind::kConfig, "unknown synthetic spec key '" + k + "'");
  try {
    s.labels = j.value("labels", s.labels);
    s.num_speakers = j.value("num_speakers", s.num_speakers);
    s.num_texts = j.value("num_texts", s.num_texts);
    s.num_replicates = j.value("num_replicates", s.num_replicates);
    s.min_frames = j.value("min_frames", s.min_frames);
    s.max_frames = j.value("max_frames", s.max_frames);
    s.dim = j.value("dim", s.dim);
    s.num_states = j.value("num_states", s.num_states);
    s.acoustic_separation = j.value("acoustic_separation", s.acoustic_separation);
    s.state_spread = j.value("state_spread", s.state_spread);
    s.speaker_scale = j.value("speaker_scale", s.speaker_scale);
    s.prosody_separation = j.value("prosody_separation", s.prosody_separation);
    s.speaker_prosody_scale = j.value("speaker_prosody_scale", s.speaker_prosody_scale);
    s.tied = j.value("tied", s.tied);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("synthetic spec: ") + e.what());
  }
  s.Validate();
  return s;
}

/// Ground-truth generator of one emotion.
struct EmotionGenerator {
  HmmModel acoustic;
  // Indexed by suprasegmental half (first / second half of the states).
  std::array<double, 2> mean_log_f0{};
  std::array<double, 2> voiced_prob{};
  std::array<double, 2> mean_log_energy{};
  static constexpr double kF0Noise = 0.03;
  static constexpr double kEnergyNoise = 0.3;
};

inline std::mt19937_64 SubRng(std::uint64_t seed, std::string_view tag) {
  return std::mt19937_64(seed ^ Fnv1a64(tag));
}

/// Order-3 circular generator: per-state means shared by all emotions plus an
/// emotion offset of norm acoustic_separation / sqrt(2); self-loop
/// probabilities in [0.6, 0.85]; unit frame variance.
inline EmotionGenerator MakeEmotionGenerator(const SyntheticSpec& spec, const std::string& label) {
  const auto N = spec.num_states;
  const auto D = static_cast<std::size_t>(spec.dim);
  auto base_rng = SubRng(spec.seed, "state-means");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> base(N, std::vector<double>(D));
  for (auto& row : base)
    for (auto& x : row) x = spec.state_spread * normal(base_rng);

  const auto it = spec.tied.find(label);
  auto rng = SubRng(spec.seed, "emotion:" + (it == spec.tied.end() ? label : it->second));
  std::vector<double> offset(D);
  double norm = 0.0;
  for (auto& x : offset) {
    x = normal(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : offset) x *= spec.acoustic_separation / std::numbers::sqrt2 / norm;

  std::vector<std::vector<std::vector<double>>> means(N);
  for (int j = 0; j < N; ++j) {
    means[j].push_back(base[j]);
    for (std::size_t d = 0; d < D; ++d) means[j][0][d] += offset[d];
  }
  EmotionGenerator g{HmmModel(CircularTopology(N), 3,
                              MakeEmission(means, std::vector<double>(D, 1.0)))};
  auto& psi = g.acoustic.MutableInitial();
  std::fill(psi.begin(), psi.end(), N > 1 ? 0.05 / (N - 1) : 1.0);
  psi[0] = N > 1 ? 0.95 : 1.0;
  std::uniform_real_distribution<double> loop(0.6, 0.85);
  for (int k = 1; k <= 3; ++k) {
    auto& t = g.acoustic.MutableTransitions(k);
    for (std::size_t c = 0; c < t.NumContexts(); ++c) {
      if (t.NumSlots() == 1) continue;
      const double p = loop(rng);
      t.SetProb(c, 0, p);
      t.SetProb(c, 1, 1.0 - p);
    }
  }
  const double sep = spec.prosody_separation;
  for (int p = 0; p < 2; ++p) {
    g.mean_log_f0[p] = std::log(150.0) + 0.15 * sep * normal(rng);
    g.voiced_prob[p] = std::clamp(0.75 + 0.15 * sep * normal(rng), 0.3, 0.98);
    g.mean_log_energy[p] = -4.0 + 0.5 * sep * normal(rng);
  }
  return g;
}

struct SpeakerOffsets {
  std::vector<double> frame;
  double log_f0 = 0.0;
  double log_energy = 0.0;
};

inline SpeakerOffsets MakeSpeakerOffsets(const SyntheticSpec& spec, const std::string& speaker) {
  auto rng = SubRng(spec.seed, "speaker:" + speaker);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpeakerOffsets s;
  for (int d = 0; d < spec.dim; ++d) s.frame.push_back(spec.speaker_scale * normal(rng));
  s.log_f0 = spec.speaker_prosody_scale * normal(rng);
  s.log_energy = 0.1 * normal(rng);
  return s;
}

inline std::string SyntheticSpeaker(int i) { return "spk" + std::to_string(i + 1); }
inline std::string SyntheticText(int i) {
  return (i < 9 ? "txt0" : "txt") + std::to_string(i + 1);
}

/// One utterance per (emotion, speaker, text, replicate), ids
/// "<emotion>-<speaker>-<text>-r<replicate>". Each utterance draws from its
/// own stream seeded by seed XOR FNV-1a(id).
inline std::vector<Utterance> SynthesizeCorpus(const SyntheticSpec& spec, int jobs = 1) {
  spec.Validate();
  std::vector<EmotionGenerator> gens;
  for (const auto& l : spec.labels) gens.push_back(MakeEmotionGenerator(spec, l));
  std::vector<SpeakerOffsets> speakers;
  for (int s = 0; s < spec.num_speakers; ++s)
    speakers.push_back(MakeSpeakerOffsets(spec, SyntheticSpeaker(s)));

  std::vector<Utterance> out;
  for (std::size_t e = 0; e < spec.labels.size(); ++e)
    for (int s = 0; s < spec.num_speakers; ++s)
      for (int x = 0; x < spec.num_texts; ++x)
        for (int r = 0; r < spec.num_replicates; ++r) {
          Utterance u;
          u.record.emotion = spec.labels[e];
          u.record.speaker = SyntheticSpeaker(s);
          u.record.text = SyntheticText(x);
          u.record.replicate = r + 1;
          u.record.id = u.record.emotion + "-" + u.record.speaker + "-" + u.record.text + "-r" +
                        std::to_string(r + 1);
          out.push_back(std::move(u));
        }

  const auto layout_half = (spec.num_states + 1) / 2;
  ParallelFor(out.size(), jobs, [&](std::size_t i) {
    auto& u = out[i];
    const auto& gen = gens[*LabelIndex(spec.labels, u.record.emotion)];
    const auto& spk = speakers[std::stoul(u.record.speaker.substr(3)) - 1];
    const std::uint64_t seed = spec.seed ^ Fnv1a64(u.record.id);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(spec.min_frames, spec.max_frames);
    const auto T = static_cast<std::size_t>(len(rng));
    auto sample = SampleSequence(gen.acoustic, T, rng());
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < sample.observations.Dim(); ++d)
        sample.observations(t, d) += spk.frame[d];
    u.features = std::move(sample.observations);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t t = 0; t < T; ++t) {
      const int p = sample.states[t] < layout_half ? 0 : 1;
      const bool voiced = unit(rng) < gen.voiced_prob[p];
      u.prosody.voiced.push_back(voiced);
      u.prosody.log_f0.push_back(
          voiced ? gen.mean_log_f0[p] + spk.log_f0 + EmotionGenerator::kF0Noise * normal(rng) : 0.0);
      u.prosody.log_energy.push_back(gen.mean_log_energy[p] + spk.log_energy +
                                     EmotionGenerator::kEnergyNoise * normal(rng));
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Corpus directories

struct Corpus {
  LabelSet labels;
  std::string fingerprint;
  Json provenance = Json::object();
  std::vector<Utterance> utterances;
};

inline std::string FeatsRelPath(const std::string& id) { return "feats/" + id + ".feats"; }
inline std::string ProsodyRelPath(const std::string& id) { return "prosody/" + id + ".prosody"; }

inline void WriteCorpus(const std::filesystem::path& dir, const Corpus& c) {
  Json utts = Json::array();
  for (const auto& u : c.utterances) {
    if (u.prosody.NumFrames() != u.features.NumFrames())
      throw Error(ErrorKind::kDimensionMismatch, "prosody and features differ in length for " + u.record.id);
    WriteFeatures(dir / FeatsRelPath(u.record.id), u.features);
    WriteProsodyTrack(dir / ProsodyRelPath(u.record.id), u.prosody);
    utts.push_back({{"id", u.record.id},
                    {"speaker", u.record.speaker},
                    {"emotion", u.record.emotion},
                    {"text", u.record.text},
                    {"replicate", u.record.replicate},
                    {"frames", u.features.NumFrames()}});
  }
  const Json doc{{"format", "suprahmm.corpus"},
                 {"version", kHmmFormatVersion},
                 {"labels", c.labels},
                 {"fingerprint", c.fingerprint},
                 {"provenance", c.provenance},
                 {"utterances", utts}};
  WriteTextFile(dir / "corpus.json", doc.dump(2) + "\n");
}

inline Corpus ReadCorpus(const std::filesystem::path& dir) {
  Json doc;
  try {
    doc = Json::parse(ReadTextFile(dir / "corpus.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, (dir / "corpus.json").string() + ": " + e.what());
  }
  Corpus c;
  c.labels = detail::Field(doc, "labels", [](const Json& v) { return v.get<LabelSet>(); });
  c.fingerprint = detail::Field(doc, "fingerprint", [](const Json& v) { return v.get<std::string>(); });
  c.provenance = doc.value("provenance", Json::object());
  for (const auto& e : doc.at("utterances")) {
    Utterance u;
    u.record.id = e.at("id").get<std::string>();
    u.record.speaker = e.at("speaker").get<std::string>();
    u.record.emotion = e.at("emotion").get<std::string>();
    u.record.text = e.at("text").get<std::string>();
    u.record.replicate = e.at("replicate").get<int>();
    u.record.path = dir / FeatsRelPath(u.record.id);
    u.features = ReadFeatures(u.record.path);
    u.prosody = ReadProsodyTrack(dir / ProsodyRelPath(u.record.id));
    if (u.prosody.NumFrames() != u.features.NumFrames())
      throw Error(ErrorKind::kParse, "prosody and features differ in length for " + u.record.id);
    c.utterances.push_back(std::move(u));
  }
  return c;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_CORPUS_HPP_

// suprahmm/suprasegmental.hpp

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

// Suprasegmental prosody layer on top of an acoustic circular HMM.
//
// Conventional states are grouped into suprasegmental states (by default
// q1..q3 -> p1 and q4..q6 -> p2). A Viterbi alignment of the acoustic model
// is cut into maximal runs of one suprasegmental state; every run becomes a
// segment summarized by a ProsodySegmentVector. The layer scores
//   sum_s log N(v_s; p_{state(s)}) + sum_s log w(state(s-1) -> state(s))
//     + log N(u; p_top),
// where u summarizes the whole utterance (the top state spanning p1 and p2).
// Acoustic and prosodic scores are fused as (1 - alpha) * acoustic +
// alpha * prosodic.

#ifndef SUPRAHMM_SUPRASEGMENTAL_HPP_
#define SUPRAHMM_SUPRASEGMENTAL_HPP_

#include "suprahmm/hmm_json.hpp"
#include "suprahmm/training.hpp"

namespace suprahmm {

struct SuprasegmentalLayout {
  std::vector<int> state_to_supra;
  int num_supra = 0;

  /// First ceil(N/2) states -> p1, the rest -> p2.
  static SuprasegmentalLayout Default(int num_states) {
    SuprasegmentalLayout l;
    const int first = (num_states + 1) / 2;
    for (int j = 0; j < num_states; ++j) l.state_to_supra.push_back(j < first ? 0 : 1);
    l.num_supra = num_states > 1 ? 2 : 1;
    return l;
  }

  int NumStates() const { return static_cast<int>(state_to_supra.size()); }

  void Validate(int num_states) const {
    if (NumStates() != num_states)
      throw Error(ErrorKind::kConfig, "suprasegmental layout covers " +
                                          std::to_string(NumStates()) + " states, model has " +
                                          std::to_string(num_states));
    std::vector<int> owned(static_cast<std::size_t>(std::max(num_supra, 0)), 0);
    for (int p : state_to_supra) {
      if (p < 0 || p >= num_supra)
        throw Error(ErrorKind::kConfig, "suprasegmental state id out of range");
      ++owned[p];
    }
    for (int c : owned)
      if (c == 0) throw Error(ErrorKind::kConfig, "suprasegmental state owns no conventional state");
  }

  bool operator==(const SuprasegmentalLayout&) const = default;
};

struct Segment {
  int supra_state;
  std::size_t begin;
  std::size_t length;

  bool operator==(const Segment&) const = default;
};

inline std::vector<Segment> SegmentByAlignment(std::span<const int> alignment,
                                               const SuprasegmentalLayout& layout) {
  if (alignment.empty()) throw Error(ErrorKind::kEmptyInput, "empty alignment");
  std::vector<Segment> segs;
  for (std::size_t t = 0; t < alignment.size(); ++t) {
    const int q = alignment[t];
    if (q < 0 || q >= layout.NumStates())
      throw Error(ErrorKind::kInvalidArgument, "aligned state outside layout");
    const int p = layout.state_to_supra[q];
    if (segs.empty() || segs.back().supra_state != p)
      segs.push_back({p, t, 1});
    else
      ++segs.back().length;
  }
  return segs;
}

inline std::vector<int> FrameToSegmentMap(const std::vector<Segment>& segs) {
  std::vector<int> map;
  for (std::size_t s = 0; s < segs.size(); ++s) map.insert(map.end(), segs[s].length, static_cast<int>(s));
  return map;
}

/// Diagonal Gaussian over ProsodySegmentVector.
struct ProsodyGaussian {
  std::array<double, ProsodySegmentVector::kDim> mean{};
  std::array<double, ProsodySegmentVector::kDim> variance{};

  double LogDensity(const ProsodySegmentVector& v) const {
    const auto x = v.ToArray();
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double z = x[d] - mean[d];
      acc += kLog2Pi + std::log(variance[d]) + z * z / variance[d];
    }
    return -0.5 * acc;
  }

  bool operator==(const ProsodyGaussian&) const = default;
};

struct SuprasegmentalConfig {
  double variance_floor = 1e-4;
  double transition_floor = 1e-6;
};

struct SuprasegmentalModel {
  SuprasegmentalLayout layout;
  std::vector<ProsodyGaussian> states;          // one per suprasegmental state
  std::vector<std::vector<double>> transitions; // [from][to], rows sum to 1
  ProsodyGaussian top;                          // utterance-level density

  bool operator==(const SuprasegmentalModel&) const = default;
};

/// Prosody observed for one utterance under one alignment.
struct SegmentedProsody {
  std::vector<Segment> segments;
  std::vector<ProsodySegmentVector> vectors;  // parallel to segments
  ProsodySegmentVector utterance;
};

inline SegmentedProsody SegmentProsody(std::span<const int> alignment,
                                       const SuprasegmentalLayout& layout,
                                       const ProsodyTrack& track) {
  SegmentedProsody sp;
  sp.segments = SegmentByAlignment(alignment, layout);
  sp.vectors = SummarizeSegments(track, FrameToSegmentMap(sp.segments));
  sp.utterance = SummarizeProsody(track, 0, track.NumFrames());
  return sp;
}

namespace detail {

inline ProsodyGaussian FitProsodyGaussian(const std::vector<ProsodySegmentVector>& xs,
                                          double floor) {
  ProsodyGaussian g;
  const double n = static_cast<double>(xs.size());
  for (const auto& v : xs) {
    const auto a = v.ToArray();
    for (std::size_t d = 0; d < a.size(); ++d) g.mean[d] += a[d] / n;
  }
  for (const auto& v : xs) {
    const auto a = v.ToArray();
    for (std::size_t d = 0; d < a.size(); ++d)
      g.variance[d] += (a[d] - g.mean[d]) * (a[d] - g.mean[d]) / n;
  }
  for (double& v : g.variance) v = std::max(v, floor);
  return g;
}

}  // namespace detail

/// Fits per-state Gaussians (sample mean, population variance, floored),
/// segment-bigram transition weights and the utterance-level Gaussian.
inline SuprasegmentalModel TrainSuprasegmental(const std::vector<SegmentedProsody>& corpus,
                                               const SuprasegmentalLayout& layout,
                                               const SuprasegmentalConfig& cfg = {}) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "no utterances for suprasegmental fit");
  const auto S = static_cast<std::size_t>(layout.num_supra);
  std::vector<std::vector<ProsodySegmentVector>> per_state(S);
  std::vector<ProsodySegmentVector> all, utterances;
  std::vector<std::vector<double>> counts(S, std::vector<double>(S, 0.0));
  for (const auto& u : corpus) {
    if (u.segments.size() != u.vectors.size())
      throw Error(ErrorKind::kDimensionMismatch, "segments and prosody vectors disagree");
    for (std::size_t s = 0; s < u.segments.size(); ++s) {
      const int p = u.segments[s].supra_state;
      if (p < 0 || static_cast<std::size_t>(p) >= S)
        throw Error(ErrorKind::kInvalidArgument, "segment state outside layout");
      per_state[p].push_back(u.vectors[s]);
      all.push_back(u.vectors[s]);
      if (s > 0) counts[u.segments[s - 1].supra_state][p] += 1.0;
    }
    utterances.push_back(u.utterance);
  }
  if (all.empty()) throw Error(ErrorKind::kEmptyInput, "corpus contains no segments");

  SuprasegmentalModel m;
  m.layout = layout;
  for (std::size_t p = 0; p < S; ++p) {
    if (per_state[p].empty()) {
      Warn("suprasegmental state p" + std::to_string(p + 1) +
           " has no training segments; using global prosody statistics");
      m.states.push_back(detail::FitProsodyGaussian(all, cfg.variance_floor));
    } else {
      m.states.push_back(detail::FitProsodyGaussian(per_state[p], cfg.variance_floor));
    }
  }
  for (auto& row : counts) FloorAndNormalize(row, cfg.transition_floor);
  m.transitions = std::move(counts);
  m.top = detail::FitProsodyGaussian(utterances, cfg.variance_floor);
  return m;
}

inline double SuprasegmentalLogLikelihood(const SuprasegmentalModel& model,
                                          const SegmentedProsody& obs) {
  if (obs.segments.empty()) throw Error(ErrorKind::kEmptyInput, "no segments to score");
  if (obs.segments.size() != obs.vectors.size())
    throw Error(ErrorKind::kDimensionMismatch, "segments and prosody vectors disagree");
  double ll = 0.0;
  for (std::size_t s = 0; s < obs.segments.size(); ++s) {
    const int p = obs.segments[s].supra_state;
    if (p < 0 || p >= static_cast<int>(model.states.size()))
      throw Error(ErrorKind::kDimensionMismatch, "segment state outside model");
    ll += model.states[p].LogDensity(obs.vectors[s]);
    if (s > 0) ll += SafeLog(model.transitions[obs.segments[s - 1].supra_state][p]);
  }
  return ll + model.top.LogDensity(obs.utterance);
}

// ---------------------------------------------------------------------------

struct Csphmm3Model {
  HmmModel acoustic;
  SuprasegmentalModel supra;
  double alpha = 0.5;

  void Validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw Error(ErrorKind::kConfig, "alpha must lie in [0, 1]");
    supra.layout.Validate(acoustic.NumStates());
  }

  bool operator==(const Csphmm3Model&) const = default;
};

struct FusedScore {
  double acoustic = kLogZero;
  double suprasegmental = kLogZero;
  double fused = kLogZero;
  std::vector<int> alignment;
};

inline double FuseScores(double acoustic, double supra, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::kConfig, "alpha must lie in [0, 1]");
  if (alpha == 0.0) return acoustic;
  if (alpha == 1.0) return supra;
  return (1.0 - alpha) * acoustic + alpha * supra;
}

/// Acoustic forward score, suprasegmental score on the acoustic Viterbi
/// segmentation, and their fusion at the model's alpha (or `alpha_override`).
inline FusedScore FusedLogLikelihood(const Csphmm3Model& model, const FeatureSequence& obs,
                                     const ProsodyTrack& prosody,
                                     std::optional<double> alpha_override = std::nullopt) {
  model.Validate();
  if (prosody.NumFrames() != obs.NumFrames())
    throw Error(ErrorKind::kDimensionMismatch, "prosody track and features differ in length");
  FusedScore s;
  s.acoustic = ForwardLogLikelihood(model.acoustic, obs);
  s.alignment = ViterbiAlign(model.acoustic, obs).states;
  s.suprasegmental = SuprasegmentalLogLikelihood(
      model.supra, SegmentProsody(s.alignment, model.supra.layout, prosody));
  s.fused = FuseScores(s.acoustic, s.suprasegmental, alpha_override.value_or(model.alpha));
  return s;
}

// ---------------------------------------------------------------------------
// JSON

inline Json ProsodyGaussianToJson(const ProsodyGaussian& g) {
  return Json{{"mean", g.mean}, {"variance", g.variance}};
}

inline ProsodyGaussian ProsodyGaussianFromJson(const Json& j) {
  ProsodyGaussian g;
  g.mean = j.at("mean").get<std::array<double, ProsodySegmentVector::kDim>>();
  g.variance = j.at("variance").get<std::array<double, ProsodySegmentVector::kDim>>();
  return g;
}

inline Json SuprasegmentalToJson(const SuprasegmentalModel& m) {
  Json states = Json::array();
  for (const auto& g : m.states) states.push_back(ProsodyGaussianToJson(g));
  return Json{{"layout", {{"state_to_supra", m.layout.state_to_supra},
                          {"num_supra", m.layout.num_supra}}},
              {"features", {"mean_log_f0", "std_log_f0", "voiced_ratio", "mean_log_energy",
                            "energy_range", "duration_frames"}},
              {"states", states},
              {"transitions", m.transitions},
              {"top", ProsodyGaussianToJson(m.top)}};
}

inline SuprasegmentalModel SuprasegmentalFromJson(const Json& j) {
  try {
    SuprasegmentalModel m;
    m.layout.state_to_supra = j.at("layout").at("state_to_supra").get<std::vector<int>>();
    m.layout.num_supra = j.at("layout").at("num_supra").get<int>();
    for (const auto& s : j.at("states")) m.states.push_back(ProsodyGaussianFromJson(s));
    m.transitions = j.at("transitions").get<std::vector<std::vector<double>>>();
    m.top = ProsodyGaussianFromJson(j.at("top"));
    if (static_cast<int>(m.states.size()) != m.layout.num_supra ||
        static_cast<int>(m.transitions.size()) != m.layout.num_supra)
      throw Error(ErrorKind::kParse, "suprasegmental state count disagrees with layout");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("suprasegmental model: ") + e.what());
  }
}

inline Json Csphmm3ToJson(const Csphmm3Model& m) {
  return Json{{"format", "suprahmm.csphmm3"},
              {"version", kHmmFormatVersion},
              {"alpha", m.alpha},
              {"acoustic", HmmToJson(m.acoustic)},
              {"suprasegmental", SuprasegmentalToJson(m.supra)}};
}

inline Csphmm3Model Csphmm3FromJson(const Json& j) {
  Csphmm3Model m;
  m.alpha = detail::Field(j, "alpha", [](const Json& v) { return v.get<double>(); });
  m.acoustic = HmmFromJson(j.at("acoustic"));
  m.supra = SuprasegmentalFromJson(j.at("suprasegmental"));
  m.Validate();
  return m;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_SUPRASEGMENTAL_HPP_

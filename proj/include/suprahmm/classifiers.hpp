// suprahmm/classifiers.hpp

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

// Per-emotion model banks and the argmax recognizer.
//
// A bank holds one model per label of a fixed label set. Scores are
//   CSPHMM3  fused acoustic + suprasegmental log-likelihood
//   CHMM3    acoustic forward log-likelihood
//   GMM      mean frame log-likelihood
//   VQ       negative mean quantization distortion
// and the decision is the first label (in label-set order) with the maximal
// score.
//
// On disk a bank is a directory holding manifest.json and one <label>.json
// per emotion. Writing the same bank twice produces identical bytes.

#ifndef SUPRAHMM_CLASSIFIERS_HPP_
#define SUPRAHMM_CLASSIFIERS_HPP_

#include <variant>

#include "suprahmm/baselines.hpp"
#include "suprahmm/corpus.hpp"
#include "suprahmm/suprasegmental.hpp"

namespace suprahmm {

enum class BankKind { kCsphmm3, kChmm3, kGmm, kVq };

inline const char* BankKindName(BankKind k) {
  switch (k) {
    case BankKind::kCsphmm3: return "CSPHMM3";
    case BankKind::kChmm3: return "CHMM3";
    case BankKind::kGmm: return "GMM";
    case BankKind::kVq: return "VQ";
  }
  return "?";
}

inline BankKind ParseBankKind(std::string_view s) {
  for (auto k : {BankKind::kCsphmm3, BankKind::kChmm3, BankKind::kGmm, BankKind::kVq}) {
    std::string name = BankKindName(k);
    if (s.size() == name.size() &&
        std::equal(s.begin(), s.end(), name.begin(),
                   [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; }))
      return k;
  }
  throw Error(ErrorKind::kConfig, "unknown model kind '" + std::string(s) + "'");
}

struct BankConfig {
  BankKind kind = BankKind::kCsphmm3;
  LabelSet labels = DefaultEmotionLabels();
  ChainConfig chain;                 // CSPHMM3, CHMM3
  SuprasegmentalConfig supra;        // CSPHMM3
  std::optional<SuprasegmentalLayout> layout;  // default: halves of the N states
  double alpha = 0.5;
  GmmTrainConfig gmm;
  VqTrainConfig vq;
  int jobs = 1;

  SuprasegmentalLayout Layout() const {
    return layout ? *layout : SuprasegmentalLayout::Default(chain.init.num_states);
  }

  void Validate() const {
    ValidateLabels(labels);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::kConfig, "alpha must lie in [0, 1]");
    if (chain.target_order < 1 || chain.target_order > kMaxOrder)
      throw Error(ErrorKind::kConfig, "target order must lie in [1, 3]");
    if (static_cast<int>(chain.iters_per_order.size()) < chain.target_order)
      throw Error(ErrorKind::kConfig, "iters_per_order needs one entry per order");
    if (kind == BankKind::kCsphmm3) Layout().Validate(chain.init.num_states);
  }
};

inline Json BankConfigToJson(const BankConfig& c) {
  const auto layout = c.Layout();
  return Json{{"kind", BankKindName(c.kind)},
              {"labels", c.labels},
              {"num_states", c.chain.init.num_states},
              {"num_mixtures", c.chain.init.num_mixtures},
              {"target_order", c.chain.target_order},
              {"iters_per_order", c.chain.iters_per_order},
              {"tol", c.chain.tol},
              {"seed", c.chain.init.seed},
              {"floors",
               {{"transition", c.chain.init.floors.transition},
                {"relative_variance", c.chain.init.floors.relative_variance},
                {"absolute_variance", c.chain.init.floors.absolute_variance},
                {"prosody_variance", c.supra.variance_floor}}},
              {"layout", layout.state_to_supra},
              {"alpha", c.alpha},
              {"gmm_components", c.gmm.num_components},
              {"gmm_iters", c.gmm.max_iters},
              {"vq_codebook_size", c.vq.codebook_size}};
}

using EmotionModel = std::variant<Csphmm3Model, HmmModel, GmmBaselineModel, VqBaselineModel>;

struct ModelBank {
  BankKind kind = BankKind::kCsphmm3;
  LabelSet labels;
  std::string fingerprint;
  double alpha = 0.5;
  Json config = Json::object();
  std::vector<EmotionModel> models;  // parallel to labels

  void Validate() const {
    if (models.size() != labels.size())
      throw Error(ErrorKind::kIncompleteBank, "bank has " + std::to_string(models.size()) +
                                                  " models for " + std::to_string(labels.size()) +
                                                  " labels");
  }
};

/// Score of one utterance under one emotion model.
inline double ScoreUtterance(const EmotionModel& model, const Utterance& u, double alpha) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Csphmm3Model>)
          return FusedLogLikelihood(m, u.features, u.prosody, alpha).fused;
        else if constexpr (std::is_same_v<M, HmmModel>)
          return ForwardLogLikelihood(m, u.features);
        else if constexpr (std::is_same_v<M, GmmBaselineModel>)
          return m.MeanFrameLogLikelihood(u.features);
        else
          return m.Score(u.features);
      },
      model);
}

inline std::size_t ModelDim(const EmotionModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Csphmm3Model>) return m.acoustic.Dim();
        else if constexpr (std::is_same_v<M, HmmModel>) return m.Dim();
        else if constexpr (std::is_same_v<M, GmmBaselineModel>) return m.var_floor.size();
        else return m.codebook.at(0).size();
      },
      model);
}

/// Index of the first maximal score; NaN never wins.
inline std::size_t ArgmaxFirst(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::kEmptyInput, "no scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best] || std::isnan(scores[best])) best = i;
  return best;
}

struct Classification {
  std::size_t index = 0;
  std::string label;
  std::vector<double> scores;  // parallel to the bank's labels
};

inline Classification Classify(const ModelBank& bank, const Utterance& u,
                               std::string_view fingerprint,
                               std::optional<double> alpha = std::nullopt) {
  bank.Validate();
  if (fingerprint != bank.fingerprint)
    throw Error(ErrorKind::kIncompatibleFeatures, "features '" + std::string(fingerprint) +
                                                      "' do not match bank features '" +
                                                      bank.fingerprint + "'");
  if (u.features.Dim() != ModelDim(bank.models[0]))
    throw Error(ErrorKind::kIncompatibleFeatures, "feature dimension " +
                                                      std::to_string(u.features.Dim()) +
                                                      " does not match the bank");
  Classification c;
  const double a = alpha.value_or(bank.alpha);
  for (const auto& m : bank.models) c.scores.push_back(ScoreUtterance(m, u, a));
  c.index = ArgmaxFirst(c.scores);
  c.label = bank.labels[c.index];
  return c;
}

// ---------------------------------------------------------------------------
// Training

inline EmotionModel TrainEmotionModel(const BankConfig& cfg, const std::vector<Utterance>& utts,
                                      std::uint64_t seed) {
  std::vector<FeatureSequence> feats;
  for (const auto& u : utts) feats.push_back(u.features);
  switch (cfg.kind) {
    case BankKind::kChmm3:
    case BankKind::kCsphmm3: {
      ChainConfig chain = cfg.chain;
      chain.init.seed = seed;
      chain.jobs = 1;
      HmmModel acoustic = TrainCircularChain(feats, chain);
      if (cfg.kind == BankKind::kChmm3) return acoustic;
      const auto layout = cfg.Layout();
      std::vector<SegmentedProsody> aligned;
      for (const auto& u : utts)
        aligned.push_back(
            SegmentProsody(ViterbiAlign(acoustic, u.features).states, layout, u.prosody));
      auto supra = TrainSuprasegmental(aligned, layout, cfg.supra);
      return Csphmm3Model{std::move(acoustic), std::move(supra), cfg.alpha};
    }
    case BankKind::kGmm: {
      GmmTrainConfig g = cfg.gmm;
      g.seed = seed;
      g.floors = cfg.chain.init.floors;
      return TrainGmmBaseline(feats, g).model;
    }
    case BankKind::kVq: {
      VqTrainConfig v = cfg.vq;
      v.seed = seed;
      return TrainVqBaseline(feats, v);
    }
  }
  throw Error(ErrorKind::kConfig, "unknown bank kind");
}

/// Trains one model per label, emotions in parallel. Every model is seeded by
/// the configured seed alone, so a bank does not depend on `jobs`.
inline ModelBank TrainBank(const BankConfig& cfg, const std::vector<Utterance>& train,
                           std::string_view fingerprint) {
  cfg.Validate();
  std::vector<std::vector<Utterance>> by_label(cfg.labels.size());
  for (const auto& u : train)
    if (const auto i = LabelIndex(cfg.labels, u.record.emotion)) by_label[*i].push_back(u);
  for (std::size_t i = 0; i < by_label.size(); ++i)
    if (by_label[i].empty())
      throw Error(ErrorKind::kIncompleteBank, "no training utterances for emotion " + cfg.labels[i]);

  ModelBank bank;
  bank.kind = cfg.kind;
  bank.labels = cfg.labels;
  bank.fingerprint = fingerprint;
  bank.alpha = cfg.kind == BankKind::kCsphmm3 ? cfg.alpha : 0.0;
  bank.config = BankConfigToJson(cfg);
  std::vector<std::optional<EmotionModel>> models(cfg.labels.size());
  ParallelFor(models.size(), cfg.jobs, [&](std::size_t i) {
    models[i].emplace(TrainEmotionModel(cfg, by_label[i], cfg.chain.init.seed));
  });
  for (auto& m : models) bank.models.push_back(std::move(*m));
  return bank;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json EmotionModelToJson(const EmotionModel& model) {
  return std::visit(
      [](const auto& m) -> Json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Csphmm3Model>) return Csphmm3ToJson(m);
        else if constexpr (std::is_same_v<M, HmmModel>) return HmmToJson(m);
        else if constexpr (std::is_same_v<M, GmmBaselineModel>) return GmmBaselineToJson(m);
        else return VqBaselineToJson(m);
      },
      model);
}

inline EmotionModel EmotionModelFromJson(BankKind kind, const Json& j) {
  switch (kind) {
    case BankKind::kCsphmm3: return Csphmm3FromJson(j);
    case BankKind::kChmm3: return HmmFromJson(j);
    case BankKind::kGmm: return GmmBaselineFromJson(j);
    case BankKind::kVq: return VqBaselineFromJson(j);
  }
  throw Error(ErrorKind::kParse, "unknown bank kind");
}

inline Json BankManifestJson(const ModelBank& bank, const Json& provenance = Json::object()) {
  Json files = Json::object();
  for (const auto& l : bank.labels) files[l] = l + ".json";
  return Json{{"format", "suprahmm.bank"},
              {"version", kHmmFormatVersion},
              {"kind", BankKindName(bank.kind)},
              {"labels", bank.labels},
              {"fingerprint", bank.fingerprint},
              {"alpha", bank.alpha},
              {"config", bank.config},
              {"models", files},
              {"provenance", provenance}};
}

inline void WriteBank(const std::filesystem::path& dir, const ModelBank& bank,
                      const Json& provenance = Json::object()) {
  bank.Validate();
  WriteTextFile(dir / "manifest.json", BankManifestJson(bank, provenance).dump(2) + "\n");
  for (std::size_t i = 0; i < bank.labels.size(); ++i)
    WriteTextFile(dir / (bank.labels[i] + ".json"), EmotionModelToJson(bank.models[i]).dump() + "\n");
}

inline Json ParseJsonFile(const std::filesystem::path& path) {
  try {
    return Json::parse(ReadTextFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

inline ModelBank ReadBank(const std::filesystem::path& dir) {
  const Json man = ParseJsonFile(dir / "manifest.json");
  ModelBank bank;
  bank.kind = ParseBankKind(detail::Field(man, "kind", [](const Json& v) { return v.get<std::string>(); }));
  bank.labels = detail::Field(man, "labels", [](const Json& v) { return v.get<LabelSet>(); });
  bank.fingerprint = detail::Field(man, "fingerprint", [](const Json& v) { return v.get<std::string>(); });
  bank.alpha = detail::Field(man, "alpha", [](const Json& v) { return v.get<double>(); });
  bank.config = man.value("config", Json::object());
  const Json& files = man.at("models");
  for (const auto& l : bank.labels) {
    if (!files.contains(l)) throw Error(ErrorKind::kIncompleteBank, "bank has no model for " + l);
    const auto path = dir / files.at(l).get<std::string>();
    if (!std::filesystem::exists(path))
      throw Error(ErrorKind::kIncompleteBank, "missing model file " + path.string());
    bank.models.push_back(EmotionModelFromJson(bank.kind, ParseJsonFile(path)));
  }
  return bank;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_CLASSIFIERS_HPP_

// suprahmm/experiment.hpp

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

// Experiment configuration shared by the command-line tools. A single JSON
// document holds every tunable; command-line flags and `--set key=value`
// pairs are patches applied on top of it, so the merged document is the
// complete record of a run.

#ifndef SUPRAHMM_EXPERIMENT_HPP_
#define SUPRAHMM_EXPERIMENT_HPP_

#include <cstdlib>

#include "suprahmm/classifiers.hpp"

namespace suprahmm {

inline Json DefaultExperimentJson() {
  const MfccConfig f;
  const InitConfig init;
  const ChainConfig chain;
  return Json{
      {"labels", DefaultEmotionLabels()},
      {"seed", init.seed},
      {"jobs", 1},
      {"features",
       {{"sample_rate_hz", f.sample_rate_hz},
        {"preemphasis_coeff", f.preemphasis_coeff},
        {"frame_length_ms", f.frame_length_ms},
        {"frame_shift_ms", f.frame_shift_ms},
        {"fft_size", f.fft_size},
        {"num_mel_filters", f.num_mel_filters},
        {"num_cepstra", f.num_cepstra},
        {"delta_window", f.delta_window},
        {"log_floor", f.log_floor}}},
      {"model",
       {{"num_states", init.num_states},
        {"num_mixtures", init.num_mixtures},
        {"target_order", chain.target_order},
        {"iters_per_order", chain.iters_per_order},
        {"tol", chain.tol},
        {"floors",
         {{"transition", init.floors.transition},
          {"relative_variance", init.floors.relative_variance},
          {"absolute_variance", init.floors.absolute_variance},
          {"prosody_variance", SuprasegmentalConfig{}.variance_floor},
          {"prosody_transition", SuprasegmentalConfig{}.transition_floor}}},
        {"layout", nullptr},
        {"alpha", 0.5},
        {"gmm_components", GmmTrainConfig{}.num_components},
        {"gmm_iters", GmmTrainConfig{}.max_iters},
        {"vq_codebook_size", VqTrainConfig{}.codebook_size}}},
      {"split", {{"train_speakers", 5}, {"train_texts", 10}}}};
}

namespace detail {

/// Keys whose default is null or whose value may be a number or a list.
inline bool FreeFormKey(const std::string& path) {
  return path == "model.layout" || path == "split.train_speakers" || path == "split.train_texts" ||
         path == "split.test_speakers" || path == "split.test_texts";
}

inline void CheckKnownKeys(const Json& doc, const Json& ref, const std::string& prefix) {
  for (const auto& [k, v] : doc.items()) {
    const std::string path = prefix.empty() ? k : prefix + "." + k;
    if (FreeFormKey(path)) continue;
    if (!ref.contains(k)) throw Error(ErrorKind::kConfig, "unknown config key '" + path + "'");
    if (ref[k].is_object()) {
      if (!v.is_object()) throw Error(ErrorKind::kConfig, "config key '" + path + "' must be an object");
      CheckKnownKeys(v, ref[k], path);
    }
  }
}

}  // namespace detail

/// Sets a dotted key ("model.alpha") to a value given as JSON text; text that
/// does not parse as JSON is taken as a string.
inline void ApplySetOverride(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorKind::kConfig, "override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw Error(ErrorKind::kConfig, "bad override key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!(*node)[part].is_object()) (*node)[part] = Json::object();
    node = &(*node)[part];
    pos = dot + 1;
  }
}

/// Parsed, validated view of the merged experiment document.
struct ExperimentConfig {
  Json document;
  LabelSet labels;
  std::uint64_t seed = 1;
  int jobs = 1;
  MfccConfig features;
  BankConfig bank;
  Json split;

  /// Speaker/text split for a concrete corpus: counts take the first k
  /// sorted names, explicit lists are used as given.
  template <typename T>
  SplitSpec SplitFor(const std::vector<T>& items) const {
    const Json& sp = split.at("train_speakers");
    if (sp.is_number()) {
      const Json& tx = split.at("train_texts");
      if (!tx.is_number()) throw Error(ErrorKind::kConfig, "split counts must both be numbers");
      return FirstKSplit(items, sp.get<std::size_t>(), tx.get<std::size_t>());
    }
    return SplitFromJson(split);
  }
};

/// Defaults, then the config file (merge patch), then SUPRAHMM_SEED, then
/// each `--set` override in order.
inline ExperimentConfig LoadExperimentConfig(const Json& file_doc,
                                             const std::vector<std::string>& overrides,
                                             const char* env_seed) {
  if (!file_doc.is_null() && !file_doc.is_object())
    throw Error(ErrorKind::kConfig, "config file must hold a JSON object");
  Json doc = DefaultExperimentJson();
  const Json defaults = doc;
  if (file_doc.is_object()) {
    detail::CheckKnownKeys(file_doc, defaults, "");
    doc.merge_patch(file_doc);
  }
  if (env_seed && *env_seed) {
    try {
      std::size_t used = 0;
      const auto s = std::stoull(env_seed, &used);
      if (used != std::strlen(env_seed)) throw std::invalid_argument("trailing text");
      doc["seed"] = s;
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig, std::string("SUPRAHMM_SEED is not an integer: ") + env_seed);
    }
  }
  for (const auto& o : overrides) ApplySetOverride(doc, o);
  detail::CheckKnownKeys(doc, defaults, "");

  ExperimentConfig c;
  try {
    c.labels = doc.at("labels").get<LabelSet>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.jobs = doc.at("jobs").get<int>();

    const Json& f = doc.at("features");
    c.features.sample_rate_hz = f.at("sample_rate_hz").get<int>();
    c.features.preemphasis_coeff = f.at("preemphasis_coeff").get<double>();
    c.features.frame_length_ms = f.at("frame_length_ms").get<double>();
    c.features.frame_shift_ms = f.at("frame_shift_ms").get<double>();
    c.features.fft_size = f.at("fft_size").get<int>();
    c.features.num_mel_filters = f.at("num_mel_filters").get<int>();
    c.features.num_cepstra = f.at("num_cepstra").get<int>();
    c.features.delta_window = f.at("delta_window").get<int>();
    c.features.log_floor = f.at("log_floor").get<double>();

    const Json& m = doc.at("model");
    BankConfig& b = c.bank;
    b.labels = c.labels;
    b.jobs = c.jobs;
    b.chain.jobs = 1;
    b.chain.init.num_states = m.at("num_states").get<int>();
    b.chain.init.num_mixtures = m.at("num_mixtures").get<int>();
    b.chain.init.seed = c.seed;
    b.chain.target_order = m.at("target_order").get<int>();
    b.chain.iters_per_order = m.at("iters_per_order").get<std::vector<int>>();
    b.chain.tol = m.at("tol").get<double>();
    const Json& fl = m.at("floors");
    b.chain.init.floors.transition = fl.at("transition").get<double>();
    b.chain.init.floors.relative_variance = fl.at("relative_variance").get<double>();
    b.chain.init.floors.absolute_variance = fl.at("absolute_variance").get<double>();
    b.supra.variance_floor = fl.at("prosody_variance").get<double>();
    b.supra.transition_floor = fl.at("prosody_transition").get<double>();
    if (!m.at("layout").is_null()) {
      SuprasegmentalLayout layout;
      layout.state_to_supra = m.at("layout").get<std::vector<int>>();
      layout.num_supra = 0;
      for (int s : layout.state_to_supra) layout.num_supra = std::max(layout.num_supra, s + 1);
      b.layout = layout;
    }
    b.alpha = m.at("alpha").get<double>();
    b.gmm.num_components = m.at("gmm_components").get<int>();
    b.gmm.max_iters = m.at("gmm_iters").get<int>();
    b.gmm.seed = c.seed;
    b.gmm.floors = b.chain.init.floors;
    b.vq.codebook_size = m.at("vq_codebook_size").get<int>();
    b.vq.seed = c.seed;

    c.split = doc.at("split");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("config: ") + e.what());
  }
  if (c.jobs < 1) throw Error(ErrorKind::kConfig, "jobs must be >= 1");
  if (c.bank.chain.init.num_states < 1 || c.bank.chain.init.num_mixtures < 1)
    throw Error(ErrorKind::kConfig, "num_states and num_mixtures must be >= 1");
  c.features.Validate();
  c.bank.Validate();
  c.document = std::move(doc);
  return c;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_EXPERIMENT_HPP_

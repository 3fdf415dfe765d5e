// suprahmm/baselines.hpp

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

// Frame-level baseline classifiers: a diagonal GMM trained by EM on pooled
// frames and an LBG vector-quantization codebook. Both score an utterance by
// a per-frame average so length does not bias comparisons.

#ifndef SUPRAHMM_BASELINES_HPP_
#define SUPRAHMM_BASELINES_HPP_

#include "suprahmm/hmm_json.hpp"
#include "suprahmm/training.hpp"

namespace suprahmm {

inline Points PoolFrames(const std::vector<FeatureSequence>& corpus) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "empty training corpus");
  Points pts;
  for (const auto& seq : corpus) {
    if (seq.Dim() != corpus[0].Dim())
      throw Error(ErrorKind::kDimensionMismatch, "corpus dims differ");
    for (std::size_t t = 0; t < seq.NumFrames(); ++t) pts.push_back(seq.Frame(t));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// GMM

struct GmmBaselineModel {
  DiagGmm gmm;
  std::vector<double> var_floor;

  double MeanFrameLogLikelihood(const FeatureSequence& obs) const {
    if (obs.NumFrames() == 0) throw Error(ErrorKind::kEmptyInput, "empty utterance");
    if (obs.Dim() != var_floor.size())
      throw Error(ErrorKind::kDimensionMismatch, "utterance dim does not match GMM");
    const GmmScorer scorer(gmm);
    std::vector<double> scratch;
    double s = 0.0;
    for (std::size_t t = 0; t < obs.NumFrames(); ++t) s += scorer.LogDensity(obs.Frame(t), scratch);
    return s / static_cast<double>(obs.NumFrames());
  }

  bool operator==(const GmmBaselineModel&) const = default;
};

struct GmmTrainConfig {
  int num_components = 32;
  int max_iters = 20;
  double tol = 1e-5;
  std::uint64_t seed = 1;
  Floors floors;
};

struct GmmTrainResult {
  GmmBaselineModel model;
  /// Mean frame log-likelihood of the initial model and after each update.
  std::vector<double> log_likelihoods;
};

namespace detail {

inline double GmmEmStep(const DiagGmm& g, const Points& pts, DiagGmm* next) {
  const std::size_t M = g.NumComponents(), D = g.Dim();
  std::vector<double> occ(M, 0.0);
  std::vector<std::vector<double>> sum(M, std::vector<double>(D, 0.0)), sq = sum;
  std::vector<double> comp;
  const GmmScorer scorer(g);
  double ll = 0.0;
  for (const auto& x : pts) {
    scorer.ComponentLogLikes(x, comp);
    const double tot = LogSumExp(comp);
    ll += tot;
    if (!next) continue;
    for (std::size_t m = 0; m < M; ++m) {
      const double r = std::exp(comp[m] - tot);
      if (r == 0.0) continue;
      occ[m] += r;
      for (std::size_t d = 0; d < D; ++d) {
        sum[m][d] += r * x[d];
        sq[m][d] += r * x[d] * x[d];
      }
    }
  }
  if (next) {
    *next = g;
    for (std::size_t m = 0; m < M; ++m) {
      next->weights[m] = occ[m];
      if (occ[m] <= 0.0) continue;
      for (std::size_t d = 0; d < D; ++d) {
        const double mu = sum[m][d] / occ[m];
        next->means[m][d] = mu;
        next->variances[m][d] = sq[m][d] / occ[m] - mu * mu;
      }
    }
  }
  return ll / static_cast<double>(pts.size());
}

}  // namespace detail

/// LBG codebook of M centroids seeds the means, cell occupancy the weights
/// and per-cell variances (floored) the variances; EM refines.
inline GmmTrainResult TrainGmmBaseline(const std::vector<FeatureSequence>& corpus,
                                       const GmmTrainConfig& cfg) {
  if (cfg.num_components < 1) throw Error(ErrorKind::kConfig, "GMM needs >= 1 component");
  const Points pts = PoolFrames(corpus);
  std::size_t M = static_cast<std::size_t>(cfg.num_components);
  if (pts.size() < M) {
    Warn("only " + std::to_string(pts.size()) + " frames for a " + std::to_string(M) +
         "-component GMM; reducing the component count");
    M = pts.size();
  }
  const std::size_t D = pts[0].size();
  const auto var_floor = ComputeVarianceFloor(corpus, cfg.floors);

  const auto codebook = LbgCodebook(pts, M, cfg.seed).centroids;
  DiagGmm g;
  g.weights.assign(M, 0.0);
  g.means = codebook;
  g.variances.assign(M, std::vector<double>(D, 0.0));
  for (const auto& x : pts) {
    const auto k = NearestCentroid(codebook, x);
    g.weights[k] += 1.0;
    for (std::size_t d = 0; d < D; ++d) g.variances[k][d] += (x[d] - codebook[k][d]) * (x[d] - codebook[k][d]);
  }
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t d = 0; d < D; ++d)
      g.variances[m][d] = std::max(g.weights[m] > 0.0 ? g.variances[m][d] / g.weights[m] : 0.0,
                                   var_floor[d]);
  FloorAndNormalize(g.weights, cfg.floors.transition);

  GmmTrainResult res;
  for (int it = 0;; ++it) {
    DiagGmm next;
    const double ll = detail::GmmEmStep(g, pts, it < cfg.max_iters ? &next : nullptr);
    res.log_likelihoods.push_back(ll);
    const std::size_t n = res.log_likelihoods.size();
    if (it >= cfg.max_iters) break;
    if (n >= 2 && ll - res.log_likelihoods[n - 2] < cfg.tol * std::abs(res.log_likelihoods[n - 2]))
      break;
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t d = 0; d < D; ++d)
        next.variances[m][d] = std::max(next.variances[m][d], var_floor[d]);
    FloorAndNormalize(next.weights, cfg.floors.transition);
    g = std::move(next);
  }
  res.model = {std::move(g), var_floor};
  return res;
}

// ---------------------------------------------------------------------------
// VQ

struct VqBaselineModel {
  Centroids codebook;

  /// Negative mean squared quantization distortion.
  double Score(const FeatureSequence& obs) const {
    if (obs.NumFrames() == 0) throw Error(ErrorKind::kEmptyInput, "empty utterance");
    if (codebook.empty() || obs.Dim() != codebook[0].size())
      throw Error(ErrorKind::kDimensionMismatch, "utterance dim does not match codebook");
    double s = 0.0;
    for (std::size_t t = 0; t < obs.NumFrames(); ++t) {
      double d;
      NearestCentroid(codebook, obs.Frame(t), &d);
      s += d;
    }
    return -s / static_cast<double>(obs.NumFrames());
  }

  bool operator==(const VqBaselineModel&) const = default;
};

struct VqTrainConfig {
  int codebook_size = 64;
  std::uint64_t seed = 1;
};

inline VqBaselineModel TrainVqBaseline(const std::vector<FeatureSequence>& corpus,
                                       const VqTrainConfig& cfg) {
  if (cfg.codebook_size < 1) throw Error(ErrorKind::kConfig, "codebook size must be >= 1");
  return {LbgCodebook(PoolFrames(corpus), static_cast<std::size_t>(cfg.codebook_size), cfg.seed)
              .centroids};
}

// ---------------------------------------------------------------------------
// JSON

inline Json GmmBaselineToJson(const GmmBaselineModel& m) {
  MixtureEmission e{{m.gmm}, m.var_floor};
  return Json{{"format", "suprahmm.gmm"}, {"version", kHmmFormatVersion}, {"gmm", EmissionToJson(e)}};
}

inline GmmBaselineModel GmmBaselineFromJson(const Json& j) {
  auto e = EmissionFromJson(j.at("gmm"));
  if (e.states.size() != 1) throw Error(ErrorKind::kParse, "GMM document must hold one mixture");
  return {std::move(e.states[0]), std::move(e.var_floor)};
}

inline Json VqBaselineToJson(const VqBaselineModel& m) {
  return Json{{"format", "suprahmm.vq"}, {"version", kHmmFormatVersion}, {"codebook", m.codebook}};
}

inline VqBaselineModel VqBaselineFromJson(const Json& j) {
  VqBaselineModel m;
  m.codebook = detail::Field(j, "codebook", [](const Json& v) { return v.get<Centroids>(); });
  if (m.codebook.empty()) throw Error(ErrorKind::kParse, "empty codebook");
  return m;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_BASELINES_HPP_

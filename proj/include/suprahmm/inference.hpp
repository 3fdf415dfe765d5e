// suprahmm/inference.hpp

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

// Forward, backward and Viterbi for order-r circular HMMs, run on the
// equivalent first-order chain over context paths (the composite lattice).
// At time t (1-based) the composite state is the path of the last
// min(t, r) states.

#ifndef SUPRAHMM_INFERENCE_HPP_
#define SUPRAHMM_INFERENCE_HPP_

#include "suprahmm/hmm_model.hpp"

namespace suprahmm {

/// First-order view of an order-r model over legal context paths.
class CompositeLattice {
 public:
  struct Arc {
    std::size_t dest;  // node index at the next level
    int slot;          // move taken (row entry in the source tensor)
    double log_prob;
  };

  explicit CompositeLattice(const HmmModel& model) : order_(model.Order()) {
    const auto& topo = model.Topology();
    levels_.resize(order_);
    for (int len = 1; len <= order_; ++len) {
      auto& level = levels_[len - 1];
      const std::size_t n = topo.NumPaths(len);
      const auto& tensor = model.Transitions(len);
      const int next_len = std::min(len + 1, order_);
      level.last_state.resize(n);
      level.arcs.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto path = topo.PathStates(len, i);
        level.last_state[i] = path.back();
        for (int s = 0; s < topo.NumSlots(); ++s) {
          std::vector<int> next(path);
          next.push_back(topo.Successor(path.back(), s));
          if (static_cast<int>(next.size()) > next_len) next.erase(next.begin());
          level.arcs[i].push_back(
              {*topo.PathIndex(next), s, SafeLog(tensor.Prob(i, s))});
        }
      }
    }
  }

  int Order() const { return order_; }
  /// Level (path length) used at 0-based frame t.
  int LevelAt(std::size_t t) const {
    return static_cast<int>(std::min<std::size_t>(t + 1, order_));
  }
  std::size_t NumNodes(int level) const { return levels_[level - 1].last_state.size(); }
  int LastState(int level, std::size_t node) const { return levels_[level - 1].last_state[node]; }
  const std::vector<Arc>& Arcs(int level, std::size_t node) const {
    return levels_[level - 1].arcs[node];
  }

  /// Total composite states at the steady-state level.
  std::size_t NumCompositeStates() const { return NumNodes(order_); }

 private:
  struct Level {
    std::vector<int> last_state;
    std::vector<std::vector<Arc>> arcs;
  };
  int order_;
  std::vector<Level> levels_;
};

/// log b_j(o_t) for every frame and state.
inline std::vector<std::vector<double>> EmissionTable(const HmmModel& model,
                                                      const FeatureSequence& obs) {
  if (obs.Dim() != model.Dim())
    throw Error(ErrorKind::kDimensionMismatch,
                "observation dim " + std::to_string(obs.Dim()) + " != model dim " +
                    std::to_string(model.Dim()));
  if (obs.NumFrames() < 1) throw Error(ErrorKind::kEmptyInput, "no observation frames");
  std::vector<std::vector<double>> table(obs.NumFrames(),
                                         std::vector<double>(model.NumStates()));
  std::vector<GmmScorer> scorers;
  for (const auto& g : model.Emission().states) scorers.emplace_back(g);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < obs.NumFrames(); ++t)
    for (int j = 0; j < model.NumStates(); ++j)
      table[t][j] = scorers[j].LogDensity(obs.Frame(t), scratch);
  return table;
}

/// alpha[t][node] in log space.
inline std::vector<std::vector<double>> ForwardTable(const HmmModel& model,
                                                     const CompositeLattice& lat,
                                                     const std::vector<std::vector<double>>& em) {
  const std::size_t T = em.size();
  std::vector<std::vector<double>> alpha(T);
  alpha[0].resize(lat.NumNodes(1));
  for (std::size_t i = 0; i < alpha[0].size(); ++i)
    alpha[0][i] = SafeLog(model.Initial()[i]) + em[0][lat.LastState(1, i)];
  for (std::size_t t = 1; t < T; ++t) {
    const int from = lat.LevelAt(t - 1), to = lat.LevelAt(t);
    alpha[t].assign(lat.NumNodes(to), kLogZero);
    for (std::size_t i = 0; i < alpha[t - 1].size(); ++i) {
      const double a = alpha[t - 1][i];
      if (a == kLogZero) continue;
      for (const auto& arc : lat.Arcs(from, i))
        alpha[t][arc.dest] = LogAdd(alpha[t][arc.dest], a + arc.log_prob);
    }
    for (std::size_t j = 0; j < alpha[t].size(); ++j)
      if (alpha[t][j] != kLogZero) alpha[t][j] += em[t][lat.LastState(to, j)];
  }
  return alpha;
}

/// beta[t][node] in log space.
inline std::vector<std::vector<double>> BackwardTable(const CompositeLattice& lat,
                                                      const std::vector<std::vector<double>>& em) {
  const std::size_t T = em.size();
  std::vector<std::vector<double>> beta(T);
  beta[T - 1].assign(lat.NumNodes(lat.LevelAt(T - 1)), 0.0);
  for (std::size_t t = T - 1; t-- > 0;) {
    const int from = lat.LevelAt(t), to = lat.LevelAt(t + 1);
    beta[t].assign(lat.NumNodes(from), kLogZero);
    for (std::size_t i = 0; i < beta[t].size(); ++i)
      for (const auto& arc : lat.Arcs(from, i))
        beta[t][i] = LogAdd(beta[t][i], arc.log_prob +
                                            em[t + 1][lat.LastState(to, arc.dest)] +
                                            beta[t + 1][arc.dest]);
  }
  return beta;
}

/// log P(O | model), summed over all legal state paths.
inline double ForwardLogLikelihood(const HmmModel& model, const FeatureSequence& obs) {
  const CompositeLattice lat(model);
  const auto alpha = ForwardTable(model, lat, EmissionTable(model, obs));
  return LogSumExp(alpha.back());
}

struct ViterbiResult {
  std::vector<int> states;
  double log_prob = kLogZero;
};

/// Best legal state path. Ties go to the lowest composite-state index, both
/// at the final frame and when choosing predecessors.
inline ViterbiResult ViterbiAlign(const HmmModel& model, const FeatureSequence& obs) {
  const CompositeLattice lat(model);
  const auto em = EmissionTable(model, obs);
  const std::size_t T = em.size();
  std::vector<std::vector<double>> delta(T);
  std::vector<std::vector<std::size_t>> back(T);
  delta[0].resize(lat.NumNodes(1));
  for (std::size_t i = 0; i < delta[0].size(); ++i)
    delta[0][i] = SafeLog(model.Initial()[i]) + em[0][lat.LastState(1, i)];
  for (std::size_t t = 1; t < T; ++t) {
    const int from = lat.LevelAt(t - 1), to = lat.LevelAt(t);
    delta[t].assign(lat.NumNodes(to), kLogZero);
    back[t].assign(lat.NumNodes(to), 0);
    std::vector<bool> seen(lat.NumNodes(to), false);
    for (std::size_t i = 0; i < delta[t - 1].size(); ++i) {
      for (const auto& arc : lat.Arcs(from, i)) {
        const double cand = delta[t - 1][i] + arc.log_prob;
        if (!seen[arc.dest] || cand > delta[t][arc.dest]) {
          seen[arc.dest] = true;
          delta[t][arc.dest] = cand;
          back[t][arc.dest] = i;
        }
      }
    }
    for (std::size_t j = 0; j < delta[t].size(); ++j)
      if (delta[t][j] != kLogZero) delta[t][j] += em[t][lat.LastState(to, j)];
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < delta[T - 1].size(); ++j)
    if (delta[T - 1][j] > delta[T - 1][best]) best = j;
  ViterbiResult res;
  res.log_prob = delta[T - 1][best];
  res.states.resize(T);
  for (std::size_t t = T; t-- > 0;) {
    res.states[t] = lat.LastState(lat.LevelAt(t), best);
    if (t > 0) best = back[t][best];
  }
  return res;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_INFERENCE_HPP_

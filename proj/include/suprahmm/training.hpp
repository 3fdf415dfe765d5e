// suprahmm/training.hpp

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

// Model construction and estimation: segmental k-means initialization,
// Baum-Welch on the composite lattice, order promotion, and ancestral
// sampling.

#ifndef SUPRAHMM_TRAINING_HPP_
#define SUPRAHMM_TRAINING_HPP_

#include <random>

#include "suprahmm/clustering.hpp"
#include "suprahmm/inference.hpp"

namespace suprahmm {

struct Floors {
  double transition = 1e-6;        // legal entries only, then renormalized
  double relative_variance = 1e-4; // times the global per-dimension variance
  double absolute_variance = 1e-8; // lower bound when the data is constant
};

/// Per-dimension variance floor from the pooled training frames.
inline std::vector<double> ComputeVarianceFloor(const std::vector<FeatureSequence>& corpus,
                                                const Floors& floors) {
  const std::size_t dim = corpus.at(0).Dim();
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  double n = 0.0;
  for (const auto& seq : corpus)
    for (std::size_t t = 0; t < seq.NumFrames(); ++t)
      for (std::size_t d = 0; d < dim; ++d) {
        sum[d] += seq(t, d);
        sq[d] += seq(t, d) * seq(t, d);
      }
  for (const auto& seq : corpus) n += static_cast<double>(seq.NumFrames());
  std::vector<double> floor(dim);
  bool degenerate = false;
  for (std::size_t d = 0; d < dim; ++d) {
    const double mu = sum[d] / n;
    const double var = std::max(0.0, sq[d] / n - mu * mu);
    if (var * floors.relative_variance < floors.absolute_variance) degenerate = true;
    floor[d] = std::max(var * floors.relative_variance, floors.absolute_variance);
  }
  if (degenerate)
    Warn("training data has (near-)zero variance in some dimension; variance floor engaged");
  return floor;
}

/// Renormalizes p, raising entries below `floor` to it.
inline void FloorAndNormalize(std::span<double> p, double floor) {
  double s = 0.0;
  for (double x : p) s += x;
  if (!(s > 0.0)) {
    for (double& x : p) x = 1.0 / static_cast<double>(p.size());
    return;
  }
  for (double& x : p) x = std::max(x / s, floor);
  s = 0.0;
  for (double x : p) s += x;
  for (double& x : p) x /= s;
}

// ---------------------------------------------------------------------------
// Initialization

struct InitConfig {
  int num_states = 6;
  int num_mixtures = 3;
  std::uint64_t seed = 1;
  Floors floors;
};

/// Order-1 circular model: uniform Psi and transitions; each utterance is cut
/// into N equal time slices, slice j feeding state j, whose frames are
/// clustered into M components by k-means. Variances start at the global
/// per-dimension variance.
inline HmmModel InitializeModel(const std::vector<FeatureSequence>& corpus,
                                const InitConfig& cfg) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "empty training corpus");
  const std::size_t dim = corpus[0].Dim();
  for (const auto& s : corpus) {
    if (s.Dim() != dim) throw Error(ErrorKind::kDimensionMismatch, "corpus dims differ");
    s.Validate();
  }
  if (cfg.num_states < 1 || cfg.num_mixtures < 1)
    throw Error(ErrorKind::kConfig, "num_states and num_mixtures must be positive");

  const int N = cfg.num_states;
  std::vector<Points> per_state(N);
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  double total = 0.0;
  for (const auto& seq : corpus) {
    const std::size_t T = seq.NumFrames();
    for (std::size_t t = 0; t < T; ++t) {
      const int j = static_cast<int>(t * N / T);
      per_state[j].push_back(seq.Frame(t));
      for (std::size_t d = 0; d < dim; ++d) {
        sum[d] += seq(t, d);
        sq[d] += seq(t, d) * seq(t, d);
      }
      total += 1.0;
    }
  }
  MixtureEmission em;
  em.var_floor = ComputeVarianceFloor(corpus, cfg.floors);
  std::vector<double> global_mean(dim), global_var(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    global_mean[d] = sum[d] / total;
    global_var[d] = std::max(sq[d] / total - global_mean[d] * global_mean[d], em.var_floor[d]);
  }

  std::mt19937_64 rng(cfg.seed);
  for (int j = 0; j < N; ++j) {
    DiagGmm g;
    const auto M = static_cast<std::size_t>(cfg.num_mixtures);
    Points& pts = per_state[j];
    if (pts.empty()) pts.push_back(global_mean);  // T < N for every utterance
    Centroids init;
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (std::size_t m = 0; m < M; ++m) {
      const auto p = pts[pick(rng)];
      init.emplace_back(p.begin(), p.end());
    }
    const auto km = KMeans(pts, std::move(init));
    std::vector<double> counts(M, 0.0);
    for (auto a : km.assignment) counts[a] += 1.0;
    g.weights.resize(M);
    for (std::size_t m = 0; m < M; ++m) g.weights[m] = counts[m] + 1.0;  // +1: no empty comps
    FloorAndNormalize(g.weights, 0.0);
    g.means = km.centroids;
    g.variances.assign(M, global_var);
    em.states.push_back(std::move(g));
  }
  return HmmModel(CircularTopology(N), 1, std::move(em));
}

// ---------------------------------------------------------------------------
// Baum-Welch

/// Sufficient statistics of one or more utterances. Merging is plain
/// addition, so per-utterance accumulators can be produced in any order.
struct HmmStats {
  double log_likelihood = 0.0;
  std::vector<double> initial;                     // N
  std::vector<std::vector<double>> transitions;    // per order: contexts * S
  std::vector<std::vector<double>> occupancy;      // N x M
  std::vector<std::vector<std::vector<double>>> sum;     // N x M x D
  std::vector<std::vector<std::vector<double>>> sum_sq;  // N x M x D

  explicit HmmStats(const HmmModel& m) {
    const auto N = static_cast<std::size_t>(m.NumStates());
    const std::size_t M = m.NumMixtures(), D = m.Dim();
    initial.assign(N, 0.0);
    for (int k = 1; k <= m.Order(); ++k)
      transitions.emplace_back(m.Transitions(k).Data().size(), 0.0);
    occupancy.assign(N, std::vector<double>(M, 0.0));
    sum.assign(N, std::vector<std::vector<double>>(M, std::vector<double>(D, 0.0)));
    sum_sq = sum;
  }

  HmmStats& operator+=(const HmmStats& o) {
    log_likelihood += o.log_likelihood;
    auto add = [](std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(initial, o.initial);
    for (std::size_t k = 0; k < transitions.size(); ++k) add(transitions[k], o.transitions[k]);
    for (std::size_t j = 0; j < occupancy.size(); ++j) {
      add(occupancy[j], o.occupancy[j]);
      for (std::size_t m = 0; m < sum[j].size(); ++m) {
        add(sum[j][m], o.sum[j][m]);
        add(sum_sq[j][m], o.sum_sq[j][m]);
      }
    }
    return *this;
  }
};

/// E-step for one utterance.
inline HmmStats AccumulateStats(const HmmModel& model, const CompositeLattice& lat,
                                const FeatureSequence& obs) {
  HmmStats st(model);
  const auto em = EmissionTable(model, obs);
  const auto alpha = ForwardTable(model, lat, em);
  const auto beta = BackwardTable(lat, em);
  const std::size_t T = em.size();
  const double ll = LogSumExp(alpha.back());
  if (ll == kLogZero)
    throw Error(ErrorKind::kNumeric, "utterance has zero likelihood under the model");
  st.log_likelihood = ll;

  std::vector<double> comp;
  const auto N = static_cast<std::size_t>(model.NumStates());
  std::vector<double> state_post(N);
  std::vector<GmmScorer> scorers;
  for (const auto& g : model.Emission().states) scorers.emplace_back(g);
  for (std::size_t t = 0; t < T; ++t) {
    const int level = lat.LevelAt(t);
    std::fill(state_post.begin(), state_post.end(), 0.0);
    for (std::size_t i = 0; i < alpha[t].size(); ++i) {
      const double lg = alpha[t][i] + beta[t][i] - ll;
      if (lg == kLogZero) continue;
      state_post[lat.LastState(level, i)] += std::exp(lg);
    }
    if (t == 0)
      for (std::size_t j = 0; j < N; ++j) st.initial[j] += state_post[j];

    for (std::size_t j = 0; j < N; ++j) {
      if (state_post[j] <= 0.0) continue;
      const auto x = obs.Frame(t);
      scorers[j].ComponentLogLikes(x, comp);
      const double tot = em[t][j];
      for (std::size_t m = 0; m < comp.size(); ++m) {
        const double r = state_post[j] * std::exp(comp[m] - tot);
        if (r == 0.0) continue;
        st.occupancy[j][m] += r;
        auto& s = st.sum[j][m];
        auto& s2 = st.sum_sq[j][m];
        for (std::size_t d = 0; d < x.size(); ++d) {
          s[d] += r * x[d];
          s2[d] += r * x[d] * x[d];
        }
      }
    }

    if (t + 1 < T) {
      const int next_level = lat.LevelAt(t + 1);
      auto& counts = st.transitions[level - 1];
      const int S = model.Topology().NumSlots();
      for (std::size_t i = 0; i < alpha[t].size(); ++i) {
        if (alpha[t][i] == kLogZero) continue;
        for (const auto& arc : lat.Arcs(level, i)) {
          const double lx = alpha[t][i] + arc.log_prob +
                            em[t + 1][lat.LastState(next_level, arc.dest)] +
                            beta[t + 1][arc.dest] - ll;
          if (lx == kLogZero) continue;
          counts[i * S + arc.slot] += std::exp(lx);
        }
      }
    }
  }
  return st;
}

/// M-step. Rows, components or states without occupancy keep their
/// previous parameters.
inline HmmModel ReestimateModel(const HmmModel& model, const HmmStats& st,
                                const Floors& floors) {
  HmmModel out = model;
  {
    auto& psi = out.MutableInitial();
    psi = st.initial;
    FloorAndNormalize(psi, floors.transition);
  }
  for (int k = 1; k <= model.Order(); ++k) {
    auto& tensor = out.MutableTransitions(k);
    const auto& counts = st.transitions[k - 1];
    const int S = tensor.NumSlots();
    for (std::size_t c = 0; c < tensor.NumContexts(); ++c) {
      double tot = 0.0;
      for (int s = 0; s < S; ++s) tot += counts[c * S + s];
      if (!(tot > 0.0)) continue;
      auto row = tensor.Row(c);
      for (int s = 0; s < S; ++s) row[s] = counts[c * S + s];
      FloorAndNormalize(row, floors.transition);
    }
  }
  auto& em = out.MutableEmission();
  for (std::size_t j = 0; j < em.states.size(); ++j) {
    auto& g = em.states[j];
    double occ_total = 0.0;
    for (double o : st.occupancy[j]) occ_total += o;
    if (!(occ_total > 0.0)) continue;
    for (std::size_t m = 0; m < g.NumComponents(); ++m) {
      const double occ = st.occupancy[j][m];
      g.weights[m] = occ;
      if (occ < 1e-10) continue;
      for (std::size_t d = 0; d < g.Dim(); ++d) {
        const double mu = st.sum[j][m][d] / occ;
        const double var = st.sum_sq[j][m][d] / occ - mu * mu;
        g.means[m][d] = mu;
        g.variances[m][d] = std::max(var, em.var_floor[d]);
      }
    }
    FloorAndNormalize(g.weights, floors.transition);
  }
  return out;
}

struct BaumWelchOptions {
  int max_iters = 10;
  double tol = 1e-4;  // stop when the relative log-likelihood gain drops below
  Floors floors;
  int jobs = 1;
  /// Called with every re-estimated model and the iteration number (1-based).
  std::function<void(const HmmModel&, int)> on_iteration;
};

struct BaumWelchResult {
  HmmModel model;
  /// Total corpus log-likelihood of the input model and after each update;
  /// the last entry belongs to the returned model.
  std::vector<double> log_likelihoods;
};

inline HmmStats AccumulateCorpus(const HmmModel& model,
                                 const std::vector<FeatureSequence>& corpus, int jobs) {
  const CompositeLattice lat(model);
  std::vector<std::optional<HmmStats>> parts(corpus.size());
  ParallelFor(corpus.size(), jobs,
              [&](std::size_t i) { parts[i].emplace(AccumulateStats(model, lat, corpus[i])); });
  HmmStats total(model);
  for (const auto& p : parts) total += *p;  // fixed order: result independent of jobs
  return total;
}

inline BaumWelchResult BaumWelchTrain(HmmModel model, const std::vector<FeatureSequence>& corpus,
                                      const BaumWelchOptions& opt) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "empty training corpus");
  for (const auto& s : corpus)
    if (s.Dim() != model.Dim())
      throw Error(ErrorKind::kDimensionMismatch, "corpus dim does not match model");
  BaumWelchResult res;
  HmmStats stats = AccumulateCorpus(model, corpus, opt.jobs);
  res.log_likelihoods.push_back(stats.log_likelihood);
  for (int it = 1; it <= opt.max_iters; ++it) {
    HmmModel next = ReestimateModel(model, stats, opt.floors);
    HmmStats next_stats = AccumulateCorpus(next, corpus, opt.jobs);
    const double prev = stats.log_likelihood, cur = next_stats.log_likelihood;
    model = std::move(next);
    stats = std::move(next_stats);
    res.log_likelihoods.push_back(cur);
    if (opt.on_iteration) opt.on_iteration(model, it);
    if ((cur - prev) < opt.tol * std::abs(prev)) break;
  }
  res.model = std::move(model);
  return res;
}

// ---------------------------------------------------------------------------
// Order promotion

/// Order r -> r + 1: the new main tensor copies the order-r row of the last r
/// context states for every legal extra leading state. Lower tensors,
/// Psi and emissions are carried over, so likelihoods are unchanged.
inline HmmModel PromoteOrder(const HmmModel& model) {
  const int r = model.Order();
  if (r >= kMaxOrder)
    throw Error(ErrorKind::kUnsupportedOrder, "cannot promote a model of order " +
                                                  std::to_string(r));
  const auto& topo = model.Topology();
  const auto& src = model.MainTransitions();
  TransitionTensor promoted(topo, r + 1);
  for (std::size_t c = 0; c < promoted.NumContexts(); ++c) {
    const auto path = topo.PathStates(r + 1, c);
    const auto tail = *topo.PathIndex(std::span<const int>(path).subspan(1));
    auto row = promoted.Row(c);
    const auto src_row = src.Row(tail);
    std::copy(src_row.begin(), src_row.end(), row.begin());
  }
  std::vector<TransitionTensor> tensors;
  for (int k = 1; k <= r; ++k) tensors.push_back(model.Transitions(k));
  tensors.push_back(std::move(promoted));
  HmmModel out = model;
  out.SetTransitions(std::move(tensors));
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

struct SampledSequence {
  std::vector<int> states;
  FeatureSequence observations;
};

template <typename Rng>
int SampleCategorical(std::span<const double> p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng), acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (x < acc) return static_cast<int>(i);
  }
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return static_cast<int>(i);
  return 0;
}

inline SampledSequence SampleSequence(const HmmModel& model, std::size_t T, std::uint64_t seed) {
  if (T < 1) throw Error(ErrorKind::kInvalidArgument, "sample length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& topo = model.Topology();
  SampledSequence out;
  out.observations = FeatureSequence(T, model.Dim());
  out.states.push_back(SampleCategorical(model.Initial(), rng));
  for (std::size_t t = 1; t < T; ++t) {
    const auto& tensor = model.TensorForTime(t + 1);
    const auto k = static_cast<std::size_t>(tensor.Order());
    const auto ctx = topo.PathIndex(std::span<const int>(out.states).subspan(t - k, k));
    const int slot = SampleCategorical(tensor.Row(*ctx), rng);
    out.states.push_back(topo.Successor(out.states.back(), slot));
  }
  for (std::size_t t = 0; t < T; ++t) {
    const auto& g = model.Emission().states[out.states[t]];
    const int m = SampleCategorical(g.weights, rng);
    auto frame = out.observations.Frame(t);
    for (std::size_t d = 0; d < frame.size(); ++d)
      frame[d] = g.means[m][d] + std::sqrt(g.variances[m][d]) * normal(rng);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full acoustic chain: order 1 -> 2 -> 3

struct ChainConfig {
  InitConfig init;
  int target_order = 3;
  std::vector<int> iters_per_order = {8, 4, 4};
  double tol = 1e-4;
  int jobs = 1;
};

inline HmmModel TrainCircularChain(const std::vector<FeatureSequence>& corpus,
                                   const ChainConfig& cfg) {
  HmmModel model = InitializeModel(corpus, cfg.init);
  for (int order = 1;; ++order) {
    BaumWelchOptions opt;
    opt.max_iters = cfg.iters_per_order.at(static_cast<std::size_t>(order - 1));
    opt.tol = cfg.tol;
    opt.floors = cfg.init.floors;
    opt.jobs = cfg.jobs;
    model = BaumWelchTrain(std::move(model), corpus, opt).model;
    if (order >= cfg.target_order) break;
    model = PromoteOrder(model);
  }
  return model;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_TRAINING_HPP_

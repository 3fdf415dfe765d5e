// suprahmm/hmm_model.hpp

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

// Circular higher-order HMMs (order 1..3) with diagonal Gaussian-mixture
// emissions.
//
// Topology: from state i the legal next states are i (self-loop) and
// (i + 1) mod N. A legal state path of length L is therefore identified by
// its first state and L - 1 "moves" (0 = stay, 1 = advance); its index is
//   start * S^(L-1) + sum_k move_k * S^(L-1-k),
// with S = 2 successor slots (S = 1 when N = 1). Transition tensors store one
// row of S probabilities per legal context path, so illegal moves have no
// storage at all.
//
// An order-r model carries tensors of every order 1..r: order k < r is used
// at time t = k + 1 (the "boot" chain), order r from t = r + 1 onwards.

#ifndef SUPRAHMM_HMM_MODEL_HPP_
#define SUPRAHMM_HMM_MODEL_HPP_

#include <optional>

#include "suprahmm/features.hpp"

namespace suprahmm {

inline constexpr int kMaxOrder = 3;

class CircularTopology {
 public:
  explicit CircularTopology(int num_states = 1) : num_states_(num_states) {
    if (num_states < 1)
      throw Error(ErrorKind::kInvalidArgument, "topology needs at least one state");
  }

  int NumStates() const { return num_states_; }
  int NumSlots() const { return num_states_ == 1 ? 1 : 2; }

  int Successor(int state, int slot) const {
    return slot == 0 ? state : (state + 1) % num_states_;
  }

  std::vector<int> LegalSuccessors(int state) const {
    CheckState(state);
    if (num_states_ == 1) return {0};
    return {state, (state + 1) % num_states_};
  }

  /// Slot of the move from -> to, or nullopt if the move is illegal.
  std::optional<int> SlotOf(int from, int to) const {
    if (to == from) return 0;
    if (num_states_ > 1 && to == (from + 1) % num_states_) return 1;
    return std::nullopt;
  }

  std::size_t NumPaths(int length) const {
    std::size_t n = static_cast<std::size_t>(num_states_);
    for (int k = 1; k < length; ++k) n *= static_cast<std::size_t>(NumSlots());
    return n;
  }

  std::optional<std::size_t> PathIndex(std::span<const int> path) const {
    if (path.empty()) return std::nullopt;
    for (int s : path)
      if (s < 0 || s >= num_states_) return std::nullopt;
    std::size_t idx = static_cast<std::size_t>(path[0]);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const auto slot = SlotOf(path[k - 1], path[k]);
      if (!slot) return std::nullopt;
      idx = idx * static_cast<std::size_t>(NumSlots()) + static_cast<std::size_t>(*slot);
    }
    return idx;
  }

  std::vector<int> PathStates(int length, std::size_t index) const {
    std::vector<int> slots(static_cast<std::size_t>(length - 1));
    for (int k = length - 2; k >= 0; --k) {
      slots[k] = static_cast<int>(index % NumSlots());
      index /= NumSlots();
    }
    std::vector<int> path{static_cast<int>(index)};
    for (int s : slots) path.push_back(Successor(path.back(), s));
    return path;
  }

  void CheckState(int state) const {
    if (state < 0 || state >= num_states_)
      throw Error(ErrorKind::kInvalidArgument,
                  "state " + std::to_string(state) + " out of range for N = " +
                      std::to_string(num_states_));
  }

  bool operator==(const CircularTopology&) const = default;

 private:
  int num_states_;
};

/// Order-k transition probabilities over legal circular context paths.
class TransitionTensor {
 public:
  TransitionTensor() = default;
  TransitionTensor(const CircularTopology& topo, int order)
      : topo_(topo), order_(order),
        probs_(topo.NumPaths(order) * static_cast<std::size_t>(topo.NumSlots()),
               1.0 / topo.NumSlots()) {
    if (order < 1 || order > kMaxOrder)
      throw Error(ErrorKind::kUnsupportedOrder, "transition order must be 1..3");
  }

  int Order() const { return order_; }
  const CircularTopology& Topology() const { return topo_; }
  std::size_t NumContexts() const { return topo_.NumPaths(order_); }
  int NumSlots() const { return topo_.NumSlots(); }

  double Prob(std::size_t context, int slot) const {
    return probs_[context * NumSlots() + slot];
  }
  void SetProb(std::size_t context, int slot, double p) {
    probs_[context * NumSlots() + slot] = p;
  }
  std::span<const double> Row(std::size_t context) const {
    return {probs_.data() + context * NumSlots(), static_cast<std::size_t>(NumSlots())};
  }
  std::span<double> Row(std::size_t context) {
    return {probs_.data() + context * NumSlots(), static_cast<std::size_t>(NumSlots())};
  }

  /// a(context states..., next); 0 for any illegal tuple.
  double Prob(std::span<const int> context, int next) const {
    if (static_cast<int>(context.size()) != order_)
      throw Error(ErrorKind::kInvalidArgument, "context length must equal tensor order");
    const auto ctx = topo_.PathIndex(context);
    if (!ctx) return 0.0;
    const auto slot = topo_.SlotOf(context.back(), next);
    if (!slot) return 0.0;
    return Prob(*ctx, *slot);
  }

  /// Largest |row sum - 1| over all contexts.
  double MaxRowError() const {
    double err = 0.0;
    for (std::size_t c = 0; c < NumContexts(); ++c) {
      double s = 0.0;
      for (double p : Row(c)) s += p;
      err = std::max(err, std::abs(s - 1.0));
    }
    return err;
  }

  const std::vector<double>& Data() const { return probs_; }

  bool operator==(const TransitionTensor&) const = default;

 private:
  CircularTopology topo_;
  int order_ = 1;
  std::vector<double> probs_;
};

/// Diagonal-covariance Gaussian mixture.
struct DiagGmm {
  std::vector<double> weights;                 // M
  std::vector<std::vector<double>> means;      // M x D
  std::vector<std::vector<double>> variances;  // M x D

  std::size_t NumComponents() const { return weights.size(); }
  std::size_t Dim() const { return means.empty() ? 0 : means[0].size(); }

  double ComponentLogDensity(std::size_t m, std::span<const double> x) const {
    const auto& mu = means[m];
    const auto& var = variances[m];
    double acc = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = x[d] - mu[d];
      acc += kLog2Pi + std::log(var[d]) + diff * diff / var[d];
    }
    return -0.5 * acc;
  }

  /// Per-component log(w_m) + log N(x; mu_m, var_m).
  void ComponentLogLikes(std::span<const double> x, std::vector<double>& out) const {
    out.resize(NumComponents());
    for (std::size_t m = 0; m < NumComponents(); ++m)
      out[m] = SafeLog(weights[m]) + ComponentLogDensity(m, x);
  }

  double LogDensity(std::span<const double> x) const {
    std::vector<double> tmp;
    ComponentLogLikes(x, tmp);
    return LogSumExp(tmp);
  }

  bool operator==(const DiagGmm&) const = default;
};

/// DiagGmm with per-component constants and inverse variances precomputed.
class GmmScorer {
 public:
  explicit GmmScorer(const DiagGmm& g) : g_(&g) {
    const std::size_t D = g.Dim();
    for (std::size_t m = 0; m < g.NumComponents(); ++m) {
      double c = 0.0;
      std::vector<double> iv(D);
      for (std::size_t d = 0; d < D; ++d) {
        c += kLog2Pi + std::log(g.variances[m][d]);
        iv[d] = 1.0 / g.variances[m][d];
      }
      gconst_.push_back(SafeLog(g.weights[m]) - 0.5 * c);
      inv_var_.push_back(std::move(iv));
    }
  }

  void ComponentLogLikes(std::span<const double> x, std::vector<double>& out) const {
    out.resize(gconst_.size());
    for (std::size_t m = 0; m < gconst_.size(); ++m) {
      const double* mu = g_->means[m].data();
      const double* iv = inv_var_[m].data();
      double acc = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double z = x[d] - mu[d];
        acc += z * z * iv[d];
      }
      out[m] = gconst_[m] - 0.5 * acc;
    }
  }

  double LogDensity(std::span<const double> x, std::vector<double>& scratch) const {
    ComponentLogLikes(x, scratch);
    return LogSumExp(scratch);
  }

 private:
  const DiagGmm* g_;
  std::vector<double> gconst_;
  std::vector<std::vector<double>> inv_var_;
};

struct MixtureEmission {
  std::vector<DiagGmm> states;      // N
  std::vector<double> var_floor;    // D

  std::size_t Dim() const { return var_floor.size(); }

  double LogDensity(int state, std::span<const double> x) const {
    if (x.size() != Dim())
      throw Error(ErrorKind::kDimensionMismatch,
                  "observation dim " + std::to_string(x.size()) + " != model dim " +
                      std::to_string(Dim()));
    return states[state].LogDensity(x);
  }

  bool operator==(const MixtureEmission&) const = default;
};

/// Order-r circular HMM. transitions[k-1] is the order-k tensor.
class HmmModel {
 public:
  HmmModel() = default;

  /// Uniform initial and transition probabilities; emissions supplied.
  HmmModel(const CircularTopology& topo, int order, MixtureEmission emission)
      : topo_(topo), order_(order), emission_(std::move(emission)) {
    if (order < 1 || order > kMaxOrder)
      throw Error(ErrorKind::kUnsupportedOrder, "model order must be 1..3");
    initial_.assign(topo.NumStates(), 1.0 / topo.NumStates());
    for (int k = 1; k <= order; ++k) transitions_.emplace_back(topo, k);
    if (static_cast<int>(emission_.states.size()) != topo.NumStates())
      throw Error(ErrorKind::kDimensionMismatch, "need one emission mixture per state");
  }

  const CircularTopology& Topology() const { return topo_; }
  int NumStates() const { return topo_.NumStates(); }
  int Order() const { return order_; }
  std::size_t Dim() const { return emission_.Dim(); }
  std::size_t NumMixtures() const {
    return emission_.states.empty() ? 0 : emission_.states[0].NumComponents();
  }

  const std::vector<double>& Initial() const { return initial_; }
  std::vector<double>& MutableInitial() { return initial_; }

  /// Tensor of the given order (1..Order()).
  const TransitionTensor& Transitions(int order) const { return transitions_.at(order - 1); }
  TransitionTensor& MutableTransitions(int order) { return transitions_.at(order - 1); }
  const TransitionTensor& MainTransitions() const { return transitions_.back(); }

  /// Tensor governing the move into time t (1-based, t >= 2).
  const TransitionTensor& TensorForTime(std::size_t t) const {
    return Transitions(static_cast<int>(std::min<std::size_t>(t - 1, order_)));
  }

  const MixtureEmission& Emission() const { return emission_; }
  MixtureEmission& MutableEmission() { return emission_; }

  /// Largest normalization error over Psi, every tensor row and every
  /// mixture weight vector.
  double MaxNormalizationError() const {
    double err = 0.0;
    double s = 0.0;
    for (double p : initial_) s += p;
    err = std::max(err, std::abs(s - 1.0));
    for (const auto& t : transitions_) err = std::max(err, t.MaxRowError());
    for (const auto& g : emission_.states) {
      double w = 0.0;
      for (double x : g.weights) w += x;
      err = std::max(err, std::abs(w - 1.0));
    }
    return err;
  }

  void Validate(double tol = 1e-9) const {
    if (MaxNormalizationError() > tol)
      throw Error(ErrorKind::kNumeric, "model probabilities are not normalized");
    for (const auto& g : emission_.states)
      for (const auto& v : g.variances)
        for (std::size_t d = 0; d < v.size(); ++d)
          if (!(v[d] > 0.0)) throw Error(ErrorKind::kNumeric, "non-positive variance");
  }

  bool operator==(const HmmModel&) const = default;

  // Used by promotion and deserialization.
  void SetTransitions(std::vector<TransitionTensor> t) {
    transitions_ = std::move(t);
    order_ = static_cast<int>(transitions_.size());
  }

 private:
  CircularTopology topo_;
  int order_ = 1;
  std::vector<double> initial_;
  std::vector<TransitionTensor> transitions_;
  MixtureEmission emission_;
};

/// log Prob(Q): log Psi_q1 + log a(q1,q2) + log a(q1,q2,q3) + sum_{t>=4} ...,
/// truncated analogously for lower orders. kLogZero for illegal paths.
inline double SequenceLogProb(const HmmModel& model, std::span<const int> states) {
  if (states.empty()) throw Error(ErrorKind::kEmptyInput, "empty state sequence");
  for (int s : states) model.Topology().CheckState(s);
  double lp = SafeLog(model.Initial()[states[0]]);
  for (std::size_t t = 1; t < states.size(); ++t) {
    const auto& tensor = model.TensorForTime(t + 1);
    const std::size_t k = static_cast<std::size_t>(tensor.Order());
    lp += SafeLog(tensor.Prob(states.subspan(t - k, k), states[t]));
    if (lp == kLogZero) return kLogZero;
  }
  return lp;
}

inline double EmissionLogLikelihood(const HmmModel& model, std::span<const int> states,
                                    const FeatureSequence& obs) {
  if (states.size() != obs.NumFrames())
    throw Error(ErrorKind::kDimensionMismatch, "state path and observation lengths differ");
  double ll = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t)
    ll += model.Emission().LogDensity(states[t], obs.Frame(t));
  return ll;
}

/// log Prob(Q, O | model).
inline double JointLogProb(const HmmModel& model, std::span<const int> states,
                           const FeatureSequence& obs) {
  if (obs.Dim() != model.Dim())
    throw Error(ErrorKind::kDimensionMismatch, "observation dim does not match model");
  const double lp = SequenceLogProb(model, states);
  if (lp == kLogZero) return kLogZero;
  return lp + EmissionLogLikelihood(model, states, obs);
}

/// Builds a model whose states each hold M components with the given means,
/// unit weights split evenly, and a shared variance vector.
inline MixtureEmission MakeEmission(const std::vector<std::vector<std::vector<double>>>& means,
                                    const std::vector<double>& variance,
                                    std::vector<double> var_floor = {}) {
  MixtureEmission e;
  const std::size_t dim = variance.size();
  if (var_floor.empty()) var_floor.assign(dim, 1e-8);
  e.var_floor = std::move(var_floor);
  for (const auto& comps : means) {
    DiagGmm g;
    g.weights.assign(comps.size(), 1.0 / comps.size());
    for (const auto& mu : comps) {
      if (mu.size() != dim) throw Error(ErrorKind::kDimensionMismatch, "mean dimension");
      g.means.push_back(mu);
      g.variances.push_back(variance);
    }
    e.states.push_back(std::move(g));
  }
  return e;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_HMM_MODEL_HPP_

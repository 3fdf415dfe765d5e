// suprahmm/hmm_json.hpp

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

// JSON model documents. Transition tensors are stored as
//   {"order": k, "rows": {"i,j,k": {"<next state>": p, ...}, ...}}
// over legal contexts only. Doubles are written in shortest round-trip form,
// so reading a document back reproduces every parameter bit for bit.

#ifndef SUPRAHMM_HMM_JSON_HPP_
#define SUPRAHMM_HMM_JSON_HPP_

#include <nlohmann/json.hpp>

#include "suprahmm/hmm_model.hpp"

namespace suprahmm {

using Json = nlohmann::ordered_json;

inline constexpr int kHmmFormatVersion = 1;

namespace detail {

inline std::string JoinStates(const std::vector<int>& states) {
  std::string s;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(states[i]);
  }
  return s;
}

inline std::vector<int> SplitStates(const std::string& key) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const auto comma = key.find(',', pos);
    const auto tok = key.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad context key '" + key + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename F>
auto Field(const Json& j, const char* key, F&& convert) {
  if (!j.contains(key)) throw Error(ErrorKind::kParse, std::string("missing field '") + key + "'");
  try {
    return convert(j.at(key));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline Json TensorToJson(const TransitionTensor& t) {
  const auto& topo = t.Topology();
  Json rows = Json::object();
  for (std::size_t c = 0; c < t.NumContexts(); ++c) {
    const auto ctx = topo.PathStates(t.Order(), c);
    Json row = Json::object();
    for (int s = 0; s < t.NumSlots(); ++s)
      row[std::to_string(topo.Successor(ctx.back(), s))] = t.Prob(c, s);
    rows[detail::JoinStates(ctx)] = row;
  }
  return Json{{"order", t.Order()}, {"rows", rows}};
}

inline TransitionTensor TensorFromJson(const Json& j, const CircularTopology& topo) {
  const int order = detail::Field(j, "order", [](const Json& v) { return v.get<int>(); });
  TransitionTensor t(topo, order);
  const Json& rows = detail::Field(j, "rows", [](const Json& v) -> const Json& { return v; });
  if (rows.size() != t.NumContexts())
    throw Error(ErrorKind::kParse, "tensor of order " + std::to_string(order) + " has " +
                                       std::to_string(rows.size()) + " rows, expected " +
                                       std::to_string(t.NumContexts()));
  for (const auto& [key, row] : rows.items()) {
    const auto ctx = detail::SplitStates(key);
    const auto idx = topo.PathIndex(ctx);
    if (!idx || static_cast<int>(ctx.size()) != order)
      throw Error(ErrorKind::kParse, "illegal transition context '" + key + "'");
    for (const auto& [next, p] : row.items()) {
      const auto slot = topo.SlotOf(ctx.back(), std::stoi(next));
      if (!slot) throw Error(ErrorKind::kParse, "illegal successor " + next + " of '" + key + "'");
      t.SetProb(*idx, *slot, p.get<double>());
    }
  }
  return t;
}

inline Json EmissionToJson(const MixtureEmission& e) {
  Json states = Json::array();
  for (const auto& g : e.states)
    states.push_back({{"weights", g.weights}, {"means", g.means}, {"variances", g.variances}});
  return Json{{"var_floor", e.var_floor}, {"states", states}};
}

inline MixtureEmission EmissionFromJson(const Json& j) {
  MixtureEmission e;
  e.var_floor = detail::Field(j, "var_floor", [](const Json& v) { return v.get<std::vector<double>>(); });
  for (const auto& s : j.at("states")) {
    DiagGmm g;
    g.weights = detail::Field(s, "weights", [](const Json& v) { return v.get<std::vector<double>>(); });
    g.means = detail::Field(s, "means",
                            [](const Json& v) { return v.get<std::vector<std::vector<double>>>(); });
    g.variances = detail::Field(
        s, "variances", [](const Json& v) { return v.get<std::vector<std::vector<double>>>(); });
    if (g.means.size() != g.weights.size() || g.variances.size() != g.weights.size())
      throw Error(ErrorKind::kParse, "mixture component counts disagree");
    for (std::size_t m = 0; m < g.means.size(); ++m)
      if (g.means[m].size() != e.var_floor.size() || g.variances[m].size() != e.var_floor.size())
        throw Error(ErrorKind::kParse, "emission dimension disagrees with var_floor");
    e.states.push_back(std::move(g));
  }
  return e;
}

inline Json HmmToJson(const HmmModel& m) {
  Json boot = Json::array();
  for (int k = 1; k < m.Order(); ++k) boot.push_back(TensorToJson(m.Transitions(k)));
  return Json{{"format", "suprahmm.circular-hmm"},
              {"version", kHmmFormatVersion},
              {"order", m.Order()},
              {"num_states", m.NumStates()},
              {"num_mixtures", m.NumMixtures()},
              {"dim", m.Dim()},
              {"initial", m.Initial()},
              {"boot_transitions", boot},
              {"transitions", TensorToJson(m.MainTransitions())},
              {"emission", EmissionToJson(m.Emission())}};
}

inline HmmModel HmmFromJson(const Json& j) {
  const int version = detail::Field(j, "version", [](const Json& v) { return v.get<int>(); });
  if (version != kHmmFormatVersion)
    throw Error(ErrorKind::kParse, "unsupported model version " + std::to_string(version));
  const int order = detail::Field(j, "order", [](const Json& v) { return v.get<int>(); });
  const int n = detail::Field(j, "num_states", [](const Json& v) { return v.get<int>(); });
  const CircularTopology topo(n);
  HmmModel m(topo, 1, EmissionFromJson(j.at("emission")));
  std::vector<TransitionTensor> tensors;
  for (const auto& t : j.at("boot_transitions")) tensors.push_back(TensorFromJson(t, topo));
  tensors.push_back(TensorFromJson(j.at("transitions"), topo));
  for (int k = 0; k < static_cast<int>(tensors.size()); ++k)
    if (tensors[k].Order() != k + 1 || static_cast<int>(tensors.size()) != order)
      throw Error(ErrorKind::kParse, "transition tensors do not form orders 1..r");
  m.SetTransitions(std::move(tensors));
  m.MutableInitial() =
      detail::Field(j, "initial", [](const Json& v) { return v.get<std::vector<double>>(); });
  if (static_cast<int>(m.Initial().size()) != n)
    throw Error(ErrorKind::kParse, "initial distribution size != num_states");
  if (m.Dim() != detail::Field(j, "dim", [](const Json& v) { return v.get<std::size_t>(); }))
    throw Error(ErrorKind::kParse, "dim field disagrees with emission");
  return m;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_HMM_JSON_HPP_

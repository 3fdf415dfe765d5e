// tests/suprasegmental_test.cpp

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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "suprahmm/suprasegmental.hpp"

namespace suprahmm {
namespace {

using testing::RandomModel;
using testing::RandomObservations;

const SuprasegmentalLayout kSix = SuprasegmentalLayout::Default(6);

ProsodySegmentVector Vec(double a, double b, double c, double d, double e, double f) {
  return {a, b, c, d, e, f};
}

ProsodyGaussian UnitGaussianAt(const ProsodySegmentVector& v) {
  ProsodyGaussian g;
  g.mean = v.ToArray();
  g.variance.fill(1.0);
  return g;
}

TEST(SuprasegmentalLayoutTest, DefaultSplitsSixStatesInHalf) {
  EXPECT_EQ(kSix.state_to_supra, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(kSix.num_supra, 2);
  EXPECT_NO_THROW(kSix.Validate(6));
  EXPECT_THROW(kSix.Validate(5), Error);
  SuprasegmentalLayout orphan{{0, 0, 0}, 2};
  EXPECT_THROW(orphan.Validate(3), Error);
}

TEST(SegmentByAlignmentTest, Examples) {
  EXPECT_EQ(SegmentByAlignment(std::vector<int>{0, 1, 2, 3}, kSix),
            (std::vector<Segment>{{0, 0, 3}, {1, 3, 1}}));
  EXPECT_EQ(SegmentByAlignment(std::vector<int>(9, 0), kSix), (std::vector<Segment>{{0, 0, 9}}));
  EXPECT_EQ(SegmentByAlignment(std::vector<int>{3, 4, 5, 0}, kSix),
            (std::vector<Segment>{{1, 0, 3}, {0, 3, 1}}));
  EXPECT_THROW(SegmentByAlignment(std::vector<int>{}, kSix), Error);
}

TEST(SegmentByAlignmentTest, PartitionsFrames) {
  std::mt19937_64 rng(3);
  const auto m = RandomModel(6, 3, 1, 1, rng);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = SampleSequence(m, 40 + seed, seed);
    const auto segs = SegmentByAlignment(s.states, kSix);
    std::size_t total = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_EQ(segs[i].begin, total);
      if (i > 0) {
        EXPECT_NE(segs[i].supra_state, segs[i - 1].supra_state);
      }
      total += segs[i].length;
    }
    EXPECT_EQ(total, s.states.size());
    const auto map = FrameToSegmentMap(segs);
    ASSERT_EQ(map.size(), s.states.size());
    EXPECT_EQ(map.back(), static_cast<int>(segs.size()) - 1);
  }
}

SegmentedProsody Utt(std::vector<int> states, std::vector<ProsodySegmentVector> vs,
                     ProsodySegmentVector u) {
  SegmentedProsody sp;
  std::size_t t = 0;
  for (int p : states) sp.segments.push_back({p, t++, 1});
  sp.vectors = std::move(vs);
  sp.utterance = u;
  return sp;
}

TEST(TrainSuprasegmentalTest, IdenticalVectorsGiveFlooredVariance) {
  const auto v = Vec(5.0, 0.1, 0.8, -3.0, 2.0, 12.0);
  const auto w = Vec(5.5, 0.2, 0.6, -2.0, 1.0, 20.0);
  std::vector<SegmentedProsody> corpus{Utt({0, 1}, {v, w}, v), Utt({0, 1}, {v, Vec(6, 0, 0, 0, 0, 1)}, w)};
  SuprasegmentalConfig cfg;
  const auto m = TrainSuprasegmental(corpus, kSix, cfg);
  EXPECT_EQ(m.states[0].mean, v.ToArray());
  for (double x : m.states[0].variance) EXPECT_EQ(x, cfg.variance_floor);
}

TEST(TrainSuprasegmentalTest, MeansAreHandAverages) {
  const auto a = Vec(5.0, 0.1, 1.0, -3.0, 2.0, 10.0);
  const auto b = Vec(5.4, 0.3, 0.5, -1.0, 4.0, 20.0);
  const auto c = Vec(4.0, 0.0, 0.0, -6.0, 1.0, 4.0);
  const auto d = Vec(4.4, 0.2, 0.5, -4.0, 3.0, 8.0);
  std::vector<SegmentedProsody> corpus{Utt({0, 1}, {a, c}, a), Utt({0, 1}, {b, d}, c)};
  const auto m = TrainSuprasegmental(corpus, kSix);
  const std::array<double, 6> p1{5.2, 0.2, 0.75, -2.0, 3.0, 15.0};
  const std::array<double, 6> p2{4.2, 0.1, 0.25, -5.0, 2.0, 6.0};
  const std::array<double, 6> var1{0.04, 0.01, 0.0625, 1.0, 1.0, 25.0};
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(m.states[0].mean[k], p1[k], 1e-12);
    EXPECT_NEAR(m.states[1].mean[k], p2[k], 1e-12);
    EXPECT_NEAR(m.states[0].variance[k], var1[k], 1e-12);
    EXPECT_NEAR(m.top.mean[k], (a.ToArray()[k] + c.ToArray()[k]) / 2.0, 1e-12);
  }
}

TEST(TrainSuprasegmentalTest, AlternatingOrderDominatesTransitions) {
  const auto v = Vec(5, 0, 1, 0, 0, 3);
  std::vector<SegmentedProsody> corpus{Utt({0, 1, 0, 1}, {v, v, v, v}, v)};
  const auto m = TrainSuprasegmental(corpus, kSix);
  EXPECT_GT(m.transitions[0][1], 0.99);
  EXPECT_GT(m.transitions[1][0], 0.99);
  EXPECT_NEAR(m.transitions[0][0], 1e-6, 1e-9);
  for (const auto& row : m.transitions) EXPECT_NEAR(row[0] + row[1], 1.0, 1e-15);
}

TEST(TrainSuprasegmentalTest, MissingStateFallsBackWithWarning) {
  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](const std::string& w) { warnings.push_back(w); });
  const auto v = Vec(5, 0, 1, 0, 0, 3), w = Vec(6, 0, 1, 2, 0, 5);
  std::vector<SegmentedProsody> corpus{Utt({0}, {v}, v), Utt({0}, {w}, w)};
  const auto m = TrainSuprasegmental(corpus, kSix);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(m.states[1], m.states[0]);
  EXPECT_THROW(TrainSuprasegmental({}, kSix), Error);
}

TEST(SuprasegmentalLogLikelihoodTest, SingleSegmentAtMean) {
  const auto v = Vec(5, 0.1, 1, -2, 1, 30);
  SuprasegmentalModel m;
  m.layout = kSix;
  m.states = {UnitGaussianAt(v), UnitGaussianAt(v)};
  m.transitions = {{0.5, 0.5}, {0.5, 0.5}};
  m.top = UnitGaussianAt(v);
  const double gauss_at_mean = -3.0 * std::log(2.0 * std::numbers::pi);
  const auto obs = Utt({0}, {v}, v);
  EXPECT_NEAR(m.states[0].LogDensity(v), gauss_at_mean, 1e-14);
  EXPECT_NEAR(SuprasegmentalLogLikelihood(m, obs), 2.0 * gauss_at_mean, 1e-12);
}

TEST(SuprasegmentalLogLikelihoodTest, TopTermIsAdditive) {
  const auto v = Vec(5, 0.1, 1, -2, 1, 30), u = Vec(5.2, 0.2, 0.9, -1, 2, 60);
  SuprasegmentalModel a;
  a.layout = kSix;
  a.states = {UnitGaussianAt(v), UnitGaussianAt(u)};
  a.transitions = {{0.3, 0.7}, {0.6, 0.4}};
  a.top = UnitGaussianAt(u);
  auto b = a;
  b.top.mean[3] += 1.5;
  const auto obs = Utt({0, 1, 0}, {v, u, v}, u);
  EXPECT_NEAR(SuprasegmentalLogLikelihood(a, obs) - SuprasegmentalLogLikelihood(b, obs),
              a.top.LogDensity(u) - b.top.LogDensity(u), 1e-12);
}

TEST(SuprasegmentalLogLikelihoodTest, HandSummedTwoSegmentFixture) {
  SuprasegmentalModel m;
  m.layout = kSix;
  ProsodyGaussian g1, g2, top;
  g1.mean = {5, 0, 1, 0, 0, 10};
  g1.variance = {1, 2, 0.5, 4, 1, 25};
  g2.mean = {4, 0.5, 0.5, -1, 2, 5};
  g2.variance = {0.25, 1, 1, 1, 2, 9};
  top.mean = {4.5, 0.2, 0.7, -0.5, 1, 15};
  top.variance = {1, 1, 1, 1, 1, 100};
  m.states = {g1, g2};
  m.transitions = {{0.2, 0.8}, {0.9, 0.1}};
  m.top = top;
  const auto x1 = Vec(5.5, 0.1, 0.8, 1, 0.5, 12), x2 = Vec(3.8, 0.4, 0.6, -1.2, 2.5, 4);
  const auto u = Vec(4.6, 0.3, 0.7, -0.1, 3.0, 16);
  // Linear-space product of independent Gaussians, then a single log.
  auto dens = [](const ProsodyGaussian& g, const ProsodySegmentVector& x) {
    const auto a = x.ToArray();
    return testing::OracleGaussian(a, g.mean, g.variance);
  };
  const double expect = std::log(dens(g1, x1) * 0.8 * dens(g2, x2) * dens(top, u));
  EXPECT_NEAR(SuprasegmentalLogLikelihood(m, Utt({0, 1}, {x1, x2}, u)), expect, 1e-12);
}

TEST(SuprasegmentalLogLikelihoodTest, RejectsMismatchedInputs) {
  SuprasegmentalModel m;
  m.layout = kSix;
  m.states = {UnitGaussianAt({}), UnitGaussianAt({})};
  m.transitions = {{0.5, 0.5}, {0.5, 0.5}};
  auto obs = Utt({0, 1}, {ProsodySegmentVector{}}, {});
  EXPECT_THROW(SuprasegmentalLogLikelihood(m, obs), Error);
  EXPECT_THROW(SuprasegmentalLogLikelihood(m, SegmentedProsody{}), Error);
}

ProsodyTrack RandomTrack(std::size_t T, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  ProsodyTrack tr;
  for (std::size_t t = 0; t < T; ++t) {
    const bool voiced = (rng() % 4) != 0;
    tr.voiced.push_back(voiced);
    tr.log_f0.push_back(voiced ? 5.0 + 0.1 * n(rng) : 0.0);
    tr.log_energy.push_back(-4.0 + n(rng));
  }
  return tr;
}

Csphmm3Model FusionFixture(std::mt19937_64& rng, std::vector<FeatureSequence>* obs,
                           std::vector<ProsodyTrack>* tracks) {
  Csphmm3Model m{RandomModel(6, 3, 2, 3, rng), {}, 0.5};
  std::vector<SegmentedProsody> corpus;
  for (int u = 0; u < 6; ++u) {
    obs->push_back(RandomObservations(30 + u, 3, rng));
    tracks->push_back(RandomTrack(30 + u, rng));
    corpus.push_back(SegmentProsody(ViterbiAlign(m.acoustic, obs->back()).states, kSix,
                                    tracks->back()));
  }
  m.supra = TrainSuprasegmental(corpus, kSix);
  return m;
}

TEST(FusedLogLikelihoodTest, EndpointsAndAffinity) {
  std::mt19937_64 rng(17);
  std::vector<FeatureSequence> obs;
  std::vector<ProsodyTrack> tracks;
  ScopedWarningSink quiet([](const std::string&) {});
  const auto m = FusionFixture(rng, &obs, &tracks);
  for (std::size_t u = 0; u < obs.size(); ++u) {
    const auto s = FusedLogLikelihood(m, obs[u], tracks[u]);
    const double f0 = FusedLogLikelihood(m, obs[u], tracks[u], 0.0).fused;
    const double f1 = FusedLogLikelihood(m, obs[u], tracks[u], 1.0).fused;
    EXPECT_EQ(f0, ForwardLogLikelihood(m.acoustic, obs[u]));
    const auto path = ViterbiAlign(m.acoustic, obs[u]).states;
    EXPECT_EQ(f1, SuprasegmentalLogLikelihood(m.supra, SegmentProsody(path, kSix, tracks[u])));
    EXPECT_NEAR(s.fused, (f0 + f1) / 2.0, 1e-12 * std::abs(f0));
    const double f25 = FusedLogLikelihood(m, obs[u], tracks[u], 0.25).fused;
    EXPECT_NEAR(f25, f0 + 0.25 * (f1 - f0), 1e-12 * std::abs(f0));
  }
}

TEST(FusedLogLikelihoodTest, ConvexCombinationAndAlphaRange) {
  EXPECT_EQ(FuseScores(-100.0, -20.0, 0.5), -60.0);
  EXPECT_EQ(FuseScores(-100.0, -20.0, 0.0), -100.0);
  EXPECT_EQ(FuseScores(-100.0, -20.0, 1.0), -20.0);
  EXPECT_THROW(FuseScores(-1.0, -1.0, 1.5), Error);
  EXPECT_THROW(FuseScores(-1.0, -1.0, -0.1), Error);
}

TEST(FusedLogLikelihoodTest, TrackLengthMustMatch) {
  std::mt19937_64 rng(18);
  std::vector<FeatureSequence> obs;
  std::vector<ProsodyTrack> tracks;
  const auto m = FusionFixture(rng, &obs, &tracks);
  EXPECT_THROW(FusedLogLikelihood(m, obs[0], tracks[1]), Error);
}

TEST(Csphmm3JsonTest, RoundTripIsBitExact) {
  std::mt19937_64 rng(19);
  std::vector<FeatureSequence> obs;
  std::vector<ProsodyTrack> tracks;
  auto m = FusionFixture(rng, &obs, &tracks);
  m.alpha = 0.3;
  const auto text = Csphmm3ToJson(m).dump();
  const auto back = Csphmm3FromJson(Json::parse(text));
  EXPECT_TRUE(back == m);
  EXPECT_EQ(Csphmm3ToJson(back).dump(), text);
  auto bad = Csphmm3ToJson(m);
  bad["alpha"] = 2.0;
  EXPECT_THROW(Csphmm3FromJson(bad), Error);
}

}  // namespace
}  // namespace suprahmm

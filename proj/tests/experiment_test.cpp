// tests/experiment_test.cpp

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

#include "suprahmm/experiment.hpp"

namespace suprahmm {
namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(ExperimentConfigTest, DefaultsMatchModuleDefaults) {
  const auto c = LoadExperimentConfig(nullptr, {}, nullptr);
  EXPECT_EQ(c.bank.chain.init.num_states, 6);
  EXPECT_EQ(c.bank.chain.target_order, 3);
  EXPECT_EQ(c.bank.alpha, 0.5);
  EXPECT_EQ(c.bank.Layout().num_supra, 2);
  EXPECT_EQ(c.features.FeatureDim(), 32);
  EXPECT_EQ(c.labels.size(), 6u);
  EXPECT_EQ(c.document, DefaultExperimentJson());
}

TEST(ExperimentConfigTest, PrecedenceFileThenEnvThenSet) {
  const Json file{{"seed", 3}, {"model", {{"alpha", 0.25}}}};
  auto c = LoadExperimentConfig(file, {}, nullptr);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.bank.alpha, 0.25);
  EXPECT_EQ(c.bank.chain.init.num_mixtures, 3);
  c = LoadExperimentConfig(file, {}, "11");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.bank.chain.init.seed, 11u);
  EXPECT_EQ(c.bank.gmm.seed, 11u);
  c = LoadExperimentConfig(file, {"seed=5", "model.floors.transition=1e-5", "model.layout=[0,0,1,1,1,1]"}, "11");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.bank.chain.init.floors.transition, 1e-5);
  EXPECT_EQ(c.bank.Layout().state_to_supra, (std::vector<int>{0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(c.document["seed"], 5);
}

TEST(ExperimentConfigTest, RejectsBadInput) {
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(Json{{"bogus", 1}}, {}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"model.nope=1"}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"model.alpha=1.5"}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"model.alpha=\"x\""}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"jobs=0"}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"noequals"}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {}, "12abc"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(Json::array(), {}, nullptr); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { LoadExperimentConfig(nullptr, {"model.layout=[0,0,0,0,0,0,1]"}, nullptr); }),
            ErrorKind::kConfig);
}

TEST(ExperimentConfigTest, SplitCountsOrExplicitSets) {
  std::vector<UtteranceRecord> recs;
  for (const char* s : {"a", "b", "c"})
    for (const char* t : {"x", "y"}) recs.push_back({std::string(s) + t, "", s, "neutral", t, 1});
  auto c = LoadExperimentConfig(nullptr, {"split.train_speakers=2", "split.train_texts=1"}, nullptr);
  auto s = c.SplitFor(recs);
  EXPECT_EQ(s.train_speakers, (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(s.test_texts, (std::set<std::string>{"y"}));
  c = LoadExperimentConfig(Json{{"split",
                                 {{"train_speakers", {"c"}},
                                  {"test_speakers", {"a"}},
                                  {"train_texts", {"x"}},
                                  {"test_texts", {"y"}}}}},
                           {}, nullptr);
  s = c.SplitFor(recs);
  EXPECT_EQ(s.train_speakers, (std::set<std::string>{"c"}));
  EXPECT_EQ(MakeSplit(recs, s).test.size(), 1u);
}

}  // namespace
}  // namespace suprahmm

// tests/corpus_test.cpp

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

#include "suprahmm/evaluation.hpp"

namespace suprahmm {
namespace {

const char* kHeader = "id,path,speaker,emotion,text,replicate\n";

/// 8 speakers x 20 texts x 2 replicates x 6 emotions.
std::string PaperShapedManifest() {
  std::string m = kHeader;
  int n = 0;
  for (const auto& e : DefaultEmotionLabels())
    for (int s = 1; s <= 8; ++s)
      for (int t = 1; t <= 20; ++t)
        for (int r = 1; r <= 2; ++r)
          m += "u" + std::to_string(n++) + ",wav/x.wav,s" + std::to_string(s) + "," + e + ",t" +
               (t < 10 ? "0" : "") + std::to_string(t) + "," + std::to_string(r) + "\n";
  return m;
}

ManifestOptions NoFiles() {
  ManifestOptions o;
  o.check_files = false;
  return o;
}

TEST(ManifestTest, EmptyManifestIsEmpty) {
  EXPECT_TRUE(ParseManifest(kHeader, ".", NoFiles()).empty());
  EXPECT_THROW(ParseManifest("id,path\n", ".", NoFiles()), Error);
}

TEST(ManifestTest, DuplicateKeyRejected) {
  const std::string m = std::string(kHeader) + "a,x.wav,s1,panic,t1,1\nb,y.wav,s1,panic,t1,1\n";
  try {
    ParseManifest(m, ".", NoFiles());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDuplicateKey);
  }
}

TEST(ManifestTest, QuotedFieldsAndUnknownEmotions) {
  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](const std::string& w) { warnings.push_back(w); });
  const std::string m = std::string(kHeader) + "a,\"dir,1/x.wav\",s1,panic,\"t\"\"1\",1\n" +
                        "b,y.wav,s1,boredom,t1,1\n";
  const auto recs = ParseManifest(m, "/base", NoFiles());
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].path, std::filesystem::path("/base/dir,1/x.wav"));
  EXPECT_EQ(recs[0].text, "t\"1");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(ManifestTest, MissingAudioFileIsIoError) {
  const std::string m = std::string(kHeader) + "a,nope.wav,s1,panic,t1,1\n";
  try {
    ParseManifest(m, "/nonexistent-dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(ManifestTest, AssessmentSetHas480Records) {
  // 8 speakers x 6 emotions x 10 texts, one replicate.
  std::string m = kHeader;
  int n = 0;
  for (const auto& e : DefaultEmotionLabels())
    for (int s = 1; s <= 8; ++s)
      for (int t = 1; t <= 10; ++t)
        m += "u" + std::to_string(n++) + ",x.wav,s" + std::to_string(s) + "," + e + ",t" +
             std::to_string(t) + ",1\n";
  EXPECT_EQ(ParseManifest(m, ".", NoFiles()).size(), 480u);
}

TEST(SplitTest, PaperShapedCounts) {
  const auto recs = ParseManifest(PaperShapedManifest(), ".", NoFiles());
  ASSERT_EQ(recs.size(), 1920u);
  const auto split = MakeSplit(recs, FirstKSplit(recs, 5, 10));
  EXPECT_EQ(split.train.size(), 600u);
  EXPECT_EQ(split.test.size(), 360u);
  std::set<std::string> train_ids;
  for (const auto& r : split.train) train_ids.insert(r.id);
  for (const auto& r : split.test) EXPECT_FALSE(train_ids.count(r.id));
}

TEST(SplitTest, OverlapIsErrorAndEmptyTestWarns) {
  const auto recs = ParseManifest(PaperShapedManifest(), ".", NoFiles());
  SplitSpec bad = FirstKSplit(recs, 5, 10);
  bad.test_speakers.insert(*bad.train_speakers.begin());
  EXPECT_THROW(MakeSplit(recs, bad), Error);

  std::vector<std::string> warnings;
  ScopedWarningSink sink([&](const std::string& w) { warnings.push_back(w); });
  const auto all_train = MakeSplit(recs, FirstKSplit(recs, 8, 10));
  EXPECT_TRUE(all_train.test.empty());
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(SplitTest, JsonRoundTrip) {
  const auto recs = ParseManifest(PaperShapedManifest(), ".", NoFiles());
  const auto s = FirstKSplit(recs, 5, 10);
  const auto back = SplitFromJson(SplitToJson(s));
  EXPECT_EQ(back.train_speakers, s.train_speakers);
  EXPECT_EQ(back.test_texts, s.test_texts);
}

SyntheticSpec Tiny() {
  SyntheticSpec s;
  s.labels = {"neutral", "panic", "sadness"};
  s.num_speakers = 2;
  s.num_texts = 2;
  s.num_replicates = 2;
  s.dim = 5;
  s.min_frames = 20;
  s.max_frames = 30;
  return s;
}

TEST(SynthesizeTest, DeterministicAndShaped) {
  const auto spec = Tiny();
  const auto a = SynthesizeCorpus(spec), b = SynthesizeCorpus(spec, 3);
  ASSERT_EQ(a.size(), 3u * 2 * 2 * 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].features == b[i].features);
    EXPECT_EQ(a[i].prosody.log_f0, b[i].prosody.log_f0);
    EXPECT_EQ(a[i].features.Dim(), 5u);
    EXPECT_EQ(a[i].prosody.NumFrames(), a[i].features.NumFrames());
    EXPECT_GE(a[i].features.NumFrames(), 20u);
    EXPECT_LE(a[i].features.NumFrames(), 30u);
  }
  auto other = spec;
  other.seed += 1;
  EXPECT_FALSE(SynthesizeCorpus(other)[0].features == a[0].features);
}

TEST(SynthesizeTest, SpecJsonRoundTripAndValidation) {
  auto spec = Tiny();
  spec.tied["panic"] = "neutral";
  const auto back = SyntheticSpecFromJson(SyntheticSpecToJson(spec));
  EXPECT_EQ(SyntheticSpecToJson(back).dump(), SyntheticSpecToJson(spec).dump());
  EXPECT_THROW(SyntheticSpecFromJson(Json{{"num_speakers", 0}}), Error);
  EXPECT_THROW(SyntheticSpecFromJson(Json{{"bogus", 1}}), Error);
}

TEST(SynthesizeTest, TiedEmotionsShareGenerators) {
  auto spec = Tiny();
  spec.tied["panic"] = "neutral";
  const auto a = MakeEmotionGenerator(spec, "neutral"), b = MakeEmotionGenerator(spec, "panic");
  EXPECT_TRUE(a.acoustic == b.acoustic);
  EXPECT_EQ(a.mean_log_f0, b.mean_log_f0);
  EXPECT_FALSE(a.acoustic == MakeEmotionGenerator(spec, "sadness").acoustic);
}

TEST(SynthesizeTest, CorpusDirectoryRoundTrip) {
  const auto spec = Tiny();
  Corpus c{spec.labels, spec.Fingerprint(), Json{{"spec", SyntheticSpecToJson(spec)}}, SynthesizeCorpus(spec)};
  const auto dir = std::filesystem::temp_directory_path() / "suprahmm_corpus_test";
  std::filesystem::remove_all(dir);
  WriteCorpus(dir, c);
  const auto back = ReadCorpus(dir);
  ASSERT_EQ(back.utterances.size(), c.utterances.size());
  EXPECT_EQ(back.fingerprint, c.fingerprint);
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    EXPECT_TRUE(back.utterances[i].features == c.utterances[i].features);
    EXPECT_EQ(back.utterances[i].prosody.voiced, c.utterances[i].prosody.voiced);
    EXPECT_EQ(back.utterances[i].record.emotion, c.utterances[i].record.emotion);
  }
  std::filesystem::remove_all(dir);
}

/// Scores every test utterance under the true generators (acoustic forward
/// score) and picks the best: the nearest-likelihood oracle rule.
TEST(SynthesizeTest, WellSeparatedGeneratorsAreOracleSeparable) {
  auto spec = Tiny();
  spec.dim = 8;
  spec.acoustic_separation = 5.0;
  spec.num_texts = 4;
  std::vector<HmmModel> gens;
  for (const auto& l : spec.labels) gens.push_back(MakeEmotionGenerator(spec, l).acoustic);
  std::size_t right = 0;
  const auto utts = SynthesizeCorpus(spec);
  for (const auto& u : utts) {
    std::vector<double> s;
    for (const auto& g : gens) s.push_back(ForwardLogLikelihood(g, u.features));
    right += spec.labels[ArgmaxFirst(s)] == u.record.emotion;
  }
  EXPECT_GE(static_cast<double>(right) / static_cast<double>(utts.size()), 0.98);
}

TEST(SynthesizeTest, IdenticalGeneratorsAreIndistinguishable) {
  SyntheticSpec spec;
  spec.labels = {"neutral", "panic"};
  spec.tied["panic"] = "neutral";
  spec.num_texts = 40;
  spec.dim = 4;
  spec.min_frames = 40;
  spec.max_frames = 60;
  const auto utts = SynthesizeCorpus(spec);
  const auto split = MakeSplit(utts, FirstKSplit(utts, 5, 20));
  ASSERT_GE(split.test.size(), 200u);
  BankConfig cfg;
  cfg.kind = BankKind::kGmm;
  cfg.labels = spec.labels;
  cfg.gmm.num_components = 4;
  const auto bank = TrainBank(cfg, split.train, spec.Fingerprint());
  const auto rep = EvaluateSplit(bank, split.test, spec.Fingerprint());
  EXPECT_NEAR(rep.AverageAccuracy(), 50.0, 10.0);
}

}  // namespace
}  // namespace suprahmm

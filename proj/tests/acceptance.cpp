// tests/acceptance.cpp

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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance [criterion...] (default: all).

#include <chrono>
#include <cstdio>
#include <iostream>

#include "oracles.hpp"
#include "suprahmm/evaluation.hpp"

namespace suprahmm {
namespace {

using testing::EnumeratePaths;
using testing::RandomModel;
using testing::RandomObservations;
using testing::RelativeError;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2

Outcome ForwardOracle() {
  std::mt19937_64 rng(101);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2), m = 1 + static_cast<int>(rng() % 2);
    const int d = 1 + static_cast<int>(rng() % 2);
    const std::size_t T = 1 + rng() % 6;
    const auto model = RandomModel(n, 3, m, d, rng);
    const auto obs = RandomObservations(T, d, rng);
    const double err = RelativeError(ForwardLogLikelihood(model, obs), EnumeratePaths(model, obs).log_total);
    worst = std::max(worst, err);
    ok += err <= 1e-9;
  }
  return {ok == 200, Fmt("%d/200 trials within 1e-9 relative, worst %.2e", ok, worst)};
}

Outcome ViterbiOracle() {
  std::mt19937_64 rng(202);
  int ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 2), m = 1 + static_cast<int>(rng() % 2);
    const int d = 1 + static_cast<int>(rng() % 2);
    const std::size_t T = 1 + rng() % 6;
    const auto model = RandomModel(n, 3, m, d, rng);
    const auto obs = RandomObservations(T, d, rng);
    ok += ViterbiAlign(model, obs).states == EnumeratePaths(model, obs).best_path;
  }
  return {ok == 200, Fmt("%d/200 paths equal the exhaustive argmax", ok)};
}

// ---------------------------------------------------------------------------
// Criteria 3, 4 and 5

std::vector<FeatureSequence> SampledCorpus(const HmmModel& truth, int count, std::size_t T,
                                           std::uint64_t seed) {
  std::vector<FeatureSequence> c;
  for (int i = 0; i < count; ++i) c.push_back(SampleSequence(truth, T, seed + i).observations);
  return c;
}

/// Largest |sum - 1| over legal transition rows and mixture weights only.
double RowAndWeightError(const HmmModel& m) {
  double err = 0.0;
  for (int k = 1; k <= m.Order(); ++k) err = std::max(err, m.Transitions(k).MaxRowError());
  for (const auto& g : m.Emission().states) {
    double s = 0.0;
    for (double w : g.weights) s += w;
    err = std::max(err, std::abs(s - 1.0));
  }
  return err;
}

Outcome Normalization() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int checks = 0;
  auto check = [&](const HmmModel& m) {
    worst = std::max(worst, RowAndWeightError(m));
    ++checks;
  };
  for (int set = 0; set < 5; ++set) {
    const auto truth = RandomModel(3 + set % 3, 3, 2, 2, rng, 2.0);
    const auto corpus = SampledCorpus(truth, 8, 40, 1000 * set);
    InitConfig ic;
    ic.num_states = truth.NumStates();
    ic.num_mixtures = 2;
    HmmModel m = InitializeModel(corpus, ic);
    check(m);
    check(HmmModel(truth.Topology(), 3, truth.Emission()));
    BaumWelchOptions opt;
    opt.max_iters = 4;
    opt.tol = -std::numeric_limits<double>::infinity();
    opt.on_iteration = [&](const HmmModel& it, int) { check(it); };
    for (int order = 1;; ++order) {
      m = BaumWelchTrain(m, corpus, opt).model;
      if (order == 3) break;
      m = PromoteOrder(m);
      check(m);
    }
  }
  return {worst <= 1e-12, Fmt("%d models checked, worst row/weight error %.2e", checks, worst)};
}

Outcome EmMonotonicity() {
  std::mt19937_64 rng(404);
  int violations = 0;
  double worst = 0.0;
  for (int set = 0; set < 20; ++set) {
    const int n = 2 + set % 4, order = 1 + set % 3;
    const auto truth = RandomModel(n, order, 1 + set % 2, 2, rng, 2.0);
    const auto corpus = SampledCorpus(truth, 6, 30, 5000 + 100 * set);
    InitConfig ic;
    ic.num_states = n;
    ic.num_mixtures = 1 + set % 2;
    ic.seed = set;
    HmmModel start = InitializeModel(corpus, ic);
    while (start.Order() < order) start = PromoteOrder(start);
    BaumWelchOptions opt;
    opt.max_iters = 15;
    opt.tol = -std::numeric_limits<double>::infinity();
    const auto lls = BaumWelchTrain(start, corpus, opt).log_likelihoods;
    for (std::size_t i = 1; i < lls.size(); ++i) {
      const double drop = (lls[i - 1] - lls[i]) / std::abs(lls[i - 1]);
      worst = std::max(worst, drop);
      violations += drop > 1e-8;
    }
    if (lls.size() != 16) ++violations;
  }
  return {violations == 0,
          Fmt("20 sets x 15 iterations, %d violations, largest relative drop %.2e", violations, worst)};
}

Outcome PromotionPreservation() {
  std::mt19937_64 rng(505);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = RandomModel(1 + trial % 6, 1 + trial % 2, 1 + trial % 3, 2, rng);
    const auto obs = RandomObservations(1 + rng() % 30, 2, rng);
    const double a = ForwardLogLikelihood(m, obs), b = ForwardLogLikelihood(PromoteOrder(m), obs);
    const double err = RelativeError(a, b);
    worst = std::max(worst, err);
    ok += err <= 1e-10;
  }
  return {ok == 50, Fmt("%d/50 within 1e-10, worst %.2e", ok, worst)};
}

// ---------------------------------------------------------------------------
// Criteria 6, 7 and 8

struct Experiment {
  SyntheticSpec spec;
  Split<Utterance> split;
  ModelBank bank;
  double train_secs = 0.0;
};

Experiment RunSynthetic(const SyntheticSpec& spec, BankKind kind) {
  const auto start = std::chrono::steady_clock::now();
  Experiment e;
  e.spec = spec;
  const auto utts = SynthesizeCorpus(spec);
  e.split = MakeSplit(utts, FirstKSplit(utts, 5, 10));
  BankConfig cfg;
  cfg.kind = kind;
  cfg.labels = spec.labels;
  e.bank = TrainBank(cfg, e.split.train, spec.Fingerprint());
  e.train_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return e;
}

const Experiment& DefaultExperiment() {
  static const Experiment e = RunSynthetic(SyntheticSpec{}, BankKind::kCsphmm3);
  return e;
}

Outcome FusionEndpoints() {
  const auto& e = DefaultExperiment();
  std::size_t checked = 0, bad = 0;
  double worst_mid = 0.0;
  for (const auto& u : e.split.test) {
    for (const auto& em : e.bank.models) {
      const auto& m = std::get<Csphmm3Model>(em);
      const double acoustic = ForwardLogLikelihood(m.acoustic, u.features);
      const auto path = ViterbiAlign(m.acoustic, u.features).states;
      const double supra =
          SuprasegmentalLogLikelihood(m.supra, SegmentProsody(path, m.supra.layout, u.prosody));
      const double f0 = FusedLogLikelihood(m, u.features, u.prosody, 0.0).fused;
      const double f1 = FusedLogLikelihood(m, u.features, u.prosody, 1.0).fused;
      const double fh = FusedLogLikelihood(m, u.features, u.prosody, 0.5).fused;
      const double mid = std::abs(fh - (f0 + f1) / 2.0);
      worst_mid = std::max(worst_mid, mid);
      bad += !(f0 == acoustic && f1 == supra && mid <= 1e-12);
      ++checked;
    }
  }
  return {bad == 0 && checked > 0,
          Fmt("%zu utterance-model pairs, %zu mismatches, worst |f(.5) - mean| %.1e", checked, bad,
              worst_mid)};
}

Outcome EndToEnd() {
  const auto& e = DefaultExperiment();
  const auto start = std::chrono::steady_clock::now();
  const auto r = EvaluateSplit(e.bank, e.split.test, e.spec.Fingerprint());
  double worst_col = 0.0;
  for (std::size_t t = 0; t < e.bank.labels.size(); ++t) {
    double col = 0.0;
    for (std::size_t p = 0; p < e.bank.labels.size(); ++p) col += r.confusion.Percent(p, t);
    worst_col = std::max(worst_col, std::abs(col - 100.0));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {r.AverageAccuracy() >= 90.0 && worst_col <= 0.1 && r.confusion.Total() == 360,
          Fmt("CSPHMM3 average %.2f%% on %zu test utterances, worst column |sum - 100| %.1e",
              r.AverageAccuracy(), r.confusion.Total(), worst_col) +
              Fmt(", synthesis + training %.1f s, evaluation %.1f s", e.train_secs, secs)};
}

/// Emotions share their acoustic structure closely and differ mostly in
/// pitch, voicing and energy.
SyntheticSpec ProsodyInformativeSpec(std::uint64_t seed) {
  SyntheticSpec s;
  s.acoustic_separation = 0.5;
  s.prosody_separation = 1.0;
  s.seed = seed;
  return s;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome RelativeOrdering() {
  std::vector<double> csp, chmm;
  std::string per_seed;
  bool each_ok = true;
  for (std::uint64_t seed : {11, 22, 33, 44, 55}) {
    const auto spec = ProsodyInformativeSpec(seed);
    const auto a = RunSynthetic(spec, BankKind::kCsphmm3);
    const auto b = RunSynthetic(spec, BankKind::kChmm3);
    const double acc_a = EvaluateSplit(a.bank, a.split.test, spec.Fingerprint(), 0.5).AverageAccuracy();
    const double acc_b = EvaluateSplit(b.bank, b.split.test, spec.Fingerprint()).AverageAccuracy();
    csp.push_back(acc_a);
    chmm.push_back(acc_b);
    each_ok = each_ok && acc_a >= acc_b - 1.0;
    per_seed += Fmt(" %.1f/%.1f", acc_a, acc_b);
  }
  const bool median_ok = Median(csp) > Median(chmm);
  return {each_ok && median_ok, "CSPHMM3/CHMM3 per seed:" + per_seed +
                                    Fmt("; medians %.1f vs %.1f", Median(csp), Median(chmm))};
}

// ---------------------------------------------------------------------------
// Criteria 9, 10 and 11

Outcome Significance() {
  const auto two = StudentsT(10.0, 8.0, PooledSd(1.0, 1.0));
  const double pooled = PooledSd(3.0, 4.0);
  const auto eq = StudentsT(5.0, 5.0, PooledSd(2.0, 3.0));
  const bool ok = two.t_value == 2.0 && std::abs(pooled - std::sqrt(12.5)) <= 1e-12 &&
                  eq.t_value == 0.0 && !eq.significant && eq.critical == 1.645 && two.significant;
  return {ok, Fmt("t(10,8,1)=%.17g, pooled(3,4)=%.17g, t(equal)=%g significant=%d", two.t_value,
                  pooled, eq.t_value, static_cast<int>(eq.significant))};
}

Outcome MfccSpotChecks() {
  const MfccConfig cfg;
  const auto silence = Mfcc(AudioClip{std::vector<double>(1600, 0.0), 16000}, cfg);
  double worst_c = 0.0, c0_err = 0.0;
  for (std::size_t t = 0; t < silence.NumFrames(); ++t) {
    c0_err = std::max(c0_err, std::abs(silence(t, 0) - cfg.num_mel_filters * std::log(cfg.log_floor)));
    for (std::size_t d = 1; d < 16; ++d) worst_c = std::max(worst_c, std::abs(silence(t, d)));
  }

  AudioClip tone{std::vector<double>(400), 16000};
  for (std::size_t i = 0; i < 400; ++i)
    tone.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 1000.0 * static_cast<double>(i) / 16000.0);
  const auto energy = FilterbankEnergies(tone, cfg)[0];
  const auto oracle = testing::OracleMelEnergies(
      testing::DirectDftPower(testing::OracleWindowedFrame(tone.samples, 400), 512), 26, 512, 16000);
  const int nearest = testing::OracleNearestFilter(1000.0, 26, 16000);
  const auto argmax = [](const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
  };
  double worst_rel = 0.0;
  for (std::size_t m = 0; m < oracle.size(); ++m)
    worst_rel = std::max(worst_rel, std::abs(energy[m] - oracle[m]) / std::max(oracle[m], 1e-300));
  const bool ok = worst_c <= 1e-9 && c0_err <= 1e-9 && argmax(energy) == nearest &&
                  argmax(oracle) == nearest && worst_rel <= 1e-8;
  return {ok, Fmt("silence max|c1..c15| %.1e; 1 kHz peak at filter %d (oracle %d, nearest %d), "
                  "energies vs direct DFT %.1e relative",
                  worst_c, argmax(energy), argmax(oracle), nearest, worst_rel)};
}

Outcome ProtocolCounts() {
  std::string m = "id,path,speaker,emotion,text,replicate\n";
  int n = 0;
  for (const auto& e : DefaultEmotionLabels())
    for (int s = 1; s <= 8; ++s)
      for (int t = 1; t <= 20; ++t)
        for (int r = 1; r <= 2; ++r)
          m += Fmt("u%d,x.wav,s%d,%s,t%02d,%d\n", n++, s, e.c_str(), t, r);
  ManifestOptions opt;
  opt.check_files = false;
  const auto recs = ParseManifest(m, ".", opt);
  const auto split = MakeSplit(recs, FirstKSplit(recs, 5, 10));
  return {split.train.size() == 600 && split.test.size() == 360,
          Fmt("%zu records -> %zu train / %zu test", recs.size(), split.train.size(), split.test.size())};
}

}  // namespace
}  // namespace suprahmm

int main(int argc, char** argv) {
  using namespace suprahmm;
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"forward-oracle equivalence", ForwardOracle},
      {"viterbi-oracle equivalence", ViterbiOracle},
      {"normalization", Normalization},
      {"EM monotonicity", EmMonotonicity},
      {"order-promotion likelihood preservation", PromotionPreservation},
      {"fusion endpoints", FusionEndpoints},
      {"end-to-end synthetic recovery", EndToEnd},
      {"CSPHMM3 vs CHMM3 ordering on prosody-informative data", RelativeOrdering},
      {"significance arithmetic", Significance},
      {"MFCC spot checks", MfccSpotChecks},
      {"protocol counts", ProtocolCounts},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  ScopedWarningSink quiet([](const std::string&) {});
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << criteria[i].first
              << " (" << o.detail << ") [" << Fmt("%.1f s", secs) << "]" << std::endl;
  }
  std::cout << (failures ? "ACCEPTANCE FAILED: " : "ACCEPTANCE PASSED: ") << failures
            << " failing criteria" << std::endl;
  return failures ? 1 : 0;
}

// tools/suprahmm_main.cpp

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

// suprahmm: extract features, synthesize corpora, train model banks,
// evaluate and compare them.
//
//   suprahmm synth    --out corpus/ [--spec spec.json]
//   suprahmm extract  --manifest list.csv --out corpus/
//   suprahmm train    --corpus corpus/ --kind CSPHMM3 --out bank/
//   suprahmm evaluate --bank bank/ --corpus corpus/ --out eval/ [--alpha-sweep 0,0.5,1]
//   suprahmm classify --bank bank/ --corpus corpus/ [--id ID]...
//   suprahmm ttest    --a eval_a/report.json --b eval_b/report.json
//   suprahmm report   --report eval/report.json
//
// Exit status: 0 success, 2 configuration error, 3 I/O error,
// 4 incompatible features, 1 anything else.

#include <iostream>

#include "CLI11.hpp"
#include "suprahmm/evaluation.hpp"
#include "suprahmm/experiment.hpp"

namespace suprahmm {
namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--set", o.sets, "override a config key, e.g. model.alpha=0.25");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "training seed (overrides SUPRAHMM_SEED)");
}

ExperimentConfig LoadConfig(const CommonOptions& o) {
  Json file;
  if (!o.config_path.empty()) file = ParseJsonFile(o.config_path);
  auto sets = o.sets;
  if (o.jobs) sets.push_back("jobs=" + std::to_string(*o.jobs));
  if (o.seed) sets.push_back("seed=" + std::to_string(*o.seed));
  return LoadExperimentConfig(file, sets, std::getenv("SUPRAHMM_SEED"));
}

Json Provenance(const std::string& command, const Json& config, const Json& extra = Json::object()) {
  Json p{{"tool", "suprahmm"}, {"version", kVersion}, {"command", command}, {"config", config}};
  for (const auto& [k, v] : extra.items()) p[k] = v;
  return p;
}

void WriteJsonFile(const std::filesystem::path& p, const Json& j) {
  WriteTextFile(p, j.dump(2) + "\n");
}

std::string FormatAlpha(double a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

// ---------------------------------------------------------------------------

int RunSynth(const CommonOptions& common, const std::string& spec_path, const std::string& out) {
  const auto cfg = LoadConfig(common);
  SyntheticSpec spec;
  if (!spec_path.empty()) spec = SyntheticSpecFromJson(ParseJsonFile(spec_path));
  if (common.seed) spec.seed = *common.seed;
  else if (const char* env = std::getenv("SUPRAHMM_SEED"); env && *env) spec.seed = cfg.seed;
  spec.Validate();
  const Json spec_json = SyntheticSpecToJson(spec);
  Corpus c{spec.labels, spec.Fingerprint(),
           Provenance("synth", cfg.document, {{"spec", spec_json}, {"seeds", {{"synthetic", spec.seed}}}}),
           SynthesizeCorpus(spec, cfg.jobs)};
  WriteCorpus(out, c);
  std::cout << "wrote " << c.utterances.size() << " utterances (" << spec.Fingerprint() << ") to "
            << out << "\n";
  return 0;
}

int RunExtract(const CommonOptions& common, const std::string& manifest, const std::string& out) {
  const auto cfg = LoadConfig(common);
  ManifestOptions mo;
  mo.labels = cfg.labels;
  mo.check_files = false;
  const auto records = LoadManifest(manifest, mo);
  std::vector<std::optional<Utterance>> done(records.size());
  std::vector<std::string> errors(records.size());
  ParallelFor(records.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const AudioClip clip = ReadWav(records[i].path);
      done[i] = Utterance{records[i], ComputeFeatures(clip, cfg.features),
                          ComputeProsodyTrack(clip, cfg.features)};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  Corpus c{cfg.labels, cfg.features.Fingerprint(),
           Provenance("extract", cfg.document, {{"manifest", manifest}}), {}};
  std::size_t failed = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (done[i]) {
      c.utterances.push_back(std::move(*done[i]));
    } else {
      ++failed;
      std::cerr << "error: " << records[i].id << ": " << errors[i] << "\n";
    }
  }
  WriteCorpus(out, c);
  std::cout << "extracted " << c.utterances.size() << " of " << records.size() << " utterances to "
            << out << "\n";
  if (failed) {
    std::cerr << failed << " file(s) failed\n";
    return 3;
  }
  return 0;
}

int RunTrain(const CommonOptions& common, const std::string& corpus_dir, const std::string& kind,
             const std::string& out) {
  auto cfg = LoadConfig(common);
  cfg.bank.kind = ParseBankKind(kind);
  cfg.bank.Validate();
  const Corpus corpus = ReadCorpus(corpus_dir);
  const SplitSpec split = cfg.SplitFor(corpus.utterances);
  const auto parts = MakeSplit(corpus.utterances, split);
  if (parts.train.empty()) throw Error(ErrorKind::kEmptyInput, "split leaves no training data");
  const ModelBank bank = TrainBank(cfg.bank, parts.train, corpus.fingerprint);
  WriteBank(out, bank,
            Provenance("train", cfg.document,
                       {{"corpus", corpus_dir},
                        {"split", SplitToJson(split)},
                        {"num_train", parts.train.size()},
                        {"seeds", {{"training", cfg.seed}}}}));
  std::cout << "trained " << BankKindName(bank.kind) << " bank on " << parts.train.size()
            << " utterances; wrote " << out << "\n";
  return 0;
}

int RunEvaluate(const CommonOptions& common, const std::string& bank_dir,
                const std::string& corpus_dir, const std::string& out,
                std::optional<double> alpha, const std::vector<double>& sweep, bool with_predictions) {
  const auto cfg = LoadConfig(common);
  const ModelBank bank = ReadBank(bank_dir);
  const Corpus corpus = ReadCorpus(corpus_dir);
  if (corpus.fingerprint != bank.fingerprint)
    throw Error(ErrorKind::kIncompatibleFeatures, "corpus features '" + corpus.fingerprint +
                                                      "' do not match bank features '" +
                                                      bank.fingerprint + "'");
  const SplitSpec split = cfg.SplitFor(corpus.utterances);
  const auto test = MakeSplit(corpus.utterances, split).test;

  std::vector<std::optional<double>> alphas;
  if (!sweep.empty()) {
    if (bank.kind != BankKind::kCsphmm3)
      throw Error(ErrorKind::kConfig, "--alpha-sweep needs a CSPHMM3 bank");
    for (double a : sweep) alphas.push_back(a);
  } else {
    alphas.push_back(alpha);
  }
  for (const auto& a : alphas) {
    if (a && !(*a >= 0.0 && *a <= 1.0)) throw Error(ErrorKind::kConfig, "alpha must lie in [0, 1]");
    const auto report = EvaluateSplit(bank, test, corpus.fingerprint, a, cfg.jobs);
    Json j = ReportToJson(report, with_predictions);
    j["provenance"] = Provenance("evaluate", cfg.document,
                                 {{"bank", bank_dir},
                                  {"bank_config", bank.config},
                                  {"corpus", corpus_dir},
                                  {"split", SplitToJson(split)}});
    const std::string stem = sweep.empty() ? "report" : "report_alpha" + FormatAlpha(*a);
    WriteJsonFile(std::filesystem::path(out) / (stem + ".json"), j);
    WriteTextFile(std::filesystem::path(out) / (stem + ".txt"), ReportToText(report));
    std::cout << stem << ": " << BankKindName(bank.kind);
    if (bank.kind == BankKind::kCsphmm3) std::cout << " alpha=" << a.value_or(bank.alpha);
    std::cout << " average accuracy " << report.AverageAccuracy() << "% over " << test.size()
              << " utterances\n";
  }
  return 0;
}

int RunClassify(const CommonOptions& common, const std::string& bank_dir,
                const std::string& corpus_dir, const std::vector<std::string>& ids,
                std::optional<double> alpha, const std::string& out) {
  const auto cfg = LoadConfig(common);
  const ModelBank bank = ReadBank(bank_dir);
  const Corpus corpus = ReadCorpus(corpus_dir);
  std::vector<const Utterance*> chosen;
  for (const auto& id : ids) {
    const auto it = std::find_if(corpus.utterances.begin(), corpus.utterances.end(),
                                 [&](const Utterance& u) { return u.record.id == id; });
    if (it == corpus.utterances.end())
      throw Error(ErrorKind::kInvalidArgument, "no utterance '" + id + "' in " + corpus_dir);
    chosen.push_back(&*it);
  }
  if (ids.empty())
    for (const auto& u : corpus.utterances) chosen.push_back(&u);
  std::vector<Classification> results(chosen.size());
  ParallelFor(chosen.size(), cfg.jobs,
              [&](std::size_t i) { results[i] = Classify(bank, *chosen[i], corpus.fingerprint, alpha); });
  Json rows = Json::array();
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    std::cout << chosen[i]->record.id << "\t" << results[i].label << "\n";
    rows.push_back({{"id", chosen[i]->record.id},
                    {"predicted", results[i].label},
                    {"labels", bank.labels},
                    {"scores", results[i].scores}});
  }
  if (!out.empty())
    WriteJsonFile(out, Json{{"format", "suprahmm.classification"},
                            {"results", rows},
                            {"provenance", Provenance("classify", cfg.document, {{"bank", bank_dir}})}});
  return 0;
}

int RunTtest(const CommonOptions& common, const std::string& path_a, const std::string& path_b,
             std::optional<double> sd_a, std::optional<double> sd_b, const std::string& out) {
  const auto cfg = LoadConfig(common);
  const auto a = ReportFromJson(ParseJsonFile(path_a));
  const auto b = ReportFromJson(ParseJsonFile(path_b));
  const double sa = sd_a.value_or(a.AverageSd()), sb = sd_b.value_or(b.AverageSd());
  const auto res = StudentsT(a.AverageAccuracy(), b.AverageAccuracy(), sa, sb);
  Json j = SignificanceToJson(res);
  j["a"] = {{"report", path_a}, {"average_accuracy", a.AverageAccuracy()}, {"sd", sa}};
  j["b"] = {{"report", path_b}, {"average_accuracy", b.AverageAccuracy()}, {"sd", sb}};
  j["provenance"] = Provenance("ttest", cfg.document);
  std::cout << std::fixed << std::setprecision(3) << "mean_a=" << a.AverageAccuracy()
            << " mean_b=" << b.AverageAccuracy() << " sd_a=" << sa << " sd_b=" << sb
            << " t=" << res.t_value << " critical=" << res.critical << " -> "
            << (res.significant ? "significant" : "not significant") << "\n";
  if (!out.empty()) WriteJsonFile(out, j);
  return 0;
}

int RunReport(const std::string& path, bool as_json) {
  const auto r = ReportFromJson(ParseJsonFile(path));
  if (as_json)
    std::cout << ReportToJson(r, false).dump(2) << "\n";
  else
    std::cout << ReportToText(r);
  return 0;
}

int ExitCodeFor(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kIo: return 3;
    case ErrorKind::kIncompatibleFeatures: return 4;
    default: return 1;
  }
}

}  // namespace
}  // namespace suprahmm

int main(int argc, char** argv) {
  using namespace suprahmm;
  CLI::App app{"Emotion recognition with suprasegmental circular HMMs"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  std::string spec_path, out, manifest, corpus, kind = "CSPHMM3", bank, report_a, report_b, report;
  std::optional<double> alpha, sd_a, sd_b;
  std::vector<double> sweep;
  std::vector<std::string> ids;
  bool no_predictions = false, as_json = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  AddCommon(synth, common);
  synth->add_option("--spec", spec_path, "synthetic spec JSON");
  synth->add_option("--out", out, "corpus directory")->required();

  auto* extract = app.add_subcommand("extract", "compute features for a WAV manifest");
  AddCommon(extract, common);
  extract->add_option("--manifest", manifest, "CSV manifest")->required();
  extract->add_option("--out", out, "corpus directory")->required();

  auto* train = app.add_subcommand("train", "train one model per emotion");
  AddCommon(train, common);
  train->add_option("--corpus", corpus, "corpus directory")->required();
  train->add_option("--kind", kind, "CSPHMM3, CHMM3, GMM or VQ");
  train->add_option("--out", out, "bank directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score the test split");
  AddCommon(evaluate, common);
  evaluate->add_option("--bank", bank, "bank directory")->required();
  evaluate->add_option("--corpus", corpus, "corpus directory")->required();
  evaluate->add_option("--out", out, "report directory")->required();
  auto* alpha_opt = evaluate->add_option("--alpha", alpha, "fusion weight override");
  evaluate->add_option("--alpha-sweep", sweep, "one report per fusion weight")
      ->delimiter(',')
      ->excludes(alpha_opt);
  evaluate->add_flag("--no-predictions", no_predictions, "omit per-utterance scores");

  auto* classify = app.add_subcommand("classify", "label utterances");
  AddCommon(classify, common);
  classify->add_option("--bank", bank, "bank directory")->required();
  classify->add_option("--corpus", corpus, "corpus directory")->required();
  classify->add_option("--id", ids, "utterance id (default: all)");
  classify->add_option("--alpha", alpha, "fusion weight override");
  classify->add_option("--out", out, "JSON output file");

  auto* ttest = app.add_subcommand("ttest", "compare two reports");
  AddCommon(ttest, common);
  ttest->add_option("--a", report_a, "first report.json")->required();
  ttest->add_option("--b", report_b, "second report.json")->required();
  ttest->add_option("--sd-a", sd_a, "SD of the first average (default: its standard error)");
  ttest->add_option("--sd-b", sd_b, "SD of the second average");
  ttest->add_option("--out", out, "JSON output file");

  auto* rep = app.add_subcommand("report", "print a saved report");
  rep->add_option("--report", report, "report.json")->required();
  rep->add_flag("--json", as_json, "print JSON instead of tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return RunSynth(common, spec_path, out);
    if (*extract) return RunExtract(common, manifest, out);
    if (*train) return RunTrain(common, corpus, kind, out);
    if (*evaluate) return RunEvaluate(common, bank, corpus, out, alpha, sweep, !no_predictions);
    if (*classify) return RunClassify(common, bank, corpus, ids, alpha, out);
    if (*ttest) return RunTtest(common, report_a, report_b, sd_a, sd_b, out);
    if (*rep) return RunReport(report, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

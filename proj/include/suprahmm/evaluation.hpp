// suprahmm/evaluation.hpp

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

// Accuracy and confusion reporting, and the two-sample t statistic
//   t = (mean_x - mean_y) / sd_pooled,  sd_pooled = sqrt((sd_x^2 + sd_y^2) / 2)
// judged one-sided against t_0.05 = 1.645.
//
// Confusion matrices are indexed [predicted][true]; each true-label column
// is normalized to 100%.

#ifndef SUPRAHMM_EVALUATION_HPP_
#define SUPRAHMM_EVALUATION_HPP_

#include <iomanip>

#include "suprahmm/classifiers.hpp"

namespace suprahmm {

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(LabelSet labels)
      : labels_(std::move(labels)),
        counts_(labels_.size(), std::vector<std::size_t>(labels_.size(), 0)) {}

  void Add(std::size_t truth, std::size_t predicted) {
    if (truth >= labels_.size() || predicted >= labels_.size())
      throw Error(ErrorKind::kInvalidArgument, "label index out of range");
    ++counts_[predicted][truth];
  }

  const LabelSet& Labels() const { return labels_; }
  std::size_t Count(std::size_t predicted, std::size_t truth) const { return counts_[predicted][truth]; }

  std::size_t ColumnTotal(std::size_t truth) const {
    std::size_t n = 0;
    for (const auto& row : counts_) n += row[truth];
    return n;
  }

  std::size_t Total() const {
    std::size_t n = 0;
    for (std::size_t t = 0; t < labels_.size(); ++t) n += ColumnTotal(t);
    return n;
  }

  /// Percentage of true-label `truth` utterances assigned `predicted`;
  /// 0 when the column is empty.
  double Percent(std::size_t predicted, std::size_t truth) const {
    const auto n = ColumnTotal(truth);
    return n ? 100.0 * static_cast<double>(counts_[predicted][truth]) / static_cast<double>(n) : 0.0;
  }

  std::vector<std::vector<double>> Percentages() const {
    std::vector<std::vector<double>> p(labels_.size(), std::vector<double>(labels_.size()));
    for (std::size_t r = 0; r < labels_.size(); ++r)
      for (std::size_t c = 0; c < labels_.size(); ++c) p[r][c] = Percent(r, c);
    return p;
  }

  const std::vector<std::vector<std::size_t>>& Counts() const { return counts_; }

 private:
  LabelSet labels_;
  std::vector<std::vector<std::size_t>> counts_;
};

struct Prediction {
  std::string id;
  std::size_t truth = 0;
  std::size_t predicted = 0;
  std::vector<double> scores;
};

struct EvaluationReport {
  ConfusionMatrix confusion;
  std::vector<Prediction> predictions;
  Json metadata = Json::object();

  /// Diagonal of the percentage matrix; nullopt for labels with no test data.
  std::vector<std::optional<double>> PerEmotionAccuracy() const {
    std::vector<std::optional<double>> acc;
    for (std::size_t i = 0; i < confusion.Labels().size(); ++i)
      acc.push_back(confusion.ColumnTotal(i) ? std::optional(confusion.Percent(i, i)) : std::nullopt);
    return acc;
  }

  std::vector<double> ObservedAccuracies() const {
    std::vector<double> v;
    for (const auto& a : PerEmotionAccuracy())
      if (a) v.push_back(*a);
    return v;
  }

  /// Unweighted mean of the per-emotion accuracies.
  double AverageAccuracy() const {
    const auto v = ObservedAccuracies();
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  /// Sample standard deviation of the per-emotion accuracies.
  double AccuracySd() const {
    const auto v = ObservedAccuracies();
    if (v.size() < 2) return 0.0;
    const double mu = AverageAccuracy();
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  }

  /// Standard deviation of the average accuracy: AccuracySd / sqrt(n).
  double AverageSd() const {
    const auto n = ObservedAccuracies().size();
    return n ? AccuracySd() / std::sqrt(static_cast<double>(n)) : 0.0;
  }
};

inline EvaluationReport MakeReport(const LabelSet& labels, std::vector<Prediction> preds,
                                   Json metadata = Json::object()) {
  EvaluationReport r;
  r.confusion = ConfusionMatrix(labels);
  for (const auto& p : preds) r.confusion.Add(p.truth, p.predicted);
  r.predictions = std::move(preds);
  r.metadata = std::move(metadata);
  return r;
}

/// Classifies every test utterance (in parallel) and tallies the results.
inline EvaluationReport EvaluateSplit(const ModelBank& bank, const std::vector<Utterance>& test,
                                      std::string_view fingerprint,
                                      std::optional<double> alpha = std::nullopt, int jobs = 1) {
  if (test.empty()) throw Error(ErrorKind::kEmptyInput, "empty test set");
  std::vector<Prediction> preds(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto truth = LabelIndex(bank.labels, test[i].record.emotion);
    if (!truth)
      throw Error(ErrorKind::kInvalidArgument, "test utterance " + test[i].record.id +
                                                   " has emotion outside the bank");
    preds[i].id = test[i].record.id;
    preds[i].truth = *truth;
  }
  ParallelFor(test.size(), jobs, [&](std::size_t i) {
    auto c = Classify(bank, test[i], fingerprint, alpha);
    preds[i].predicted = c.index;
    preds[i].scores = std::move(c.scores);
  });
  Json meta{{"kind", BankKindName(bank.kind)},
            {"alpha", bank.kind == BankKind::kCsphmm3 ? alpha.value_or(bank.alpha) : 0.0},
            {"fingerprint", bank.fingerprint},
            {"num_test", test.size()}};
  return MakeReport(bank.labels, std::move(preds), std::move(meta));
}

inline Json ReportToJson(const EvaluationReport& r, bool with_predictions = true) {
  const auto& labels = r.confusion.Labels();
  Json per = Json::object();
  const auto acc = r.PerEmotionAccuracy();
  for (std::size_t i = 0; i < labels.size(); ++i) per[labels[i]] = acc[i] ? Json(*acc[i]) : Json(nullptr);
  Json j{{"format", "suprahmm.report"},
         {"version", kHmmFormatVersion},
         {"metadata", r.metadata},
         {"labels", labels},
         {"per_emotion_accuracy", per},
         {"average_accuracy", r.AverageAccuracy()},
         {"accuracy_sd", r.AccuracySd()},
         {"average_sd", r.AverageSd()},
         {"confusion", {{"orientation", "[predicted][true]"},
                        {"counts", r.confusion.Counts()},
                        {"percent", r.confusion.Percentages()}}}};
  if (with_predictions) {
    Json preds = Json::array();
    for (const auto& p : r.predictions)
      preds.push_back({{"id", p.id},
                       {"true", labels[p.truth]},
                       {"predicted", labels[p.predicted]},
                       {"scores", p.scores}});
    j["predictions"] = preds;
  }
  return j;
}

/// Rebuilds a report from its JSON; needs only the counts.
inline EvaluationReport ReportFromJson(const Json& j) {
  const auto labels = detail::Field(j, "labels", [](const Json& v) { return v.get<LabelSet>(); });
  EvaluationReport r;
  r.confusion = ConfusionMatrix(labels);
  const auto counts = detail::Field(j, "confusion", [](const Json& v) {
    return v.at("counts").get<std::vector<std::vector<std::size_t>>>();
  });
  if (counts.size() != labels.size()) throw Error(ErrorKind::kParse, "confusion size != labels");
  for (std::size_t p = 0; p < counts.size(); ++p) {
    if (counts[p].size() != labels.size()) throw Error(ErrorKind::kParse, "confusion not square");
    for (std::size_t t = 0; t < labels.size(); ++t)
      for (std::size_t k = 0; k < counts[p][t]; ++k) r.confusion.Add(t, p);
  }
  r.metadata = j.value("metadata", Json::object());
  return r;
}

inline std::string ReportToText(const EvaluationReport& r) {
  const auto& labels = r.confusion.Labels();
  std::size_t w = 10;
  for (const auto& l : labels) w = std::max(w, l.size() + 2);
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "Emotion recognition accuracy (%)";
  if (r.metadata.contains("kind")) os << "  model=" << r.metadata["kind"].get<std::string>();
  if (r.metadata.contains("alpha")) os << "  alpha=" << r.metadata["alpha"].get<double>();
  os << "\n\n" << std::left << std::setw(static_cast<int>(w)) << "emotion" << std::right
     << std::setw(10) << "accuracy" << std::setw(8) << "n" << "\n";
  const auto acc = r.PerEmotionAccuracy();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    os << std::left << std::setw(static_cast<int>(w)) << labels[i] << std::right << std::setw(10);
    if (acc[i]) os << *acc[i]; else os << "-";
    os << std::setw(8) << r.confusion.ColumnTotal(i) << "\n";
  }
  os << std::left << std::setw(static_cast<int>(w)) << "average" << std::right << std::setw(10)
     << r.AverageAccuracy() << std::setw(8) << r.confusion.Total() << "\n\n";
  os << "Confusion matrix (% of each true-emotion column; rows = predicted)\n\n";
  os << std::left << std::setw(static_cast<int>(w)) << "pred\\true" << std::right;
  for (const auto& l : labels) os << std::setw(static_cast<int>(w)) << l;
  os << "\n";
  for (std::size_t p = 0; p < labels.size(); ++p) {
    os << std::left << std::setw(static_cast<int>(w)) << labels[p] << std::right;
    for (std::size_t t = 0; t < labels.size(); ++t)
      os << std::setw(static_cast<int>(w)) << r.confusion.Percent(p, t);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Significance

inline constexpr double kTCritical05 = 1.645;

inline double PooledSd(double sd_x, double sd_y) {
  if (!(sd_x >= 0.0) || !(sd_y >= 0.0))
    throw Error(ErrorKind::kInvalidArgument, "standard deviations must be >= 0");
  return std::sqrt((sd_x * sd_x + sd_y * sd_y) / 2.0);
}

struct SignificanceResult {
  double t_value = 0.0;
  double mean_x = 0.0, mean_y = 0.0;
  double sd_x = 0.0, sd_y = 0.0;
  double sd_pooled = 0.0;
  double critical = kTCritical05;
  bool significant = false;
};

inline SignificanceResult StudentsT(double mean_x, double mean_y, double sd_pooled) {
  if (!(sd_pooled >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "sd_pooled must be >= 0");
  SignificanceResult r;
  r.mean_x = mean_x;
  r.mean_y = mean_y;
  r.sd_pooled = sd_pooled;
  if (sd_pooled == 0.0) {
    if (mean_x != mean_y)
      throw Error(ErrorKind::kUndefinedT, "t is undefined: sd_pooled = 0 with unequal means");
    r.t_value = 0.0;
  } else {
    r.t_value = (mean_x - mean_y) / sd_pooled;
  }
  r.significant = r.t_value > r.critical;
  return r;
}

inline SignificanceResult StudentsT(double mean_x, double mean_y, double sd_x, double sd_y) {
  auto r = StudentsT(mean_x, mean_y, PooledSd(sd_x, sd_y));
  r.sd_x = sd_x;
  r.sd_y = sd_y;
  return r;
}

inline Json SignificanceToJson(const SignificanceResult& r) {
  return Json{{"t_value", r.t_value},
              {"mean_x", r.mean_x},
              {"mean_y", r.mean_y},
              {"sd_x", r.sd_x},
              {"sd_y", r.sd_y},
              {"sd_pooled", r.sd_pooled},
              {"critical_value", r.critical},
              {"one_sided_alpha", 0.05},
              {"significant", r.significant},
              {"absolute_delta", r.mean_x - r.mean_y},
              {"relative_delta", r.mean_y != 0.0 ? r.mean_x / r.mean_y - 1.0 : 0.0}};
}

}  // namespace suprahmm

#endif  // SUPRAHMM_EVALUATION_HPP_

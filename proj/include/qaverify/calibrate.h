// Copyright 2026 The qaverify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAVERIFY_CALIBRATE_H_
#define QAVERIFY_CALIBRATE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qaverify/common.h"
#include "qaverify/nli_client.h"

namespace qaverify {

inline constexpr int kSelectiveFeatureCount = 7;

// Per-instance confidences and correctness, the unit of selective-QA
// evaluation.
struct ConfidenceRecord {
  std::string instance_id;
  std::string dataset;
  double p_qa = 0.0;
  std::optional<double> p_nli;
  // Posterior of a second, independently trained QA model (QA-Ensemble).
  std::optional<double> p_qa2;
  // passage length, answer length, top-5 softmax probabilities (descending).
  std::optional<std::vector<double>> features;
  double f1 = 0.0;
  bool em = false;
  bool answerable = true;
  // Verifier decision, when an entailment score was attached.
  std::optional<bool> accepted;

  bool operator==(const ConfidenceRecord &) const = default;
};

void ValidateRecord(const ConfidenceRecord &record);
json ToJson(const ConfidenceRecord &record);
ConfidenceRecord RecordFromJson(const json &row);
std::vector<ConfidenceRecord> ReadRecords(const std::string &path);
void WriteRecords(const std::string &path,
                  const std::vector<ConfidenceRecord> &records);

std::vector<double> SelectiveFeatures(int64_t passage_words,
                                      int64_t answer_words,
                                      std::vector<double> top5);

// ---------------------------------------------------------------------------
// Coverage curves.

struct CoveragePoint {
  double coverage = 0.0;
  double threshold = 0.0;
  double f1 = 0.0;
  int64_t selected = 0;
};

struct CoverageCurve {
  std::vector<CoveragePoint> points;
  int64_t n_total = 0;
};

using ConfidenceFn = std::function<double(const ConfidenceRecord &)>;

// {0.1, 0.2, ..., 1.0}
std::vector<double> DefaultGrid();
std::vector<double> ParseGrid(std::string_view text);

// Order-independent mean of record F1 (correctly rounded sum / N).
double MeanF1(std::span<const ConfidenceRecord> records);

// For each coverage k: the top ceil(k*N) records by confidence (descending,
// ties by ascending instance id), their mean F1, and the confidence of the
// last selected record. The grid is sorted and deduplicated and always
// includes 1.0. Throws ValidationError on empty input or k outside (0, 1].
CoverageCurve ComputeCoverageCurve(std::span<const ConfidenceRecord> records,
                                   const ConfidenceFn &confidence,
                                   std::span<const double> grid);

// Pointwise mean over curves computed on the same grid.
CoverageCurve MacroAverage(std::span<const CoverageCurve> curves);

// Tab-separated: one block per named curve, then the macro average when
// more than one curve is given.
std::string FormatCurveTable(
    const std::vector<std::pair<std::string, CoverageCurve>> &curves);

// ---------------------------------------------------------------------------
// Logistic models fit by deterministic full-batch gradient descent.

struct FitConfig {
  double step = 0.1;
  double clip_norm = 10.0;
  int max_iterations = 10000;
  double tolerance = 1e-8;
  bool fit_bias = false;
  // Targets are EM unless a token-F1 threshold is given.
  std::optional<double> f1_target_threshold;
  uint64_t seed = 0;  // recorded only; the optimizer is deterministic
};

struct FitMeta {
  int iterations = 0;
  double final_loss = 0.0;
  uint64_t seed = 0;
  bool degenerate = false;
  // Loss before the first step and after every step.
  std::vector<double> loss_history;
};

struct LogisticFit {
  std::vector<double> weights;
  double bias = 0.0;
  FitMeta meta;
};

double Sigmoid(double z);

// Mean negative log-likelihood of binary targets.
double LogisticLoss(const std::vector<std::vector<double>> &x,
                    const std::vector<int> &y,
                    const std::vector<double> &weights, double bias);

// d(loss)/d(weights) followed by d(loss)/d(bias).
std::vector<double> LogisticGradient(const std::vector<std::vector<double>> &x,
                                     const std::vector<int> &y,
                                     const std::vector<double> &weights,
                                     double bias);

// Starts from zero weights. The bias stays 0 unless config.fit_bias. Stops
// when the loss changes by less than the tolerance.
LogisticFit FitLogistic(const std::vector<std::vector<double>> &x,
                        const std::vector<int> &y, const FitConfig &config);

// y = logistic(w1 * p_qa + w2 * p_nli + bias).
struct CombinerModel {
  double w1 = 0.0;
  double w2 = 0.0;
  double bias = 0.0;
  FitMeta fit_meta;
};

json ToJson(const CombinerModel &model);
CombinerModel CombinerFromJson(const json &row);

int TargetOf(const ConfidenceRecord &record, const FitConfig &config);

// Needs >= 2 records, all with p_nli.
CombinerModel FitCombiner(std::span<const ConfidenceRecord> records,
                          const FitConfig &config = {});
double Combine(const CombinerModel &model, const ConfidenceRecord &record);
double Combine(const CombinerModel &model, double p_qa, double p_nli);

// Same functional form with two QA posteriors; needs p_qa2 on every record.
CombinerModel FitEnsemble(std::span<const ConfidenceRecord> records,
                          const FitConfig &config = {});
double EnsembleQa(double p_qa_1, double p_qa_2, const CombinerModel &model);

// Joins two QA streams by instance id into records carrying p_qa and p_qa2.
// Throws ValidationError listing unmatched ids.
std::vector<ConfidenceRecord> JoinQaStreams(
    std::span<const ConfidenceRecord> first,
    std::span<const ConfidenceRecord> second);

// Logistic model over z-scored selective features. Constant columns are
// dropped and keep weight 0.
struct CalibratorModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<bool> dropped;
  FitMeta fit_meta;
};

json ToJson(const CalibratorModel &model);
CalibratorModel CalibratorFromJson(const json &row);

CalibratorModel FitCalibrator(std::span<const ConfidenceRecord> records,
                              const FitConfig &config = {});
double ApplyCalibrator(const CalibratorModel &model,
                       const ConfidenceRecord &record);

enum class ConfidenceSource { kQa, kNli, kCombined, kEnsemble, kSelective };
ConfidenceSource ParseConfidenceSource(std::string_view name);
std::string ConfidenceSourceName(ConfidenceSource source);

// Model pointers must outlive the returned function; the combined and
// ensemble sources need `combiner`, selective needs `calibrator`.
ConfidenceFn MakeConfidenceFn(ConfidenceSource source,
                              const CombinerModel *combiner = nullptr,
                              const CalibratorModel *calibrator = nullptr);

// ---------------------------------------------------------------------------
// Unanswerable rejection.

struct VerifiedAnswer {
  bool answerable = true;
  EntailmentScore score;
};

struct RejectionRates {
  double reject_unanswerable = 0.0;
  double accept_answerable = 0.0;
  int64_t n_unanswerable = 0;
  int64_t n_answerable = 0;
};

// A rejection is a negative verifier decision. Throws ValidationError naming
// the empty partition.
RejectionRates ComputeRejectionRates(std::span<const VerifiedAnswer> answers,
                                     std::optional<double> threshold = {});

}  // namespace qaverify

#endif  // QAVERIFY_CALIBRATE_H_

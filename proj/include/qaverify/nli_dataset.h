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

#ifndef QAVERIFY_NLI_DATASET_H_
#define QAVERIFY_NLI_DATASET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qaverify/answer.h"
#include "qaverify/corpus.h"
#include "qaverify/decontext.h"
#include "qaverify/qconvert.h"

namespace qaverify {

enum class NliLabel { kEntailed, kNotEntailed };
enum class PairOrigin { kQaDerived, kExternalNli, kEval };

std::string LabelName(NliLabel label);
NliLabel ParseLabel(std::string_view name);
std::string OriginName(PairOrigin origin);
PairOrigin ParseOrigin(std::string_view name);

struct NLIPair {
  std::string premise;
  std::string hypothesis;
  NliLabel label = NliLabel::kNotEntailed;
  PairOrigin origin = PairOrigin::kQaDerived;
  std::optional<std::string> instance_id;
  // dataset, premise_mode, hypothesis_method, ...
  std::map<std::string, std::string> meta;

  bool operator==(const NLIPair &) const = default;
};

json ToJson(const NLIPair &pair);
NLIPair PairFromJson(const json &row);
std::vector<NLIPair> ReadPairs(const std::string &path);
void WritePairs(const std::string &path, const std::vector<NLIPair> &pairs);

// How a predicted answer is judged correct for labeling. Exact match after
// SQuAD normalization by default; token F1 >= threshold when selected.
struct CorrectnessConfig {
  enum class Metric { kExactMatch, kTokenF1 };
  Metric metric = Metric::kExactMatch;
  double f1_threshold = 0.8;
};

bool IsCorrect(std::string_view prediction,
               const std::vector<GoldAnswer> &golds,
               const CorrectnessConfig &config);

// One pair per instance, in instance order, labeled entailed iff the
// candidate is correct. The other inputs are joined by instance id; any
// missing id raises a ValidationError listing all of them.
std::vector<NLIPair> BuildQaNli(const std::vector<QAInstance> &instances,
                                const std::vector<AnswerCandidate> &candidates,
                                const std::vector<Premise> &premises,
                                const std::vector<Hypothesis> &hypotheses,
                                const CorrectnessConfig &correctness = {},
                                PairOrigin origin = PairOrigin::kQaDerived);

// qa_pairs plus a uniform sample (without replacement) of |qa_pairs| external
// pairs, shuffled. Deterministic for a fixed seed. Throws ValidationError
// when there are too few external pairs.
std::vector<NLIPair> MixWithExternal(const std::vector<NLIPair> &qa_pairs,
                                     const std::vector<NLIPair> &external_pairs,
                                     uint64_t seed = 0);

enum class ExternalSource { kMnli, kFeverNli };
ExternalSource ParseExternalSource(std::string_view name);

struct ImportResult {
  std::vector<NLIPair> pairs;
  std::vector<ParseIssue> issues;
  // Raw label string -> count, over every readable record.
  std::map<std::string, int64_t> label_counts;
};

// MNLI: entailment -> entailed, neutral/contradiction -> not_entailed.
// FEVER-NLI: SUPPORTS -> entailed, REFUTES/NOT ENOUGH INFO -> not_entailed.
// Unknown labels become per-record issues.
ImportResult ImportExternalNli(std::string_view stream, ExternalSource source);

}  // namespace qaverify

#endif  // QAVERIFY_NLI_DATASET_H_

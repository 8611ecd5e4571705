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

#ifndef QAVERIFY_PIPELINE_H_
#define QAVERIFY_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaverify/answer.h"
#include "qaverify/backend.h"
#include "qaverify/calibrate.h"
#include "qaverify/common.h"
#include "qaverify/decontext.h"
#include "qaverify/nli_dataset.h"
#include "qaverify/qconvert.h"
#include "qaverify/scoring.h"

namespace qaverify {

struct PipelineConfig {
  HypothesisMethod hypothesis_mode = HypothesisMethod::kRule;
  PremiseMode premise_mode = PremiseMode::kDecontext;
  EndpointSpec qa_backend;
  EndpointSpec convert_backend;
  EndpointSpec decontext_backend;
  EndpointSpec nli_backend;
  uint64_t seed = 0;
  std::vector<double> grid = DefaultGrid();
  std::string input;
  std::string input_format = "corpus";  // corpus | mrqa | squad2
  std::string dataset;  // dataset tag for mrqa/squad2 input
  bool filter_nq = false;
  CorrectnessConfig correctness;
  std::optional<double> accept_threshold;
  // Instances held out (seeded, disjoint from evaluation) to fit the
  // combiner and calibrator; capped at half the corpus.
  int64_t heldout = 100;
  bool fit_bias = false;
  std::optional<int64_t> error_cap;

  // Compares the canonical JSON forms.
  bool operator==(const PipelineConfig &other) const;
};

json ToJson(const PipelineConfig &config);

// Unknown keys and malformed values throw ValidationError. Missing keys take
// their defaults.
PipelineConfig ConfigFromJson(const json &row);
// Neural hypotheses need a convert endpoint, decontext premises a decontext
// endpoint; QA and NLI endpoints are always needed.
void ValidateConfig(const PipelineConfig &config);
// FNV-1a of the canonical JSON form. Output directory and thread count are
// not part of the config and so never change it.
std::string ConfigHash(const PipelineConfig &config);

// Stage building blocks shared with the CLI subcommands.

// Reads `path` as a normalized corpus, MRQA lines or a SQuAD v2 document.
// MRQA line issues are logged as warnings and skipped. Duplicate ids throw.
std::vector<QAInstance> LoadInstances(const std::string &path,
                                      const std::string &format,
                                      const std::string &dataset,
                                      bool filter_nq);

// An empty predicted answer (abstention) uses the question itself as the
// hypothesis, with a warning recorded on the hypothesis.
Hypothesis MakeHypothesis(const QAInstance &instance,
                          const AnswerCandidate &candidate,
                          HypothesisMethod method,
                          const ConvertBackend *backend);

// A candidate without a resolvable span in the context anchors the premise
// at the first sentence and logs a warning.
Premise MakeCandidatePremise(const QAInstance &instance,
                             const AnswerCandidate &candidate,
                             PremiseMode mode,
                             const DecontextBackend *backend);

MatchResult ScoreCandidate(const QAInstance &instance,
                           const AnswerCandidate &candidate);

ConfidenceRecord MakeRecord(const QAInstance &instance,
                            const AnswerCandidate &candidate,
                            const std::optional<EntailmentScore> &score,
                            std::optional<double> accept_threshold);

struct PipelineResult {
  json manifest;
  // Verifier (NLI) confidence curve on the evaluation split, macro-averaged
  // over datasets.
  CoverageCurve nli_curve;
};

// Runs every stage and writes one file per stage plus manifest.json into
// `out_dir`. On a stage failure the manifest is written with status FAILED
// and the stage name, and the error is rethrown with the same type.
PipelineResult RunPipeline(const PipelineConfig &config,
                           const std::string &out_dir, int jobs = 1);

struct AblationCell {
  HypothesisMethod hypothesis = HypothesisMethod::kRule;
  PremiseMode premise = PremiseMode::kSentence;
  std::string dir;
  bool ok = false;
  std::string error;
  CoverageCurve curve;
};

struct AblationResult {
  std::vector<AblationCell> cells;
  std::string table;
};

// {converted, concat} x {sentence, decontext, full}, one subdirectory per
// cell. "Converted" keeps the base config's method unless it is concat, in
// which case the rule converter is used. A failing cell is marked in the
// table and does not stop the others.
AblationResult RunAblation(const PipelineConfig &base,
                           const std::string &out_dir, int jobs = 1);

}  // namespace qaverify

#endif  // QAVERIFY_PIPELINE_H_

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

// Command-line entry point. Every stage of the pipeline is a subcommand that
// reads and writes line-delimited JSON, so stages can be run one at a time or
// all together with `pipeline`.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qaverify/answer.h"
#include "qaverify/backend.h"
#include "qaverify/calibrate.h"
#include "qaverify/common.h"
#include "qaverify/corpus.h"
#include "qaverify/decontext.h"
#include "qaverify/nli_client.h"
#include "qaverify/nli_dataset.h"
#include "qaverify/pipeline.h"
#include "qaverify/qconvert.h"
#include "qaverify/report.h"
#include "qaverify/scoring.h"
#include "qaverify/text.h"

namespace qaverify {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBackend = 3;

struct Globals {
  std::string config_path;
  std::optional<uint64_t> seed;
  int jobs = 1;
};

template <typename T>
void WriteAll(const std::string &path, const std::vector<T> &items) {
  std::vector<json> rows;
  rows.reserve(items.size());
  for (const auto &item : items) rows.push_back(ToJson(item));
  WriteJsonLines(path, rows);
}

std::vector<AnswerCandidate> ReadCandidates(const std::string &path) {
  std::vector<AnswerCandidate> out;
  for (const auto &row : ReadJsonLines(path)) out.push_back(CandidateFromJson(row));
  return out;
}

std::vector<Hypothesis> ReadHypotheses(const std::string &path) {
  std::vector<Hypothesis> out;
  for (const auto &row : ReadJsonLines(path)) out.push_back(HypothesisFromJson(row));
  return out;
}

std::vector<Premise> ReadPremises(const std::string &path) {
  std::vector<Premise> out;
  for (const auto &row : ReadJsonLines(path)) out.push_back(PremiseFromJson(row));
  return out;
}

// Scores keyed by instance id; rows without one are rejected.
std::map<std::string, EntailmentScore> ReadScores(const std::string &path) {
  std::map<std::string, EntailmentScore> out;
  size_t line = 0;
  for (const auto &row : ReadJsonLines(path)) {
    ++line;
    if (!row.contains("instance_id") || !row["instance_id"].is_string())
      throw ParseError(path + ":" + std::to_string(line),
                       "score without instance_id");
    out[row["instance_id"].get<std::string>()] = ScoreFromJson(row);
  }
  return out;
}

// Joins predictions to instances by id, preserving instance order.
std::vector<AnswerCandidate> AlignCandidates(
    const std::vector<QAInstance> &instances,
    const std::vector<AnswerCandidate> &candidates) {
  std::map<std::string, const AnswerCandidate *> by_id;
  for (const auto &c : candidates) by_id[c.instance_id] = &c;
  std::vector<AnswerCandidate> aligned;
  std::vector<std::string> missing;
  for (const auto &i : instances) {
    auto it = by_id.find(i.id);
    if (it == by_id.end()) {
      missing.push_back(i.id);
    } else {
      aligned.push_back(*it->second);
    }
  }
  if (!missing.empty())
    throw ValidationError("answers missing for: " + Join(missing, ", "));
  return aligned;
}

CombinerModel ReadCombiner(const std::string &path) {
  try {
    return CombinerFromJson(json::parse(ReadFile(path)));
  } catch (const json::parse_error &e) {
    throw ParseError(path, e.what());
  }
}

CalibratorModel ReadCalibrator(const std::string &path) {
  try {
    return CalibratorFromJson(json::parse(ReadFile(path)));
  } catch (const json::parse_error &e) {
    throw ParseError(path, e.what());
  }
}

void Emit(const std::string &out_path, const std::string &text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    WriteFile(out_path, text);
  }
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

PipelineConfig LoadConfig(const Globals &globals) {
  PipelineConfig config;
  if (!globals.config_path.empty()) {
    try {
      config = ConfigFromJson(json::parse(ReadFile(globals.config_path)));
    } catch (const json::parse_error &e) {
      throw ParseError(globals.config_path, e.what());
    }
  }
  if (globals.seed) config.seed = *globals.seed;
  return config;
}

// Optional overrides for pipeline/ablate, applied on top of --config.
struct ConfigFlags {
  std::string input, input_format, dataset, hypothesis_mode, premise_mode;
  std::string qa, convert, decontext, nli, grid;
  std::optional<double> threshold;
  std::optional<int64_t> heldout, error_cap;
  bool bias = false, filter_nq = false;

  void Attach(CLI::App *cmd) {
    cmd->add_option("--input", input, "Input corpus path");
    cmd->add_option("--input-format", input_format, "corpus, mrqa or squad2");
    cmd->add_option("--dataset", dataset, "Dataset tag for mrqa/squad2 input");
    cmd->add_option("--hypothesis-mode", hypothesis_mode, "rule, neural or concat");
    cmd->add_option("--premise-mode", premise_mode, "sentence, decontext or full");
    cmd->add_option("--qa", qa, "QA backend: mock, none or http:<url>");
    cmd->add_option("--convert", convert, "Converter backend");
    cmd->add_option("--decontext", decontext, "Decontextualizer backend");
    cmd->add_option("--nli", nli, "NLI backend");
    cmd->add_option("--grid", grid, "Comma-separated coverages");
    cmd->add_option("--threshold", threshold, "Accept when p_entail >= t");
    cmd->add_option("--heldout", heldout, "Held-out size for model fits");
    cmd->add_option("--error-cap", error_cap, "Errors exported per dataset");
    cmd->add_flag("--bias", bias, "Fit an intercept in the combiner");
    cmd->add_flag("--filter-nq", filter_nq, "Apply the NQ filters on ingest");
  }

  void Apply(PipelineConfig &c) const {
    if (!input.empty()) c.input = input;
    if (!input_format.empty()) c.input_format = input_format;
    if (!dataset.empty()) c.dataset = dataset;
    if (!hypothesis_mode.empty()) c.hypothesis_mode = ParseMethod(hypothesis_mode);
    if (!premise_mode.empty()) c.premise_mode = ParsePremiseMode(premise_mode);
    if (!qa.empty()) c.qa_backend = EndpointSpec::Parse(qa);
    if (!convert.empty()) c.convert_backend = EndpointSpec::Parse(convert);
    if (!decontext.empty()) c.decontext_backend = EndpointSpec::Parse(decontext);
    if (!nli.empty()) c.nli_backend = EndpointSpec::Parse(nli);
    if (!grid.empty()) c.grid = ParseGrid(grid);
    if (threshold) c.accept_threshold = threshold;
    if (heldout) c.heldout = *heldout;
    if (error_cap) c.error_cap = error_cap;
    if (bias) c.fit_bias = true;
    if (filter_nq) c.filter_nq = true;
  }
};

int Run(int argc, char **argv) {
  CLI::App app{"Answer verification with entailment models."};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--config", globals.config_path, "Pipeline config (JSON)");
  app.add_option("--seed", globals.seed, "Seed; overrides the config");
  app.add_option("--jobs", globals.jobs, "Concurrent backend calls")
      ->check(CLI::PositiveNumber);
  std::function<void()> action;

  // ingest
  std::string in_path, out_path, format = "mrqa", dataset_name;
  bool filter_nq = false;
  auto *ingest = app.add_subcommand("ingest", "Normalize a QA dataset");
  ingest->add_option("--format", format, "mrqa, squad2 or corpus")
      ->check(CLI::IsMember({"mrqa", "squad2", "corpus"}));
  ingest->add_option("--dataset", dataset_name,
                     "Dataset tag; required for mrqa input");
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--out", out_path)->required();
  ingest->add_flag("--filter-nq", filter_nq, "Drop narrative and table items");
  ingest->callback([&] {
    action = [&] {
      auto instances = LoadInstances(in_path, format, dataset_name, filter_nq);
      WriteCorpus(out_path, instances);
      std::cerr << "ingest: " << instances.size() << " instances\n";
    };
  });

  // answer
  std::string backend = "mock";
  auto *answer = app.add_subcommand("answer", "Predict answers with a QA backend");
  answer->add_option("--in", in_path, "Normalized corpus")->required();
  answer->add_option("--out", out_path)->required();
  answer->add_option("--backend", backend, "mock or http:<url>");
  answer->callback([&] {
    action = [&] {
      auto qa = MakeQaBackend(EndpointSpec::Parse(backend));
      if (!qa) throw ValidationError("answer needs a QA backend");
      auto instances = ReadCorpus(in_path);
      auto answers = OrderedParallelMap(instances, globals.jobs,
          [&](const QAInstance &i) { return GenerateAnswer(i, *qa); });
      WriteAll(out_path, answers);
    };
  });

  // convert
  std::string mode, answers_path;
  auto *convert = app.add_subcommand("convert", "Build hypotheses");
  convert->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"rule", "neural", "concat"}));
  convert->add_option("--in", in_path, "Normalized corpus")->required();
  convert->add_option("--answers", answers_path)->required();
  convert->add_option("--out", out_path)->required();
  convert->add_option("--backend", backend, "Converter for neural mode");
  convert->callback([&] {
    action = [&] {
      const HypothesisMethod method = ParseMethod(mode);
      std::unique_ptr<ConvertBackend> client;
      if (method == HypothesisMethod::kNeural)
        client = MakeConvertBackend(EndpointSpec::Parse(backend));
      auto instances = ReadCorpus(in_path);
      auto answers = AlignCandidates(instances, ReadCandidates(answers_path));
      std::vector<size_t> index(instances.size());
      for (size_t i = 0; i < index.size(); ++i) index[i] = i;
      auto hypotheses = OrderedParallelMap(index, globals.jobs, [&](size_t i) {
        return MakeHypothesis(instances[i], answers[i], method, client.get());
      });
      for (const auto &h : hypotheses)
        for (const auto &w : h.warnings)
          Warn("convert", h.source_question_id + ": " + w);
      WriteAll(out_path, hypotheses);
    };
  });

  // premise
  auto *premise = app.add_subcommand("premise", "Build premises");
  premise->add_option("--mode", mode)
      ->required()
      ->check(CLI::IsMember({"sentence", "decontext", "full"}));
  premise->add_option("--in", in_path, "Normalized corpus")->required();
  premise->add_option("--answers", answers_path)->required();
  premise->add_option("--out", out_path)->required();
  premise->add_option("--backend", backend, "Decontextualizer");
  premise->callback([&] {
    action = [&] {
      const PremiseMode pmode = ParsePremiseMode(mode);
      std::unique_ptr<DecontextBackend> client;
      if (pmode == PremiseMode::kDecontext)
        client = MakeDecontextBackend(EndpointSpec::Parse(backend));
      auto instances = ReadCorpus(in_path);
      auto answers = AlignCandidates(instances, ReadCandidates(answers_path));
      std::vector<size_t> index(instances.size());
      for (size_t i = 0; i < index.size(); ++i) index[i] = i;
      auto premises = OrderedParallelMap(index, globals.jobs, [&](size_t i) {
        return MakeCandidatePremise(instances[i], answers[i], pmode,
                                    client.get());
      });
      WriteAll(out_path, premises);
    };
  });

  // build-nli
  std::string premises_path, hypotheses_path, metric = "em";
  double f1_threshold = 0.8;
  auto *build = app.add_subcommand("build-nli", "Label QA-derived NLI pairs");
  build->add_option("--instances", in_path)->required();
  build->add_option("--answers", answers_path)->required();
  build->add_option("--premises", premises_path)->required();
  build->add_option("--hypotheses", hypotheses_path)->required();
  build->add_option("--out", out_path)->required();
  build->add_option("--metric", metric)->check(CLI::IsMember({"em", "f1"}));
  build->add_option("--f1-threshold", f1_threshold);
  build->callback([&] {
    action = [&] {
      CorrectnessConfig correctness;
      if (metric == "f1") correctness.metric = CorrectnessConfig::Metric::kTokenF1;
      correctness.f1_threshold = f1_threshold;
      auto pairs = BuildQaNli(ReadCorpus(in_path), ReadCandidates(answers_path),
                              ReadPremises(premises_path),
                              ReadHypotheses(hypotheses_path), correctness);
      WritePairs(out_path, pairs);
      int64_t entailed = 0;
      for (const auto &p : pairs) entailed += p.label == NliLabel::kEntailed;
      std::cerr << "build-nli: " << entailed << " entailed, "
                << pairs.size() - entailed << " not_entailed\n";
    };
  });

  // mix-nli
  std::string external_path, external_format = "pairs";
  auto *mix = app.add_subcommand("mix-nli", "Mix QA pairs with external NLI");
  mix->add_option("--qa", in_path, "QA-derived pairs")->required();
  mix->add_option("--external", external_path)->required();
  mix->add_option("--external-format", external_format)
      ->check(CLI::IsMember({"pairs", "mnli", "fever_nli"}));
  mix->add_option("--out", out_path)->required();
  mix->callback([&] {
    action = [&] {
      std::vector<NLIPair> external;
      if (external_format == "pairs") {
        external = ReadPairs(external_path);
      } else {
        ImportResult imported = ImportExternalNli(
            ReadFile(external_path), ParseExternalSource(external_format));
        for (const auto &issue : imported.issues)
          Warn("mix-nli", external_path + ":" + std::to_string(issue.line) +
                              ": " + issue.message);
        external = std::move(imported.pairs);
      }
      const uint64_t seed = globals.seed.value_or(0);
      WritePairs(out_path, MixWithExternal(ReadPairs(in_path), external, seed));
    };
  });

  // stats
  auto *stats = app.add_subcommand("stats", "Premise/hypothesis statistics");
  stats->add_option("--in", in_path, "NLI pairs")->required();
  stats->callback([&] {
    action = [&] {
      auto pairs = ReadPairs(in_path);
      const CorpusStats s = ComputeStats(pairs);
      json row = {{"count", s.count},
                  {"premise_len_mean", s.premise_len_mean},
                  {"hypothesis_len_mean", s.hypothesis_len_mean},
                  {"jaccard_overlap_mean", s.jaccard_overlap_mean}};
      std::cout << row.dump(2) << "\n";
    };
  });

  // score-nli
  auto *score_nli = app.add_subcommand("score-nli", "Entailment-score pairs");
  score_nli->add_option("--backend", backend, "mock or http:<url>");
  score_nli->add_option("--in", in_path, "NLI pairs")->required();
  score_nli->add_option("--out", out_path)->required();
  score_nli->callback([&] {
    action = [&] {
      auto nli = MakeNliBackend(EndpointSpec::Parse(backend));
      if (!nli) throw ValidationError("score-nli needs an NLI backend");
      auto pairs = ReadPairs(in_path);
      std::vector<std::pair<std::string, std::string>> texts;
      for (const auto &p : pairs) texts.emplace_back(p.premise, p.hypothesis);
      auto scores = ScoreBatch(texts, *nli, globals.jobs);
      std::vector<json> rows;
      for (size_t i = 0; i < scores.size(); ++i) {
        json row = ToJson(scores[i]);
        if (pairs[i].instance_id) row["instance_id"] = *pairs[i].instance_id;
        row["accepted"] = Accepts(scores[i]);
        rows.push_back(std::move(row));
      }
      WriteJsonLines(out_path, rows);
    };
  });

  // score-answers
  std::string gold_path, scores_path, records_path;
  std::optional<double> threshold;
  auto *score_answers =
      app.add_subcommand("score-answers", "EM/F1 of predictions");
  score_answers->add_option("--pred", answers_path)->required();
  score_answers->add_option("--gold", gold_path, "Normalized corpus")->required();
  score_answers->add_option("--out", out_path)->required();
  score_answers->add_option("--scores", scores_path,
                            "Entailment scores to attach");
  score_answers->add_option("--records", records_path,
                            "Also write confidence records here");
  score_answers->add_option("--threshold", threshold,
                            "Accept when p_entail >= t");
  score_answers->callback([&] {
    action = [&] {
      auto instances = ReadCorpus(gold_path);
      auto answers = AlignCandidates(instances, ReadCandidates(answers_path));
      std::map<std::string, EntailmentScore> scores;
      if (!scores_path.empty()) scores = ReadScores(scores_path);
      std::vector<json> rows;
      std::vector<ConfidenceRecord> records;
      for (size_t i = 0; i < instances.size(); ++i) {
        const MatchResult m = ScoreCandidate(instances[i], answers[i]);
        rows.push_back({{"instance_id", instances[i].id},
                        {"em", m.em},
                        {"f1", m.f1},
                        {"best_gold_index", m.best_gold_index}});
        std::optional<EntailmentScore> score;
        if (auto it = scores.find(instances[i].id); it != scores.end())
          score = it->second;
        else if (!scores_path.empty())
          throw ValidationError("no entailment score for " + instances[i].id);
        records.push_back(MakeRecord(instances[i], answers[i], score, threshold));
      }
      WriteJsonLines(out_path, rows);
      if (!records_path.empty()) WriteRecords(records_path, records);
    };
  });

  // calibrate
  std::string second_path;
  bool bias = false;
  std::optional<double> f1_target;
  auto *calibrate = app.add_subcommand("calibrate", "Fit confidence models");
  calibrate->require_subcommand(1);
  auto add_fit_flags = [&](CLI::App *cmd) {
    cmd->add_option("--records", in_path)->required();
    cmd->add_option("--out", out_path)->required();
    cmd->add_flag("--bias", bias, "Fit an intercept");
    cmd->add_option("--f1-target", f1_target,
                    "Targets are F1 >= t instead of EM");
  };
  auto fit_config = [&] {
    FitConfig fit;
    fit.fit_bias = bias;
    fit.f1_target_threshold = f1_target;
    fit.seed = globals.seed.value_or(0);
    return fit;
  };
  auto *fit_combiner = calibrate->add_subcommand("fit-combiner", "p_qa + p_nli");
  add_fit_flags(fit_combiner);
  fit_combiner->callback([&] {
    action = [&] {
      auto model = FitCombiner(ReadRecords(in_path), fit_config());
      WriteFile(out_path, ToJson(model).dump(2) + "\n");
    };
  });
  auto *fit_selective =
      calibrate->add_subcommand("fit-selective", "Seven-feature calibrator");
  add_fit_flags(fit_selective);
  fit_selective->callback([&] {
    action = [&] {
      auto model = FitCalibrator(ReadRecords(in_path), fit_config());
      WriteFile(out_path, ToJson(model).dump(2) + "\n");
    };
  });
  auto *fit_ensemble =
      calibrate->add_subcommand("fit-ensemble", "Two QA posteriors");
  add_fit_flags(fit_ensemble);
  fit_ensemble->add_option("--second", second_path,
                           "Records of the second QA model")->required();
  fit_ensemble->callback([&] {
    action = [&] {
      auto joined = JoinQaStreams(ReadRecords(in_path), ReadRecords(second_path));
      WriteFile(out_path, ToJson(FitEnsemble(joined, fit_config())).dump(2) + "\n");
    };
  });

  // evaluate
  std::string confidence = "qa", model_path, grid_text;
  auto *evaluate = app.add_subcommand("evaluate", "Coverage curves and rates");
  evaluate->require_subcommand(1);
  auto *curve = evaluate->add_subcommand("curve", "Coverage-F1 curve");
  curve->add_option("--records", in_path)->required();
  curve->add_option("--confidence", confidence)
      ->check(CLI::IsMember({"qa", "nli", "combined", "ensemble", "selective"}));
  curve->add_option("--model", model_path, "Combiner or calibrator JSON");
  curve->add_option("--second", second_path, "Second QA stream (ensemble)");
  curve->add_option("--grid", grid_text, "Comma-separated coverages");
  curve->add_option("--out", out_path, "Output table (default stdout)");
  curve->callback([&] {
    action = [&] {
      const ConfidenceSource source = ParseConfidenceSource(confidence);
      std::vector<ConfidenceRecord> records = ReadRecords(in_path);
      if (source == ConfidenceSource::kEnsemble) {
        if (second_path.empty())
          throw ValidationError("ensemble confidence needs --second");
        records = JoinQaStreams(records, ReadRecords(second_path));
      }
      std::optional<CombinerModel> combiner;
      std::optional<CalibratorModel> calibrator;
      if (source == ConfidenceSource::kCombined ||
          source == ConfidenceSource::kEnsemble ||
          source == ConfidenceSource::kSelective) {
        if (model_path.empty())
          throw ValidationError(confidence + " confidence needs --model");
        if (source == ConfidenceSource::kSelective) {
          calibrator = ReadCalibrator(model_path);
        } else {
          combiner = ReadCombiner(model_path);
        }
      }
      ConfidenceFn fn = MakeConfidenceFn(source, combiner ? &*combiner : nullptr,
                                         calibrator ? &*calibrator : nullptr);
      const std::vector<double> grid =
          grid_text.empty() ? DefaultGrid() : ParseGrid(grid_text);
      std::map<std::string, std::vector<ConfidenceRecord>> by_dataset;
      for (const auto &r : records) by_dataset[r.dataset].push_back(r);
      std::vector<std::pair<std::string, CoverageCurve>> curves;
      for (const auto &[name, recs] : by_dataset)
        curves.emplace_back(name, ComputeCoverageCurve(recs, fn, grid));
      Emit(out_path, FormatCurveTable(curves));
    };
  });
  auto *rejection = evaluate->add_subcommand("rejection",
                                             "Unanswerable rejection rates");
  rejection->add_option("--scores", scores_path)->required();
  rejection->add_option("--gold", gold_path, "Normalized corpus")->required();
  rejection->add_option("--threshold", threshold);
  rejection->callback([&] {
    action = [&] {
      auto scores = ReadScores(scores_path);
      std::vector<VerifiedAnswer> answers;
      for (const auto &i : ReadCorpus(gold_path)) {
        auto it = scores.find(i.id);
        if (it == scores.end())
          throw ValidationError("no entailment score for " + i.id);
        answers.push_back({i.answerable, it->second});
      }
      const RejectionRates r = ComputeRejectionRates(answers, threshold);
      std::cout << "reject_unanswerable\t" << Fixed(r.reject_unanswerable)
                << "\t(n=" << r.n_unanswerable << ")\n"
                << "accept_answerable\t" << Fixed(r.accept_answerable)
                << "\t(n=" << r.n_answerable << ")\n";
    };
  });

  // report
  std::vector<std::string> sheets;
  std::optional<int64_t> cap;
  std::string instances_path;
  auto *report = app.add_subcommand("report", "Error analysis");
  report->require_subcommand(1);
  auto *errors = report->add_subcommand("errors", "Export an annotation sheet");
  errors->add_option("--records", in_path, "Records with verifier decisions")
      ->required();
  errors->add_option("--out", out_path)->required();
  errors->add_option("--instances", instances_path);
  errors->add_option("--answers", answers_path);
  errors->add_option("--premises", premises_path);
  errors->add_option("--hypotheses", hypotheses_path);
  errors->add_option("--scores", scores_path);
  errors->add_option("--cap-per-dataset", cap);
  errors->callback([&] {
    action = [&] {
      auto found = DetectErrors(ReadRecords(in_path));
      std::map<std::string, SheetArtifacts> artifacts;
      if (!instances_path.empty()) {
        for (const auto &i : ReadCorpus(instances_path)) {
          SheetArtifacts &a = artifacts[i.id];
          a.question = i.question;
          a.context = i.context;
          std::vector<std::string> golds;
          for (const auto &g : i.gold_answers) golds.push_back(g.text);
          a.gold = Join(golds, " | ");
        }
      }
      if (!answers_path.empty()) {
        for (const auto &c : ReadCandidates(answers_path)) {
          artifacts[c.instance_id].answer = c.text;
          artifacts[c.instance_id].p_qa = c.p_qa;
        }
      }
      if (!premises_path.empty()) {
        for (const auto &p : ReadPremises(premises_path)) {
          artifacts[p.instance_id].premise = p.text;
          artifacts[p.instance_id].premise_info = PremiseModeName(p.mode);
        }
      }
      if (!hypotheses_path.empty()) {
        for (const auto &h : ReadHypotheses(hypotheses_path)) {
          artifacts[h.source_question_id].hypothesis = h.text;
          artifacts[h.source_question_id].hypothesis_info = MethodName(h.method);
        }
      }
      if (!scores_path.empty()) {
        for (const auto &[id, s] : ReadScores(scores_path))
          artifacts[id].p_entail = s.p_entail;
      }
      WriteFile(out_path, ExportAnnotationSheet(found, artifacts, cap));
      std::cerr << "report errors: " << found.size() << " errors\n";
    };
  });
  auto *kappa = report->add_subcommand("kappa", "Fleiss' kappa over sheets");
  kappa->add_option("--sheets", sheets, "One filled sheet per rater")
      ->required();
  kappa->callback([&] {
    action = [&] {
      std::vector<std::vector<ErrorRecord>> rated;
      for (const auto &s : sheets)
        rated.push_back(ImportAnnotationSheet(ReadFile(s)));
      const AgreementResult r = SheetAgreement(rated);
      std::cout << "kappa\t" << Fixed(r.kappa) << "\nitems\t" << r.n_items
                << "\nraters\t" << r.n_raters << "\n";
      const auto &classes = AnnotatableClasses();
      for (size_t j = 0; j < classes.size(); ++j)
        std::cout << ErrorClassName(classes[j]) << "\t"
                  << Fixed(r.per_class_proportions[j]) << "\n";
    };
  });
  auto *breakdown = report->add_subcommand("breakdown", "Class x polarity counts");
  breakdown->add_option("--sheets", sheets, "Labeled sheets")->required();
  breakdown->add_option("--out", out_path, "Output table (default stdout)");
  breakdown->callback([&] {
    action = [&] {
      std::vector<ErrorRecord> all;
      for (const auto &s : sheets) {
        auto rows = ImportAnnotationSheet(ReadFile(s));
        all.insert(all.end(), rows.begin(), rows.end());
      }
      Emit(out_path, FormatBreakdown(BreakdownTable(all)));
    };
  });

  // pipeline and ablate
  ConfigFlags flags;
  auto *pipeline = app.add_subcommand("pipeline", "Run every stage");
  pipeline->add_option("--out", out_path, "Artifact directory")->required();
  flags.Attach(pipeline);
  pipeline->callback([&] {
    action = [&] {
      PipelineConfig config = LoadConfig(globals);
      flags.Apply(config);
      PipelineResult result = RunPipeline(config, out_path, globals.jobs);
      std::cerr << "pipeline: " << result.manifest["status"].get<std::string>()
                << " (config " << result.manifest["config_hash"].get<std::string>()
                << ")\n";
    };
  });
  auto *ablate = app.add_subcommand("ablate", "Hypothesis x premise ablation");
  ablate->add_option("--out", out_path, "Artifact directory")->required();
  flags.Attach(ablate);
  ablate->callback([&] {
    action = [&] {
      PipelineConfig config = LoadConfig(globals);
      flags.Apply(config);
      AblationResult result = RunAblation(config, out_path, globals.jobs);
      std::cout << result.table;
      for (const auto &cell : result.cells)
        if (!cell.ok) throw ValidationError("ablation cell failed: " + cell.error);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const BackendError &e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace
}  // namespace qaverify

int main(int argc, char **argv) { return qaverify::Run(argc, argv); }

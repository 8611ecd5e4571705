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

#include "qaverify/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_set>

#include "qaverify/corpus.h"
#include "qaverify/nli_client.h"
#include "qaverify/report.h"
#include "qaverify/text.h"

namespace qaverify {
namespace {

namespace fs = std::filesystem;

std::string MetricName(CorrectnessConfig::Metric metric) {
  return metric == CorrectnessConfig::Metric::kExactMatch ? "em" : "f1";
}

CorrectnessConfig::Metric ParseMetric(const std::string &name) {
  const std::string n = Lowercase(name);
  if (n == "em" || n == "exact_match") return CorrectnessConfig::Metric::kExactMatch;
  if (n == "f1" || n == "token_f1") return CorrectnessConfig::Metric::kTokenF1;
  throw ValidationError("unknown correctness metric \"" + name + "\"");
}

void CheckKeys(const json &row, const std::set<std::string> &allowed,
               const std::string &where) {
  if (!row.is_object())
    throw ValidationError(where + " must be a JSON object");
  for (const auto &item : row.items()) {
    if (!allowed.count(item.key()))
      throw ValidationError("unknown " + where + " key \"" + item.key() + "\"");
  }
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string CellName(HypothesisMethod method, PremiseMode premise) {
  return std::string(method == HypothesisMethod::kConcat ? "concat"
                                                         : "converted") +
         "-" + PremiseModeName(premise);
}

// Rethrows the in-flight exception with the stage name prepended, keeping
// its category so the CLI exit code stays meaningful.
[[noreturn]] void RethrowWithStage(const std::string &stage) {
  const std::string prefix = "stage " + stage + ": ";
  try {
    throw;
  } catch (const ValidationError &e) {
    throw ValidationError(prefix + e.what());
  } catch (const BackendError &e) {
    throw BackendError(prefix + e.what(), e.retriable());
  } catch (const std::exception &e) {
    throw std::runtime_error(prefix + e.what());
  }
}

}  // namespace

bool PipelineConfig::operator==(const PipelineConfig &other) const {
  return qaverify::ToJson(*this) == qaverify::ToJson(other);
}

json ToJson(const PipelineConfig &c) {
  json row = {
      {"hypothesis_mode", MethodName(c.hypothesis_mode)},
      {"premise_mode", PremiseModeName(c.premise_mode)},
      {"backends",
       {{"qa", c.qa_backend.ToString()},
        {"convert", c.convert_backend.ToString()},
        {"decontext", c.decontext_backend.ToString()},
        {"nli", c.nli_backend.ToString()}}},
      {"seed", c.seed},
      {"grid", c.grid},
      {"input", c.input},
      {"input_format", c.input_format},
      {"dataset", c.dataset},
      {"filter_nq", c.filter_nq},
      {"correctness",
       {{"metric", MetricName(c.correctness.metric)},
        {"f1_threshold", c.correctness.f1_threshold}}},
      {"accept_threshold", nullptr},
      {"heldout", c.heldout},
      {"fit_bias", c.fit_bias},
      {"error_cap", nullptr},
  };
  if (c.accept_threshold) row["accept_threshold"] = *c.accept_threshold;
  if (c.error_cap) row["error_cap"] = *c.error_cap;
  return row;
}

PipelineConfig ConfigFromJson(const json &row) {
  CheckKeys(row,
            {"hypothesis_mode", "premise_mode", "backends", "seed", "grid",
             "input", "input_format", "dataset", "filter_nq", "correctness",
             "accept_threshold", "heldout", "fit_bias", "error_cap"},
            "config");
  PipelineConfig c;
  try {
    if (row.contains("hypothesis_mode"))
      c.hypothesis_mode = ParseMethod(row["hypothesis_mode"].get<std::string>());
    if (row.contains("premise_mode"))
      c.premise_mode = ParsePremiseMode(row["premise_mode"].get<std::string>());
    if (row.contains("backends")) {
      const json &b = row["backends"];
      CheckKeys(b, {"qa", "convert", "decontext", "nli"}, "backends");
      if (b.contains("qa"))
        c.qa_backend = EndpointSpec::Parse(b["qa"].get<std::string>());
      if (b.contains("convert"))
        c.convert_backend = EndpointSpec::Parse(b["convert"].get<std::string>());
      if (b.contains("decontext"))
        c.decontext_backend =
            EndpointSpec::Parse(b["decontext"].get<std::string>());
      if (b.contains("nli"))
        c.nli_backend = EndpointSpec::Parse(b["nli"].get<std::string>());
    }
    if (row.contains("seed")) c.seed = row["seed"].get<uint64_t>();
    if (row.contains("grid")) {
      if (row["grid"].is_string()) {
        c.grid = ParseGrid(row["grid"].get<std::string>());
      } else {
        c.grid = row["grid"].get<std::vector<double>>();
      }
    }
    if (row.contains("input")) c.input = row["input"].get<std::string>();
    if (row.contains("input_format"))
      c.input_format = row["input_format"].get<std::string>();
    if (row.contains("dataset")) c.dataset = row["dataset"].get<std::string>();
    if (row.contains("filter_nq")) c.filter_nq = row["filter_nq"].get<bool>();
    if (row.contains("correctness")) {
      const json &m = row["correctness"];
      CheckKeys(m, {"metric", "f1_threshold"}, "correctness");
      if (m.contains("metric"))
        c.correctness.metric = ParseMetric(m["metric"].get<std::string>());
      if (m.contains("f1_threshold"))
        c.correctness.f1_threshold = m["f1_threshold"].get<double>();
    }
    if (row.contains("accept_threshold") && !row["accept_threshold"].is_null())
      c.accept_threshold = row["accept_threshold"].get<double>();
    if (row.contains("heldout")) c.heldout = row["heldout"].get<int64_t>();
    if (row.contains("fit_bias")) c.fit_bias = row["fit_bias"].get<bool>();
    if (row.contains("error_cap") && !row["error_cap"].is_null())
      c.error_cap = row["error_cap"].get<int64_t>();
  } catch (const json::exception &e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

void ValidateConfig(const PipelineConfig &c) {
  using Kind = EndpointSpec::Kind;
  if (c.qa_backend.kind == Kind::kNone)
    throw ValidationError("config: a QA backend is required");
  if (c.nli_backend.kind == Kind::kNone)
    throw ValidationError("config: an NLI backend is required");
  if (c.hypothesis_mode == HypothesisMethod::kNeural &&
      c.convert_backend.kind == Kind::kNone)
    throw ValidationError("config: neural hypotheses need a convert backend");
  if (c.premise_mode == PremiseMode::kDecontext &&
      c.decontext_backend.kind == Kind::kNone)
    throw ValidationError(
        "config: decontext premises need a decontext backend");
  if (c.input.empty()) throw ValidationError("config: no input path");
  if (c.input_format != "corpus" && c.input_format != "mrqa" &&
      c.input_format != "squad2")
    throw ValidationError("config: unknown input_format \"" + c.input_format +
                          "\"");
  if (c.grid.empty()) throw ValidationError("config: empty coverage grid");
  for (double k : c.grid) {
    if (!(k > 0.0 && k <= 1.0))
      throw ValidationError("config: coverage " + std::to_string(k) +
                            " outside (0, 1]");
  }
  if (c.heldout < 0) throw ValidationError("config: negative heldout size");
  if (c.error_cap && *c.error_cap < 0)
    throw ValidationError("config: negative error_cap");
  if (c.accept_threshold &&
      !(*c.accept_threshold >= 0.0 && *c.accept_threshold <= 1.0))
    throw ValidationError("config: accept_threshold outside [0, 1]");
  if (!(c.correctness.f1_threshold > 0.0 && c.correctness.f1_threshold <= 1.0))
    throw ValidationError("config: f1_threshold outside (0, 1]");
}

std::string ConfigHash(const PipelineConfig &config) {
  return HexDigest(Fnv1a64(ToJson(config).dump()));
}

std::vector<QAInstance> LoadInstances(const std::string &path,
                                      const std::string &format,
                                      const std::string &dataset,
                                      bool filter_nq) {
  std::vector<QAInstance> instances;
  if (format == "corpus") {
    instances = ReadCorpus(path);
  } else if (format == "mrqa") {
    if (dataset.empty())
      throw ValidationError("mrqa input needs a dataset tag (e.g. NQ)");
    ParseResult parsed = ParseMrqa(ReadFile(path), ParseDataset(dataset));
    for (const auto &issue : parsed.issues) {
      Warn("corpus", path + ":" + std::to_string(issue.line) +
                         (issue.id.empty() ? "" : " (" + issue.id + ")") +
                         ": " + issue.message);
    }
    instances = std::move(parsed.instances);
  } else if (format == "squad2") {
    instances = ParseSquad(ReadFile(path), dataset.empty()
                                               ? Dataset::kSQuAD2
                                               : ParseDataset(dataset));
  } else {
    throw ValidationError("unknown input format \"" + format + "\"");
  }
  std::unordered_set<std::string> seen;
  for (const auto &instance : instances) {
    if (!seen.insert(instance.id).second)
      throw ValidationError("duplicate instance id " + instance.id);
  }
  if (!filter_nq) return instances;
  FilterResult filtered = FilterNq(instances);
  for (const auto &[id, reason] : filtered.dropped)
    Warn("corpus", "dropped " + id + " (" + DropReasonName(reason) + ")");
  return std::move(filtered.kept);
}

Hypothesis MakeHypothesis(const QAInstance &instance,
                          const AnswerCandidate &candidate,
                          HypothesisMethod method,
                          const ConvertBackend *backend) {
  if (Trim(candidate.text).empty()) {
    Hypothesis h;
    h.text = Trim(instance.question);
    h.method = method;
    h.source_question_id = instance.id;
    h.warnings.push_back("empty answer; the question is used as hypothesis");
    return h;
  }
  switch (method) {
    case HypothesisMethod::kRule:
      return ConvertRule(instance.question, candidate.text, instance.id);
    case HypothesisMethod::kConcat:
      return ConcatBaseline(instance.question, candidate.text, instance.id);
    case HypothesisMethod::kNeural:
      if (backend == nullptr)
        throw ValidationError("neural conversion needs a convert backend");
      return ConvertNeural(instance.question, candidate.text, *backend,
                           instance.id);
  }
  throw ValidationError("unknown hypothesis method");
}

Premise MakeCandidatePremise(const QAInstance &instance,
                             const AnswerCandidate &candidate,
                             PremiseMode mode,
                             const DecontextBackend *backend) {
  const auto len = static_cast<int64_t>(instance.context.size());
  int64_t start = candidate.start, end = candidate.end;
  if (start < 0 || end <= start || end > len) {
    Warn("premise", instance.id +
                        ": answer not found in the context; using the "
                        "first sentence");
    start = 0;
    end = std::min<int64_t>(1, len);
  }
  return MakePremise(instance, start, end, mode, backend);
}

MatchResult ScoreCandidate(const QAInstance &instance,
                           const AnswerCandidate &candidate) {
  std::vector<std::string> golds;
  for (const auto &g : instance.gold_answers) golds.push_back(g.text);
  return Match(candidate.text, golds);
}

ConfidenceRecord MakeRecord(const QAInstance &instance,
                            const AnswerCandidate &candidate,
                            const std::optional<EntailmentScore> &score,
                            std::optional<double> accept_threshold) {
  const MatchResult match = ScoreCandidate(instance, candidate);
  ConfidenceRecord r;
  r.instance_id = instance.id;
  r.dataset = DatasetName(instance.dataset);
  r.p_qa = candidate.p_qa;
  r.features = SelectiveFeatures(
      static_cast<int64_t>(SplitWhitespace(instance.context).size()),
      static_cast<int64_t>(SplitWhitespace(candidate.text).size()),
      candidate.top5);
  r.f1 = match.f1;
  r.em = match.em;
  r.answerable = instance.answerable;
  if (score) {
    r.p_nli = score->p_entail;
    r.accepted = Accepts(*score, accept_threshold);
  }
  ValidateRecord(r);
  return r;
}

PipelineResult RunPipeline(const PipelineConfig &config,
                           const std::string &out_dir, int jobs) {
  ValidateConfig(config);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  auto path = [&out](const char *name) { return (out / name).string(); };

  json manifest = {{"config", ToJson(config)},
                   {"config_hash", ConfigHash(config)},
                   {"seeds", {{"pipeline", config.seed}}},
                   {"backends", json::object()},
                   {"stages", json::array()},
                   {"status", "RUNNING"},
                   {"failed_stage", nullptr},
                   {"error", nullptr}};
  auto write_manifest = [&] {
    WriteFile(path("manifest.json"), manifest.dump(2) + "\n");
  };
  std::string stage = "setup";
  auto done = [&](const std::string &name, size_t count) {
    manifest["stages"].push_back({{"name", name}, {"count", count}});
  };

  PipelineResult result;
  try {
    auto qa = MakeQaBackend(config.qa_backend);
    auto nli = MakeNliBackend(config.nli_backend);
    std::unique_ptr<ConvertBackend> convert;
    std::unique_ptr<DecontextBackend> decontext;
    manifest["backends"]["qa"] = qa->id();
    manifest["backends"]["nli"] = nli->id();
    if (config.hypothesis_mode == HypothesisMethod::kNeural) {
      convert = MakeConvertBackend(config.convert_backend);
      manifest["backends"]["convert"] = convert->id();
    }
    if (config.premise_mode == PremiseMode::kDecontext) {
      decontext = MakeDecontextBackend(config.decontext_backend);
      manifest["backends"]["decontext"] = decontext->id();
    }

    stage = "ingest";
    std::vector<QAInstance> instances = LoadInstances(
        config.input, config.input_format, config.dataset, false);
    if (config.filter_nq) {
      FilterResult filtered = FilterNq(instances);
      manifest["dropped"] = filtered.dropped.size();
      instances = std::move(filtered.kept);
    }
    if (instances.empty()) throw ValidationError("no instances to process");
    WriteCorpus(path("instances.jsonl"), instances);
    done(stage, instances.size());

    stage = "answer";
    std::vector<AnswerCandidate> answers = OrderedParallelMap(
        instances, jobs,
        [&](const QAInstance &i) { return GenerateAnswer(i, *qa); });
    {
      std::vector<json> rows;
      for (const auto &a : answers) rows.push_back(ToJson(a));
      WriteJsonLines(path("answers.jsonl"), rows);
    }
    done(stage, answers.size());

    std::vector<size_t> index(instances.size());
    for (size_t i = 0; i < index.size(); ++i) index[i] = i;

    stage = "convert";
    std::vector<Hypothesis> hypotheses =
        OrderedParallelMap(index, jobs, [&](size_t i) {
          return MakeHypothesis(instances[i], answers[i],
                                config.hypothesis_mode, convert.get());
        });
    {
      std::vector<json> rows;
      for (const auto &h : hypotheses) rows.push_back(ToJson(h));
      WriteJsonLines(path("hypotheses.jsonl"), rows);
    }
    done(stage, hypotheses.size());

    stage = "premise";
    std::vector<Premise> premises =
        OrderedParallelMap(index, jobs, [&](size_t i) {
          return MakeCandidatePremise(instances[i], answers[i],
                                      config.premise_mode, decontext.get());
        });
    {
      std::vector<json> rows;
      for (const auto &p : premises) rows.push_back(ToJson(p));
      WriteJsonLines(path("premises.jsonl"), rows);
    }
    done(stage, premises.size());

    stage = "build-nli";
    std::vector<NLIPair> pairs = BuildQaNli(instances, answers, premises,
                                            hypotheses, config.correctness);
    WritePairs(path("pairs.jsonl"), pairs);
    done(stage, pairs.size());

    stage = "score-nli";
    std::vector<std::pair<std::string, std::string>> texts;
    for (const auto &p : pairs) texts.emplace_back(p.premise, p.hypothesis);
    std::vector<EntailmentScore> scores = ScoreBatch(texts, *nli, jobs);
    {
      std::vector<json> rows;
      for (size_t i = 0; i < scores.size(); ++i) {
        json row = ToJson(scores[i]);
        row["instance_id"] = instances[i].id;
        rows.push_back(std::move(row));
      }
      WriteJsonLines(path("scores.jsonl"), rows);
    }
    done(stage, scores.size());

    stage = "score-answers";
    std::vector<ConfidenceRecord> records;
    {
      std::vector<json> rows;
      for (size_t i = 0; i < instances.size(); ++i) {
        const MatchResult m = ScoreCandidate(instances[i], answers[i]);
        rows.push_back({{"instance_id", instances[i].id},
                        {"em", m.em},
                        {"f1", m.f1},
                        {"best_gold_index", m.best_gold_index}});
        records.push_back(MakeRecord(instances[i], answers[i], scores[i],
                                     config.accept_threshold));
      }
      WriteJsonLines(path("results.jsonl"), rows);
      WriteRecords(path("records.jsonl"), records);
    }
    done(stage, records.size());

    stage = "calibrate";
    // Seeded split: the held-out part fits the combiner and calibrator, the
    // rest is evaluated.
    std::mt19937_64 rng(config.seed);
    std::vector<size_t> order = index;
    DeterministicShuffle(order, rng);
    const size_t n_heldout = std::min<size_t>(
        static_cast<size_t>(config.heldout), records.size() / 2);
    std::vector<bool> is_heldout(records.size(), false);
    for (size_t i = 0; i < n_heldout; ++i) is_heldout[order[i]] = true;
    std::vector<ConfidenceRecord> heldout, eval;
    json split = {{"heldout", json::array()}};
    for (size_t i = 0; i < records.size(); ++i) {
      if (is_heldout[i]) {
        heldout.push_back(records[i]);
        split["heldout"].push_back(records[i].instance_id);
      } else {
        eval.push_back(records[i]);
      }
    }
    WriteFile(path("split.json"), split.dump(2) + "\n");
    std::optional<CombinerModel> combiner;
    std::optional<CalibratorModel> calibrator;
    if (heldout.size() >= 2) {
      FitConfig fit;
      fit.fit_bias = config.fit_bias;
      fit.seed = config.seed;
      if (config.correctness.metric == CorrectnessConfig::Metric::kTokenF1)
        fit.f1_target_threshold = config.correctness.f1_threshold;
      combiner = FitCombiner(heldout, fit);
      calibrator = FitCalibrator(heldout, fit);
      WriteFile(path("combiner.json"), ToJson(*combiner).dump(2) + "\n");
      WriteFile(path("calibrator.json"), ToJson(*calibrator).dump(2) + "\n");
    } else {
      Warn("pipeline", "fewer than 2 held-out records; skipping model fits");
    }
    manifest["heldout"] = heldout.size();
    manifest["eval"] = eval.size();
    done(stage, heldout.size());

    stage = "evaluate";
    if (eval.empty()) throw ValidationError("no records left to evaluate");
    std::map<std::string, std::vector<ConfidenceRecord>> by_dataset;
    for (const auto &r : eval) by_dataset[r.dataset].push_back(r);
    std::vector<ConfidenceSource> sources = {ConfidenceSource::kQa,
                                             ConfidenceSource::kNli};
    if (combiner) sources.push_back(ConfidenceSource::kCombined);
    if (calibrator) sources.push_back(ConfidenceSource::kSelective);
    std::string table;
    for (ConfidenceSource source : sources) {
      ConfidenceFn fn = MakeConfidenceFn(
          source, combiner ? &*combiner : nullptr,
          calibrator ? &*calibrator : nullptr);
      std::vector<std::pair<std::string, CoverageCurve>> curves;
      std::vector<CoverageCurve> plain;
      for (const auto &[name, recs] : by_dataset) {
        curves.emplace_back(name, ComputeCoverageCurve(recs, fn, config.grid));
        plain.push_back(curves.back().second);
      }
      table += "## confidence: " + ConfidenceSourceName(source) + "\n";
      table += FormatCurveTable(curves);
      if (source == ConfidenceSource::kNli)
        result.nli_curve = MacroAverage(plain);
    }
    WriteFile(path("curves.tsv"), table);

    std::vector<VerifiedAnswer> verified;
    int64_t unanswerable = 0;
    for (size_t i = 0; i < records.size(); ++i) {
      verified.push_back({records[i].answerable, scores[i]});
      unanswerable += records[i].answerable ? 0 : 1;
    }
    if (unanswerable > 0) {
      if (unanswerable == static_cast<int64_t>(records.size())) {
        Warn("pipeline", "no answerable instances; skipping rejection rates");
      } else {
        const RejectionRates rates =
            ComputeRejectionRates(verified, config.accept_threshold);
        json row = {{"reject_unanswerable", rates.reject_unanswerable},
                    {"accept_answerable", rates.accept_answerable},
                    {"n_unanswerable", rates.n_unanswerable},
                    {"n_answerable", rates.n_answerable}};
        WriteFile(path("rejection.json"), row.dump(2) + "\n");
      }
    }
    done(stage, eval.size());

    stage = "report";
    const std::vector<ErrorRecord> errors = DetectErrors(records);
    std::map<std::string, SheetArtifacts> artifacts;
    for (size_t i = 0; i < instances.size(); ++i) {
      SheetArtifacts a;
      a.question = instances[i].question;
      a.answer = answers[i].text;
      std::vector<std::string> golds;
      for (const auto &g : instances[i].gold_answers) golds.push_back(g.text);
      a.gold = Join(golds, " | ");
      a.premise = premises[i].text;
      a.premise_info = PremiseModeName(premises[i].mode);
      if (premises[i].mode == PremiseMode::kDecontext)
        a.premise_info += "/" + CategoryName(premises[i].category);
      a.hypothesis = hypotheses[i].text;
      a.hypothesis_info = MethodName(hypotheses[i].method);
      if (hypotheses[i].rule > 0)
        a.hypothesis_info += "/rule" + std::to_string(hypotheses[i].rule);
      a.context = instances[i].context;
      a.p_qa = answers[i].p_qa;
      a.p_entail = scores[i].p_entail;
      artifacts.emplace(instances[i].id, std::move(a));
    }
    WriteFile(path("errors.tsv"),
              ExportAnnotationSheet(errors, artifacts, config.error_cap));
    done(stage, errors.size());
  } catch (const std::exception &e) {
    manifest["status"] = "FAILED";
    manifest["failed_stage"] = stage;
    manifest["error"] = e.what();
    write_manifest();
    RethrowWithStage(stage);
  }
  manifest["status"] = "OK";
  write_manifest();
  result.manifest = manifest;
  return result;
}

AblationResult RunAblation(const PipelineConfig &base,
                           const std::string &out_dir, int jobs) {
  const HypothesisMethod converted =
      base.hypothesis_mode == HypothesisMethod::kConcat
          ? HypothesisMethod::kRule
          : base.hypothesis_mode;
  AblationResult result;
  for (HypothesisMethod method : {converted, HypothesisMethod::kConcat}) {
    for (PremiseMode premise : {PremiseMode::kSentence, PremiseMode::kDecontext,
                                PremiseMode::kFull}) {
      AblationCell cell;
      cell.hypothesis = method;
      cell.premise = premise;
      cell.dir = (fs::path(out_dir) / CellName(method, premise)).string();
      PipelineConfig config = base;
      config.hypothesis_mode = method;
      config.premise_mode = premise;
      try {
        cell.curve = RunPipeline(config, cell.dir, jobs).nli_curve;
        cell.ok = true;
      } catch (const std::exception &e) {
        cell.error = e.what();
        Warn("ablate", CellName(method, premise) + " failed: " + e.what());
      }
      result.cells.push_back(std::move(cell));
    }
  }

  std::vector<double> coverages;
  for (const auto &cell : result.cells) {
    if (!cell.ok) continue;
    for (const auto &p : cell.curve.points) coverages.push_back(p.coverage);
    break;
  }
  if (coverages.empty()) {
    coverages = base.grid;
    coverages.push_back(1.0);
    std::sort(coverages.begin(), coverages.end());
    coverages.erase(std::unique(coverages.begin(), coverages.end()),
                    coverages.end());
  }
  std::vector<std::string> header = {"coverage"};
  for (const auto &cell : result.cells)
    header.push_back(CellName(cell.hypothesis, cell.premise));
  std::string table = Join(header, "\t") + "\n";
  for (size_t k = 0; k < coverages.size(); ++k) {
    std::vector<std::string> line = {Fixed(coverages[k])};
    for (const auto &cell : result.cells)
      line.push_back(cell.ok ? Fixed(cell.curve.points[k].f1) : "FAILED");
    table += Join(line, "\t") + "\n";
  }
  result.table = table;
  fs::create_directories(out_dir);
  WriteFile((fs::path(out_dir) / "ablation.tsv").string(), table);
  return result;
}

}  // namespace qaverify

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

#include "qaverify/nli_dataset.h"

#include <random>
#include <unordered_map>

#include "qaverify/scoring.h"
#include "qaverify/text.h"

namespace qaverify {

std::string LabelName(NliLabel label) {
  return label == NliLabel::kEntailed ? "entailed" : "not_entailed";
}

NliLabel ParseLabel(std::string_view name) {
  if (name == "entailed") return NliLabel::kEntailed;
  if (name == "not_entailed") return NliLabel::kNotEntailed;
  throw ValidationError("unknown pair label \"" + std::string(name) + "\"");
}

std::string OriginName(PairOrigin origin) {
  switch (origin) {
    case PairOrigin::kQaDerived: return "qa_derived";
    case PairOrigin::kExternalNli: return "external_nli";
    case PairOrigin::kEval: return "eval";
  }
  return "qa_derived";
}

PairOrigin ParseOrigin(std::string_view name) {
  if (name == "qa_derived") return PairOrigin::kQaDerived;
  if (name == "external_nli") return PairOrigin::kExternalNli;
  if (name == "eval") return PairOrigin::kEval;
  throw ValidationError("unknown pair origin \"" + std::string(name) + "\"");
}

json ToJson(const NLIPair &pair) {
  return {{"premise", pair.premise},
          {"hypothesis", pair.hypothesis},
          {"label", LabelName(pair.label)},
          {"origin", OriginName(pair.origin)},
          {"instance_id", pair.instance_id ? json(*pair.instance_id) : json()},
          {"meta", pair.meta}};
}

NLIPair PairFromJson(const json &row) {
  try {
    NLIPair pair;
    pair.premise = row.at("premise").get<std::string>();
    pair.hypothesis = row.at("hypothesis").get<std::string>();
    pair.label = ParseLabel(row.at("label").get<std::string>());
    pair.origin = ParseOrigin(row.at("origin").get<std::string>());
    if (row.contains("instance_id") && row["instance_id"].is_string())
      pair.instance_id = row["instance_id"].get<std::string>();
    if (row.contains("meta"))
      pair.meta = row["meta"].get<std::map<std::string, std::string>>();
    return pair;
  } catch (const json::exception &e) {
    throw ParseError("nli pair", e.what());
  }
}

std::vector<NLIPair> ReadPairs(const std::string &path) {
  std::vector<NLIPair> pairs;
  for (const auto &row : ReadJsonLines(path)) pairs.push_back(PairFromJson(row));
  return pairs;
}

void WritePairs(const std::string &path, const std::vector<NLIPair> &pairs) {
  std::vector<json> rows;
  rows.reserve(pairs.size());
  for (const auto &p : pairs) rows.push_back(ToJson(p));
  WriteJsonLines(path, rows);
}

bool IsCorrect(std::string_view prediction,
               const std::vector<GoldAnswer> &golds,
               const CorrectnessConfig &config) {
  std::vector<std::string> texts;
  for (const auto &g : golds) texts.push_back(g.text);
  const MatchResult m = Match(prediction, texts);
  if (config.metric == CorrectnessConfig::Metric::kExactMatch) return m.em;
  return m.f1 >= config.f1_threshold;
}

namespace {

template <typename T, typename KeyFn>
std::unordered_map<std::string, const T *> IndexById(const std::vector<T> &rows,
                                                     KeyFn key) {
  std::unordered_map<std::string, const T *> index;
  for (const auto &row : rows) index.emplace(key(row), &row);
  return index;
}

}  // namespace

std::vector<NLIPair> BuildQaNli(const std::vector<QAInstance> &instances,
                                const std::vector<AnswerCandidate> &candidates,
                                const std::vector<Premise> &premises,
                                const std::vector<Hypothesis> &hypotheses,
                                const CorrectnessConfig &correctness,
                                PairOrigin origin) {
  auto by_candidate = IndexById(
      candidates, [](const AnswerCandidate &c) { return c.instance_id; });
  auto by_premise =
      IndexById(premises, [](const Premise &p) { return p.instance_id; });
  auto by_hypothesis = IndexById(
      hypotheses, [](const Hypothesis &h) { return h.source_question_id; });

  std::vector<std::string> missing;
  for (const auto &inst : instances) {
    if (!by_candidate.count(inst.id)) missing.push_back("answers:" + inst.id);
    if (!by_premise.count(inst.id)) missing.push_back("premises:" + inst.id);
    if (!by_hypothesis.count(inst.id))
      missing.push_back("hypotheses:" + inst.id);
  }
  if (!missing.empty())
    throw ValidationError("build_qa_nli join failed, missing ids: " +
                          Join(missing, ", "));

  std::vector<NLIPair> pairs;
  pairs.reserve(instances.size());
  for (const auto &inst : instances) {
    const AnswerCandidate &c = *by_candidate.at(inst.id);
    const Premise &p = *by_premise.at(inst.id);
    const Hypothesis &h = *by_hypothesis.at(inst.id);
    NLIPair pair;
    pair.premise = p.text;
    pair.hypothesis = h.text;
    pair.label = IsCorrect(c.text, inst.gold_answers, correctness)
                     ? NliLabel::kEntailed
                     : NliLabel::kNotEntailed;
    pair.origin = origin;
    pair.instance_id = inst.id;
    pair.meta = {{"dataset", DatasetName(inst.dataset)},
                 {"premise_mode", PremiseModeName(p.mode)},
                 {"hypothesis_method", MethodName(h.method)}};
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<NLIPair> MixWithExternal(const std::vector<NLIPair> &qa_pairs,
                                     const std::vector<NLIPair> &external_pairs,
                                     uint64_t seed) {
  if (external_pairs.size() < qa_pairs.size())
    throw ValidationError("mix_with_external needs at least " +
                          std::to_string(qa_pairs.size()) +
                          " external pairs, got " +
                          std::to_string(external_pairs.size()));
  std::mt19937_64 rng(seed);
  std::vector<size_t> order(external_pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Partial Fisher-Yates: the first |qa| slots become the sample.
  for (size_t i = 0; i < qa_pairs.size(); ++i) {
    size_t j = i + UniformBelow(rng, order.size() - i);
    std::swap(order[i], order[j]);
  }
  std::vector<NLIPair> mixed = qa_pairs;
  mixed.reserve(2 * qa_pairs.size());
  for (size_t i = 0; i < qa_pairs.size(); ++i) {
    NLIPair pair = external_pairs[order[i]];
    pair.origin = PairOrigin::kExternalNli;
    mixed.push_back(std::move(pair));
  }
  DeterministicShuffle(mixed, rng);
  return mixed;
}

ExternalSource ParseExternalSource(std::string_view name) {
  const std::string n = Lowercase(name);
  if (n == "mnli") return ExternalSource::kMnli;
  if (n == "fever_nli" || n == "fever-nli" || n == "fever")
    return ExternalSource::kFeverNli;
  throw ValidationError("unknown external source \"" + std::string(name) +
                        "\" (expected mnli or fever_nli)");
}

namespace {

std::string FirstString(const json &row, std::initializer_list<const char *> keys) {
  for (const char *k : keys) {
    if (row.contains(k) && row[k].is_string()) return row[k].get<std::string>();
  }
  return "";
}

}  // namespace

ImportResult ImportExternalNli(std::string_view stream, ExternalSource source) {
  ImportResult result;
  const std::string source_name =
      source == ExternalSource::kMnli ? "mnli" : "fever_nli";
  auto lines = SplitLines(stream);
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].find_first_not_of(" \t") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(lines[ln]);
    } catch (const json::exception &e) {
      result.issues.push_back({ln + 1, "", e.what()});
      continue;
    }
    NLIPair pair;
    pair.origin = PairOrigin::kExternalNli;
    pair.meta["source"] = source_name;
    std::string id = FirstString(row, {"pairID", "id", "cid", "uid"});
    if (!id.empty()) pair.meta["source_id"] = id;
    std::string label;
    if (source == ExternalSource::kMnli) {
      pair.premise = FirstString(row, {"sentence1", "premise"});
      pair.hypothesis = FirstString(row, {"sentence2", "hypothesis"});
      if (row.contains("gold_label") && row["gold_label"].is_string()) {
        label = row["gold_label"].get<std::string>();
      } else if (row.contains("label") && row["label"].is_number_integer()) {
        static const char *kNames[] = {"entailment", "neutral", "contradiction"};
        int v = row["label"].get<int>();
        label = v >= 0 && v < 3 ? kNames[v] : std::to_string(v);
      } else {
        label = FirstString(row, {"label"});
      }
    } else {
      pair.premise = FirstString(row, {"context", "premise"});
      pair.hypothesis = FirstString(row, {"query", "hypothesis", "claim"});
      label = FirstString(row, {"label", "gold_label"});
    }
    ++result.label_counts[label];
    const std::string lowered = Lowercase(label);
    bool known = true;
    if (source == ExternalSource::kMnli) {
      if (lowered == "entailment") {
        pair.label = NliLabel::kEntailed;
      } else if (lowered == "neutral" || lowered == "contradiction") {
        pair.label = NliLabel::kNotEntailed;
      } else {
        known = false;
      }
    } else {
      if (lowered == "supports") {
        pair.label = NliLabel::kEntailed;
      } else if (lowered == "refutes" || lowered == "not enough info") {
        pair.label = NliLabel::kNotEntailed;
      } else {
        known = false;
      }
    }
    if (!known) {
      result.issues.push_back({ln + 1, id, "unknown label \"" + label + "\""});
      continue;
    }
    if (pair.premise.empty() || pair.hypothesis.empty()) {
      result.issues.push_back({ln + 1, id, "missing premise or hypothesis"});
      continue;
    }
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace qaverify

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

#include "qaverify/corpus.h"

#include <set>

#include "qaverify/nli_dataset.h"
#include "qaverify/text.h"

namespace qaverify {
namespace {

const std::set<std::string, std::less<>> kWhWords = {
    "who", "what", "when", "where", "which", "why", "how", "whose", "whom"};

const std::set<std::string, std::less<>> kQuestionAuxiliaries = {
    "is",    "are", "was",   "were",   "do",  "does", "did",
    "can",   "could", "will", "would", "should", "has", "have",
    "had",   "may", "might", "must"};

const char *kTableMarkers[] = {"<table>", "<tr>", "<td>"};

std::string RequireString(const json &node, const char *key,
                          const std::string &path) {
  if (!node.is_object() || !node.contains(key))
    throw ParseError(path + "." + key, "missing required field");
  const json &value = node.at(key);
  if (!value.is_string())
    throw ParseError(path + "." + key, "expected a string");
  return value.get<std::string>();
}

const json &RequireArray(const json &node, const char *key,
                         const std::string &path) {
  if (!node.is_object() || !node.contains(key))
    throw ParseError(path + "." + key, "missing required field");
  const json &value = node.at(key);
  if (!value.is_array()) throw ParseError(path + "." + key, "expected a list");
  return value;
}

}  // namespace

std::string DatasetName(Dataset dataset) {
  switch (dataset) {
    case Dataset::kNQ: return "NQ";
    case Dataset::kTriviaQA: return "TriviaQA";
    case Dataset::kBioASQ: return "BioASQ";
    case Dataset::kSQuAD2: return "SQuAD2";
    case Dataset::kSQuADAdv: return "SQuADAdv";
    case Dataset::kOther: return "Other";
  }
  return "Other";
}

Dataset ParseDataset(std::string_view name) {
  std::string n = Lowercase(name);
  std::erase_if(n, [](char c) { return c == '-' || c == '_' || c == '.'; });
  if (n == "nq" || n == "naturalquestions") return Dataset::kNQ;
  if (n == "triviaqa" || n == "tqa") return Dataset::kTriviaQA;
  if (n == "bioasq") return Dataset::kBioASQ;
  if (n == "squad2" || n == "squad20" || n == "squadv2") return Dataset::kSQuAD2;
  if (n == "squadadv" || n == "adversarialsquad") return Dataset::kSQuADAdv;
  return Dataset::kOther;
}

std::string QAInstance::title() const {
  auto it = meta.find("title");
  return it == meta.end() ? std::string() : it->second;
}

void ValidateInstance(const QAInstance &instance) {
  if (instance.id.empty()) throw ValidationError("instance with empty id");
  if (!instance.answerable && !instance.gold_answers.empty())
    throw ValidationError(instance.id +
                          ": unanswerable instance carries gold answers");
  const auto len = static_cast<int64_t>(instance.context.size());
  for (const auto &gold : instance.gold_answers) {
    if (!gold.has_span()) continue;
    if (gold.start < 0 || gold.start >= gold.end || gold.end > len)
      throw ValidationError(instance.id + ": gold span [" +
                            std::to_string(gold.start) + ", " +
                            std::to_string(gold.end) + ") out of range");
    std::string_view slice(instance.context);
    slice = slice.substr(gold.start, gold.end - gold.start);
    if (slice != gold.text)
      throw ValidationError(instance.id + ": gold answer \"" + gold.text +
                            "\" does not match context slice \"" +
                            std::string(slice) + "\"");
  }
}

json ToJson(const QAInstance &instance) {
  json golds = json::array();
  for (const auto &g : instance.gold_answers)
    golds.push_back({{"text", g.text}, {"start", g.start}, {"end", g.end}});
  return json{{"id", instance.id},
              {"dataset", DatasetName(instance.dataset)},
              {"question", instance.question},
              {"context", instance.context},
              {"gold_answers", golds},
              {"answerable", instance.answerable},
              {"meta", instance.meta}};
}

QAInstance InstanceFromJson(const json &row) {
  QAInstance inst;
  try {
    inst.id = row.at("id").get<std::string>();
    inst.dataset = ParseDataset(row.at("dataset").get<std::string>());
    inst.question = row.at("question").get<std::string>();
    inst.context = row.at("context").get<std::string>();
    for (const auto &g : row.at("gold_answers")) {
      inst.gold_answers.push_back({g.at("text").get<std::string>(),
                                   g.value("start", int64_t{-1}),
                                   g.value("end", int64_t{-1})});
    }
    inst.answerable = row.value("answerable", !inst.gold_answers.empty());
    if (row.contains("meta"))
      inst.meta = row.at("meta").get<std::map<std::string, std::string>>();
  } catch (const json::exception &e) {
    throw ParseError(inst.id.empty() ? "record" : inst.id, e.what());
  }
  return inst;
}

std::vector<QAInstance> ReadCorpus(const std::string &path) {
  std::vector<QAInstance> instances;
  for (const auto &row : ReadJsonLines(path)) {
    instances.push_back(InstanceFromJson(row));
    ValidateInstance(instances.back());
  }
  return instances;
}

void WriteCorpus(const std::string &path,
                 const std::vector<QAInstance> &instances) {
  std::vector<json> rows;
  rows.reserve(instances.size());
  for (const auto &inst : instances) rows.push_back(ToJson(inst));
  WriteJsonLines(path, rows);
}

std::optional<std::pair<int64_t, int64_t>> FindCaseInsensitive(
    std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return std::nullopt;
  std::string h = Lowercase(haystack), n = Lowercase(needle);
  size_t pos = h.find(n);
  if (pos == std::string::npos) return std::nullopt;
  return std::make_pair(static_cast<int64_t>(pos),
                        static_cast<int64_t>(pos + n.size()));
}

ParseResult ParseMrqa(std::string_view text, Dataset dataset) {
  ParseResult result;
  std::set<std::string> seen;
  auto lines = SplitLines(text);
  for (size_t ln = 0; ln < lines.size(); ++ln) {
    const size_t line_no = ln + 1;
    if (lines[ln].find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(lines[ln]);
    } catch (const json::exception &e) {
      result.issues.push_back({line_no, "", std::string("unreadable line: ") +
                                                e.what()});
      continue;
    }
    if (record.contains("header")) continue;
    if (!record.is_object() || !record.contains("context") ||
        !record["context"].is_string() || !record.contains("qas") ||
        !record["qas"].is_array()) {
      result.issues.push_back(
          {line_no, "", "record lacks a string context or a qas list"});
      continue;
    }
    const std::string context = record["context"].get<std::string>();
    for (const auto &qa : record["qas"]) {
      QAInstance inst;
      inst.dataset = dataset;
      inst.context = context;
      try {
        inst.id = qa.at("qid").get<std::string>();
        inst.question = qa.at("question").get<std::string>();
        if (record.contains("title") && record["title"].is_string())
          inst.meta["title"] = record["title"].get<std::string>();
        if (qa.contains("meta") && qa["meta"].is_object()) {
          for (const auto &[k, v] : qa["meta"].items())
            inst.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
        if (qa.contains("detected_answers") &&
            !qa["detected_answers"].empty()) {
          for (const auto &det : qa["detected_answers"]) {
            const std::string answer = det.at("text").get<std::string>();
            const json &spans = det.value("char_spans", json::array());
            if (spans.empty()) {
              inst.gold_answers.push_back({answer, -1, -1});
              continue;
            }
            for (const auto &span : spans) {
              // MRQA spans are inclusive of the end character.
              inst.gold_answers.push_back({answer, span.at(0).get<int64_t>(),
                                           span.at(1).get<int64_t>() + 1});
            }
          }
        } else if (qa.contains("answers")) {
          for (const auto &a : qa["answers"])
            inst.gold_answers.push_back({a.get<std::string>(), -1, -1});
        }
      } catch (const json::exception &e) {
        result.issues.push_back({line_no, inst.id, e.what()});
        continue;
      }
      // Offset-less answers resolve to their first case-insensitive
      // occurrence; the recorded text becomes the context slice.
      bool ok = true;
      for (auto &gold : inst.gold_answers) {
        if (gold.has_span()) continue;
        auto found = FindCaseInsensitive(context, gold.text);
        if (!found) {
          result.issues.push_back({line_no, inst.id,
                                   "answer \"" + gold.text +
                                       "\" not found in context"});
          ok = false;
          break;
        }
        gold.start = found->first;
        gold.end = found->second;
        gold.text = context.substr(gold.start, gold.end - gold.start);
      }
      if (!ok) continue;
      inst.answerable = !inst.gold_answers.empty();
      try {
        ValidateInstance(inst);
      } catch (const ValidationError &e) {
        result.issues.push_back({line_no, inst.id, e.what()});
        continue;
      }
      if (!seen.insert(inst.id).second) {
        result.issues.push_back({line_no, inst.id, "duplicate id"});
        continue;
      }
      result.instances.push_back(std::move(inst));
    }
  }
  return result;
}

std::vector<QAInstance> ParseSquad(std::string_view document,
                                   Dataset dataset) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception &e) {
    throw ParseError("$", e.what());
  }
  std::vector<QAInstance> instances;
  std::set<std::string> seen;
  const json &data = RequireArray(doc, "data", "$");
  for (size_t a = 0; a < data.size(); ++a) {
    const std::string apath = "data[" + std::to_string(a) + "]";
    const std::string title =
        data[a].is_object() && data[a].contains("title") &&
                data[a]["title"].is_string()
            ? data[a]["title"].get<std::string>()
            : std::string();
    const json &paragraphs = RequireArray(data[a], "paragraphs", apath);
    for (size_t p = 0; p < paragraphs.size(); ++p) {
      const std::string ppath = apath + ".paragraphs[" + std::to_string(p) + "]";
      const std::string context = RequireString(paragraphs[p], "context", ppath);
      const json &qas = RequireArray(paragraphs[p], "qas", ppath);
      for (size_t q = 0; q < qas.size(); ++q) {
        const std::string qpath = ppath + ".qas[" + std::to_string(q) + "]";
        QAInstance inst;
        inst.dataset = dataset;
        inst.id = RequireString(qas[q], "id", qpath);
        inst.question = RequireString(qas[q], "question", qpath);
        inst.context = context;
        if (!title.empty()) inst.meta["title"] = title;
        const bool impossible = qas[q].value("is_impossible", false);
        if (!impossible) {
          const json &answers = RequireArray(qas[q], "answers", qpath);
          for (size_t i = 0; i < answers.size(); ++i) {
            const std::string apath2 =
                qpath + ".answers[" + std::to_string(i) + "]";
            GoldAnswer gold;
            gold.text = RequireString(answers[i], "text", apath2);
            if (!answers[i].contains("answer_start") ||
                !answers[i]["answer_start"].is_number_integer())
              throw ParseError(apath2 + ".answer_start",
                               "missing required field");
            gold.start = answers[i]["answer_start"].get<int64_t>();
            gold.end = gold.start + static_cast<int64_t>(gold.text.size());
            inst.gold_answers.push_back(std::move(gold));
          }
        }
        // plausible_answers on impossible questions are deliberately ignored.
        inst.answerable = !impossible && !inst.gold_answers.empty();
        ValidateInstance(inst);
        if (!seen.insert(inst.id).second)
          throw ParseError(qpath + ".id", "duplicate id " + inst.id);
        instances.push_back(std::move(inst));
      }
    }
  }
  return instances;
}

bool IsQuestion(std::string_view text) {
  const std::string trimmed = Trim(text);
  if (trimmed.empty()) return false;
  if (trimmed.back() == '?') return true;
  auto words = WordTokens(trimmed);
  if (words.empty()) return false;
  return kWhWords.count(words.front()) > 0 ||
         kQuestionAuxiliaries.count(words.front()) > 0;
}

bool HasTableMarkup(std::string_view context) {
  const std::string lowered = Lowercase(context);
  for (const char *marker : kTableMarkers) {
    if (lowered.find(marker) != std::string::npos) return true;
  }
  for (const auto &line : SplitLines(context)) {
    int cells = 0;
    bool separated = false;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t' || line[i] == '|') {
        if (i < line.size()) separated = true;
        if (!Trim(std::string_view(line).substr(start, i - start)).empty())
          ++cells;
        start = i + 1;
      }
    }
    if (separated && cells >= 3) return true;
  }
  return false;
}

std::string DropReasonName(DropReason reason) {
  return reason == DropReason::kNarrative ? "narrative" : "table";
}

FilterResult FilterNq(const std::vector<QAInstance> &instances) {
  FilterResult result;
  for (const auto &inst : instances) {
    if (!IsQuestion(inst.question)) {
      result.dropped.emplace_back(inst.id, DropReason::kNarrative);
    } else if (HasTableMarkup(inst.context)) {
      result.dropped.emplace_back(inst.id, DropReason::kTable);
    } else {
      result.kept.push_back(inst);
    }
  }
  return result;
}

CorpusStats ComputeStats(std::span<const NLIPair> pairs) {
  if (pairs.empty())
    throw ValidationError("compute_stats: empty corpus, nothing to average");
  std::vector<double> premise_lens, hypothesis_lens, overlaps;
  for (const auto &pair : pairs) {
    premise_lens.push_back(
        static_cast<double>(ContentWords(pair.premise).size()));
    hypothesis_lens.push_back(
        static_cast<double>(ContentWords(pair.hypothesis).size()));
    overlaps.push_back(
        Jaccard(ContentWordSet(pair.premise), ContentWordSet(pair.hypothesis)));
  }
  const double n = static_cast<double>(pairs.size());
  CorpusStats stats;
  stats.premise_len_mean = ExactSum(premise_lens) / n;
  stats.hypothesis_len_mean = ExactSum(hypothesis_lens) / n;
  stats.jaccard_overlap_mean = ExactSum(overlaps) / n;
  stats.count = static_cast<int64_t>(pairs.size());
  return stats;
}

}  // namespace qaverify

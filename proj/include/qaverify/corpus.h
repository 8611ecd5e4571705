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

#ifndef QAVERIFY_CORPUS_H_
#define QAVERIFY_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qaverify/common.h"

namespace qaverify {

struct NLIPair;

enum class Dataset { kNQ, kTriviaQA, kBioASQ, kSQuAD2, kSQuADAdv, kOther };

std::string DatasetName(Dataset dataset);
// Accepts the canonical names case-insensitively plus a few common aliases
// ("squad2.0", "tqa", "squad-adv"). Unknown names map to kOther.
Dataset ParseDataset(std::string_view name);

struct GoldAnswer {
  std::string text;
  // Character offsets into the context, end exclusive; -1 when unknown.
  int64_t start = -1;
  int64_t end = -1;

  bool has_span() const { return start >= 0 && end >= 0; }
  bool operator==(const GoldAnswer &) const = default;
};

struct QAInstance {
  std::string id;
  Dataset dataset = Dataset::kOther;
  std::string question;
  std::string context;
  std::vector<GoldAnswer> gold_answers;
  bool answerable = true;
  std::map<std::string, std::string> meta;

  std::string title() const;
  bool operator==(const QAInstance &) const = default;
};

// Throws ValidationError naming the id when an invariant does not hold.
void ValidateInstance(const QAInstance &instance);

json ToJson(const QAInstance &instance);
QAInstance InstanceFromJson(const json &row);

std::vector<QAInstance> ReadCorpus(const std::string &path);
void WriteCorpus(const std::string &path,
                 const std::vector<QAInstance> &instances);

// First case-insensitive occurrence of `needle` in `haystack`.
std::optional<std::pair<int64_t, int64_t>> FindCaseInsensitive(
    std::string_view haystack, std::string_view needle);

struct ParseIssue {
  size_t line = 0;  // 1-based; 0 when not line-oriented
  std::string id;   // empty when the record never got far enough to have one
  std::string message;
};

struct ParseResult {
  std::vector<QAInstance> instances;
  std::vector<ParseIssue> issues;
};

// MRQA line-delimited records. Header lines are skipped. Bad lines and
// instances failing span validation are reported in `issues`; parsing
// continues with the next line.
ParseResult ParseMrqa(std::string_view text, Dataset dataset);

// SQuAD v2 hierarchical document. Throws ParseError with a JSON path
// (e.g. "data[0].paragraphs[1].qas[2].question") on a missing field.
std::vector<QAInstance> ParseSquad(std::string_view document,
                                   Dataset dataset = Dataset::kSQuAD2);

bool IsQuestion(std::string_view text);
bool HasTableMarkup(std::string_view context);

enum class DropReason { kNarrative, kTable };
std::string DropReasonName(DropReason reason);

struct FilterResult {
  std::vector<QAInstance> kept;
  std::vector<std::pair<std::string, DropReason>> dropped;
};

// Drops narrative-statement questions and table-based contexts. Narrative
// takes precedence when both apply.
FilterResult FilterNq(const std::vector<QAInstance> &instances);

struct CorpusStats {
  double premise_len_mean = 0.0;
  double hypothesis_len_mean = 0.0;
  double jaccard_overlap_mean = 0.0;
  int64_t count = 0;
};

// Word counts exclude stopwords; overlap is the Jaccard similarity of the
// lowercased content-word sets. Throws ValidationError on empty input.
CorpusStats ComputeStats(std::span<const NLIPair> pairs);

}  // namespace qaverify

#endif  // QAVERIFY_CORPUS_H_

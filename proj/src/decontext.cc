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

#include "qaverify/decontext.h"

#include <algorithm>
#include <cctype>

#include "qaverify/text.h"

namespace qaverify {
namespace {

// Lowercase, without the final period. Sorted.
const std::vector<std::string_view> kAbbreviations = {
    "a.m", "adm", "al", "approx", "apr", "aug", "ave", "b.a",
    "b.c", "blvd", "bros", "ca", "capt", "cf", "cmdr", "co",
    "col", "corp", "dec", "dept", "dr", "e.g", "est", "etc",
    "feb", "fig", "ft", "gen", "gov", "hon", "i.e", "inc",
    "jan", "jr", "jul", "jun", "lt", "ltd", "m.a", "mar",
    "messrs", "mme", "mr", "mrs", "ms", "mt", "nov", "oct",
    "p.m", "ph.d", "pp", "prof", "rep", "rev", "sen", "sep",
    "sept", "sgt", "sr", "st", "u.k", "u.s", "vol", "vs",
};

bool IsClosing(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// The word ending right before position `dot` (exclusive), lowercased and
// stripped of leading punctuation.
std::string WordBefore(std::string_view text, size_t dot) {
  size_t b = dot;
  while (b > 0 && !IsSpace(text[b - 1])) --b;
  while (b < dot && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
  return Lowercase(text.substr(b, dot - b));
}

}  // namespace

const std::vector<std::string_view> &Abbreviations() { return kAbbreviations; }

std::vector<SentenceSpan> SplitSentences(std::string_view context) {
  std::vector<SentenceSpan> sentences;
  const size_t n = context.size();
  size_t start = 0;
  auto emit = [&](size_t end) {
    size_t b = start;
    while (b < end && IsSpace(context[b])) ++b;
    size_t e = end;
    while (e > b && IsSpace(context[e - 1])) --e;
    if (e > b)
      sentences.push_back({std::string(context.substr(b, e - b)),
                           static_cast<int64_t>(b), static_cast<int64_t>(e)});
    start = end;
  };
  size_t i = 0;
  while (i < n) {
    const char c = context[i];
    if (c != '.' && c != '?' && c != '!') {
      ++i;
      continue;
    }
    const size_t first_terminal = i;
    while (i < n && (context[i] == '.' || context[i] == '?' || context[i] == '!'))
      ++i;
    while (i < n && IsClosing(context[i])) ++i;
    if (i < n && !IsSpace(context[i])) continue;
    // A lone period after an abbreviation does not end the sentence.
    if (c == '.' && i - first_terminal == 1 &&
        std::binary_search(kAbbreviations.begin(), kAbbreviations.end(),
                           WordBefore(context, first_terminal)))
      continue;
    emit(i);
  }
  emit(n);
  return sentences;
}

SentenceLocation LocateAnswerSentence(std::string_view context, int64_t start,
                                      int64_t end) {
  const auto len = static_cast<int64_t>(context.size());
  if (start < 0 || start >= end || end > len)
    throw ValidationError("answer span [" + std::to_string(start) + ", " +
                          std::to_string(end) + ") out of range for context of "
                          "length " + std::to_string(len));
  const auto sentences = SplitSentences(context);
  SentenceLocation loc;
  loc.index = static_cast<int>(sentences.size()) - 1;
  for (size_t i = 0; i < sentences.size(); ++i) {
    // A start inside inter-sentence whitespace belongs to the next sentence.
    if (start < sentences[i].end) {
      loc.index = static_cast<int>(i);
      break;
    }
  }
  loc.crosses_boundary = end > sentences[loc.index].end;
  return loc;
}

std::string PremiseModeName(PremiseMode mode) {
  switch (mode) {
    case PremiseMode::kSentence: return "sentence";
    case PremiseMode::kDecontext: return "decontext";
    case PremiseMode::kFull: return "full";
  }
  return "sentence";
}

PremiseMode ParsePremiseMode(std::string_view name) {
  const std::string n = Lowercase(name);
  if (n == "sentence") return PremiseMode::kSentence;
  if (n == "decontext" || n == "decontextualized") return PremiseMode::kDecontext;
  if (n == "full" || n == "full-context") return PremiseMode::kFull;
  throw ValidationError("unknown premise mode \"" + std::string(name) +
                        "\" (expected sentence, decontext or full)");
}

json ToJson(const Premise &p) {
  return {{"instance_id", p.instance_id},
          {"text", p.text},
          {"mode", PremiseModeName(p.mode)},
          {"sentence_index", p.sentence_index},
          {"category", CategoryName(p.category)},
          {"crosses_boundary", p.crosses_boundary},
          {"backend_id", p.backend_id}};
}

Premise PremiseFromJson(const json &row) {
  try {
    Premise p;
    p.instance_id = row.at("instance_id").get<std::string>();
    p.text = row.at("text").get<std::string>();
    p.mode = ParsePremiseMode(row.at("mode").get<std::string>());
    p.sentence_index = row.value("sentence_index", -1);
    p.category = ParseCategory(row.value("category", "none"));
    p.crosses_boundary = row.value("crosses_boundary", false);
    p.backend_id = row.value("backend_id", "");
    return p;
  } catch (const json::exception &e) {
    throw ParseError("premise", e.what());
  }
}

Premise MakePremise(const QAInstance &instance, int64_t answer_start,
                    int64_t answer_end, PremiseMode mode,
                    const DecontextBackend *backend) {
  if (mode == PremiseMode::kDecontext && backend == nullptr)
    throw ValidationError("decontext premise mode requires a backend");
  const SentenceLocation loc =
      LocateAnswerSentence(instance.context, answer_start, answer_end);
  Premise premise;
  premise.instance_id = instance.id;
  premise.mode = mode;
  premise.crosses_boundary = loc.crosses_boundary;
  if (mode == PremiseMode::kFull) {
    premise.text = instance.context;
    return premise;
  }
  const auto sentences = SplitSentences(instance.context);
  premise.sentence_index = loc.index;
  premise.text = sentences[loc.index].text;
  if (mode == PremiseMode::kSentence) return premise;

  DecontextRequest request;
  request.title = instance.title();
  request.target_index = loc.index;
  for (const auto &s : sentences) request.sentences.push_back(s.text);
  DecontextResponse response = backend->Decontextualize(request);
  premise.backend_id = backend->id();
  const std::string rewritten = Trim(response.text);
  if (response.category == DecontextCategory::kInfeasible || rewritten.empty()) {
    premise.category = DecontextCategory::kInfeasible;
  } else if (response.category == DecontextCategory::kUnnecessary) {
    premise.category = DecontextCategory::kUnnecessary;
  } else {
    premise.category = DecontextCategory::kDone;
    premise.text = rewritten;
  }
  return premise;
}

}  // namespace qaverify

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

#ifndef QAVERIFY_DECONTEXT_H_
#define QAVERIFY_DECONTEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qaverify/backend.h"
#include "qaverify/corpus.h"

namespace qaverify {

struct SentenceSpan {
  std::string text;
  int64_t start = 0;  // char offsets into the context, end exclusive
  int64_t end = 0;
};

// Rule-based splitting at . ? ! (plus trailing quotes/brackets) followed by
// whitespace or end of text. A period after a listed abbreviation is not a
// boundary. Spans are sorted, disjoint and cover every non-space character.
std::vector<SentenceSpan> SplitSentences(std::string_view context);

const std::vector<std::string_view> &Abbreviations();

struct SentenceLocation {
  int index = 0;
  // The answer runs past the end of the chosen sentence.
  bool crosses_boundary = false;
};

// Index of the sentence containing `start`. Throws ValidationError on an
// out-of-range span.
SentenceLocation LocateAnswerSentence(std::string_view context, int64_t start,
                                      int64_t end);

enum class PremiseMode { kSentence, kDecontext, kFull };
std::string PremiseModeName(PremiseMode mode);
PremiseMode ParsePremiseMode(std::string_view name);

struct Premise {
  std::string instance_id;
  std::string text;
  PremiseMode mode = PremiseMode::kSentence;
  int sentence_index = -1;  // -1 for full context
  DecontextCategory category = DecontextCategory::kNone;
  bool crosses_boundary = false;
  std::string backend_id;

  bool operator==(const Premise &) const = default;
};

json ToJson(const Premise &premise);
Premise PremiseFromJson(const json &row);

// sentence: the raw answer sentence; full: the whole context; decontext: the
// backend rewrite, falling back to the raw sentence (category infeasible)
// when the backend reports infeasible or returns nothing. "unnecessary"
// keeps the raw sentence. The decontext mode requires a backend.
Premise MakePremise(const QAInstance &instance, int64_t answer_start,
                    int64_t answer_end, PremiseMode mode,
                    const DecontextBackend *backend);

}  // namespace qaverify

#endif  // QAVERIFY_DECONTEXT_H_

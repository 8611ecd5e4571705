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

#ifndef QAVERIFY_QCONVERT_H_
#define QAVERIFY_QCONVERT_H_

#include <string>
#include <string_view>
#include <vector>

#include "qaverify/backend.h"
#include "qaverify/common.h"

namespace qaverify {

enum class HypothesisMethod { kRule, kNeural, kConcat };
std::string MethodName(HypothesisMethod method);
HypothesisMethod ParseMethod(std::string_view name);

struct Hypothesis {
  std::string text;
  HypothesisMethod method = HypothesisMethod::kRule;
  std::string source_question_id;
  // Which row of the rule table fired (1-5); 0 for non-rule methods.
  int rule = 0;
  // Set when a neural conversion came back empty and the rule path was used.
  bool fallback = false;
  std::string backend_id;
  std::vector<std::string> warnings;

  bool operator==(const Hypothesis &) const = default;
};

json ToJson(const Hypothesis &hypothesis);
Hypothesis HypothesisFromJson(const json &row);

// Ordered rule table:
//   1. who/what/which/where/when + verb   -> answer replaces the wh-word
//   2. how many/much/old/long + phrase    -> answer replaces the wh-phrase
//   3. auxiliary-fronted (wh + do-support, or a leading auxiliary)
//                                          -> de-front; answer at the wh-slot,
//                                             else appended as " \u2014 <answer>"
//   4. ends in copula + '?'               -> "... <copula> <answer>."
//   5. anything else                      -> "<question>, <answer>."
// No truecasing or re-inflection. Answer-type mismatches ("how old" with a
// non-numeric answer) are reported as warnings only.
Hypothesis ConvertRule(std::string_view question, std::string_view answer,
                       std::string_view question_id = "");

// Generated by the backend, trimmed, with a final period added when missing.
// An empty generation falls back to ConvertRule and sets `fallback`.
// Transport failures propagate as BackendError.
Hypothesis ConvertNeural(std::string_view question, std::string_view answer,
                         const ConvertBackend &backend,
                         std::string_view question_id = "");

// question + " " + answer.
Hypothesis ConcatBaseline(std::string_view question, std::string_view answer,
                          std::string_view question_id = "");

}  // namespace qaverify

#endif  // QAVERIFY_QCONVERT_H_

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

#ifndef QAVERIFY_SCORING_H_
#define QAVERIFY_SCORING_H_

#include <string>
#include <string_view>
#include <vector>

namespace qaverify {

// SQuAD answer normalization: lowercase, drop ASCII punctuation, drop the
// articles a/an/the as whole tokens, collapse whitespace.
std::string NormalizeAnswer(std::string_view text);
std::vector<std::string> NormalizedTokens(std::string_view text);

bool ExactMatch(std::string_view prediction, std::string_view gold);

// Token-level F1 over normalized token multisets. Both empty scores 1,
// exactly one empty scores 0.
double TokenF1(std::string_view prediction, std::string_view gold);

struct MatchResult {
  bool em = false;
  double f1 = 0.0;
  int best_gold_index = -1;
};

// Max EM / max F1 over the golds; best_gold_index is the argmax of F1 with
// ties going to the lowest index. With no golds (unanswerable) the only
// correct prediction is the empty one.
MatchResult Match(std::string_view prediction,
                  const std::vector<std::string> &golds);

}  // namespace qaverify

#endif  // QAVERIFY_SCORING_H_

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

#include "qaverify/scoring.h"

#include <cctype>
#include <map>

#include "qaverify/text.h"

namespace qaverify {

std::string NormalizeAnswer(std::string_view text) {
  std::string no_punct;
  no_punct.reserve(text.size());
  for (char c : Lowercase(text)) {
    if (!std::ispunct(static_cast<unsigned char>(c))) no_punct += c;
  }
  std::vector<std::string> kept;
  for (auto &token : SplitWhitespace(no_punct)) {
    if (token == "a" || token == "an" || token == "the") continue;
    kept.push_back(std::move(token));
  }
  return Join(kept, " ");
}

std::vector<std::string> NormalizedTokens(std::string_view text) {
  return SplitWhitespace(NormalizeAnswer(text));
}

bool ExactMatch(std::string_view prediction, std::string_view gold) {
  return NormalizeAnswer(prediction) == NormalizeAnswer(gold);
}

double TokenF1(std::string_view prediction, std::string_view gold) {
  const auto pred_tokens = NormalizedTokens(prediction);
  const auto gold_tokens = NormalizedTokens(gold);
  if (pred_tokens.empty() || gold_tokens.empty())
    return pred_tokens == gold_tokens ? 1.0 : 0.0;
  std::map<std::string, int> gold_counts;
  for (const auto &t : gold_tokens) ++gold_counts[t];
  int common = 0;
  for (const auto &t : pred_tokens) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision =
      static_cast<double>(common) / static_cast<double>(pred_tokens.size());
  const double recall =
      static_cast<double>(common) / static_cast<double>(gold_tokens.size());
  return (2.0 * precision * recall) / (precision + recall);
}

MatchResult Match(std::string_view prediction,
                  const std::vector<std::string> &golds) {
  MatchResult result;
  if (golds.empty()) {
    result.em = NormalizeAnswer(prediction).empty();
    result.f1 = result.em ? 1.0 : 0.0;
    return result;
  }
  for (size_t i = 0; i < golds.size(); ++i) {
    const double f1 = TokenF1(prediction, golds[i]);
    if (result.best_gold_index < 0 || f1 > result.f1) {
      result.f1 = f1;
      result.best_gold_index = static_cast<int>(i);
    }
    result.em = result.em || ExactMatch(prediction, golds[i]);
  }
  return result;
}

}  // namespace qaverify

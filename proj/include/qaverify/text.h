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

#ifndef QAVERIFY_TEXT_H_
#define QAVERIFY_TEXT_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace qaverify {

// ASCII lowercasing; bytes >= 0x80 pass through untouched.
std::string Lowercase(std::string_view text);
std::string Trim(std::string_view text);
bool StartsWith(std::string_view text, std::string_view prefix);
bool EndsWith(std::string_view text, std::string_view suffix);

// Whitespace-delimited tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Lowercased maximal runs of alphanumeric characters (plus UTF-8 bytes).
std::vector<std::string> WordTokens(std::string_view text);

// The fixed English stopword list used for corpus statistics and the mock
// entailment backend. Changing it changes every reported statistic.
bool IsStopword(std::string_view lowered_word);
const std::vector<std::string_view> &Stopwords();

// WordTokens minus stopwords, in text order (duplicates kept).
std::vector<std::string> ContentWords(std::string_view text);
std::set<std::string> ContentWordSet(std::string_view text);

// |a ∩ b| / |a ∪ b|. Two empty sets are identical and score 1.
double Jaccard(const std::set<std::string> &a, const std::set<std::string> &b);

}  // namespace qaverify

#endif  // QAVERIFY_TEXT_H_

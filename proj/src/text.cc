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

#include "qaverify/text.h"

#include <algorithm>
#include <cctype>

namespace qaverify {
namespace {

// 150 entries, sorted.
const std::vector<std::string_view> kStopwords = {
    "a", "about", "above", "after", "again", "against",
    "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been",
    "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does",
    "doing", "down", "during", "each", "either", "else",
    "ever", "few", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how",
    "however", "i", "if", "in", "into", "is",
    "it", "its", "itself", "just", "may", "me",
    "might", "more", "most", "must", "my", "myself",
    "neither", "no", "nor", "not", "now", "of",
    "off", "often", "on", "once", "only", "or",
    "other", "ought", "our", "ours", "ourselves", "out",
    "over", "own", "per", "quite", "rather", "s",
    "same", "shall", "she", "should", "so", "some",
    "such", "t", "than", "that", "the", "their",
    "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "thus", "to",
    "too", "under", "until", "up", "upon", "us",
    "very", "was", "we", "were", "what", "when",
    "where", "whether", "which", "while", "who", "whom",
    "whose", "why", "will", "with", "within", "would",
    "yet", "you", "your", "yours", "yourself", "yourselves",
};

bool IsWordByte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::string Lowercase(std::string_view text) {
  std::string out(text);
  for (auto &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Trim(std::string_view text) {
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

bool StartsWith(std::string_view text, std::string_view prefix) {
  return text.substr(0, prefix.size()) == prefix;
}

bool EndsWith(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.substr(text.size() - suffix.size()) == suffix;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    size_t start = i;
    while (i < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> WordTokens(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !IsWordByte(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && IsWordByte(text[i])) ++i;
    if (i > start) words.push_back(Lowercase(text.substr(start, i - start)));
  }
  return words;
}

bool IsStopword(std::string_view lowered_word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(),
                            lowered_word);
}

const std::vector<std::string_view> &Stopwords() { return kStopwords; }

std::vector<std::string> ContentWords(std::string_view text) {
  std::vector<std::string> words = WordTokens(text);
  std::erase_if(words, [](const std::string &w) { return IsStopword(w); });
  return words;
}

std::set<std::string> ContentWordSet(std::string_view text) {
  auto words = ContentWords(text);
  return {words.begin(), words.end()};
}

double Jaccard(const std::set<std::string> &a,
               const std::set<std::string> &b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t common = 0;
  for (const auto &w : a) common += b.count(w);
  size_t uni = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace qaverify

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

#include "qaverify/qconvert.h"

#include <cctype>
#include <set>

#include "qaverify/text.h"

namespace qaverify {
namespace {

using WordSet = std::set<std::string, std::less<>>;

const WordSet kReplaceableWh = {"who", "what", "which", "where", "when"};
const WordSet kAllWh = {"who", "what",  "which", "where", "when",
                        "why", "whom",  "whose", "how"};
const WordSet kDoSupport = {"do", "does", "did"};
const WordSet kCopulas = {"is", "are", "was", "were"};
const WordSet kAuxiliaries = {"is",     "are",   "was",  "were", "do",
                              "does",   "did",   "can",  "could", "will",
                              "would",  "should", "has", "have", "had",
                              "may",    "might", "must", "shall"};
const WordSet kHowQuantifiers = {"many", "much", "old", "long"};
const WordSet kSubjectBoundaries = {
    "the",   "a",    "an",   "this", "that", "these", "those", "his",
    "her",   "its",  "their", "my",  "our",  "your",  "in",    "on",
    "at",    "of",   "to",   "for",  "from", "with",  "by",    "about",
    "into",  "after", "before", "during", "over", "under", "than"};
const WordSet kIrregularVerbs = {
    "be",     "became", "become", "began",  "begin",  "beat",   "bought",
    "brought", "built", "caught", "chose",  "came",   "come",   "drew",
    "drove",  "fell",   "fought", "found",  "flew",   "gave",   "give",
    "got",    "get",    "go",     "goes",   "went",   "grew",   "held",
    "hold",   "kept",   "knew",   "know",   "led",    "lead",   "left",
    "lost",   "made",   "make",   "meant",  "met",    "paid",   "play",
    "put",    "ran",    "run",    "rose",   "said",   "sang",   "sing",
    "saw",    "see",    "sent",   "set",    "shot",   "sold",   "spoke",
    "stood",  "struck", "swam",   "take",   "took",   "taught", "told",
    "threw",  "thought", "wore",  "won",    "win",    "wrote",  "write",
    "live",   "lives",  "own",    "owns",   "sank",   "sung",   "hit",
    "invent", "discover", "created", "killed", "die",  "died"};

std::string Bare(std::string_view token) {
  size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1]))) --e;
  return Lowercase(token.substr(b, e - b));
}

bool IsVerbLike(const std::string &word, const std::string &wh) {
  if (kAuxiliaries.count(word) && !kDoSupport.count(word)) return true;
  if (kIrregularVerbs.count(word)) return true;
  if (word.size() > 3 && EndsWith(word, "ed")) return true;
  // Third-person -s is too ambiguous after "which", where a plural noun is
  // the usual continuation.
  if (wh != "which" && word.size() > 3 && EndsWith(word, "s") &&
      !EndsWith(word, "ss") && !EndsWith(word, "us") && !EndsWith(word, "is"))
    return true;
  return false;
}

bool HasDigit(std::string_view text) {
  for (char c : text)
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
  return false;
}

bool LooksNumeric(std::string_view answer) {
  static const WordSet kNumberWords = {
      "one",   "two",     "three",    "four",    "five",   "six",
      "seven", "eight",   "nine",     "ten",     "eleven", "twelve",
      "twenty", "thirty", "forty",    "fifty",   "hundred", "thousand",
      "million", "billion", "dozen",  "several", "few",    "many"};
  if (HasDigit(answer)) return true;
  for (const auto &w : WordTokens(answer))
    if (kNumberWords.count(w)) return true;
  return false;
}

std::string Tail(const std::vector<std::string> &tokens, size_t from) {
  if (from >= tokens.size()) return "";
  return Join({tokens.begin() + static_cast<long>(from), tokens.end()}, " ");
}

std::string JoinNonEmpty(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto &p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

// Moves a fronted auxiliary behind the subject, taken to end at the first
// determiner, preposition, known verb form or -ing/-ed word after position
// 1. Without such a word the last token is read as the main verb.
std::string DefrontAuxiliary(const std::vector<std::string> &tokens,
                             const std::vector<std::string> &bare) {
  const std::string &aux = tokens[0];
  if (kDoSupport.count(bare[0])) return Tail(tokens, 1);
  size_t subject_end = tokens.size() > 2 ? tokens.size() - 1 : tokens.size();
  for (size_t i = 2; i < tokens.size(); ++i) {
    const std::string &w = bare[i];
    if (kSubjectBoundaries.count(w) || kIrregularVerbs.count(w) ||
        (w.size() > 4 && (EndsWith(w, "ing") || EndsWith(w, "ed")))) {
      subject_end = i;
      break;
    }
  }
  std::vector<std::string> out(tokens.begin() + 1,
                               tokens.begin() + static_cast<long>(subject_end));
  out.push_back(aux);
  out.insert(out.end(), tokens.begin() + static_cast<long>(subject_end),
             tokens.end());
  return Join(out, " ");
}

void CheckAnswerType(const std::vector<std::string> &bare,
                     std::string_view answer, Hypothesis &hypothesis) {
  if (bare.empty()) return;
  std::string warning;
  if (bare[0] == "how" && bare.size() > 1 && kHowQuantifiers.count(bare[1]) &&
      !LooksNumeric(answer)) {
    warning = "\"how " + bare[1] + "\" question with non-numeric answer \"" +
              std::string(answer) + "\"";
  } else if ((bare[0] == "who" || bare[0] == "whom") && HasDigit(answer) &&
             WordTokens(answer).size() == 1) {
    warning = "\"who\" question with numeric answer \"" +
              std::string(answer) + "\"";
  }
  if (warning.empty()) return;
  hypothesis.warnings.push_back(warning);
  Warn("qconvert", (hypothesis.source_question_id.empty()
                        ? std::string()
                        : hypothesis.source_question_id + ": ") +
                       warning);
}

void RequireNonEmpty(std::string_view question, std::string_view answer) {
  if (Trim(question).empty())
    throw ValidationError("question conversion needs a nonempty question");
  if (Trim(answer).empty())
    throw ValidationError("question conversion needs a nonempty answer");
}

}  // namespace

std::string MethodName(HypothesisMethod method) {
  switch (method) {
    case HypothesisMethod::kRule: return "rule";
    case HypothesisMethod::kNeural: return "neural";
    case HypothesisMethod::kConcat: return "concat";
  }
  return "rule";
}

HypothesisMethod ParseMethod(std::string_view name) {
  const std::string n = Lowercase(name);
  if (n == "rule") return HypothesisMethod::kRule;
  if (n == "neural") return HypothesisMethod::kNeural;
  if (n == "concat" || n == "original") return HypothesisMethod::kConcat;
  throw ValidationError("unknown hypothesis mode \"" + std::string(name) +
                        "\" (expected rule, neural or concat)");
}

json ToJson(const Hypothesis &h) {
  json row = {{"instance_id", h.source_question_id},
              {"text", h.text},
              {"method", MethodName(h.method)},
              {"rule", h.rule},
              {"fallback", h.fallback},
              {"backend_id", h.backend_id},
              {"warnings", h.warnings}};
  return row;
}

Hypothesis HypothesisFromJson(const json &row) {
  try {
    Hypothesis h;
    h.source_question_id = row.at("instance_id").get<std::string>();
    h.text = row.at("text").get<std::string>();
    h.method = ParseMethod(row.at("method").get<std::string>());
    h.rule = row.value("rule", 0);
    h.fallback = row.value("fallback", false);
    h.backend_id = row.value("backend_id", "");
    h.warnings = row.value("warnings", std::vector<std::string>{});
    return h;
  } catch (const json::exception &e) {
    throw ParseError("hypothesis", e.what());
  }
}

Hypothesis ConvertRule(std::string_view question, std::string_view answer,
                       std::string_view question_id) {
  RequireNonEmpty(question, answer);
  Hypothesis h;
  h.method = HypothesisMethod::kRule;
  h.source_question_id = std::string(question_id);
  const std::string a(answer);

  std::string trimmed = Trim(question);
  const bool question_mark = !trimmed.empty() && trimmed.back() == '?';
  while (!trimmed.empty() &&
         (trimmed.back() == '?' ||
          std::isspace(static_cast<unsigned char>(trimmed.back()))))
    trimmed.pop_back();
  std::vector<std::string> tokens = SplitWhitespace(trimmed);
  std::vector<std::string> bare;
  for (const auto &t : tokens) bare.push_back(Bare(t));
  CheckAnswerType(bare, answer, h);

  const size_t n = tokens.size();
  const std::string first = n > 0 ? bare[0] : "";
  const std::string second = n > 1 ? bare[1] : "";

  // 1. wh-word followed by a verb.
  if (n > 1 && kReplaceableWh.count(first) && !kDoSupport.count(second) &&
      IsVerbLike(second, first)) {
    h.rule = 1;
    h.text = JoinNonEmpty({a, Tail(tokens, 1)});
    return h;
  }

  // 2. how many / how much / how old / how long.
  if (n > 1 && first == "how" && kHowQuantifiers.count(second)) {
    h.rule = 2;
    // A plural noun usually follows the quantifier, so -s is not taken as a
    // verb ending here (same reading as after "which").
    size_t j = 2;
    while (j < n && !kDoSupport.count(bare[j]) && !IsVerbLike(bare[j], "which"))
      ++j;
    std::vector<std::string> phrase(tokens.begin() + 2,
                                    tokens.begin() + static_cast<long>(j));
    const std::string noun_phrase = Join(phrase, " ");
    if (j < n && kDoSupport.count(bare[j])) {
      h.text = JoinNonEmpty({Tail(tokens, j + 1), a, noun_phrase});
    } else if (phrase.empty() && j < n && kCopulas.count(bare[j]) && j + 1 < n) {
      h.text = JoinNonEmpty({Tail(tokens, j + 1), tokens[j], a});
    } else {
      h.text = JoinNonEmpty({a, noun_phrase, Tail(tokens, j)});
    }
    return h;
  }

  // 3. Auxiliary-fronted questions. The wh-phrase may be up to three words
  // ("what year did ...") as long as none of them reads as a verb.
  if (n > 2 && kAllWh.count(first)) {
    size_t d = 1;
    while (d < n && d <= 3 && !kDoSupport.count(bare[d]) &&
           !IsVerbLike(bare[d], first))
      ++d;
    if (d < n && d <= 3 && kDoSupport.count(bare[d]) && d + 1 < n) {
      h.rule = 3;
      h.text = JoinNonEmpty({Tail(tokens, d + 1), a});
      return h;
    }
  }
  if (n > 1 && kAuxiliaries.count(first)) {
    h.rule = 3;
    h.text = DefrontAuxiliary(tokens, bare) + " \xE2\x80\x94 " + a;
    return h;
  }

  // 4. Trailing copula with a question mark: append the answer.
  if (question_mark && n > 0 && kCopulas.count(bare[n - 1])) {
    h.rule = 4;
    h.text = JoinNonEmpty({trimmed, a}) + ".";
    return h;
  }

  // 5. Fallback.
  h.rule = 5;
  h.text = trimmed.empty() ? a + "." : trimmed + ", " + a + ".";
  return h;
}

Hypothesis ConvertNeural(std::string_view question, std::string_view answer,
                         const ConvertBackend &backend,
                         std::string_view question_id) {
  RequireNonEmpty(question, answer);
  std::string generated =
      Trim(backend.Convert(std::string(question), std::string(answer)));
  if (generated.empty()) {
    Hypothesis h = ConvertRule(question, answer, question_id);
    h.fallback = true;
    h.backend_id = backend.id();
    Warn("qconvert", "empty neural conversion for " +
                         std::string(question_id) + ", used rule path");
    return h;
  }
  const char last = generated.back();
  if (last != '.' && last != '!' && last != '?') generated += '.';
  Hypothesis h;
  h.text = std::move(generated);
  h.method = HypothesisMethod::kNeural;
  h.source_question_id = std::string(question_id);
  h.backend_id = backend.id();
  return h;
}

Hypothesis ConcatBaseline(std::string_view question, std::string_view answer,
                          std::string_view question_id) {
  RequireNonEmpty(question, answer);
  Hypothesis h;
  h.method = HypothesisMethod::kConcat;
  h.source_question_id = std::string(question_id);
  h.text = std::string(question) + " " + std::string(answer);
  return h;
}

}  // namespace qaverify

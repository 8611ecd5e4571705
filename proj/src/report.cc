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

#include "qaverify/report.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "qaverify/text.h"

namespace qaverify {
namespace {

std::string FormatProbability(const std::optional<double> &p) {
  if (!p) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *p);
  return buf;
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t begin = 0;
  while (true) {
    size_t tab = line.find('\t', begin);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(begin));
      return fields;
    }
    fields.emplace_back(line.substr(begin, tab - begin));
    begin = tab + 1;
  }
}

}  // namespace

std::string PolarityName(Polarity polarity) {
  return polarity == Polarity::kFalsePositive ? "false_positive"
                                              : "false_negative";
}

Polarity ParsePolarity(std::string_view name) {
  const std::string n = Lowercase(Trim(name));
  if (n == "false_positive" || n == "fp") return Polarity::kFalsePositive;
  if (n == "false_negative" || n == "fn") return Polarity::kFalseNegative;
  throw ValidationError("unknown polarity \"" + std::string(name) + "\"");
}

std::string ErrorClassName(ErrorClass error_class) {
  switch (error_class) {
    case ErrorClass::kQuestionConversion: return "question_conversion";
    case ErrorClass::kDecontext: return "decontext";
    case ErrorClass::kEntailment: return "entailment";
    case ErrorClass::kWrongContext: return "wrong_context";
    case ErrorClass::kInsufficientContext: return "insufficient_context";
    case ErrorClass::kSpanShifting: return "span_shifting";
    case ErrorClass::kAnnotation: return "annotation";
    case ErrorClass::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

ErrorClass ParseErrorClass(std::string_view name) {
  const std::string n = Lowercase(Trim(name));
  if (n.empty() || n == "unlabeled") return ErrorClass::kUnlabeled;
  for (ErrorClass c : AnnotatableClasses()) {
    if (ErrorClassName(c) == n) return c;
  }
  throw ValidationError("unknown error class \"" + std::string(name) + "\"");
}

const std::vector<ErrorClass> &AnnotatableClasses() {
  static const std::vector<ErrorClass> kClasses = {
      ErrorClass::kQuestionConversion, ErrorClass::kDecontext,
      ErrorClass::kEntailment,         ErrorClass::kWrongContext,
      ErrorClass::kInsufficientContext, ErrorClass::kSpanShifting,
      ErrorClass::kAnnotation,
  };
  return kClasses;
}

std::vector<ErrorRecord> DetectErrors(
    std::span<const ConfidenceRecord> records) {
  std::vector<std::string> undecided;
  std::vector<ErrorRecord> errors;
  for (const auto &r : records) {
    if (!r.accepted) {
      undecided.push_back(r.instance_id);
      continue;
    }
    if (*r.accepted == r.em) continue;
    ErrorRecord e;
    e.instance_id = r.instance_id;
    e.dataset = r.dataset;
    e.polarity = *r.accepted ? Polarity::kFalsePositive
                             : Polarity::kFalseNegative;
    errors.push_back(std::move(e));
  }
  if (!undecided.empty())
    throw ValidationError("records without a verifier decision: " +
                          Join(undecided, ", "));
  return errors;
}

const std::vector<std::string> &SheetHeader() {
  static const std::vector<std::string> kHeader = {
      "instance_id", "dataset",    "polarity",        "error_class",
      "question",    "answer",     "gold",            "premise",
      "premise_info", "hypothesis", "hypothesis_info", "p_qa",
      "p_entail",    "context",    "missing",
  };
  return kHeader;
}

std::string EscapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string UnescapeField(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (size_t i = 0; i < field.size(); ++i) {
    if (field[i] != '\\' || i + 1 == field.size()) {
      out += field[i];
      continue;
    }
    switch (field[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += field[i];
    }
  }
  return out;
}

std::string ExportAnnotationSheet(
    std::span<const ErrorRecord> errors,
    const std::map<std::string, SheetArtifacts> &artifacts,
    std::optional<int64_t> cap_per_dataset) {
  std::string out =
      "# Fill error_class with one of the names below; leave it empty if "
      "unsure.\n";
  for (ErrorClass c : AnnotatableClasses())
    out += "# class: " + ErrorClassName(c) + "\n";
  out += Join(SheetHeader(), "\t") + "\n";
  std::map<std::string, int64_t> per_dataset;
  for (const auto &e : errors) {
    if (cap_per_dataset && per_dataset[e.dataset]++ >= *cap_per_dataset)
      continue;
    std::vector<std::string> row = {
        e.instance_id, e.dataset, PolarityName(e.polarity),
        e.error_class == ErrorClass::kUnlabeled ? ""
                                                : ErrorClassName(e.error_class)};
    auto it = artifacts.find(e.instance_id);
    if (it == artifacts.end()) {
      row.resize(SheetHeader().size() - 1);
      row.push_back("all");
    } else {
      const SheetArtifacts &a = it->second;
      std::vector<std::string> missing;
      auto add = [&](const std::string &name, const std::string &value) {
        if (value.empty()) missing.push_back(name);
        row.push_back(value);
      };
      add("question", a.question);
      add("answer", a.answer);
      row.push_back(a.gold);  // empty for unanswerables
      add("premise", a.premise);
      row.push_back(a.premise_info);
      add("hypothesis", a.hypothesis);
      row.push_back(a.hypothesis_info);
      add("p_qa", FormatProbability(a.p_qa));
      add("p_entail", FormatProbability(a.p_entail));
      add("context", a.context);
      row.push_back(Join(missing, ","));
    }
    for (auto &field : row) field = EscapeField(field);
    out += Join(row, "\t") + "\n";
  }
  return out;
}

std::vector<ErrorRecord> ImportAnnotationSheet(std::string_view sheet) {
  const std::vector<std::string> lines = SplitLines(sheet);
  const size_t width = SheetHeader().size();
  std::vector<ErrorRecord> records;
  bool header_seen = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = "line " + std::to_string(i + 1);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitTabs(line);
    if (!header_seen) {
      if (fields != SheetHeader())
        throw ParseError(where, "expected the annotation sheet header");
      header_seen = true;
      continue;
    }
    if (fields.size() != width)
      throw ParseError(where, "expected " + std::to_string(width) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    try {
      ErrorRecord r;
      r.instance_id = UnescapeField(fields[0]);
      r.dataset = UnescapeField(fields[1]);
      r.polarity = ParsePolarity(fields[2]);
      r.error_class = ParseErrorClass(UnescapeField(fields[3]));
      if (r.instance_id.empty()) throw ValidationError("empty instance_id");
      records.push_back(std::move(r));
    } catch (const ParseError &) {
      throw;
    } catch (const ValidationError &e) {
      throw ParseError(where, e.what());
    }
  }
  if (!header_seen) throw ParseError("line 0", "annotation sheet has no header");
  return records;
}

AgreementResult FleissKappaFromCounts(
    const std::vector<std::vector<int64_t>> &counts) {
  if (counts.empty()) throw ValidationError("Fleiss' kappa needs >= 1 item");
  const size_t k = counts.front().size();
  if (k == 0) throw ValidationError("Fleiss' kappa needs >= 1 category");
  int64_t n = -1;
  std::vector<int64_t> column(k, 0);
  std::vector<double> agreement;
  agreement.reserve(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    const auto &row = counts[i];
    if (row.size() != k)
      throw ValidationError("item " + std::to_string(i) + " has " +
                            std::to_string(row.size()) + " categories, not " +
                            std::to_string(k));
    int64_t raters = 0, squares = 0;
    for (size_t j = 0; j < k; ++j) {
      if (row[j] < 0) throw ValidationError("negative rating count");
      raters += row[j];
      squares += row[j] * row[j];
      column[j] += row[j];
    }
    if (n < 0) n = raters;
    if (raters != n)
      throw ValidationError("item " + std::to_string(i) + " has " +
                            std::to_string(raters) + " ratings, expected " +
                            std::to_string(n));
    if (n < 2) throw ValidationError("Fleiss' kappa needs >= 2 raters");
    agreement.push_back(static_cast<double>(squares - n) /
                        static_cast<double>(n * (n - 1)));
  }
  const double items = static_cast<double>(counts.size());
  const double total = items * static_cast<double>(n);
  AgreementResult result;
  result.n_items = static_cast<int64_t>(counts.size());
  result.n_raters = n;
  std::vector<double> squares;
  for (size_t j = 0; j < k; ++j) {
    if (column[j] == result.n_items * n)
      throw ValidationError(
          "Fleiss' kappa is undefined: every rating is in one category");
    const double p = static_cast<double>(column[j]) / total;
    result.per_class_proportions.push_back(p);
    squares.push_back(p * p);
  }
  const double p_bar = ExactSum(agreement) / items;
  const double p_e = ExactSum(squares);
  result.kappa = (p_bar - p_e) / (1.0 - p_e);
  return result;
}

AgreementResult FleissKappa(const std::vector<std::vector<int>> &labels,
                            int n_categories) {
  if (n_categories < 1)
    throw ValidationError("Fleiss' kappa needs >= 1 category");
  std::vector<std::vector<int64_t>> counts;
  counts.reserve(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    std::vector<int64_t> row(n_categories, 0);
    for (int label : labels[i]) {
      if (label < 0 || label >= n_categories)
        throw ValidationError("item " + std::to_string(i) + ": label " +
                              std::to_string(label) + " out of range");
      ++row[label];
    }
    counts.push_back(std::move(row));
  }
  return FleissKappaFromCounts(counts);
}

AgreementResult SheetAgreement(
    const std::vector<std::vector<ErrorRecord>> &sheets) {
  if (sheets.size() < 2)
    throw ValidationError("agreement needs sheets from >= 2 raters");
  const auto &classes = AnnotatableClasses();
  std::vector<std::unordered_map<std::string, int>> by_id(sheets.size());
  for (size_t s = 0; s < sheets.size(); ++s) {
    for (const auto &e : sheets[s]) {
      if (e.error_class == ErrorClass::kUnlabeled) continue;
      const int idx = static_cast<int>(
          std::find(classes.begin(), classes.end(), e.error_class) -
          classes.begin());
      by_id[s][e.instance_id] = idx;
    }
  }
  std::vector<std::vector<int>> labels;
  std::vector<std::string> gaps;
  for (const auto &e : sheets.front()) {
    std::vector<int> row;
    for (size_t s = 0; s < sheets.size(); ++s) {
      auto it = by_id[s].find(e.instance_id);
      if (it == by_id[s].end()) {
        gaps.push_back("rater " + std::to_string(s + 1) + "/" + e.instance_id);
      } else {
        row.push_back(it->second);
      }
    }
    labels.push_back(std::move(row));
  }
  if (!gaps.empty())
    throw ValidationError("unlabeled cells: " + Join(gaps, ", "));
  return FleissKappa(labels, static_cast<int>(classes.size()));
}

int64_t Breakdown::Count(const std::string &dataset, ErrorClass error_class,
                         Polarity polarity) const {
  auto d = counts.find(dataset);
  if (d == counts.end()) return 0;
  auto c = d->second.find(error_class);
  if (c == d->second.end()) return 0;
  auto p = c->second.find(polarity);
  return p == c->second.end() ? 0 : p->second;
}

Breakdown BreakdownTable(std::span<const ErrorRecord> errors,
                         const std::vector<std::string> &datasets) {
  Breakdown b;
  b.datasets = datasets;
  std::set<std::string> extra;
  for (const auto &e : errors) {
    ++b.counts[e.dataset][e.error_class][e.polarity];
    if (std::find(datasets.begin(), datasets.end(), e.dataset) ==
        datasets.end())
      extra.insert(e.dataset);
  }
  b.datasets.insert(b.datasets.end(), extra.begin(), extra.end());
  return b;
}

std::string FormatBreakdown(const Breakdown &b) {
  const Polarity kPolarities[] = {Polarity::kFalsePositive,
                                  Polarity::kFalseNegative};
  std::vector<std::string> header = {"class"};
  for (const auto &d : b.datasets) {
    header.push_back(d + " FP");
    header.push_back(d + " FN");
  }
  header.push_back("all FP");
  header.push_back("all FN");
  std::string out = Join(header, "\t") + "\n";

  std::vector<ErrorClass> rows = AnnotatableClasses();
  rows.push_back(ErrorClass::kUnlabeled);
  std::map<std::string, std::map<Polarity, int64_t>> totals;
  for (ErrorClass c : rows) {
    std::vector<std::string> line = {ErrorClassName(c)};
    std::map<Polarity, int64_t> across;
    for (const auto &d : b.datasets) {
      for (Polarity p : kPolarities) {
        const int64_t n = b.Count(d, c, p);
        line.push_back(std::to_string(n));
        across[p] += n;
        totals[d][p] += n;
      }
    }
    for (Polarity p : kPolarities) {
      line.push_back(std::to_string(across[p]));
      totals[""][p] += across[p];
    }
    out += Join(line, "\t") + "\n";
  }
  std::vector<std::string> line = {"total"};
  for (const auto &d : b.datasets)
    for (Polarity p : kPolarities) line.push_back(std::to_string(totals[d][p]));
  for (Polarity p : kPolarities) line.push_back(std::to_string(totals[""][p]));
  out += Join(line, "\t") + "\n";
  return out;
}

}  // namespace qaverify

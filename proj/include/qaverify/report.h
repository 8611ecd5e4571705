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

#ifndef QAVERIFY_REPORT_H_
#define QAVERIFY_REPORT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qaverify/calibrate.h"

namespace qaverify {

enum class Polarity { kFalsePositive, kFalseNegative };
std::string PolarityName(Polarity polarity);
Polarity ParsePolarity(std::string_view name);

// The manual error taxonomy. kUnlabeled marks rows nobody has classified.
enum class ErrorClass {
  kQuestionConversion,
  kDecontext,
  kEntailment,
  kWrongContext,
  kInsufficientContext,
  kSpanShifting,
  kAnnotation,
  kUnlabeled,
};
std::string ErrorClassName(ErrorClass error_class);
// "" and "unlabeled" map to kUnlabeled; anything unknown throws.
ErrorClass ParseErrorClass(std::string_view name);
// The seven annotatable classes, in legend order.
const std::vector<ErrorClass> &AnnotatableClasses();

struct ErrorRecord {
  std::string instance_id;
  std::string dataset;
  Polarity polarity = Polarity::kFalsePositive;
  ErrorClass error_class = ErrorClass::kUnlabeled;
  bool operator==(const ErrorRecord &) const = default;
};

// False positive: accepted but wrong (not EM). False negative: rejected but
// right. Throws ValidationError listing records without a verifier decision.
std::vector<ErrorRecord> DetectErrors(std::span<const ConfidenceRecord> records);

// Pipeline outputs shown next to each error in the annotation sheet.
struct SheetArtifacts {
  std::string question;
  std::string answer;
  std::string gold;  // gold answers joined with " | "
  std::string premise;
  std::string premise_info;     // mode and decontext category
  std::string hypothesis;
  std::string hypothesis_info;  // method and rule
  std::string context;
  std::optional<double> p_qa;
  std::optional<double> p_entail;
};

// Tab-separated sheet: '#' legend lines naming the seven classes, a fixed
// header, then one row per error with an empty class column. Tabs, newlines
// and backslashes inside fields are escaped. Errors without artifacts are
// kept and flagged in the `missing` column. With a cap, only the first `cap`
// errors of each dataset are exported.
std::string ExportAnnotationSheet(
    std::span<const ErrorRecord> errors,
    const std::map<std::string, SheetArtifacts> &artifacts,
    std::optional<int64_t> cap_per_dataset = std::nullopt);

// Reads a (possibly filled-in) sheet back. Throws ParseError("line N").
std::vector<ErrorRecord> ImportAnnotationSheet(std::string_view sheet);

const std::vector<std::string> &SheetHeader();
std::string EscapeField(std::string_view field);
std::string UnescapeField(std::string_view field);

struct AgreementResult {
  double kappa = 0.0;
  int64_t n_items = 0;
  int64_t n_raters = 0;
  std::vector<double> per_class_proportions;
};

// Fleiss' kappa from an items x categories count matrix; every row must sum
// to the same rater count (>= 2). Throws ValidationError when expected
// agreement is perfect (one category holds every label).
AgreementResult FleissKappaFromCounts(
    const std::vector<std::vector<int64_t>> &counts);

// Same, from an items x raters matrix of category indices in
// [0, n_categories).
AgreementResult FleissKappa(const std::vector<std::vector<int>> &labels,
                            int n_categories);

// One filled sheet per rater, aligned by instance id. Every rater must label
// every item of the first sheet.
AgreementResult SheetAgreement(
    const std::vector<std::vector<ErrorRecord>> &sheets);

// dataset x (class incl. unlabeled) x polarity counts.
struct Breakdown {
  std::vector<std::string> datasets;
  // counts[dataset][class][polarity]
  std::map<std::string, std::map<ErrorClass, std::map<Polarity, int64_t>>>
      counts;
  int64_t Count(const std::string &dataset, ErrorClass error_class,
                Polarity polarity) const;
};

// `datasets` fixes the column order; datasets seen only in `errors` are
// appended in name order.
Breakdown BreakdownTable(std::span<const ErrorRecord> errors,
                         const std::vector<std::string> &datasets = {});

// Rows: the seven classes, unlabeled, total. Columns: FP and FN per dataset,
// then across all datasets.
std::string FormatBreakdown(const Breakdown &breakdown);

}  // namespace qaverify

#endif  // QAVERIFY_REPORT_H_

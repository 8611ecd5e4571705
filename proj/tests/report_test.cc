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

#include <gtest/gtest.h>

#include <random>

#include "qaverify/common.h"

namespace qaverify {
namespace {

// Exact-rational Fleiss kappa: (A*D2 - B*D1) / (D1*(D2 - B)) with
// A = sum n_ij^2 - N*n, D1 = N*n*(n-1), B = sum_j col_j^2, D2 = (N*n)^2.
double RationalKappa(const std::vector<std::vector<int64_t>> &m) {
  using I = __int128;
  const I N = m.size();
  I n = 0;
  for (auto v : m[0]) n += v;
  I A = 0;
  std::vector<I> col(m[0].size(), 0);
  for (const auto &row : m)
    for (size_t j = 0; j < row.size(); ++j) {
      A += I(row[j]) * row[j];
      col[j] += row[j];
    }
  A -= N * n;
  I B = 0;
  for (auto c : col) B += c * c;
  const I D1 = N * n * (n - 1), D2 = (N * n) * (N * n);
  return static_cast<double>(static_cast<long double>(A * D2 - B * D1) /
                             static_cast<long double>(D1 * (D2 - B)));
}

const std::vector<std::vector<int64_t>> kTextbook = {
    {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
    {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
    {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};

TEST(FleissKappa, TextbookMatrix) {
  auto r = FleissKappaFromCounts(kTextbook);
  EXPECT_NEAR(r.kappa, RationalKappa(kTextbook), 1e-12);
  EXPECT_NEAR(r.kappa, 0.20993, 1e-5);
  EXPECT_EQ(r.n_items, 10);
  EXPECT_EQ(r.n_raters, 14);
  ASSERT_EQ(r.per_class_proportions.size(), 5u);
  EXPECT_NEAR(r.per_class_proportions[0], 20.0 / 140, 1e-15);
}

TEST(FleissKappa, RandomMatricesMatchRationalOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 300; ++t) {
    const int items = 1 + static_cast<int>(UniformBelow(rng, 30));
    const int cats = 2 + static_cast<int>(UniformBelow(rng, 6));
    const int raters = 2 + static_cast<int>(UniformBelow(rng, 9));
    std::vector<std::vector<int>> labels(items, std::vector<int>(raters));
    std::vector<std::vector<int64_t>> counts(items, std::vector<int64_t>(cats, 0));
    for (int i = 0; i < items; ++i)
      for (int r = 0; r < raters; ++r) {
        labels[i][r] = static_cast<int>(UniformBelow(rng, cats));
        counts[i][labels[i][r]]++;
      }
    std::vector<int64_t> col(cats, 0);
    for (const auto &row : counts)
      for (int j = 0; j < cats; ++j) col[j] += row[j];
    if (std::count(col.begin(), col.end(), 0) == cats - 1) continue;
    const double oracle = RationalKappa(counts);
    EXPECT_NEAR(FleissKappaFromCounts(counts).kappa, oracle, 1e-12);
    EXPECT_NEAR(FleissKappa(labels, cats).kappa, oracle, 1e-12);
    // Relabeling categories leaves kappa unchanged.
    for (auto &row : labels)
      for (auto &l : row) l = cats - 1 - l;
    EXPECT_NEAR(FleissKappa(labels, cats).kappa, oracle, 1e-12);
  }
}

TEST(FleissKappa, UnanimousIsOne) {
  std::vector<std::vector<int>> labels = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0, 0, 0}};
  EXPECT_DOUBLE_EQ(FleissKappa(labels, 3).kappa, 1.0);
}

TEST(FleissKappa, RandomRatersNearZero) {
  std::mt19937_64 rng(99);
  std::vector<std::vector<int>> labels(10000, std::vector<int>(3));
  for (auto &row : labels)
    for (auto &l : row) l = static_cast<int>(UniformBelow(rng, 7));
  EXPECT_LT(std::fabs(FleissKappa(labels, 7).kappa), 0.05);
}

TEST(FleissKappa, RejectsBadInput) {
  EXPECT_THROW(FleissKappaFromCounts({{3, 0}, {2, 0}}), ValidationError);  // unequal
  EXPECT_THROW(FleissKappaFromCounts({{1, 0}, {0, 1}}), ValidationError);  // n < 2
  EXPECT_THROW(FleissKappaFromCounts({{2, 0}, {2, 0}}), ValidationError);  // Pe = 1
  EXPECT_THROW(FleissKappaFromCounts({}), ValidationError);
  EXPECT_THROW(FleissKappa({{0, 5}}, 3), ValidationError);
}

ConfidenceRecord Rec(const std::string &id, bool em, std::optional<bool> accepted) {
  ConfidenceRecord r;
  r.instance_id = id;
  r.dataset = "NQ";
  r.em = em;
  r.f1 = em ? 1.0 : 0.0;
  r.accepted = accepted;
  return r;
}

TEST(DetectErrors, Polarity) {
  std::vector<ConfidenceRecord> rs = {Rec("a", true, true), Rec("b", false, true),
                                      Rec("c", true, false), Rec("d", false, false)};
  auto errs = DetectErrors(rs);
  ASSERT_EQ(errs.size(), 2u);
  EXPECT_EQ(errs[0], (ErrorRecord{"b", "NQ", Polarity::kFalsePositive, ErrorClass::kUnlabeled}));
  EXPECT_EQ(errs[1].instance_id, "c");
  EXPECT_EQ(errs[1].polarity, Polarity::kFalseNegative);
  rs.push_back(Rec("e", true, std::nullopt));
  try {
    DetectErrors(rs);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("e"), std::string::npos);
  }
}

TEST(Sheet, EscapingRoundTrips) {
  std::mt19937_64 rng(2);
  const std::string alphabet = "ab\\\t\n\rnt ";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (size_t k = UniformBelow(rng, 12); k > 0; --k)
      s += alphabet[UniformBelow(rng, alphabet.size())];
    const auto e = EscapeField(s);
    EXPECT_EQ(e.find_first_of("\t\n\r"), std::string::npos);
    EXPECT_EQ(UnescapeField(e), s);
  }
}

TEST(Sheet, ExportImportRoundTrip) {
  std::vector<ErrorRecord> errs = {
      {"a", "NQ", Polarity::kFalsePositive, ErrorClass::kUnlabeled},
      {"b", "NQ", Polarity::kFalseNegative, ErrorClass::kUnlabeled},
      {"c", "SQuAD2", Polarity::kFalsePositive, ErrorClass::kUnlabeled}};
  std::map<std::string, SheetArtifacts> art;
  art["a"] = {"who\tq", "ans", "g1 | g2", "prem\nline", "sentence", "hyp", "rule 1",
              "ctx", 0.5, 0.9};
  art["c"].question = "only question";
  const auto sheet = ExportAnnotationSheet(errs, art);
  for (auto c : AnnotatableClasses())
    EXPECT_NE(sheet.find("# class: " + ErrorClassName(c)), std::string::npos);
  EXPECT_EQ(ImportAnnotationSheet(sheet), errs);
  // Missing artifacts are flagged, not dropped.
  EXPECT_NE(sheet.find("\tall\n"), std::string::npos);
  const auto capped = ImportAnnotationSheet(ExportAnnotationSheet(errs, art, 1));
  ASSERT_EQ(capped.size(), 2u);
  EXPECT_EQ(capped[1].instance_id, "c");
}

TEST(Sheet, FilledClassesAndErrors) {
  std::vector<ErrorRecord> errs = {
      {"a", "NQ", Polarity::kFalsePositive, ErrorClass::kUnlabeled}};
  auto sheet = ExportAnnotationSheet(errs, {});
  const auto pos = sheet.find("a\tNQ\tfalse_positive\t");
  ASSERT_NE(pos, std::string::npos);
  sheet.insert(pos + std::string("a\tNQ\tfalse_positive\t").size(), "span_shifting");
  auto back = ImportAnnotationSheet(sheet);
  EXPECT_EQ(back[0].error_class, ErrorClass::kSpanShifting);
  auto broken = sheet;
  broken.replace(pos + std::string("a\tNQ\tfalse_positive\t").size(), 13, "gremlins");
  EXPECT_THROW(ImportAnnotationSheet(broken), ParseError);
  EXPECT_THROW(ImportAnnotationSheet("a\tb\n"), ParseError);
  for (auto c : AnnotatableClasses()) EXPECT_EQ(ParseErrorClass(ErrorClassName(c)), c);
  EXPECT_EQ(ParseErrorClass(""), ErrorClass::kUnlabeled);
  EXPECT_EQ(ParsePolarity("fn"), Polarity::kFalseNegative);
}

TEST(SheetAgreement, AlignsById) {
  using E = ErrorRecord;
  std::vector<E> r1 = {{"a", "NQ", Polarity::kFalsePositive, ErrorClass::kEntailment},
                       {"b", "NQ", Polarity::kFalsePositive, ErrorClass::kDecontext}};
  std::vector<E> r2 = {r1[1], r1[0]};
  auto k = SheetAgreement({r1, r2});
  EXPECT_DOUBLE_EQ(k.kappa, 1.0);
  EXPECT_EQ(k.n_raters, 2);
  r2[0].error_class = ErrorClass::kUnlabeled;
  EXPECT_THROW(SheetAgreement({r1, r2}), ValidationError);
  EXPECT_THROW(SheetAgreement({r1}), ValidationError);
  r2.pop_back();
  EXPECT_THROW(SheetAgreement({r1, r2}), ValidationError);
}

TEST(Breakdown, CountsAndTable) {
  std::vector<ErrorRecord> errs = {
      {"a", "NQ", Polarity::kFalsePositive, ErrorClass::kEntailment},
      {"b", "NQ", Polarity::kFalsePositive, ErrorClass::kEntailment},
      {"c", "SQuAD2", Polarity::kFalseNegative, ErrorClass::kAnnotation},
      {"d", "BioASQ", Polarity::kFalseNegative, ErrorClass::kUnlabeled}};
  auto b = BreakdownTable(errs, {"SQuAD2", "NQ"});
  EXPECT_EQ(b.datasets, (std::vector<std::string>{"SQuAD2", "NQ", "BioASQ"}));
  EXPECT_EQ(b.Count("NQ", ErrorClass::kEntailment, Polarity::kFalsePositive), 2);
  EXPECT_EQ(b.Count("NQ", ErrorClass::kEntailment, Polarity::kFalseNegative), 0);
  EXPECT_EQ(b.Count("nowhere", ErrorClass::kEntailment, Polarity::kFalseNegative), 0);
  const auto table = FormatBreakdown(b);
  const auto lines = SplitLines(table);
  EXPECT_EQ(lines[0].rfind("class\tSQuAD2 FP\tSQuAD2 FN\tNQ FP", 0), 0u);
  EXPECT_NE(table.find("entailment\t0\t0\t2\t0\t0\t0\t2\t0"), std::string::npos);
  EXPECT_NE(table.find("total\t0\t1\t2\t0\t0\t1\t2\t2"), std::string::npos);
}

}  // namespace
}  // namespace qaverify

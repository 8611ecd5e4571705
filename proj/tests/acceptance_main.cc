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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. Oracles here are written independently of the
// library code they check.

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qaverify/calibrate.h"
#include "qaverify/common.h"
#include "qaverify/nli_dataset.h"
#include "qaverify/pipeline.h"
#include "qaverify/qconvert.h"
#include "qaverify/report.h"
#include "qaverify/scoring.h"

namespace fs = std::filesystem;
using namespace qaverify;

namespace {

std::string Fixture(const std::string &name) {
  return std::string(QAVERIFY_FIXTURE_DIR) + "/" + name;
}

class Scratch {
 public:
  Scratch() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("qaverify-acceptance-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string Sub(const std::string &name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

using Seconds = std::chrono::duration<double>;

double Elapsed(std::chrono::steady_clock::time_point start) {
  return Seconds(std::chrono::steady_clock::now() - start).count();
}

// --- token F1 -------------------------------------------------------------

// Brute-force overlap: for each predicted token, claim the first unclaimed
// equal gold token.
double OracleF1(const std::vector<std::string> &p, const std::vector<std::string> &g) {
  if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
  std::vector<bool> used(g.size(), false);
  int common = 0;
  for (const auto &t : p)
    for (size_t j = 0; j < g.size(); ++j)
      if (!used[j] && g[j] == t) {
        used[j] = true;
        ++common;
        break;
      }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / p.size();
  const double recall = static_cast<double>(common) / g.size();
  return 2.0 * precision * recall / (precision + recall);
}

std::string CheckTokenF1() {
  const std::vector<std::string> vocab = {"red", "fox", "dog", "jumps", "over",
                                          "lazy", "blue", "cat"};
  std::mt19937_64 rng(2024);
  const auto start = std::chrono::steady_clock::now();
  auto draw = [&] {
    std::vector<std::string> t(UniformBelow(rng, 6));
    for (auto &w : t) w = vocab[UniformBelow(rng, vocab.size())];
    return t;
  };
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = draw(), g = draw();
    std::string ps, gs;
    for (const auto &w : p) ps += w + " ";
    for (const auto &w : g) gs += w + " ";
    if (TokenF1(ps, gs) != OracleF1(p, g)) ++mismatches;
  }
  const double secs = Elapsed(start);
  std::ostringstream msg;
  msg << mismatches << " mismatches in 1000 pairs, " << secs << " s";
  if (mismatches != 0 || secs >= 5.0) throw std::runtime_error(msg.str());
  return msg.str();
}

// --- oracle ranking -------------------------------------------------------

std::string CheckOracleRanking() {
  std::mt19937_64 rng(6);
  const auto start = std::chrono::steady_clock::now();
  const auto grid = DefaultGrid();
  int64_t comparisons = 0;
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<ConfidenceRecord> rs(n);
      for (int i = 0; i < n; ++i) {
        rs[i].instance_id = "x" + std::to_string(i);
        // Coarse values so ties occur.
        rs[i].f1 = static_cast<double>(UniformBelow(rng, 5)) / 4.0;
      }
      const auto oracle = ComputeCoverageCurve(
          rs, [](const ConfidenceRecord &r) { return r.f1; }, grid);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      do {
        // Confidence = position in this ranking.
        for (int i = 0; i < n; ++i) rs[perm[i]].p_qa = 1.0 - static_cast<double>(i) / n;
        const auto other = ComputeCoverageCurve(
            rs, [](const ConfidenceRecord &r) { return r.p_qa; }, grid);
        for (size_t k = 0; k < grid.size(); ++k) {
          ++comparisons;
          if (oracle.points[k].f1 < other.points[k].f1)
            throw std::runtime_error("oracle ranking beaten at n=" + std::to_string(n) +
                                     " k=" + std::to_string(grid[k]));
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  const double secs = Elapsed(start);
  if (secs >= 10.0) throw std::runtime_error("took " + std::to_string(secs) + " s");
  return std::to_string(comparisons) + " grid comparisons, " + std::to_string(secs) + " s";
}

// --- curve endpoint -------------------------------------------------------

// mean = round(exact sum) / N, with the sum kept as an exact rational.
double ExactMean(const std::vector<ConfidenceRecord> &rs) {
  mpq_t sum, term;
  mpq_init(sum);
  mpq_init(term);
  for (const auto &r : rs) {
    mpq_set_d(term, r.f1);
    mpq_add(sum, sum, term);
  }
  mpfr_t rounded;
  mpfr_init2(rounded, 53);
  mpfr_set_q(rounded, sum, MPFR_RNDN);
  const double s = mpfr_get_d(rounded, MPFR_RNDN);
  mpfr_clear(rounded);
  mpq_clear(term);
  mpq_clear(sum);
  return s / static_cast<double>(rs.size());
}

std::vector<ConfidenceRecord> FixtureRecords(const std::string &file,
                                             const std::string &format,
                                             const std::string &dataset) {
  Scratch dir;
  PipelineConfig c;
  c.input = Fixture(file);
  c.input_format = format;
  c.dataset = dataset;
  c.heldout = 5;
  SetWarningSink([](const std::string &) {});
  RunPipeline(c, dir.Sub("run"));
  SetWarningSink(nullptr);
  return ReadRecords(dir.Sub("run/records.jsonl"));
}

std::string CheckEndpoint() {
  struct Src {
    std::string file, format, dataset;
  };
  const std::vector<Src> fixtures = {{"nq50.jsonl", "corpus", ""},
                                     {"nq_filter20.jsonl", "corpus", ""},
                                     {"rejection40.jsonl", "corpus", ""},
                                     {"mrqa3.jsonl", "mrqa", "NQ"},
                                     {"squad_small.json", "squad2", "SQuAD2"}};
  std::vector<std::vector<ConfidenceRecord>> sets;
  for (const auto &f : fixtures) sets.push_back(FixtureRecords(f.file, f.format, f.dataset));
  // Plus synthetic sets with awkward binary fractions.
  std::mt19937_64 rng(77);
  for (int t = 0; t < 50; ++t) {
    std::vector<ConfidenceRecord> rs(1 + UniformBelow(rng, 300));
    for (size_t i = 0; i < rs.size(); ++i) {
      rs[i].instance_id = std::to_string(i);
      rs[i].p_qa = static_cast<double>(UniformBelow(rng, 1000)) / 999.0;
      const double den = 1 + static_cast<double>(UniformBelow(rng, 13));
      rs[i].f1 = std::min(1.0, static_cast<double>(UniformBelow(rng, 14)) / den);
    }
    sets.push_back(rs);
  }
  const std::vector<double> grid = {0.2, 1.0};
  for (size_t s = 0; s < sets.size(); ++s) {
    const auto &rs = sets[s];
    for (auto source : {ConfidenceSource::kQa, ConfidenceSource::kNli}) {
      if (source == ConfidenceSource::kNli && s >= fixtures.size()) continue;
      const auto curve = ComputeCoverageCurve(rs, MakeConfidenceFn(source), grid);
      const double endpoint = curve.points.back().f1;
      if (endpoint != MeanF1(rs) || endpoint != ExactMean(rs))
        throw std::runtime_error("set " + std::to_string(s) + ": endpoint " +
                                 std::to_string(endpoint) + " vs mean " +
                                 std::to_string(ExactMean(rs)));
    }
  }
  return std::to_string(fixtures.size()) + " fixtures + 50 synthetic sets, exact";
}

// --- combiner -------------------------------------------------------------

std::string CheckCombiner() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    std::vector<std::vector<double>> x(16);
    std::vector<int> y(16);
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = {u(rng), u(rng)};
      y[i] = static_cast<int>(UniformBelow(rng, 2));
    }
    std::vector<double> w = {3 * g(rng), 3 * g(rng)};
    const double b = g(rng);
    const auto grad = LogisticGradient(x, y, w, b);
    const double h = 1e-5;
    for (int j = 0; j < 3; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      (j < 2 ? wp[j] : bp) += h;
      (j < 2 ? wm[j] : bm) -= h;
      const double fd =
          (LogisticLoss(x, y, wp, bp) - LogisticLoss(x, y, wm, bm)) / (2 * h);
      worst = std::max(worst, std::fabs(fd - grad[j]));
    }
  }
  if (worst > 1e-6)
    throw std::runtime_error("gradient error " + std::to_string(worst));

  std::mt19937_64 data_rng(500);
  std::vector<ConfidenceRecord> rs(500);
  for (size_t i = 0; i < rs.size(); ++i) {
    rs[i].instance_id = "s" + std::to_string(i);
    rs[i].p_qa = u(data_rng);
    rs[i].p_nli = u(data_rng);
    rs[i].em = rs[i].p_qa + *rs[i].p_nli > 1.0;
    rs[i].f1 = rs[i].em ? 1.0 : 0.0;
  }
  FitConfig config;
  config.fit_bias = true;
  const auto model = FitCombiner(rs, config);
  int correct = 0;
  for (const auto &r : rs) correct += (Combine(model, r) > 0.5) == r.em;
  const double accuracy = correct / 500.0;
  if (accuracy < 0.95)
    throw std::runtime_error("training accuracy " + std::to_string(accuracy));
  const auto &hist = model.fit_meta.loss_history;
  for (size_t i = 1; i < hist.size(); ++i)
    if (hist[i] > hist[i - 1])
      throw std::runtime_error("loss rose at iteration " + std::to_string(i));
  std::ostringstream msg;
  msg << "max FD error " << worst << ", accuracy " << accuracy << ", "
      << hist.size() - 1 << " monotone steps";
  return msg.str();
}

// --- Fleiss kappa ---------------------------------------------------------

double RationalKappa(const std::vector<std::vector<int64_t>> &m) {
  const long n_items = static_cast<long>(m.size());
  long raters = 0;
  for (auto v : m[0]) raters += static_cast<long>(v);
  mpq_t pbar, pe, tmp, one;
  mpq_inits(pbar, pe, tmp, one, nullptr);
  mpq_set_ui(one, 1, 1);
  std::vector<long> col(m[0].size(), 0);
  for (const auto &row : m) {
    long agree = 0;
    for (size_t j = 0; j < row.size(); ++j) {
      agree += static_cast<long>(row[j] * (row[j] - 1));
      col[j] += static_cast<long>(row[j]);
    }
    mpq_set_si(tmp, agree, static_cast<unsigned long>(raters * (raters - 1)));
    mpq_canonicalize(tmp);
    mpq_add(pbar, pbar, tmp);
  }
  mpq_set_si(tmp, 1, static_cast<unsigned long>(n_items));
  mpq_mul(pbar, pbar, tmp);
  for (long c : col) {
    mpq_set_si(tmp, c, static_cast<unsigned long>(n_items * raters));
    mpq_canonicalize(tmp);
    mpq_mul(tmp, tmp, tmp);
    mpq_add(pe, pe, tmp);
  }
  mpq_sub(pbar, pbar, pe);
  mpq_sub(tmp, one, pe);
  mpq_div(pbar, pbar, tmp);
  const double kappa = mpq_get_d(pbar);
  mpq_clears(pbar, pe, tmp, one, nullptr);
  return kappa;
}

std::string CheckFleiss() {
  const std::vector<std::vector<int64_t>> worked = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0},
      {2, 2, 8, 1, 1},  {7, 7, 0, 0, 0}, {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2},
      {6, 5, 2, 1, 0},  {0, 2, 2, 3, 7}};
  const double oracle = RationalKappa(worked);
  const double got = FleissKappaFromCounts(worked).kappa;
  if (std::fabs(got - oracle) > 1e-9 || std::fabs(oracle - 0.20993) > 1e-5)
    throw std::runtime_error("worked matrix " + std::to_string(got) + " vs " +
                             std::to_string(oracle));
  const std::vector<std::vector<int>> unanimous = {
      {0, 0, 0}, {3, 3, 3}, {6, 6, 6}, {1, 1, 1}, {0, 0, 0}};
  const double k1 = FleissKappa(unanimous, 7).kappa;
  if (k1 != 1.0) throw std::runtime_error("unanimous kappa " + std::to_string(k1));
  std::mt19937_64 rng(10000);
  std::vector<std::vector<int>> labels(10000, std::vector<int>(3));
  for (auto &row : labels)
    for (auto &l : row) l = static_cast<int>(UniformBelow(rng, 7));
  const double k0 = FleissKappa(labels, 7).kappa;
  if (std::fabs(k0) >= 0.05)
    throw std::runtime_error("independent raters kappa " + std::to_string(k0));
  std::ostringstream msg;
  msg << "worked " << got << " (oracle " << oracle << "), unanimous 1, random " << k0;
  return msg.str();
}

// --- pipeline determinism -------------------------------------------------

std::string TreeDigest(const std::string &dir) {
  std::vector<std::string> files;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir).string());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto &f : files) all += f + '\0' + ReadFile(dir + "/" + f) + '\0';
  return std::to_string(files.size()) + " files " + HexDigest(Fnv1a64(all)) +
         " " + std::to_string(all.size());
}

std::string CheckDeterminism() {
  Scratch dir;
  PipelineConfig c;
  c.input = Fixture("nq50.jsonl");
  c.heldout = 10;
  RunPipeline(c, dir.Sub("a"), 1);
  RunPipeline(c, dir.Sub("b"), 1);
  RunPipeline(c, dir.Sub("c"), 8);
  const auto a = TreeDigest(dir.Sub("a"));
  // Byte comparison, not just digests.
  for (const auto *other : {"b", "c"}) {
    for (const auto &e : fs::recursive_directory_iterator(dir.Sub("a"))) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), dir.Sub("a")).string();
      const std::string twin = dir.Sub(other) + "/" + rel;
      if (!fs::exists(twin) || ReadFile(e.path().string()) != ReadFile(twin))
        throw std::runtime_error(std::string("run ") + other + " differs in " + rel);
    }
    if (TreeDigest(dir.Sub(other)) != a)
      throw std::runtime_error(std::string("run ") + other + " has a different file set");
  }
  return a;
}

// --- converter ------------------------------------------------------------

std::string CheckConverter() {
  int total = 0, agree = 0, contained = 0;
  std::vector<std::string> misses;
  for (const auto &line : SplitLines(ReadFile(Fixture("convert_reference.tsv")))) {
    if (line.empty() || line[0] == '#') continue;
    const auto a = line.find('\t'), b = line.find('\t', a + 1);
    const std::string q = line.substr(0, a), ans = line.substr(a + 1, b - a - 1),
                      expected = line.substr(b + 1);
    const auto got = ConvertRule(q, ans).text;
    ++total;
    if (got == expected) ++agree;
    else misses.push_back(q);
    if (got.find(ans) != std::string::npos) ++contained;
  }
  std::ostringstream msg;
  msg << agree << "/" << total << " match, " << contained << "/" << total
      << " contain the answer";
  for (const auto &m : misses) msg << "; miss: " << m;
  if (total == 0 || agree * 10 < total * 9 || contained != total)
    throw std::runtime_error(msg.str());
  return msg.str();
}

// --- NLI builder ----------------------------------------------------------

std::string CheckBuilder() {
  const auto instances = ReadCorpus(Fixture("nq50.jsonl"));
  MockQaBackend qa;
  MockDecontextBackend decontext;
  std::vector<AnswerCandidate> answers;
  std::vector<Premise> premises;
  std::vector<Hypothesis> hypotheses;
  int em_correct = 0;
  for (const auto &inst : instances) {
    auto c = GenerateAnswer(inst, qa);
    std::vector<std::string> golds;
    for (const auto &g : inst.gold_answers) golds.push_back(g.text);
    em_correct += Match(c.text, golds).em;
    premises.push_back(MakePremise(inst, c.start, c.end, PremiseMode::kDecontext, &decontext));
    hypotheses.push_back(ConvertRule(inst.question, c.text, inst.id));
    answers.push_back(std::move(c));
  }
  const auto pairs = BuildQaNli(instances, answers, premises, hypotheses);
  int entailed = 0, not_entailed = 0;
  for (const auto &p : pairs) (p.label == NliLabel::kEntailed ? entailed : not_entailed)++;
  const auto external =
      ImportExternalNli(ReadFile(Fixture("mnli60.jsonl")), ExternalSource::kMnli).pairs;
  const auto mixed = MixWithExternal(pairs, external, 0);
  int qa_origin = 0, ext_origin = 0;
  for (const auto &p : mixed)
    (p.origin == PairOrigin::kQaDerived ? qa_origin : ext_origin)++;
  std::ostringstream msg;
  msg << "mock EM " << em_correct << "/50, " << entailed << " entailed / " << not_entailed
      << " not_entailed, mixed " << mixed.size() << " (" << qa_origin << ":" << ext_origin
      << ")";
  if (em_correct != 30 || entailed != 30 || not_entailed != 20 || mixed.size() != 100 ||
      qa_origin != 50 || ext_origin != 50)
    throw std::runtime_error(msg.str());
  return msg.str();
}

// --- rejection ------------------------------------------------------------

std::string CheckRejection() {
  Scratch dir;
  PipelineConfig c;
  c.input = Fixture("rejection40.jsonl");
  c.heldout = 10;
  RunPipeline(c, dir.Sub("run"));
  const auto row = json::parse(ReadFile(dir.Sub("run/rejection.json")));
  const double reject = row["reject_unanswerable"], accept = row["accept_answerable"];
  std::ostringstream msg;
  msg << "reject_unanswerable " << reject << " (n=" << row["n_unanswerable"]
      << "), accept_answerable " << accept << " (n=" << row["n_answerable"] << ")";
  if (reject != 1.0 || accept < 0.9) throw std::runtime_error(msg.str());
  return msg.str();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> checks = {
      {"metric oracle equivalence", CheckTokenF1},
      {"oracle-ranking optimality", CheckOracleRanking},
      {"curve endpoint identity", CheckEndpoint},
      {"combiner correctness", CheckCombiner},
      {"fleiss kappa", CheckFleiss},
      {"pipeline determinism", CheckDeterminism},
      {"converter corpus", CheckConverter},
      {"nq-nli builder", CheckBuilder},
      {"mock rejection sanity", CheckRejection},
  };
  int failed = 0;
  for (const auto &[name, check] : checks) {
    try {
      const std::string detail = check();
      std::cout << "PASS " << name << ": " << detail << std::endl;
    } catch (const std::exception &e) {
      ++failed;
      std::cout << "FAIL " << name << ": " << e.what() << std::endl;
    }
  }
  std::cout << (checks.size() - failed) << "/" << checks.size() << " criteria pass"
            << std::endl;
  return failed == 0 ? 0 : 1;
}

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

#include "qaverify/calibrate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "qaverify/text.h"

namespace qaverify {
namespace {

void RequireProbability(double p, const char *name, const std::string &id) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError(id + ": " + name + " = " + std::to_string(p) +
                          " outside [0, 1]");
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double Softplus(double z) {
  return std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0);
}

json MetaToJson(const FitMeta &meta) {
  return {{"iterations", meta.iterations},
          {"final_loss", meta.final_loss},
          {"seed", meta.seed},
          {"degenerate", meta.degenerate}};
}

FitMeta MetaFromJson(const json &row) {
  FitMeta meta;
  if (!row.is_object()) return meta;
  meta.iterations = row.value("iterations", 0);
  meta.final_loss = row.value("final_loss", 0.0);
  meta.seed = row.value("seed", uint64_t{0});
  meta.degenerate = row.value("degenerate", false);
  return meta;
}

}  // namespace

void ValidateRecord(const ConfidenceRecord &r) {
  if (r.instance_id.empty()) throw ValidationError("record with empty id");
  RequireProbability(r.p_qa, "p_qa", r.instance_id);
  if (r.p_nli) RequireProbability(*r.p_nli, "p_nli", r.instance_id);
  if (r.p_qa2) RequireProbability(*r.p_qa2, "p_qa2", r.instance_id);
  if (r.features) {
    if (r.features->size() != kSelectiveFeatureCount)
      throw ValidationError(r.instance_id + ": expected 7 features, got " +
                            std::to_string(r.features->size()));
    for (int i = 2; i < kSelectiveFeatureCount - 1; ++i) {
      if ((*r.features)[i] < (*r.features)[i + 1])
        throw ValidationError(r.instance_id +
                              ": top-5 probabilities are not descending");
    }
  }
}

json ToJson(const ConfidenceRecord &r) {
  json row = {{"instance_id", r.instance_id},
              {"dataset", r.dataset},
              {"p_qa", r.p_qa},
              {"f1", r.f1},
              {"em", r.em},
              {"answerable", r.answerable}};
  if (r.p_nli) row["p_nli"] = *r.p_nli;
  if (r.p_qa2) row["p_qa2"] = *r.p_qa2;
  if (r.features) row["features"] = *r.features;
  if (r.accepted) row["accepted"] = *r.accepted;
  return row;
}

ConfidenceRecord RecordFromJson(const json &row) {
  ConfidenceRecord r;
  try {
    r.instance_id = row.at("instance_id").get<std::string>();
    r.dataset = row.value("dataset", "");
    r.p_qa = row.at("p_qa").get<double>();
    if (row.contains("p_nli") && !row["p_nli"].is_null())
      r.p_nli = row["p_nli"].get<double>();
    if (row.contains("p_qa2") && !row["p_qa2"].is_null())
      r.p_qa2 = row["p_qa2"].get<double>();
    if (row.contains("features") && !row["features"].is_null())
      r.features = row["features"].get<std::vector<double>>();
    r.f1 = row.at("f1").get<double>();
    r.em = row.value("em", false);
    r.answerable = row.value("answerable", true);
    if (row.contains("accepted") && !row["accepted"].is_null())
      r.accepted = row["accepted"].get<bool>();
  } catch (const json::exception &e) {
    throw ParseError(r.instance_id.empty() ? "record" : r.instance_id,
                     e.what());
  }
  ValidateRecord(r);
  return r;
}

std::vector<ConfidenceRecord> ReadRecords(const std::string &path) {
  std::vector<ConfidenceRecord> records;
  for (const auto &row : ReadJsonLines(path))
    records.push_back(RecordFromJson(row));
  return records;
}

void WriteRecords(const std::string &path,
                  const std::vector<ConfidenceRecord> &records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto &r : records) rows.push_back(ToJson(r));
  WriteJsonLines(path, rows);
}

std::vector<double> SelectiveFeatures(int64_t passage_words,
                                      int64_t answer_words,
                                      std::vector<double> top5) {
  top5.resize(5, 0.0);
  std::sort(top5.begin(), top5.end(), std::greater<>());
  std::vector<double> features = {static_cast<double>(passage_words),
                                  static_cast<double>(answer_words)};
  features.insert(features.end(), top5.begin(), top5.end());
  return features;
}

// ---------------------------------------------------------------------------

std::vector<double> DefaultGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> ParseGrid(std::string_view text) {
  std::vector<double> grid;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    try {
      size_t used = 0;
      grid.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw ValidationError("bad coverage grid value \"" + item + "\"");
    }
  }
  if (grid.empty()) throw ValidationError("empty coverage grid");
  return grid;
}

double MeanF1(std::span<const ConfidenceRecord> records) {
  if (records.empty()) throw ValidationError("mean F1 of no records");
  std::vector<double> f1s;
  f1s.reserve(records.size());
  for (const auto &r : records) f1s.push_back(r.f1);
  return ExactSum(f1s) / static_cast<double>(records.size());
}

CoverageCurve ComputeCoverageCurve(std::span<const ConfidenceRecord> records,
                                   const ConfidenceFn &confidence,
                                   std::span<const double> grid) {
  if (records.empty())
    throw ValidationError("coverage curve over an empty record set");
  std::vector<double> coverages(grid.begin(), grid.end());
  for (double k : coverages) {
    if (!(k > 0.0 && k <= 1.0))
      throw ValidationError("coverage " + std::to_string(k) +
                            " outside (0, 1]");
  }
  coverages.push_back(1.0);
  std::sort(coverages.begin(), coverages.end());
  coverages.erase(std::unique(coverages.begin(), coverages.end()),
                  coverages.end());

  struct Ranked {
    double confidence;
    const ConfidenceRecord *record;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(records.size());
  for (const auto &r : records) {
    const double c = confidence(r);
    if (std::isnan(c))
      throw ValidationError(r.instance_id + ": NaN confidence");
    ranked.push_back({c, &r});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked &a, const Ranked &b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.record->instance_id < b.record->instance_id;
  });

  CoverageCurve curve;
  curve.n_total = static_cast<int64_t>(records.size());
  const double n = static_cast<double>(records.size());
  std::vector<double> selected_f1;
  for (double k : coverages) {
    // The epsilon keeps e.g. 0.3 * 10 from rounding up to 4.
    auto count = static_cast<int64_t>(std::ceil(k * n - 1e-9));
    count = std::clamp<int64_t>(count, 1, curve.n_total);
    selected_f1.clear();
    for (int64_t i = 0; i < count; ++i) selected_f1.push_back(ranked[i].record->f1);
    CoveragePoint point;
    point.coverage = k;
    point.selected = count;
    point.threshold = ranked[count - 1].confidence;
    point.f1 = ExactSum(selected_f1) / static_cast<double>(count);
    curve.points.push_back(point);
  }
  return curve;
}

CoverageCurve MacroAverage(std::span<const CoverageCurve> curves) {
  if (curves.empty()) throw ValidationError("macro average of no curves");
  CoverageCurve avg;
  avg.points = curves.front().points;
  for (const auto &c : curves) {
    if (c.points.size() != avg.points.size())
      throw ValidationError("macro average over curves with different grids");
    avg.n_total += c.n_total;
  }
  for (size_t i = 0; i < avg.points.size(); ++i) {
    std::vector<double> f1s, thresholds;
    for (const auto &c : curves) {
      if (c.points[i].coverage != avg.points[i].coverage)
        throw ValidationError("macro average over curves with different grids");
      f1s.push_back(c.points[i].f1);
      thresholds.push_back(c.points[i].threshold);
    }
    const double m = static_cast<double>(curves.size());
    avg.points[i].f1 = ExactSum(f1s) / m;
    avg.points[i].threshold = ExactSum(thresholds) / m;
    avg.points[i].selected = 0;
  }
  return avg;
}

std::string FormatCurveTable(
    const std::vector<std::pair<std::string, CoverageCurve>> &curves) {
  std::string out;
  auto block = [&out](const std::string &name, const CoverageCurve &curve) {
    out += "# " + name + " (n=" + std::to_string(curve.n_total) + ")\n";
    out += "coverage\tthreshold\tf1\n";
    for (const auto &p : curve.points) {
      out += FormatDouble(p.coverage) + "\t" + FormatDouble(p.threshold) +
             "\t" + FormatDouble(p.f1) + "\n";
    }
  };
  std::vector<CoverageCurve> all;
  for (const auto &[name, curve] : curves) {
    block(name, curve);
    all.push_back(curve);
  }
  if (curves.size() > 1) block("macro-average", MacroAverage(all));
  return out;
}

// ---------------------------------------------------------------------------

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLoss(const std::vector<std::vector<double>> &x,
                    const std::vector<int> &y,
                    const std::vector<double> &weights, double bias) {
  std::vector<double> terms;
  terms.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double z = bias;
    for (size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[i][j];
    terms.push_back(Softplus(z) - y[i] * z);
  }
  return ExactSum(terms) / static_cast<double>(x.size());
}

std::vector<double> LogisticGradient(const std::vector<std::vector<double>> &x,
                                     const std::vector<int> &y,
                                     const std::vector<double> &weights,
                                     double bias) {
  std::vector<double> grad(weights.size() + 1, 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    double z = bias;
    for (size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[i][j];
    const double residual = Sigmoid(z) - y[i];
    for (size_t j = 0; j < weights.size(); ++j) grad[j] += residual * x[i][j];
    grad.back() += residual;
  }
  for (auto &g : grad) g /= static_cast<double>(x.size());
  return grad;
}

LogisticFit FitLogistic(const std::vector<std::vector<double>> &x,
                        const std::vector<int> &y, const FitConfig &config) {
  if (x.size() < 2) throw ValidationError("logistic fit needs >= 2 records");
  if (x.size() != y.size())
    throw ValidationError("logistic fit: features and targets differ in size");
  const size_t dim = x.front().size();
  LogisticFit fit;
  fit.weights.assign(dim, 0.0);
  fit.meta.seed = config.seed;
  const int positives = std::accumulate(y.begin(), y.end(), 0);
  if (positives == 0 || positives == static_cast<int>(y.size())) {
    fit.meta.degenerate = true;
    Warn("calibrate", "all targets are " +
                          std::string(positives == 0 ? "0" : "1") +
                          "; the fit is degenerate");
  }
  double loss = LogisticLoss(x, y, fit.weights, fit.bias);
  fit.meta.loss_history.push_back(loss);
  for (int it = 0; it < config.max_iterations; ++it) {
    std::vector<double> grad = LogisticGradient(x, y, fit.weights, fit.bias);
    if (!config.fit_bias) grad.back() = 0.0;
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    const double scale =
        norm > config.clip_norm ? config.clip_norm / norm : 1.0;
    for (size_t j = 0; j < dim; ++j)
      fit.weights[j] -= config.step * scale * grad[j];
    fit.bias -= config.step * scale * grad.back();
    const double next = LogisticLoss(x, y, fit.weights, fit.bias);
    fit.meta.loss_history.push_back(next);
    fit.meta.iterations = it + 1;
    const double change = std::fabs(loss - next);
    loss = next;
    if (change < config.tolerance) break;
  }
  fit.meta.final_loss = loss;
  return fit;
}

json ToJson(const CombinerModel &m) {
  return {{"w1", m.w1}, {"w2", m.w2}, {"bias", m.bias},
          {"fit_meta", MetaToJson(m.fit_meta)}};
}

CombinerModel CombinerFromJson(const json &row) {
  try {
    CombinerModel m;
    m.w1 = row.at("w1").get<double>();
    m.w2 = row.at("w2").get<double>();
    m.bias = row.value("bias", 0.0);
    if (row.contains("fit_meta")) m.fit_meta = MetaFromJson(row["fit_meta"]);
    if (!std::isfinite(m.w1) || !std::isfinite(m.w2) || !std::isfinite(m.bias))
      throw ValidationError("combiner model with non-finite weights");
    return m;
  } catch (const json::exception &e) {
    throw ParseError("combiner model", e.what());
  }
}

int TargetOf(const ConfidenceRecord &record, const FitConfig &config) {
  if (config.f1_target_threshold)
    return record.f1 >= *config.f1_target_threshold ? 1 : 0;
  return record.em ? 1 : 0;
}

namespace {

CombinerModel FitPair(std::span<const ConfidenceRecord> records,
                      const FitConfig &config, bool ensemble) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto &r : records) {
    const auto &second = ensemble ? r.p_qa2 : r.p_nli;
    if (!second)
      throw ValidationError(r.instance_id + ": missing " +
                            (ensemble ? "p_qa2" : "p_nli") +
                            " for combiner fit");
    x.push_back({r.p_qa, *second});
    y.push_back(TargetOf(r, config));
  }
  LogisticFit fit = FitLogistic(x, y, config);
  CombinerModel model;
  model.w1 = fit.weights[0];
  model.w2 = fit.weights[1];
  model.bias = fit.bias;
  model.fit_meta = std::move(fit.meta);
  return model;
}

}  // namespace

CombinerModel FitCombiner(std::span<const ConfidenceRecord> records,
                          const FitConfig &config) {
  return FitPair(records, config, false);
}

double Combine(const CombinerModel &model, double p_qa, double p_nli) {
  return Sigmoid(model.w1 * p_qa + model.w2 * p_nli + model.bias);
}

double Combine(const CombinerModel &model, const ConfidenceRecord &record) {
  if (!record.p_nli)
    throw ValidationError(record.instance_id + ": missing p_nli");
  return Combine(model, record.p_qa, *record.p_nli);
}

CombinerModel FitEnsemble(std::span<const ConfidenceRecord> records,
                          const FitConfig &config) {
  return FitPair(records, config, true);
}

double EnsembleQa(double p_qa_1, double p_qa_2, const CombinerModel &model) {
  return Sigmoid(model.w1 * p_qa_1 + model.w2 * p_qa_2 + model.bias);
}

std::vector<ConfidenceRecord> JoinQaStreams(
    std::span<const ConfidenceRecord> first,
    std::span<const ConfidenceRecord> second) {
  std::unordered_map<std::string, const ConfidenceRecord *> by_id;
  for (const auto &r : second) by_id.emplace(r.instance_id, &r);
  std::vector<std::string> missing;
  std::vector<ConfidenceRecord> joined;
  for (const auto &r : first) {
    auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) {
      missing.push_back(r.instance_id);
      continue;
    }
    ConfidenceRecord out = r;
    out.p_qa2 = it->second->p_qa;
    joined.push_back(std::move(out));
  }
  if (missing.empty() && first.size() != second.size()) {
    std::unordered_map<std::string, bool> in_first;
    for (const auto &r : first) in_first[r.instance_id] = true;
    for (const auto &r : second)
      if (!in_first.count(r.instance_id)) missing.push_back(r.instance_id);
  }
  if (!missing.empty())
    throw ValidationError("QA streams do not share ids: " +
                          Join(missing, ", "));
  return joined;
}

json ToJson(const CalibratorModel &m) {
  return {{"weights", m.weights}, {"bias", m.bias},     {"mean", m.mean},
          {"stddev", m.stddev},   {"dropped", m.dropped},
          {"fit_meta", MetaToJson(m.fit_meta)}};
}

CalibratorModel CalibratorFromJson(const json &row) {
  try {
    CalibratorModel m;
    m.weights = row.at("weights").get<std::vector<double>>();
    m.bias = row.value("bias", 0.0);
    m.mean = row.at("mean").get<std::vector<double>>();
    m.stddev = row.at("stddev").get<std::vector<double>>();
    m.dropped = row.at("dropped").get<std::vector<bool>>();
    if (row.contains("fit_meta")) m.fit_meta = MetaFromJson(row["fit_meta"]);
    if (m.weights.size() != kSelectiveFeatureCount ||
        m.mean.size() != kSelectiveFeatureCount ||
        m.stddev.size() != kSelectiveFeatureCount ||
        m.dropped.size() != kSelectiveFeatureCount)
      throw ValidationError("calibrator model must have 7 features");
    return m;
  } catch (const json::exception &e) {
    throw ParseError("calibrator model", e.what());
  }
}

CalibratorModel FitCalibrator(std::span<const ConfidenceRecord> records,
                              const FitConfig &config) {
  constexpr int d = kSelectiveFeatureCount;
  std::vector<std::vector<double>> raw;
  std::vector<int> y;
  for (const auto &r : records) {
    if (!r.features || r.features->size() != d)
      throw ValidationError(r.instance_id + ": missing the 7 selective features");
    raw.push_back(*r.features);
    y.push_back(TargetOf(r, config));
  }
  if (raw.size() < 2) throw ValidationError("calibrator fit needs >= 2 records");
  CalibratorModel model;
  model.mean.assign(d, 0.0);
  model.stddev.assign(d, 0.0);
  model.dropped.assign(d, false);
  model.weights.assign(d, 0.0);
  const double n = static_cast<double>(raw.size());
  std::vector<int> kept;
  for (int j = 0; j < d; ++j) {
    std::vector<double> col, sq;
    for (const auto &row : raw) col.push_back(row[j]);
    model.mean[j] = ExactSum(col) / n;
    for (double v : col) sq.push_back((v - model.mean[j]) * (v - model.mean[j]));
    model.stddev[j] = std::sqrt(ExactSum(sq) / n);
    if (model.stddev[j] < 1e-12) {
      model.dropped[j] = true;
    } else {
      kept.push_back(j);
    }
  }
  std::vector<std::vector<double>> z;
  for (const auto &row : raw) {
    std::vector<double> zr;
    for (int j : kept) zr.push_back((row[j] - model.mean[j]) / model.stddev[j]);
    z.push_back(std::move(zr));
  }
  LogisticFit fit = FitLogistic(z, y, config);
  for (size_t k = 0; k < kept.size(); ++k) model.weights[kept[k]] = fit.weights[k];
  model.bias = fit.bias;
  model.fit_meta = std::move(fit.meta);
  return model;
}

double ApplyCalibrator(const CalibratorModel &model,
                       const ConfidenceRecord &record) {
  if (!record.features || record.features->size() != kSelectiveFeatureCount)
    throw ValidationError(record.instance_id +
                          ": missing the 7 selective features");
  double z = model.bias;
  for (int j = 0; j < kSelectiveFeatureCount; ++j) {
    if (model.dropped[j]) continue;
    z += model.weights[j] * ((*record.features)[j] - model.mean[j]) /
         model.stddev[j];
  }
  return Sigmoid(z);
}

ConfidenceSource ParseConfidenceSource(std::string_view name) {
  const std::string n = Lowercase(name);
  if (n == "qa") return ConfidenceSource::kQa;
  if (n == "nli") return ConfidenceSource::kNli;
  if (n == "combined") return ConfidenceSource::kCombined;
  if (n == "ensemble") return ConfidenceSource::kEnsemble;
  if (n == "selective") return ConfidenceSource::kSelective;
  throw ValidationError("unknown confidence \"" + std::string(name) + "\"");
}

std::string ConfidenceSourceName(ConfidenceSource source) {
  switch (source) {
    case ConfidenceSource::kQa: return "qa";
    case ConfidenceSource::kNli: return "nli";
    case ConfidenceSource::kCombined: return "combined";
    case ConfidenceSource::kEnsemble: return "ensemble";
    case ConfidenceSource::kSelective: return "selective";
  }
  return "qa";
}

ConfidenceFn MakeConfidenceFn(ConfidenceSource source,
                              const CombinerModel *combiner,
                              const CalibratorModel *calibrator) {
  switch (source) {
    case ConfidenceSource::kQa:
      return [](const ConfidenceRecord &r) { return r.p_qa; };
    case ConfidenceSource::kNli:
      return [](const ConfidenceRecord &r) {
        if (!r.p_nli) throw ValidationError(r.instance_id + ": missing p_nli");
        return *r.p_nli;
      };
    case ConfidenceSource::kCombined:
      if (!combiner) throw ValidationError("combined confidence needs a model");
      return [combiner](const ConfidenceRecord &r) {
        return Combine(*combiner, r);
      };
    case ConfidenceSource::kEnsemble:
      if (!combiner) throw ValidationError("ensemble confidence needs a model");
      return [combiner](const ConfidenceRecord &r) {
        if (!r.p_qa2) throw ValidationError(r.instance_id + ": missing p_qa2");
        return EnsembleQa(r.p_qa, *r.p_qa2, *combiner);
      };
    case ConfidenceSource::kSelective:
      if (!calibrator)
        throw ValidationError("selective confidence needs a calibrator");
      return [calibrator](const ConfidenceRecord &r) {
        return ApplyCalibrator(*calibrator, r);
      };
  }
  throw ValidationError("unknown confidence source");
}

RejectionRates ComputeRejectionRates(std::span<const VerifiedAnswer> answers,
                                     std::optional<double> threshold) {
  RejectionRates rates;
  int64_t rejected = 0, accepted = 0;
  for (const auto &a : answers) {
    const bool ok = Accepts(a.score, threshold);
    if (a.answerable) {
      ++rates.n_answerable;
      accepted += ok ? 1 : 0;
    } else {
      ++rates.n_unanswerable;
      rejected += ok ? 0 : 1;
    }
  }
  if (rates.n_unanswerable == 0)
    throw ValidationError("rejection rates: the unanswerable partition is empty");
  if (rates.n_answerable == 0)
    throw ValidationError("rejection rates: the answerable partition is empty");
  rates.reject_unanswerable =
      static_cast<double>(rejected) / static_cast<double>(rates.n_unanswerable);
  rates.accept_answerable =
      static_cast<double>(accepted) / static_cast<double>(rates.n_answerable);
  return rates;
}

}  // namespace qaverify

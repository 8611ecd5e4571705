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

#include "qaverify/nli_client.h"

#include <algorithm>
#include <cmath>

namespace qaverify {

json ToJson(const EntailmentScore &s) {
  return {{"p_entail", s.p_entail},
          {"p_neutral", s.p_neutral},
          {"p_contradiction", s.p_contradiction},
          {"backend_id", s.backend_id}};
}

EntailmentScore ScoreFromJson(const json &row) {
  try {
    EntailmentScore s;
    s.p_entail = row.at("p_entail").get<double>();
    s.p_neutral = row.at("p_neutral").get<double>();
    s.p_contradiction = row.at("p_contradiction").get<double>();
    s.backend_id = row.value("backend_id", "");
    return s;
  } catch (const json::exception &e) {
    throw ParseError("score", e.what());
  }
}

EntailmentScore NormalizeScore(const NliResponse &response) {
  EntailmentScore s;
  s.backend_id = response.backend_id;
  s.p_entail = response.p_entail;
  if (response.binary) {
    s.p_neutral = 0.0;
    s.p_contradiction = 1.0 - response.p_entail;
  } else {
    s.p_neutral = response.p_neutral;
    s.p_contradiction = response.p_contradiction;
  }
  for (double p : {s.p_entail, s.p_neutral, s.p_contradiction}) {
    if (std::isnan(p) || std::isinf(p))
      throw BackendError("entailment backend returned a non-finite score",
                         false);
    if (p < 0.0)
      throw BackendError("entailment backend returned a negative score",
                         false);
  }
  if (response.binary && s.p_entail > 1.0)
    throw BackendError("binary entailment score above 1", false);
  const double total = s.p_entail + s.p_neutral + s.p_contradiction;
  if (total <= 0.0)
    throw BackendError("entailment backend returned an all-zero score", false);
  if (std::fabs(total - 1.0) > 1e-6) {
    Warn("nli_client", "renormalizing scores summing to " +
                           std::to_string(total) + " from " +
                           response.backend_id);
    s.p_entail /= total;
    s.p_neutral /= total;
    s.p_contradiction /= total;
  }
  return s;
}

EntailmentScore Score(const std::string &premise, const std::string &hypothesis,
                      const NliBackend &backend) {
  if (premise.empty()) throw ValidationError("empty premise");
  if (hypothesis.empty()) throw ValidationError("empty hypothesis");
  NliResponse response = backend.Entail(premise, hypothesis);
  if (response.backend_id.empty()) response.backend_id = backend.id();
  return NormalizeScore(response);
}

std::vector<EntailmentScore> ScoreBatch(
    const std::vector<std::pair<std::string, std::string>> &pairs,
    const NliBackend &backend, int jobs) {
  return OrderedParallelMap(pairs, jobs, [&](const auto &pair) {
    return Score(pair.first, pair.second, backend);
  });
}

bool Accepts(const EntailmentScore &score, std::optional<double> threshold) {
  if (threshold) return score.p_entail >= *threshold;
  return score.p_entail > std::max(score.p_neutral, score.p_contradiction);
}

}  // namespace qaverify

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

#ifndef QAVERIFY_NLI_CLIENT_H_
#define QAVERIFY_NLI_CLIENT_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qaverify/backend.h"
#include "qaverify/common.h"

namespace qaverify {

struct EntailmentScore {
  double p_entail = 0.0;
  double p_neutral = 0.0;
  double p_contradiction = 0.0;
  std::string backend_id;

  bool operator==(const EntailmentScore &) const = default;
};

json ToJson(const EntailmentScore &score);
EntailmentScore ScoreFromJson(const json &row);

// Validates and normalizes a raw backend response. Binary responses expand to
// (p, 0, 1 - p). A 3-class triple that does not sum to 1 within 1e-6 is
// renormalized with a warning. NaN, negative or all-zero output throws a
// non-retriable BackendError.
EntailmentScore NormalizeScore(const NliResponse &response);

// Throws ValidationError on empty inputs; transport failures propagate as
// retriable BackendError.
EntailmentScore Score(const std::string &premise, const std::string &hypothesis,
                      const NliBackend &backend);

// Order-preserving batch scoring with up to `jobs` concurrent requests.
std::vector<EntailmentScore> ScoreBatch(
    const std::vector<std::pair<std::string, std::string>> &pairs,
    const NliBackend &backend, int jobs = 1);

// Verifier decision. Without a threshold: entailment must be the strict
// argmax (ties reject). With one: p_entail >= threshold.
bool Accepts(const EntailmentScore &score,
             std::optional<double> threshold = std::nullopt);

}  // namespace qaverify

#endif  // QAVERIFY_NLI_CLIENT_H_

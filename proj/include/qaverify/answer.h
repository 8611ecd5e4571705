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

#ifndef QAVERIFY_ANSWER_H_
#define QAVERIFY_ANSWER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "qaverify/backend.h"
#include "qaverify/corpus.h"

namespace qaverify {

// A predicted answer span for one instance.
struct AnswerCandidate {
  std::string instance_id;
  std::string text;
  int64_t start = -1;  // char offsets into the context; -1 when unknown
  int64_t end = -1;
  double p_qa = 0.0;
  std::vector<double> top5;  // descending, padded to 5
  std::string backend_id;

  bool operator==(const AnswerCandidate &) const = default;
};

json ToJson(const AnswerCandidate &candidate);
AnswerCandidate CandidateFromJson(const json &row);

// Runs the QA backend on one instance. Offsets the backend did not supply
// are resolved by first case-insensitive occurrence; top5 is padded with
// zeros and sorted descending.
AnswerCandidate GenerateAnswer(const QAInstance &instance,
                               const QaBackend &backend);

}  // namespace qaverify

#endif  // QAVERIFY_ANSWER_H_

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

#include "qaverify/answer.h"

#include <algorithm>
#include <functional>

namespace qaverify {

json ToJson(const AnswerCandidate &c) {
  return {{"instance_id", c.instance_id}, {"text", c.text},
          {"start", c.start},             {"end", c.end},
          {"p_qa", c.p_qa},               {"top5", c.top5},
          {"backend_id", c.backend_id}};
}

AnswerCandidate CandidateFromJson(const json &row) {
  try {
    AnswerCandidate c;
    c.instance_id = row.at("instance_id").get<std::string>();
    c.text = row.at("text").get<std::string>();
    c.start = row.value("start", int64_t{-1});
    c.end = row.value("end", int64_t{-1});
    c.p_qa = row.at("p_qa").get<double>();
    c.top5 = row.value("top5", std::vector<double>{});
    c.backend_id = row.value("backend_id", "");
    return c;
  } catch (const json::exception &e) {
    throw ParseError("answer candidate", e.what());
  }
}

AnswerCandidate GenerateAnswer(const QAInstance &instance,
                               const QaBackend &backend) {
  QaRequest request;
  request.id = instance.id;
  request.question = instance.question;
  request.context = instance.context;
  request.meta = instance.meta;
  for (const auto &g : instance.gold_answers)
    request.gold.push_back({g.text, g.start, g.end});
  QaResponse response = backend.Answer(request);

  AnswerCandidate c;
  c.instance_id = instance.id;
  c.text = response.text;
  c.start = response.start;
  c.end = response.end;
  c.p_qa = response.p;
  c.backend_id = response.backend_id.empty() ? backend.id()
                                             : response.backend_id;
  const auto len = static_cast<int64_t>(instance.context.size());
  if (c.start < 0 || c.end <= c.start || c.end > len) {
    c.start = c.end = -1;
    if (auto found = FindCaseInsensitive(instance.context, c.text)) {
      c.start = found->first;
      c.end = found->second;
    }
  }
  c.top5 = response.top5;
  c.top5.resize(5, 0.0);
  std::sort(c.top5.begin(), c.top5.end(), std::greater<>());
  return c;
}

}  // namespace qaverify

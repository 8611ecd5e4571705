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

#ifndef QAVERIFY_BACKEND_H_
#define QAVERIFY_BACKEND_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qaverify/common.h"

namespace qaverify {

// Model backends for the four pipeline tasks. Each task is an independent
// interface so a run can mix mock and served models. Implementations must be
// safe to call concurrently.
//
// Wire contract (HTTP POST, JSON bodies; every response carries backend_id):
//   /v1/qa         {id, question, context, gold?:[{text,start,end}], meta}
//                  -> {text, start, end, p, top5:[5 floats, descending]}
//   /v1/convert    {question, answer} -> {text}
//   /v1/decontext  {title, sentences:[...], target_index}
//                  -> {text, category: done|unnecessary|infeasible}
//   /v1/nli        {premise, hypothesis}
//                  -> {p_entail, p_neutral, p_contradiction}
//   /v1/<task>/batch  {batch:[request...]} -> {batch:[response...]}
//   GET /v1/manifest  -> [{backend_id, task, checkpoint, ...}]

struct QaRequest {
  std::string id;
  std::string question;
  std::string context;
  // Gold answers forwarded as request metadata; the mock answers with the
  // first one. Served models ignore them.
  struct Gold {
    std::string text;
    int64_t start = -1;
    int64_t end = -1;
  };
  std::vector<Gold> gold;
  std::map<std::string, std::string> meta;
};

struct QaResponse {
  std::string text;
  int64_t start = -1;
  int64_t end = -1;
  double p = 0.0;
  std::vector<double> top5;
  std::string backend_id;
};

enum class DecontextCategory { kDone, kUnnecessary, kInfeasible, kNone };
std::string CategoryName(DecontextCategory category);
DecontextCategory ParseCategory(std::string_view name);

struct DecontextRequest {
  std::string title;
  std::vector<std::string> sentences;
  int target_index = 0;
};

struct DecontextResponse {
  std::string text;
  DecontextCategory category = DecontextCategory::kNone;
  std::string backend_id;
};

struct NliResponse {
  double p_entail = 0.0;
  double p_neutral = 0.0;
  double p_contradiction = 0.0;
  // Binary backends report only p_entail.
  bool binary = false;
  std::string backend_id;
};

class QaBackend {
 public:
  virtual ~QaBackend() = default;
  virtual std::string id() const = 0;
  virtual QaResponse Answer(const QaRequest &request) const = 0;
};

class ConvertBackend {
 public:
  virtual ~ConvertBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string Convert(const std::string &question,
                              const std::string &answer) const = 0;
};

class DecontextBackend {
 public:
  virtual ~DecontextBackend() = default;
  virtual std::string id() const = 0;
  virtual DecontextResponse Decontextualize(
      const DecontextRequest &request) const = 0;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual std::string id() const = 0;
  virtual NliResponse Entail(const std::string &premise,
                             const std::string &hypothesis) const = 0;
};

// Deterministic mocks. Their outputs are part of the wire contract: the
// model server's mock mode must reproduce them bit for bit.

// First gold answer with p=0.9 unless meta["mock_qa"] == "wrong" or there is
// no gold; then the first capitalized token run of the context that does not
// match a gold answer, with p=0.6.
class MockQaBackend : public QaBackend {
 public:
  std::string id() const override { return "mock-qa/1"; }
  QaResponse Answer(const QaRequest &request) const override;
};

// "ANSWER VERB-PHRASE" template picked by an FNV-1a hash of the inputs.
class MockConvertBackend : public ConvertBackend {
 public:
  std::string id() const override { return "mock-convert/1"; }
  std::string Convert(const std::string &question,
                      const std::string &answer) const override;
};

// Prefixes the title ("<title>: <sentence>", category done). A single
// sentence or an empty title comes back unchanged as unnecessary.
class MockDecontextBackend : public DecontextBackend {
 public:
  std::string id() const override { return "mock-decontext/1"; }
  DecontextResponse Decontextualize(
      const DecontextRequest &request) const override;
};

// p_entail = 1 when the hypothesis content words are contained in the
// premise's, otherwise their Jaccard overlap; the rest splits 2:1 between
// neutral and contradiction.
class MockNliBackend : public NliBackend {
 public:
  std::string id() const override { return "mock-nli/1"; }
  NliResponse Entail(const std::string &premise,
                     const std::string &hypothesis) const override;
};

// Descending top-5 list used by mock QA: p, (1-p)/2, (1-p)/4, ...
std::vector<double> MockTop5(double p);

// Endpoint spec: "mock", "none", "http:<url>" or a bare http(s):// URL.
struct EndpointSpec {
  enum class Kind { kMock, kHttp, kNone };
  Kind kind = Kind::kMock;
  std::string url;

  static EndpointSpec Parse(std::string_view spec);
  std::string ToString() const;
};

struct HttpOptions {
  int max_attempts = 3;
  int timeout_seconds = 60;
};

// Factories return nullptr for Kind::kNone.
std::unique_ptr<QaBackend> MakeQaBackend(const EndpointSpec &spec,
                                         const HttpOptions &options = {});
std::unique_ptr<ConvertBackend> MakeConvertBackend(
    const EndpointSpec &spec, const HttpOptions &options = {});
std::unique_ptr<DecontextBackend> MakeDecontextBackend(
    const EndpointSpec &spec, const HttpOptions &options = {});
std::unique_ptr<NliBackend> MakeNliBackend(const EndpointSpec &spec,
                                           const HttpOptions &options = {});

// GET /v1/manifest.
json FetchManifest(const std::string &url, const HttpOptions &options = {});

// Wire (de)serialization, shared by the HTTP client and test servers.
json ToWire(const QaRequest &request);
json ToWire(const QaResponse &response);
json ToWire(const DecontextRequest &request);
json ToWire(const DecontextResponse &response);
json ToWire(const NliResponse &response);
QaRequest QaRequestFromWire(const json &body);
QaResponse QaResponseFromWire(const json &body);
DecontextRequest DecontextRequestFromWire(const json &body);
DecontextResponse DecontextResponseFromWire(const json &body);
NliResponse NliResponseFromWire(const json &body);

// The response the built-in mocks give for a wire request. `endpoint` is one
// of "/v1/qa", "/v1/convert", "/v1/decontext", "/v1/nli" or its "/batch"
// variant. Throws ValidationError on malformed requests.
json MockWireResponse(std::string_view endpoint, const json &request);

// Manifest describing the built-in mocks.
json MockManifest();

}  // namespace qaverify

#endif  // QAVERIFY_BACKEND_H_

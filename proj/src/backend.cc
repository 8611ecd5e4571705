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

#include "qaverify/backend.h"

#include <cctype>
#include <chrono>
#include <limits>
#include <set>
#include <thread>

#include "httplib.h"
#include "qaverify/corpus.h"
#include "qaverify/scoring.h"
#include "qaverify/text.h"

namespace qaverify {
namespace {

bool IsAsciiPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }

struct Candidate {
  std::string text;
  int64_t start = -1;
  int64_t end = -1;
};

// Capitalized runs: consecutive whitespace tokens whose first alphanumeric
// character is uppercase. Trailing punctuation on a token closes the run.
Candidate FirstCapitalizedRun(const std::string &context,
                              const std::vector<QaRequest::Gold> &gold) {
  std::set<std::string> gold_norms;
  for (const auto &g : gold) gold_norms.insert(NormalizeAnswer(g.text));

  struct Core {
    size_t begin, end;
    bool capitalized;
    bool closes;
  };
  std::vector<Core> cores;
  size_t i = 0;
  while (i < context.size()) {
    while (i < context.size() &&
           std::isspace(static_cast<unsigned char>(context[i])))
      ++i;
    size_t tb = i;
    while (i < context.size() &&
           !std::isspace(static_cast<unsigned char>(context[i])))
      ++i;
    size_t te = i;
    if (te == tb) break;
    size_t cb = tb, ce = te;
    while (cb < ce && IsAsciiPunct(context[cb])) ++cb;
    while (ce > cb && IsAsciiPunct(context[ce - 1])) --ce;
    if (cb == ce) {
      cores.push_back({tb, tb, false, true});
      continue;
    }
    const bool cap = context[cb] >= 'A' && context[cb] <= 'Z';
    cores.push_back({cb, ce, cap, ce < te});
  }

  for (size_t k = 0; k < cores.size(); ++k) {
    if (!cores[k].capitalized) continue;
    size_t last = k;
    while (!cores[last].closes && last + 1 < cores.size() &&
           cores[last + 1].capitalized)
      ++last;
    Candidate c{context.substr(cores[k].begin, cores[last].end - cores[k].begin),
                static_cast<int64_t>(cores[k].begin),
                static_cast<int64_t>(cores[last].end)};
    const std::string norm = NormalizeAnswer(c.text);
    if (!norm.empty() && gold_norms.count(norm) == 0) return c;
    k = last;
  }
  for (const auto &core : cores) {
    if (core.end > core.begin)
      return {context.substr(core.begin, core.end - core.begin),
              static_cast<int64_t>(core.begin), static_cast<int64_t>(core.end)};
  }
  return {};
}

std::string StripQuestionMark(const std::string &text) {
  std::string out = Trim(text);
  while (!out.empty() && (out.back() == '?' ||
                          std::isspace(static_cast<unsigned char>(out.back()))))
    out.pop_back();
  return out;
}

const std::set<std::string> kWh = {"who",  "what", "when",  "where", "which",
                                   "why",  "how",  "whose", "whom"};

}  // namespace

std::string CategoryName(DecontextCategory category) {
  switch (category) {
    case DecontextCategory::kDone: return "done";
    case DecontextCategory::kUnnecessary: return "unnecessary";
    case DecontextCategory::kInfeasible: return "infeasible";
    case DecontextCategory::kNone: return "none";
  }
  return "none";
}

DecontextCategory ParseCategory(std::string_view name) {
  const std::string n = Lowercase(name);
  if (n == "done") return DecontextCategory::kDone;
  if (n == "unnecessary") return DecontextCategory::kUnnecessary;
  if (n == "infeasible" || n == "impossible") return DecontextCategory::kInfeasible;
  if (n == "none" || n.empty()) return DecontextCategory::kNone;
  throw BackendError("unknown decontext category \"" + std::string(name) + "\"",
                     false);
}

std::vector<double> MockTop5(double p) {
  std::vector<double> top5{p};
  double rest = 1.0 - p;
  for (int i = 0; i < 4; ++i) {
    rest /= 2.0;
    top5.push_back(rest);
  }
  return top5;
}

QaResponse MockQaBackend::Answer(const QaRequest &request) const {
  QaResponse response;
  response.backend_id = id();
  auto it = request.meta.find("mock_qa");
  const bool wrong = it != request.meta.end() && it->second == "wrong";
  if (!wrong && !request.gold.empty()) {
    const auto &g = request.gold.front();
    response.text = g.text;
    response.start = g.start;
    response.end = g.end;
    if (response.start < 0) {
      if (auto found = FindCaseInsensitive(request.context, g.text)) {
        response.start = found->first;
        response.end = found->second;
      }
    }
    response.p = 0.9;
  } else {
    Candidate c = FirstCapitalizedRun(request.context, request.gold);
    response.text = c.text;
    response.start = c.start;
    response.end = c.end;
    response.p = 0.6;
  }
  response.top5 = MockTop5(response.p);
  return response;
}

std::string MockConvertBackend::Convert(const std::string &question,
                                        const std::string &answer) const {
  auto words = SplitWhitespace(StripQuestionMark(question));
  if (!words.empty() && kWh.count(Lowercase(words.front())) > 0)
    words.erase(words.begin());
  const std::string vp = Join(words, " ");
  const std::string a = Trim(answer);
  if (vp.empty()) return a + ".";
  switch (Fnv1a64(question + '\x1f' + answer) % 3) {
    case 0: return a + " " + vp + ".";
    case 1: return a + " indeed " + vp + ".";
    default: return a + " " + vp + ", according to the passage.";
  }
}

DecontextResponse MockDecontextBackend::Decontextualize(
    const DecontextRequest &request) const {
  if (request.target_index < 0 ||
      request.target_index >= static_cast<int>(request.sentences.size()))
    throw ValidationError("decontext target_index out of range");
  DecontextResponse response;
  response.backend_id = id();
  const std::string &target = request.sentences[request.target_index];
  const std::string title = Trim(request.title);
  if (request.sentences.size() == 1 || title.empty()) {
    response.text = target;
    response.category = DecontextCategory::kUnnecessary;
  } else {
    response.text = title + ": " + target;
    response.category = DecontextCategory::kDone;
  }
  return response;
}

NliResponse MockNliBackend::Entail(const std::string &premise,
                                   const std::string &hypothesis) const {
  const auto p = ContentWordSet(premise);
  const auto h = ContentWordSet(hypothesis);
  bool contained = true;
  for (const auto &w : h) {
    if (!p.count(w)) {
      contained = false;
      break;
    }
  }
  NliResponse response;
  response.backend_id = id();
  response.p_entail = contained ? 1.0 : Jaccard(h, p);
  const double rest = 1.0 - response.p_entail;
  response.p_neutral = rest * 2.0 / 3.0;
  response.p_contradiction = rest / 3.0;
  return response;
}

// ---------------------------------------------------------------------------
// Wire format.

json ToWire(const QaRequest &request) {
  json gold = json::array();
  for (const auto &g : request.gold)
    gold.push_back({{"text", g.text}, {"start", g.start}, {"end", g.end}});
  return {{"id", request.id},       {"question", request.question},
          {"context", request.context}, {"gold", gold},
          {"meta", request.meta}};
}

json ToWire(const QaResponse &response) {
  return {{"text", response.text}, {"start", response.start},
          {"end", response.end},   {"p", response.p},
          {"top5", response.top5}, {"backend_id", response.backend_id}};
}

json ToWire(const DecontextRequest &request) {
  return {{"title", request.title},
          {"sentences", request.sentences},
          {"target_index", request.target_index}};
}

json ToWire(const DecontextResponse &response) {
  return {{"text", response.text},
          {"category", CategoryName(response.category)},
          {"backend_id", response.backend_id}};
}

json ToWire(const NliResponse &response) {
  json out = {{"p_entail", response.p_entail},
              {"backend_id", response.backend_id}};
  if (!response.binary) {
    out["p_neutral"] = response.p_neutral;
    out["p_contradiction"] = response.p_contradiction;
  }
  return out;
}

QaRequest QaRequestFromWire(const json &body) {
  try {
    QaRequest request;
    request.id = body.value("id", "");
    request.question = body.at("question").get<std::string>();
    request.context = body.at("context").get<std::string>();
    for (const auto &g : body.value("gold", json::array()))
      request.gold.push_back({g.at("text").get<std::string>(),
                              g.value("start", int64_t{-1}),
                              g.value("end", int64_t{-1})});
    if (body.contains("meta"))
      request.meta =
          body.at("meta").get<std::map<std::string, std::string>>();
    return request;
  } catch (const json::exception &e) {
    throw ValidationError(std::string("bad qa request: ") + e.what());
  }
}

QaResponse QaResponseFromWire(const json &body) {
  try {
    QaResponse response;
    response.text = body.at("text").get<std::string>();
    response.start = body.value("start", int64_t{-1});
    response.end = body.value("end", int64_t{-1});
    response.p = body.at("p").get<double>();
    response.top5 = body.value("top5", std::vector<double>{});
    response.top5.resize(5, 0.0);
    response.backend_id = body.value("backend_id", "");
    return response;
  } catch (const json::exception &e) {
    throw BackendError(std::string("bad qa response: ") + e.what(), false);
  }
}

DecontextRequest DecontextRequestFromWire(const json &body) {
  try {
    DecontextRequest request;
    request.title = body.value("title", "");
    request.sentences = body.at("sentences").get<std::vector<std::string>>();
    request.target_index = body.at("target_index").get<int>();
    return request;
  } catch (const json::exception &e) {
    throw ValidationError(std::string("bad decontext request: ") + e.what());
  }
}

DecontextResponse DecontextResponseFromWire(const json &body) {
  try {
    DecontextResponse response;
    response.text = body.at("text").get<std::string>();
    response.category = ParseCategory(body.value("category", "none"));
    response.backend_id = body.value("backend_id", "");
    return response;
  } catch (const json::exception &e) {
    throw BackendError(std::string("bad decontext response: ") + e.what(),
                       false);
  }
}

NliResponse NliResponseFromWire(const json &body) {
  try {
    NliResponse response;
    // Non-numbers (e.g. null for NaN) are passed through as NaN so the
    // caller can reject them.
    auto number = [&](const char *key) {
      const json &v = body.at(key);
      return v.is_number() ? v.get<double>()
                           : std::numeric_limits<double>::quiet_NaN();
    };
    response.p_entail = number("p_entail");
    if (body.contains("p_neutral") || body.contains("p_contradiction")) {
      response.p_neutral = number("p_neutral");
      response.p_contradiction = number("p_contradiction");
    } else {
      response.binary = true;
    }
    response.backend_id = body.value("backend_id", "");
    return response;
  } catch (const json::exception &e) {
    throw BackendError(std::string("bad nli response: ") + e.what(), false);
  }
}

json MockWireResponse(std::string_view endpoint, const json &request) {
  static const MockQaBackend qa;
  static const MockConvertBackend convert;
  static const MockDecontextBackend decontext;
  static const MockNliBackend nli;
  std::string_view base = endpoint;
  if (EndsWith(base, "/batch")) {
    base.remove_suffix(6);
    if (!request.contains("batch") || !request["batch"].is_array())
      throw ValidationError("batch request lacks a batch list");
    json out = json::array();
    for (const auto &item : request["batch"])
      out.push_back(MockWireResponse(base, item));
    return {{"batch", out}};
  }
  try {
    if (base == "/v1/qa") return ToWire(qa.Answer(QaRequestFromWire(request)));
    if (base == "/v1/convert") {
      return {{"text", convert.Convert(request.at("question").get<std::string>(),
                                       request.at("answer").get<std::string>())},
              {"backend_id", convert.id()}};
    }
    if (base == "/v1/decontext")
      return ToWire(
          decontext.Decontextualize(DecontextRequestFromWire(request)));
    if (base == "/v1/nli")
      return ToWire(nli.Entail(request.at("premise").get<std::string>(),
                               request.at("hypothesis").get<std::string>()));
  } catch (const json::exception &e) {
    throw ValidationError(std::string("bad request: ") + e.what());
  }
  throw ValidationError("unknown endpoint " + std::string(endpoint));
}

json MockManifest() {
  json out = json::array();
  for (const auto &[id, task] :
       std::vector<std::pair<std::string, std::string>>{
           {"mock-qa/1", "qa"},
           {"mock-convert/1", "convert"},
           {"mock-decontext/1", "decontext"},
           {"mock-nli/1", "nli"}}) {
    out.push_back({{"backend_id", id},
                   {"task", task},
                   {"checkpoint", "mock"},
                   {"decoding", {{"strategy", "deterministic"}}},
                   {"max_input_length", 0}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Endpoint specs and HTTP backends.

EndpointSpec EndpointSpec::Parse(std::string_view spec) {
  const std::string s = Trim(spec);
  if (s.empty() || s == "mock") return {Kind::kMock, ""};
  if (s == "none") return {Kind::kNone, ""};
  if (StartsWith(s, "http:") && !StartsWith(s, "http://"))
    return {Kind::kHttp, s.substr(5)};
  if (StartsWith(s, "http://") || StartsWith(s, "https://"))
    return {Kind::kHttp, s};
  throw ValidationError("bad backend endpoint \"" + s +
                        "\" (expected mock, none, or http:<url>)");
}

std::string EndpointSpec::ToString() const {
  switch (kind) {
    case Kind::kMock: return "mock";
    case Kind::kNone: return "none";
    case Kind::kHttp: return "http:" + url;
  }
  return "mock";
}

namespace {

class HttpEndpoint {
 public:
  HttpEndpoint(std::string url, HttpOptions options)
      : options_(options) {
    // Split "http://host:port/prefix" into the client origin and a path prefix.
    size_t scheme = url.find("://");
    size_t slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash == std::string::npos) {
      origin_ = url;
    } else {
      origin_ = url.substr(0, slash);
      prefix_ = url.substr(slash);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  const std::string &origin() const { return origin_; }

  json Post(const std::string &path, const json &body) const {
    return Call(path, &body);
  }
  json Get(const std::string &path) const { return Call(path, nullptr); }

 private:
  json Call(const std::string &path, const json *body) const {
    std::string last_error;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
      httplib::Client client(origin_);
      client.set_connection_timeout(options_.timeout_seconds, 0);
      client.set_read_timeout(options_.timeout_seconds, 0);
      auto res = body ? client.Post(prefix_ + path, body->dump(),
                                    "application/json")
                      : client.Get(prefix_ + path);
      if (!res) {
        last_error = origin_ + prefix_ + path + ": " +
                     httplib::to_string(res.error());
      } else if (res->status >= 500) {
        last_error = origin_ + prefix_ + path + ": HTTP " +
                     std::to_string(res->status);
      } else if (res->status != 200) {
        throw BackendError(origin_ + prefix_ + path + ": HTTP " +
                               std::to_string(res->status) + " " + res->body,
                           false);
      } else {
        try {
          return json::parse(res->body);
        } catch (const json::exception &e) {
          throw BackendError(path + ": unparseable response: " + e.what(),
                             false);
        }
      }
      if (attempt < options_.max_attempts)
        std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    }
    throw BackendError(last_error, true);
  }

  std::string origin_;
  std::string prefix_;
  HttpOptions options_;
};

class HttpQaBackend : public QaBackend {
 public:
  HttpQaBackend(std::string url, HttpOptions options)
      : url_(url), endpoint_(std::move(url), options) {}
  std::string id() const override { return "http:" + url_; }
  QaResponse Answer(const QaRequest &request) const override {
    return QaResponseFromWire(endpoint_.Post("/v1/qa", ToWire(request)));
  }

 private:
  std::string url_;
  HttpEndpoint endpoint_;
};

class HttpConvertBackend : public ConvertBackend {
 public:
  HttpConvertBackend(std::string url, HttpOptions options)
      : url_(url), endpoint_(std::move(url), options) {}
  std::string id() const override { return "http:" + url_; }
  std::string Convert(const std::string &question,
                      const std::string &answer) const override {
    json body = endpoint_.Post("/v1/convert",
                               {{"question", question}, {"answer", answer}});
    if (!body.contains("text") || !body["text"].is_string())
      throw BackendError("bad convert response: missing text", false);
    return body["text"].get<std::string>();
  }

 private:
  std::string url_;
  HttpEndpoint endpoint_;
};

class HttpDecontextBackend : public DecontextBackend {
 public:
  HttpDecontextBackend(std::string url, HttpOptions options)
      : url_(url), endpoint_(std::move(url), options) {}
  std::string id() const override { return "http:" + url_; }
  DecontextResponse Decontextualize(
      const DecontextRequest &request) const override {
    return DecontextResponseFromWire(
        endpoint_.Post("/v1/decontext", ToWire(request)));
  }

 private:
  std::string url_;
  HttpEndpoint endpoint_;
};

class HttpNliBackend : public NliBackend {
 public:
  HttpNliBackend(std::string url, HttpOptions options)
      : url_(url), endpoint_(std::move(url), options) {}
  std::string id() const override { return "http:" + url_; }
  NliResponse Entail(const std::string &premise,
                     const std::string &hypothesis) const override {
    return NliResponseFromWire(endpoint_.Post(
        "/v1/nli", {{"premise", premise}, {"hypothesis", hypothesis}}));
  }

 private:
  std::string url_;
  HttpEndpoint endpoint_;
};

}  // namespace

std::unique_ptr<QaBackend> MakeQaBackend(const EndpointSpec &spec,
                                         const HttpOptions &options) {
  switch (spec.kind) {
    case EndpointSpec::Kind::kMock: return std::make_unique<MockQaBackend>();
    case EndpointSpec::Kind::kHttp:
      return std::make_unique<HttpQaBackend>(spec.url, options);
    case EndpointSpec::Kind::kNone: return nullptr;
  }
  return nullptr;
}

std::unique_ptr<ConvertBackend> MakeConvertBackend(
    const EndpointSpec &spec, const HttpOptions &options) {
  switch (spec.kind) {
    case EndpointSpec::Kind::kMock:
      return std::make_unique<MockConvertBackend>();
    case EndpointSpec::Kind::kHttp:
      return std::make_unique<HttpConvertBackend>(spec.url, options);
    case EndpointSpec::Kind::kNone: return nullptr;
  }
  return nullptr;
}

std::unique_ptr<DecontextBackend> MakeDecontextBackend(
    const EndpointSpec &spec, const HttpOptions &options) {
  switch (spec.kind) {
    case EndpointSpec::Kind::kMock:
      return std::make_unique<MockDecontextBackend>();
    case EndpointSpec::Kind::kHttp:
      return std::make_unique<HttpDecontextBackend>(spec.url, options);
    case EndpointSpec::Kind::kNone: return nullptr;
  }
  return nullptr;
}

std::unique_ptr<NliBackend> MakeNliBackend(const EndpointSpec &spec,
                                           const HttpOptions &options) {
  switch (spec.kind) {
    case EndpointSpec::Kind::kMock: return std::make_unique<MockNliBackend>();
    case EndpointSpec::Kind::kHttp:
      return std::make_unique<HttpNliBackend>(spec.url, options);
    case EndpointSpec::Kind::kNone: return nullptr;
  }
  return nullptr;
}

json FetchManifest(const std::string &url, const HttpOptions &options) {
  return HttpEndpoint(url, options).Get("/v1/manifest");
}

}  // namespace qaverify

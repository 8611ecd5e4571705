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

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "qaverify/common.h"
#include "qaverify/nli_client.h"
#include "test_util.h"

namespace qaverify {
namespace {

using testing::Fixture;

QaRequest Request(const std::string &context, const std::string &gold,
                  bool wrong = false) {
  QaRequest r;
  r.id = "q";
  r.question = "who did it";
  r.context = context;
  if (!gold.empty()) r.gold.push_back({gold, -1, -1});
  if (wrong) r.meta["mock_qa"] = "wrong";
  return r;
}

TEST(MockQa, AnswersWithGold) {
  MockQaBackend qa;
  auto r = qa.Answer(Request("It was done by Ada Lovelace in 1843.", "Ada Lovelace"));
  EXPECT_EQ(r.text, "Ada Lovelace");
  EXPECT_EQ(r.start, 15);
  EXPECT_EQ(r.end, 27);
  EXPECT_DOUBLE_EQ(r.p, 0.9);
  EXPECT_EQ(r.backend_id, "mock-qa/1");
  ASSERT_EQ(r.top5.size(), 5u);
  EXPECT_TRUE(std::is_sorted(r.top5.rbegin(), r.top5.rend()));
}

TEST(MockQa, WrongPicksNonGoldCapitalizedRun) {
  MockQaBackend qa;
  auto r = qa.Answer(Request("Charles Babbage met Ada Lovelace.", "Charles Babbage",
                             /*wrong=*/true));
  EXPECT_NE(r.text, "Charles Babbage");
  EXPECT_FALSE(r.text.empty());
  EXPECT_DOUBLE_EQ(r.p, 0.6);
}

TEST(MockTop5, Shape) {
  auto t = MockTop5(0.9);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t[0], 0.9);
  EXPECT_DOUBLE_EQ(t[1], 0.05);
  EXPECT_DOUBLE_EQ(t[2], 0.025);
}

TEST(MockConvert, DeterministicAndContainsAnswer) {
  MockConvertBackend c;
  for (const char *q : {"who wrote hamlet", "where is paris", "what is love"}) {
    auto a = c.Convert(q, "X Y");
    EXPECT_EQ(a, c.Convert(q, "X Y"));
    EXPECT_NE(a.find("X Y"), std::string::npos);
  }
}

TEST(MockDecontext, PrefixesTitle) {
  MockDecontextBackend d;
  auto r = d.Decontextualize({"Hamlet", {"A play.", "It is long."}, 1});
  EXPECT_EQ(r.text, "Hamlet: It is long.");
  EXPECT_EQ(r.category, DecontextCategory::kDone);
  auto single = d.Decontextualize({"Hamlet", {"A play."}, 0});
  EXPECT_EQ(single.text, "A play.");
  EXPECT_EQ(single.category, DecontextCategory::kUnnecessary);
  auto untitled = d.Decontextualize({"", {"A.", "B."}, 0});
  EXPECT_EQ(untitled.category, DecontextCategory::kUnnecessary);
  EXPECT_THROW(d.Decontextualize({"t", {"A."}, 3}), ValidationError);
}

TEST(MockNli, ContainmentAndSplit) {
  MockNliBackend n;
  auto yes = n.Entail("Ada Lovelace wrote the first program.",
                      "Ada Lovelace wrote the program.");
  EXPECT_DOUBLE_EQ(yes.p_entail, 1.0);
  EXPECT_DOUBLE_EQ(yes.p_neutral, 0.0);
  auto partial = n.Entail("Ada wrote programs.", "Babbage wrote programs.");
  EXPECT_GT(partial.p_entail, 0.0);
  EXPECT_LT(partial.p_entail, 1.0);
  EXPECT_NEAR(partial.p_neutral, 2 * partial.p_contradiction, 1e-15);
  EXPECT_NEAR(partial.p_entail + partial.p_neutral + partial.p_contradiction,
              1.0, 1e-12);
}

TEST(Endpoint, ParseAndPrint) {
  EXPECT_EQ(EndpointSpec::Parse("mock").kind, EndpointSpec::Kind::kMock);
  EXPECT_EQ(EndpointSpec::Parse("").kind, EndpointSpec::Kind::kMock);
  EXPECT_EQ(EndpointSpec::Parse("none").kind, EndpointSpec::Kind::kNone);
  auto h = EndpointSpec::Parse("http:http://localhost:8000");
  EXPECT_EQ(h.kind, EndpointSpec::Kind::kHttp);
  EXPECT_EQ(h.url, "http://localhost:8000");
  EXPECT_EQ(EndpointSpec::Parse("http://a:1/x").ToString(), "http:http://a:1/x");
  EXPECT_THROW(EndpointSpec::Parse("ftp://nope"), ValidationError);
  EXPECT_EQ(MakeNliBackend(EndpointSpec::Parse("none")), nullptr);
  EXPECT_EQ(MakeQaBackend(EndpointSpec::Parse("mock"))->id(), "mock-qa/1");
}

TEST(Wire, RoundTrips) {
  QaRequest q = Request("Ctx here.", "Ctx");
  q.meta["title"] = "T";
  auto back = QaRequestFromWire(ToWire(q));
  EXPECT_EQ(back.context, q.context);
  EXPECT_EQ(back.gold.size(), 1u);
  EXPECT_EQ(back.meta, q.meta);

  QaResponse r{"a", 1, 2, 0.5, {0.5, 0.2, 0, 0, 0}, "id"};
  auto r2 = QaResponseFromWire(ToWire(r));
  EXPECT_EQ(r2.text, "a");
  EXPECT_EQ(r2.top5, r.top5);

  DecontextResponse d{"x", DecontextCategory::kInfeasible, "id"};
  EXPECT_EQ(DecontextResponseFromWire(ToWire(d)).category,
            DecontextCategory::kInfeasible);

  NliResponse bin;
  bin.p_entail = 0.3;
  bin.binary = true;
  EXPECT_TRUE(NliResponseFromWire(ToWire(bin)).binary);
  EXPECT_FALSE(ToWire(bin).contains("p_neutral"));
}

TEST(Wire, MalformedResponsesAreNonRetriable) {
  try {
    QaResponseFromWire(json{{"start", 1}});
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_FALSE(e.retriable());
  }
  auto nan = NliResponseFromWire(
      json{{"p_entail", nullptr}, {"p_neutral", 0.5}, {"p_contradiction", 0.5}});
  EXPECT_TRUE(std::isnan(nan.p_entail));
  EXPECT_THROW(NormalizeScore(nan), BackendError);
  EXPECT_THROW(QaRequestFromWire(json{{"id", "x"}}), ValidationError);
}

TEST(Wire, MockWireBatchAndUnknown) {
  json batch = {{"batch", json::array({json{{"premise", "a b"}, {"hypothesis", "a"}},
                                       json{{"premise", "c"}, {"hypothesis", "d"}}})}};
  auto out = MockWireResponse("/v1/nli/batch", batch);
  ASSERT_EQ(out["batch"].size(), 2u);
  EXPECT_EQ(out["batch"][0], MockWireResponse("/v1/nli", batch["batch"][0]));
  EXPECT_THROW(MockWireResponse("/v1/nope", json::object()), ValidationError);
  EXPECT_THROW(MockWireResponse("/v1/nli/batch", json::object()), ValidationError);
  EXPECT_EQ(MockManifest().size(), 4u);
}

TEST(Wire, GoldenFileMatchesMocks) {
  const auto rows = ReadJsonLines(Fixture("mock_golden.jsonl"));
  ASSERT_EQ(rows.size(), 100u);
  std::map<std::string, int> per_endpoint;
  for (const auto &row : rows) {
    per_endpoint[row["endpoint"].get<std::string>()]++;
    EXPECT_EQ(MockWireResponse(row["endpoint"].get<std::string>(), row["request"]),
              row["response"])
        << row.dump();
  }
  for (const auto &[endpoint, n] : per_endpoint) EXPECT_EQ(n, 25) << endpoint;
  EXPECT_EQ(per_endpoint.size(), 4u);
}

// A local server speaking the wire protocol with the mock responses.
class MockServer {
 public:
  MockServer() {
    server_.Post(R"(/v1/.*)", [this](const httplib::Request &req,
                                     httplib::Response &res) {
      ++hits_;
      if (fail_first_ > 0) {
        --fail_first_;
        res.status = 503;
        return;
      }
      if (reject_) {
        res.status = 400;
        res.set_content("nope", "text/plain");
        return;
      }
      res.set_content(MockWireResponse(req.path, json::parse(req.body)).dump(),
                      "application/json");
    });
    server_.Get("/v1/manifest", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(MockManifest().dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  void FailFirst(int n) { fail_first_ = n; }
  void Reject() { reject_ = true; }
  int hits() const { return hits_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::atomic<int> fail_first_{0};
  std::atomic<bool> reject_{false};
};

TEST(Http, MatchesMockBackends) {
  MockServer server;
  const auto spec = EndpointSpec::Parse("http:" + server.url());
  auto qa = MakeQaBackend(spec);
  auto nli = MakeNliBackend(spec);
  auto conv = MakeConvertBackend(spec);
  auto dec = MakeDecontextBackend(spec);
  MockQaBackend mqa;
  MockNliBackend mnli;
  MockConvertBackend mconv;
  MockDecontextBackend mdec;

  auto req = Request("It was Ada Lovelace.", "Ada Lovelace");
  auto a = qa->Answer(req), b = mqa.Answer(req);
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.start, b.start);
  EXPECT_EQ(a.top5, b.top5);
  EXPECT_EQ(a.backend_id, "mock-qa/1");

  auto e1 = nli->Entail("Ada wrote code.", "Babbage wrote code.");
  auto e2 = mnli.Entail("Ada wrote code.", "Babbage wrote code.");
  EXPECT_EQ(e1.p_entail, e2.p_entail);
  EXPECT_EQ(e1.p_contradiction, e2.p_contradiction);
  EXPECT_EQ(conv->Convert("who wrote it", "Ada"), mconv.Convert("who wrote it", "Ada"));
  DecontextRequest dr{"T", {"One.", "Two."}, 1};
  EXPECT_EQ(dec->Decontextualize(dr).text, mdec.Decontextualize(dr).text);
  EXPECT_EQ(FetchManifest(server.url()), MockManifest());
}

TEST(Http, RetriesServerErrors) {
  MockServer server;
  server.FailFirst(2);
  auto nli = MakeNliBackend(EndpointSpec::Parse("http:" + server.url()),
                            HttpOptions{3, 5});
  EXPECT_DOUBLE_EQ(nli->Entail("a b", "a").p_entail, 1.0);
  EXPECT_EQ(server.hits(), 3);
}

TEST(Http, ExhaustedRetriesAreRetriable) {
  MockServer server;
  server.FailFirst(10);
  auto nli = MakeNliBackend(EndpointSpec::Parse("http:" + server.url()),
                            HttpOptions{2, 5});
  try {
    nli->Entail("a", "b");
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_TRUE(e.retriable());
  }
  EXPECT_EQ(server.hits(), 2);
}

TEST(Http, ClientErrorIsNotRetried) {
  MockServer server;
  server.Reject();
  auto nli = MakeNliBackend(EndpointSpec::Parse("http:" + server.url()));
  try {
    nli->Entail("a", "b");
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_FALSE(e.retriable());
  }
  EXPECT_EQ(server.hits(), 1);
}

TEST(Http, UnreachableIsRetriable) {
  auto nli = MakeNliBackend(EndpointSpec::Parse("http:http://127.0.0.1:1"),
                            HttpOptions{1, 1});
  try {
    nli->Entail("a", "b");
    FAIL();
  } catch (const BackendError &e) {
    EXPECT_TRUE(e.retriable());
  }
}

}  // namespace
}  // namespace qaverify

// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <memory>
#include <thread>

#include "support.hpp"
#include "synsearch/export.hpp"
#include "synsearch/index.hpp"
#include "synsearch/service.hpp"

using namespace synsearch;
using namespace synsearch::testing;
using nlohmann::json;

namespace {

std::shared_ptr<const ParseProvider> shared_fixture_provider() {
  static auto provider = std::make_shared<FixtureParseProvider>(fixtures_dir() / "parses");
  return provider;
}

std::shared_ptr<const IndexArtifact> fixture_index() {
  static auto idx = std::make_shared<IndexArtifact>(build_index(load_fixture_corpus()));
  return idx;
}

SearchService ready_service(ServiceConfig config = {}) {
  SearchService svc(shared_fixture_provider(), config);
  svc.set_index(fixture_index());
  return svc;
}

json post(const SearchService& svc, const json& body) {
  auto r = svc.query(body.dump());
  REQUIRE(r.status == 200);
  return json::parse(r.body);
}

const char* kFounder = "<>founder:[e]Paul was a t:[w]founder of <>entity:[e]Microsoft";
const char* kDegreeHer = "<>subj:[e]John obtained $her d:[w]degree $from <>inst:Harvard";

}  // namespace

TEST_CASE("service: health before and after the index is installed") {
  SearchService svc(shared_fixture_provider());
  CHECK_FALSE(svc.ready());
  CHECK(svc.health().status == 503);
  CHECK(svc.query(R"({"query":"x:y"})").status == 503);
  CHECK(svc.export_tsv("x:y", std::nullopt).status == 503);
  svc.set_index(fixture_index());
  auto h = svc.health();
  CHECK(h.status == 200);
  auto body = json::parse(h.body);
  CHECK(body["status"] == "ok");
  CHECK(body["corpus_sentences"] == 30);
  CHECK(body["index_version"] == kIndexFormatVersion);
}

TEST_CASE("service: founder query returns graph and highlighted captures") {
  auto svc = ready_service();
  auto body = post(svc, {{"query", kFounder}});
  CHECK(body["graph"]["nodes"].size() == 3);
  CHECK(body["graph"]["edges"].size() == 2);
  CHECK(body["total_estimate"] == 3);
  CHECK(body["page"] == 0);
  CHECK(body["page_size"] == 50);
  CHECK(body["truncated_sentences"] == 0);
  REQUIRE(body["results"].size() == 3);
  const auto& first = body["results"][0];
  CHECK(first["sentence_id"] == "s03");
  CHECK(first["text"] == "Paul Allen was a founder of Microsoft.");
  CHECK(first["captures"][0] == json{{"name", "founder"}, {"token", 1}, {"span", {0, 2}}, {"text", "Paul Allen"}});
  CHECK(first["captures"][2]["text"] == "Microsoft");
}

TEST_CASE("service: errors map to statuses with positions") {
  auto svc = ready_service();
  auto r = svc.query(R"({"query":"a::b"})");
  CHECK(r.status == 400);
  auto body = json::parse(r.body);
  CHECK(body["error_kind"] == "SyntaxError");
  CHECK(body["position"] == 2);
  CHECK(body["message"].is_string());

  CHECK(json::parse(svc.query(R"({"query":"John went home"})").body)["error_kind"] == "NoMarkedWords");
  CHECK(svc.query(R"({"query":"Nobody :knows"})").status == 502);
  CHECK(svc.query("not json").status == 400);
  CHECK(svc.query(R"({"page":1})").status == 400);
  CHECK(svc.query(R"({"query":"x:y","page":-1})").status == 400);
  CHECK(svc.query(R"({"query":"x:y","page_size":0})").status == 400);
  CHECK(svc.query(R"({"query":"x:y","page_size":501})").status == 400);
  CHECK(svc.export_tsv("a::b", std::nullopt).status == 400);

  // A provider that misaligns surfaces as 422.
  struct Misaligned : ParseProvider {
    SentenceGraph parse(const ParseRequest&) const override {
      throw Error(ErrorKind::AlignmentError, "query could not be parsed");
    }
  };
  SearchService bad(std::make_shared<Misaligned>());
  bad.set_index(fixture_index());
  CHECK(bad.query(R"({"query":"x:y"})").status == 422);
}

TEST_CASE("service: a page past the end is empty but keeps the graph") {
  auto svc = ready_service();
  auto body = post(svc, {{"query", kFounder}, {"page", 7}, {"page_size", 2}});
  CHECK(body["results"].empty());
  CHECK(body["graph"]["nodes"].size() == 3);
  CHECK(body["total_estimate"] == 3);
}

TEST_CASE("service: pages are disjoint and concatenate to the full stream") {
  auto svc = ready_service();
  const std::string q = ":Harvard";  // one unconstrained node: every token matches
  auto all = post(svc, {{"query", q}, {"page_size", 500}});
  const auto total = all["results"].size();
  CHECK(total == fixture_index()->token_count());
  CHECK(all["total_estimate"] == total);
  json joined = json::array();
  for (int page = 0;; ++page) {
    auto body = post(svc, {{"query", q}, {"page", page}, {"page_size", 7}});
    if (body["results"].empty()) break;
    CHECK(body["results"].size() <= 7);
    for (auto& r : body["results"]) joined.push_back(r);
  }
  CHECK(joined == all["results"]);
}

TEST_CASE("service: counting stops at the cap") {
  ServiceConfig config;
  config.count_cap = 20;
  auto svc = ready_service(config);
  auto body = post(svc, {{"query", ":Harvard"}, {"page_size", 5}});
  CHECK(body["total_estimate"] == "more");
  CHECK(body["results"].size() == 5);
  auto late = post(svc, {{"query", ":Harvard"}, {"page", 5}, {"page_size", 5}});
  CHECK(late["results"].size() == 5);
  auto founder = post(svc, {{"query", kFounder}});
  CHECK(founder["total_estimate"] == 3);
}

TEST_CASE("service: export agrees with the query endpoint") {
  auto svc = ready_service();
  auto r = svc.export_tsv(kDegreeHer, std::nullopt);
  CHECK(r.status == 200);
  CHECK(r.content_type.rfind("text/tab-separated-values", 0) == 0);
  std::vector<std::string> lines;
  std::istringstream in(r.body);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "sentence_id\tsentence_text\tsubj_text\tsubj_start\tsubj_end\td_text\td_start\td_end\tinst_text\tinst_start"
        "\tinst_end");

  auto body = post(svc, {{"query", kDegreeHer}});
  REQUIRE(body["results"].size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& res = body["results"][i];
    std::string expect = res["sentence_id"].get<std::string>() + "\t" + res["text"].get<std::string>();
    for (const auto& c : res["captures"])
      expect += "\t" + c["text"].get<std::string>() + "\t" + std::to_string(c["span"][0].get<int>()) + "\t" +
                std::to_string(c["span"][1].get<int>());
    CHECK(lines[i + 1] == expect);
  }

  auto limited = svc.export_tsv(kDegreeHer, 2);
  CHECK(std::count(limited.body.begin(), limited.body.end(), '\n') == 3);
  auto none = svc.export_tsv("<>subj:[e]John obtained $her d:[w=diploma]degree $from <>inst:Harvard", std::nullopt);
  CHECK(std::count(none.body.begin(), none.body.end(), '\n') == 1);
}

TEST_CASE("export: tabs and newlines inside cells become spaces") {
  CHECK(tsv_escape("a\tb\nc\rd") == "a b c d");
  MatchResult r;
  r.sentence_id = "id\t1";
  r.sentence_text = "two\twords";
  r.captures.push_back({"x", 0, {0, 1}, "cap\ttext"});
  std::ostringstream out;
  write_tsv_row(out, r);
  CHECK(out.str() == "id 1\ttwo words\tcap text\t0\t1\n");
}

TEST_CASE("service: HTTP round trip with CORS") {
  auto svc = ready_service();
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto q = client.Post("/api/query", json{{"query", kFounder}}.dump(), "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  CHECK(json::parse(q->body)["results"].size() == 3);

  auto bad = client.Post("/api/query", R"({"query":"a::b"})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  auto tsv = client.Get("/api/export?query=" + httplib::detail::encode_query_param(kDegreeHer));
  REQUIRE(tsv);
  CHECK(tsv->status == 200);
  CHECK(tsv->body == svc.export_tsv(kDegreeHer, std::nullopt).body);
  CHECK(client.Get("/api/export?query=x&limit=0")->status == 400);
  CHECK(client.Get("/api/export")->status == 400);

  auto pre = client.Options("/api/query");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  server.stop();
  thread.join();
}

// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "support.hpp"
#include "synsearch/index.hpp"
#include "synsearch/matcher.hpp"

using namespace synsearch;
using namespace synsearch::testing;

namespace {

const SentenceGraph& fixture_sentence(const Corpus& c, std::string_view id) {
  for (const auto& s : c.sentences)
    if (s.sentence_id == id) return s;
  throw std::runtime_error("no sentence " + std::string(id));
}

std::vector<MatchResult> run_all(const IndexArtifact& idx, std::string_view query) {
  auto stream = run_query(idx, compile_query(query, fixture_provider()).graph);
  std::vector<MatchResult> out;
  while (auto r = stream.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<std::string> ids(const std::vector<MatchResult>& results) {
  std::vector<std::string> out;
  for (const auto& r : results) out.push_back(r.sentence_id);
  return out;
}

}  // namespace

TEST_CASE("match_sentence: wanted/go/home") {
  auto corpus = load_fixture_corpus();
  auto g = compile_query("John w:wanted to v:[tag]go h:[word]home", fixture_provider()).graph;

  auto first = match_sentence(g, fixture_sentence(corpus, "s01"));
  REQUIRE(first.size() == 1);
  CHECK(first[0].captures == std::vector<Capture>{{"w", 1, {1, 2}, "wanted"}, {"v", 3, {3, 4}, "go"},
                                                 {"h", 4, {4, 5}, "home"}});
  CHECK(first[0].sentence_id == "s01");
  CHECK(first[0].sentence_text == "John wanted to go home after lunch");

  auto second = match_sentence(g, fixture_sentence(corpus, "s02"));
  REQUIRE(second.size() == 1);
  CHECK(second[0].find("w")->text == "decided");
  CHECK(second[0].find("v")->text == "call");
  CHECK(second[0].find("h")->text == "home");

  CHECK(match_sentence(g, fixture_sentence(corpus, "s17")).empty());
  CHECK(match_sentence(g, fixture_sentence(corpus, "s30")).empty());
}

TEST_CASE("match_sentence: a single match-anything node binds every token") {
  auto corpus = ingest_string(
      "# sent_id = three\n"
      "1\tdogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
      "2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_\n"
      "3\tloudly\tloudly\tADV\tRB\t_\t2\tadvmod\t_\t_\n\n");
  QueryGraph g;
  QueryNode n;
  n.name = "x";
  n.role = NodeRole::Capture;
  g.nodes.push_back(n);
  auto results = match_sentence(g, corpus.sentences[0]);
  REQUIRE(results.size() == 3);
  for (TokenIndex i = 0; i < 3; ++i) CHECK(results[i].captures[0].token == i);
}

TEST_CASE("match_sentence: connector placements collapse onto named captures") {
  // x -> c1 and x -> c2 both lead to y via "b": two connector placements, one result.
  auto corpus = ingest_string(
      "# sent_id = d\n"
      "1\tx\tx\tX\tX\t_\t0\troot\t0:root\t_\n"
      "2\tc\tc\tX\tX\t_\t1\ta\t1:a\t_\n"
      "3\tc\tc\tX\tX\t_\t1\ta\t1:a\t_\n"
      "4\ty\ty\tX\tX\t_\t2\tb\t2:b|3:b\t_\n\n");
  QueryGraph g;
  g.nodes.resize(3);
  g.nodes[0].name = "x";
  g.nodes[0].constraint = parse_constraint_spec("w=x", Token{});
  g.nodes[1].id = 1;
  g.nodes[2].id = 2;
  g.nodes[2].name = "y";
  g.edges = {{0, 1, "a"}, {1, 2, "b"}};
  auto results = match_sentence(g, corpus.sentences[0]);
  REQUIRE(results.size() == 1);
  CHECK(results[0].captures.size() == 2);
  CHECK(results[0].find("y")->token == 3);
}

TEST_CASE("match_sentence: assignments are injective") {
  auto corpus = ingest_string(
      "# sent_id = loop\n"
      "1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t1\tr\t_\t_\n\n");
  QueryGraph g;
  g.nodes.resize(3);
  for (NodeId i = 0; i < 3; ++i) {
    g.nodes[i].id = i;
    g.nodes[i].name = "n" + std::to_string(i);
  }
  g.edges = {{0, 1, "r"}, {0, 2, "r"}};
  CHECK(match_sentence(g, corpus.sentences[0]).empty());
  g.nodes.pop_back();
  g.edges.pop_back();
  CHECK(match_sentence(g, corpus.sentences[0]).size() == 1);
}

TEST_CASE("expand_span: entity, then chunk, then the token") {
  auto corpus = load_fixture_corpus();
  const auto& times = fixture_sentence(corpus, "s27");  // The New York Times reported the news
  CHECK(expand_span(times, 2) == Span{1, 4});            // entity wins over the NP chunk (0,4)
  CHECK(expand_span(times, 0) == Span{0, 4});            // chunk only
  CHECK(expand_span(times, 4) == Span{4, 5});            // neither
  const auto& old_man = fixture_sentence(corpus, "s28");
  CHECK(expand_span(old_man, 1) == Span{0, 3});
  const auto& paul = fixture_sentence(corpus, "s03");
  CHECK(expand_span(paul, 0) == Span{0, 2});
  CHECK(expand_span(paul, 1) == Span{0, 2});
}

TEST_CASE("run_query: founder query with expansion") {
  auto idx = build_index(load_fixture_corpus());
  auto results = run_all(idx, "<>founder:[e]Paul was a t:[w]founder of <>entity:[e]Microsoft");
  REQUIRE(ids(results) == std::vector<std::string>{"s03", "s06", "s29"});
  CHECK(results[0].captures == std::vector<Capture>{{"founder", 1, {0, 2}, "Paul Allen"},
                                                    {"t", 4, {4, 5}, "founder"},
                                                    {"entity", 6, {6, 7}, "Microsoft"}});
  CHECK(results[2].find("founder")->text == "Bill Gates");
  CHECK(results[1].find("entity")->text == "Apple");
}

TEST_CASE("run_query: the degree walkthrough narrows step by step") {
  auto idx = build_index(load_fixture_corpus());
  using V = std::vector<std::string>;
  CHECK(ids(run_all(idx, "subj:John obtained his d:[w]degree from inst:Harvard")) ==
        V{"s07", "s08", "s09", "s10", "s11", "s12", "s14", "s16"});
  CHECK(ids(run_all(idx, "subj:John obtained his d:[w]degree $from inst:Harvard")) ==
        V{"s07", "s08", "s10", "s12", "s14", "s16"});
  CHECK(ids(run_all(idx, "subj:[e]John obtained his d:[w]degree $from inst:Harvard")) ==
        V{"s07", "s08", "s14", "s16"});
  auto expanded = run_all(idx, "<>subj:[e]John obtained his d:[w]degree $from <>inst:Harvard");
  REQUIRE(ids(expanded) == V{"s07", "s08", "s14", "s16"});
  CHECK(expanded[0].find("subj")->text == "Barack Obama");
  CHECK(expanded[1].find("inst")->text == "Yale University");
  CHECK(ids(run_all(idx, "<>subj:[e]John obtained $his d:[w]degree $from <>inst:Harvard")) == V{"s07"});
  CHECK(ids(run_all(idx, "<>subj:[e]John obtained $her d:[w]degree $from <>inst:Harvard")) ==
        V{"s08", "s14", "s16"});
  CHECK(ids(run_all(idx, "<>subj:[e]John :[l]obtained his d:degree $from <>inst:[w]Harvard")) == V{"s07", "s15"});
  CHECK(ids(run_all(idx, "<>subj:[e]John :[]obtained his d:[w]degree $from <>inst:[w]Harvard")) ==
        V{"s07", "s16"});
  CHECK(ids(run_all(idx, "<>subj:[e]John o:[l=receive|complete|earn|obtain|get]obtained his "
                         "d:[w=degree|PhD]degree $from <>inst:Harvard")) == V{"s07", "s08", "s13", "s14", "s16"});
}

TEST_CASE("run_query: distractors become candidates but not results") {
  auto corpus = load_fixture_corpus();
  auto idx = build_index(corpus);
  auto g = compile_query("<>founder:[e]Paul was a t:[w]founder of <>entity:[e]Microsoft", fixture_provider()).graph;
  auto cand = candidates(idx, plan(g));
  CHECK(std::find(cand.begin(), cand.end(), 4u) != cand.end());  // s05
  CHECK(match_sentence(g, corpus.sentences[4]).empty());
  CHECK(match_sentence(g, fixture_sentence(corpus, "s04")).empty());
  ResultStream stream(idx, g);
  while (stream.next()) {
  }
  CHECK(stream.sentences_verified() == 4);
  CHECK(stream.truncated_sentences() == 0);
}

TEST_CASE("run_query: empty corpus") {
  auto idx = build_index(Corpus{});
  auto g = compile_query("John w:wanted to v:[tag]go h:[word]home", fixture_provider()).graph;
  CHECK_FALSE(run_query(idx, g).next());
}

TEST_CASE("match_sentence: the per-sentence cap truncates") {
  Corpus c;
  SentenceGraph s;
  s.sentence_id = "wide";
  for (TokenIndex i = 0; i < 60; ++i) {
    Token t;
    t.index = i;
    t.word = "w" + std::to_string(i);
    t.lemma = t.word;
    t.tag = "X";
    s.tokens.push_back(t);
    if (i > 0) s.add_edge(0, i, "dep");
  }
  c.sentences.push_back(s);
  QueryGraph g;
  g.nodes.resize(3);
  for (NodeId i = 0; i < 3; ++i) {
    g.nodes[i].id = i;
    g.nodes[i].name = "n" + std::to_string(i);
  }
  g.edges = {{0, 1, "dep"}, {0, 2, "dep"}};
  MatchOptions opts;
  auto results = match_sentence(g, s, opts);
  CHECK(results.size() == 1000);
  CHECK(results.back().truncated);
  opts.max_matches_per_sentence = 5000;
  auto full = match_sentence(g, s, opts);
  CHECK(full.size() == 59 * 58);
  CHECK_FALSE(full.back().truncated);

  auto idx = build_index(c);
  ResultStream stream(idx, g);
  std::size_t n = 0;
  while (stream.next()) ++n;
  CHECK(n == 1000);
  CHECK(stream.truncated_sentences() == 1);
}

TEST_CASE("property: matcher agrees with exhaustive enumeration") {
  std::mt19937 rng(29);
  Vocabulary vocab;
  for (int trial = 0; trial < 300; ++trial) {
    auto corpus = random_corpus(rng, vocab, 20);
    auto g = random_query_graph(rng, corpus, 5);
    for (const auto& s : corpus.sentences) {
      auto results = match_sentence(g, s);
      std::set<std::vector<TokenIndex>> got;
      for (const auto& r : results) {
        std::vector<TokenIndex> key;
        std::set<TokenIndex> distinct;
        for (const auto& c : r.captures) {
          key.push_back(c.token);
          distinct.insert(c.token);
          CHECK((c.span.start <= c.token && c.token < c.span.end));
        }
        CHECK(distinct.size() == key.size());
        got.insert(key);
      }
      CHECK(got.size() == results.size());
      CHECK(got == brute_force_matches(g, s));
    }
  }
}

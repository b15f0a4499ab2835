// SPDX-License-Identifier: Apache-2.0
//
// Shared test helpers: fixture loading, random corpus/query generators and
// brute-force oracles that stay independent of the library's algorithms.

#pragma once

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "synsearch/conllu.hpp"
#include "synsearch/constraint.hpp"
#include "synsearch/corpus.hpp"
#include "synsearch/error.hpp"
#include "synsearch/parse_provider.hpp"
#include "synsearch/query_graph.hpp"

namespace synsearch::testing {

inline std::filesystem::path fixtures_dir() { return SYNSEARCH_FIXTURES; }

inline Corpus load_fixture_corpus() {
  std::ifstream in(fixtures_dir() / "corpus.conllu");
  return ingest_conllu(in, {}, "corpus.conllu");
}

inline Corpus ingest_string(const std::string& text, IngestOptions options = {}) {
  std::istringstream in(text);
  return ingest_conllu(in, options);
}

inline const FixtureParseProvider& fixture_provider() {
  static const FixtureParseProvider provider(fixtures_dir() / "parses");
  return provider;
}

/// Loopback socket bound to an ephemeral port; listening when asked. Closed on
/// destruction.
class LoopbackSocket {
 public:
  explicit LoopbackSocket(bool listening) : fd_(::socket(AF_INET, SOCK_STREAM, 0)) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    if (listening) ::listen(fd_, 4);
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }
  ~LoopbackSocket() { ::close(fd_); }
  LoopbackSocket(const LoopbackSocket&) = delete;
  LoopbackSocket& operator=(const LoopbackSocket&) = delete;
  int port() const { return port_; }

 private:
  int fd_;
  int port_ = 0;
};

/// A loopback port nobody is listening on (at the time of the call).
inline int free_port() { return LoopbackSocket(false).port(); }

// ---------------------------------------------------------------------------
// Random generation

struct Vocabulary {
  std::vector<std::string> words{"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  std::vector<std::string> lemmas{"a", "b", "c", "d", "e"};
  std::vector<std::string> tags{"NN", "NNP", "VB", "VBD", "VBZ", "JJ"};
  std::vector<std::string> entities{"PERSON", "ORGANIZATION", "DATE"};
  std::vector<std::string> labels{"nsubj", "dobj", "nmod", "amod", "xcomp"};
};

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline bool coin(std::mt19937& rng, double p) { return std::bernoulli_distribution(p)(rng); }

/// Random connected sentence: a random tree plus optional extra (enhanced)
/// edges; BIO-consistent entity and chunk spans.
inline SentenceGraph random_sentence(std::mt19937& rng, const Vocabulary& vocab, std::size_t min_len,
                                     std::size_t max_len, double extra_edge_p, const std::string& id) {
  SentenceGraph s;
  s.sentence_id = id;
  const auto n = std::uniform_int_distribution<std::size_t>(min_len, max_len)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Token t;
    t.index = static_cast<TokenIndex>(i);
    t.word = pick(rng, vocab.words);
    t.lemma = pick(rng, vocab.lemmas);
    t.tag = pick(rng, vocab.tags);
    s.tokens.push_back(std::move(t));
  }
  // Entity and chunk runs.
  for (std::size_t i = 0; i < n;) {
    auto len = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    len = std::min(len, n - i);
    if (coin(rng, 0.3)) {
      auto type = pick(rng, vocab.entities);
      for (std::size_t k = i; k < i + len; ++k) {
        s.tokens[k].entity = type;
        s.tokens[k].entity_span = Span{static_cast<TokenIndex>(i), static_cast<TokenIndex>(i + len)};
      }
    }
    i += len;
  }
  for (std::size_t i = 0; i < n;) {
    auto len = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    len = std::min(len, n - i);
    if (coin(rng, 0.4))
      for (std::size_t k = i; k < i + len; ++k)
        s.tokens[k].chunk_span = Span{static_cast<TokenIndex>(i), static_cast<TokenIndex>(i + len)};
    i += len;
  }
  for (std::size_t i = 1; i < n; ++i) {
    auto parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    if (coin(rng, 0.5)) s.add_edge(parent, i, pick(rng, vocab.labels));
    else s.add_edge(i, parent, pick(rng, vocab.labels));
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && coin(rng, extra_edge_p)) s.add_edge(a, b, pick(rng, vocab.labels));
  if (n > 0) s.tokens.back().space_after = coin(rng, 0.5);
  return s;
}

inline Corpus random_corpus(std::mt19937& rng, const Vocabulary& vocab, std::size_t sentences) {
  Corpus c;
  for (std::size_t i = 0; i < sentences; ++i)
    c.sentences.push_back(random_sentence(rng, vocab, 1, 9, 0.03, "r" + std::to_string(i)));
  return c;
}

/// Builds a markup query over `d`'s words with 1..max_marked marked words and
/// random constraint specs, so the full query pipeline is exercised.
inline std::string random_markup(std::mt19937& rng, const SentenceGraph& d, std::size_t max_marked) {
  std::vector<std::size_t> idx(d.tokens.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  auto marked_count = std::uniform_int_distribution<std::size_t>(1, std::min(max_marked, idx.size()))(rng);
  std::set<std::size_t> marked(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(marked_count));

  static const std::vector<std::string> specs{"", "w", "l", "t", "tag=/VB[DZ]?/", "t=NN|NNP", "w&t", "l=a|b|c"};
  std::string out;
  int name_counter = 0;
  for (std::size_t i = 0; i < d.tokens.size(); ++i) {
    if (!out.empty()) out += ' ';
    if (marked.count(i)) {
      const bool anchor = coin(rng, 0.25);
      std::string spec = pick(rng, specs);
      if (coin(rng, 0.15) && d.tokens[i].has_entity()) spec = "e";
      if (anchor) {
        out += '$';
        if (coin(rng, 0.5)) out += '[' + spec + ']';
      } else {
        if (coin(rng, 0.3) && (d.tokens[i].entity_span || d.tokens[i].chunk_span)) out += "<>";
        out += coin(rng, 0.3) ? std::string() : "c" + std::to_string(name_counter++);
        out += ':';
        if (coin(rng, 0.7)) out += '[' + spec + ']';
      }
    }
    out += d.tokens[i].word;
  }
  return out;
}

/// A query graph built from markup over a random sentence of `corpus`, so it
/// has at least one match. Retries until the graph has at most `max_nodes`
/// nodes and the markup materializes without error.
inline QueryGraph random_query_graph(std::mt19937& rng, const Corpus& corpus, std::size_t max_nodes) {
  for (;;) {
    const auto& d = pick(rng, corpus.sentences);
    try {
      auto g = build_query_graph(parse_query(random_markup(rng, d, 4)), d);
      if (g.nodes.size() <= max_nodes) return g;
    } catch (const Error&) {
    }
  }
}

// ---------------------------------------------------------------------------
// Oracles

/// Exhaustive minimum connected superset with lexicographic tie-break.
inline std::vector<std::uint32_t> brute_force_steiner(std::size_t n, const std::vector<std::pair<int, int>>& edges,
                                                      const std::vector<std::uint32_t>& terminals) {
  std::vector<std::uint32_t> best;
  bool found = false;
  std::uint32_t must = 0;
  for (auto t : terminals) must |= 1u << t;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if ((mask & must) != must || mask == 0) continue;
    // Connectivity of the induced subgraph via repeated relaxation.
    std::uint32_t reach = mask & (~mask + 1);
    for (bool grew = true; grew;) {
      grew = false;
      for (auto [a, b] : edges) {
        std::uint32_t ba = 1u << a, bb = 1u << b;
        if ((mask & ba) && (mask & bb) && ((reach & ba) != 0) != ((reach & bb) != 0)) {
          reach |= ba | bb;
          grew = true;
        }
      }
    }
    if (reach != mask) continue;
    std::vector<std::uint32_t> set;
    for (std::uint32_t v = 0; v < n; ++v)
      if (mask & (1u << v)) set.push_back(v);
    if (!found || set.size() < best.size() || (set.size() == best.size() && set < best)) {
      best = set;
      found = true;
    }
  }
  return best;
}

/// Exhaustive injective assignment enumeration; returns the set of
/// named-capture token tuples.
inline std::set<std::vector<TokenIndex>> brute_force_matches(const QueryGraph& g, const SentenceGraph& s) {
  std::set<std::vector<TokenIndex>> out;
  const auto n = g.nodes.size();
  std::vector<TokenIndex> assign(n);
  std::vector<bool> used(s.tokens.size(), false);
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      for (const auto& e : g.edges) {
        DepEdge want{assign[e.from], assign[e.to], e.label};
        if (std::find(s.edges.begin(), s.edges.end(), want) == s.edges.end()) return;
      }
      std::vector<TokenIndex> key;
      for (const auto& node : g.nodes)
        if (node.name) key.push_back(assign[node.id]);
      out.insert(key);
      return;
    }
    for (TokenIndex t = 0; t < s.tokens.size(); ++t) {
      if (used[t]) continue;
      // Independent constraint check: literal membership / full regex match.
      bool ok = true;
      for (const auto& c : g.nodes[k].constraint.clauses()) {
        std::string value(property_value(s.tokens[t], c.property));
        if (c.property == Property::Entity && value.empty()) ok = false;
        else if (c.is_regex()) ok = ok && std::regex_match(value, std::regex(c.regex_source));
        else ok = ok && std::find(c.literals.begin(), c.literals.end(), value) != c.literals.end();
      }
      if (!ok) continue;
      used[t] = true;
      assign[k] = t;
      self(self, k + 1);
      used[t] = false;
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace synsearch::testing

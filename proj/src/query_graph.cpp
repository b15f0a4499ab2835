// SPDX-License-Identifier: Apache-2.0

#include "synsearch/query_graph.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "synsearch/error.hpp"
#include "synsearch/steiner.hpp"

namespace synsearch {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> QueryGraph::capture_names() const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    if (n.name) out.push_back(*n.name);
  return out;
}

bool QueryGraph::is_connected() const {
  if (nodes.empty()) return false;
  SentenceGraph shadow;
  shadow.tokens.resize(nodes.size());
  for (const auto& e : edges) shadow.edges.push_back({e.from, e.to, e.label});
  return shadow.is_connected();
}

QueryGraph build_query_graph(const QueryTokenSeq& seq, const SentenceGraph& parse) {
  if (seq.tokens.size() != parse.tokens.size())
    throw Error(ErrorKind::AlignmentError, "query could not be parsed: " + std::to_string(seq.tokens.size()) +
                                               " query words but " + std::to_string(parse.tokens.size()) +
                                               " parse tokens");

  std::vector<TokenIndex> marked;
  for (TokenIndex i = 0; i < seq.tokens.size(); ++i)
    if (seq.tokens[i].is_marked()) marked.push_back(i);
  if (marked.empty()) throw Error(ErrorKind::NoMarkedWords, "query has no marked words", 0);

  const auto members = minimal_connected_subgraph(parse, marked);

  // Explicit names are reserved first so generated names never shadow them.
  std::unordered_set<std::string> used;
  for (const auto& t : seq.tokens)
    if (t.capture == CaptureKind::Named) used.insert(t.name);

  QueryGraph g;
  std::vector<std::optional<NodeId>> node_of(parse.tokens.size());
  for (auto idx : members) {
    const auto& qt = seq.tokens[idx];
    const auto& pt = parse.tokens[idx];
    QueryNode node;
    node.id = static_cast<NodeId>(g.nodes.size());
    node.origin = idx;
    node.origin_word = qt.surface;

    if (qt.is_anchor) {
      node.role = NodeRole::Anchor;
      node.constraint = qt.constraint_spec ? parse_constraint_spec(*qt.constraint_spec, pt, qt.constraint_position)
                                           : parse_constraint_spec("w", pt, qt.position);
    } else if (qt.capture != CaptureKind::None) {
      node.role = NodeRole::Capture;
      node.expand = qt.expand;
      if (qt.constraint_spec) node.constraint = parse_constraint_spec(*qt.constraint_spec, pt, qt.constraint_position);
      if (qt.capture == CaptureKind::Named) {
        node.name = qt.name;
      } else {
        auto base = lowercase(qt.surface);
        auto candidate = base;
        for (int suffix = 2; used.count(candidate); ++suffix) candidate = base + "_" + std::to_string(suffix);
        used.insert(candidate);
        node.name = candidate;
      }
    }
    node_of[idx] = node.id;
    g.nodes.push_back(std::move(node));
  }

  for (const auto& e : parse.edges) {
    auto from = node_of[e.head], to = node_of[e.dependent];
    if (from && to) g.edges.push_back({*from, *to, e.label});
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

nlohmann::json graph_to_json(const QueryGraph& g) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"name", n.name ? nlohmann::json(*n.name) : nlohmann::json(nullptr)},
                     {"origin", n.origin},
                     {"word", n.origin_word},
                     {"role", n.role == NodeRole::Capture ? "capture" : n.role == NodeRole::Anchor ? "anchor" : "connector"},
                     {"constraint", n.constraint.to_string()},
                     {"expand", n.expand}});
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

CompiledQuery compile_query(std::string_view query, const ParseProvider& provider) {
  CompiledQuery out;
  out.tokens = parse_query(query);
  ParseRequest request{out.tokens.words()};
  out.parse = provider.parse(request);
  check_alignment(request, out.parse);
  out.graph = build_query_graph(out.tokens, out.parse);
  return out;
}

}  // namespace synsearch

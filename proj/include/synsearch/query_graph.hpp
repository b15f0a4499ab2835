// SPDX-License-Identifier: Apache-2.0
//
// Translation of a marked-up example sentence into an executable graph query.
// Marked words (captures and anchors) become constrained nodes; the remaining
// words on the minimal connected subgraph joining them become unnamed,
// unconstrained connector nodes; every parse edge inside that subgraph is
// copied, direction and label intact.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synsearch/constraint.hpp"
#include "synsearch/corpus.hpp"
#include "synsearch/parse_provider.hpp"
#include "synsearch/query_language.hpp"

namespace synsearch {

using NodeId = std::uint32_t;

enum class NodeRole { Capture, Anchor, Connector };

struct QueryNode {
  NodeId id = 0;
  std::optional<std::string> name;
  TokenConstraint constraint;
  bool expand = false;
  NodeRole role = NodeRole::Connector;
  TokenIndex origin = 0;    // index of the query word that produced the node
  std::string origin_word;

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

struct QueryEdge {
  NodeId from = 0;
  NodeId to = 0;
  std::string label;

  friend bool operator==(const QueryEdge&, const QueryEdge&) = default;
  friend auto operator<=>(const QueryEdge&, const QueryEdge&) = default;
};

struct QueryGraph {
  std::vector<QueryNode> nodes;  // ids are positions; ordered by origin word
  std::vector<QueryEdge> edges;  // sorted

  /// Names of capture nodes in node order.
  std::vector<std::string> capture_names() const;
  bool is_connected() const;

  friend bool operator==(const QueryGraph&, const QueryGraph&) = default;
};

/// Requires one parse token per query token (Error(AlignmentError)
/// otherwise). Constraint errors propagate with query-string positions.
QueryGraph build_query_graph(const QueryTokenSeq& seq, const SentenceGraph& parse);

/// `{nodes:[{id,name,origin,word,role,constraint,expand}], edges:[{from,to,label}]}`
nlohmann::json graph_to_json(const QueryGraph& g);

struct CompiledQuery {
  QueryTokenSeq tokens;
  SentenceGraph parse;
  QueryGraph graph;
};

/// parse_query, then the provider's parse of the stripped words, then
/// build_query_graph.
CompiledQuery compile_query(std::string_view query, const ParseProvider& provider);

}  // namespace synsearch

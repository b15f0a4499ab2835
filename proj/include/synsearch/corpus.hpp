// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace synsearch {

using TokenIndex = std::uint32_t;

/// Half-open token range [start, end).
struct Span {
  TokenIndex start = 0;
  TokenIndex end = 0;

  bool contains(TokenIndex i) const { return start <= i && i < end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// One corpus word. An empty `entity` means the token is outside any named
/// entity, in which case `entity_span` is absent.
struct Token {
  TokenIndex index = 0;
  std::string word;
  std::string lemma;
  std::string tag;
  std::string entity;
  std::optional<Span> entity_span;
  std::optional<Span> chunk_span;
  bool space_after = true;

  bool has_entity() const { return !entity.empty(); }
  friend bool operator==(const Token&, const Token&) = default;
};

struct DepEdge {
  TokenIndex head = 0;
  TokenIndex dependent = 0;
  std::string label;

  friend bool operator==(const DepEdge&, const DepEdge&) = default;
  friend auto operator<=>(const DepEdge&, const DepEdge&) = default;
};

/// A parsed sentence. Edges are kept sorted by (head, dependent, label) and
/// duplicate-free; use `add_edge` or `normalize_edges` to maintain that.
struct SentenceGraph {
  std::string sentence_id;
  std::vector<Token> tokens;
  std::vector<DepEdge> edges;

  std::size_t size() const { return tokens.size(); }

  void add_edge(TokenIndex head, TokenIndex dependent, std::string label);
  void normalize_edges();

  /// True if the undirected view of the edges spans every token.
  bool is_connected() const;

  bool has_edge(TokenIndex head, TokenIndex dependent, std::string_view label) const;

  friend bool operator==(const SentenceGraph&, const SentenceGraph&) = default;
};

/// Words joined with a single space except after tokens marked SpaceAfter=No.
std::string sentence_text(const SentenceGraph& s);

/// Surface text of the tokens in `span`, using the same spacing rule.
std::string span_text(const SentenceGraph& s, Span span);

struct SourceInfo {
  std::string name;
  std::string ingested_at;  // ISO-8601 UTC
};

struct Corpus {
  std::vector<SentenceGraph> sentences;
  std::vector<SourceInfo> sources;
  std::vector<std::string> warnings;
  std::size_t skipped_sentences = 0;

  std::size_t token_count() const;
};

}  // namespace synsearch

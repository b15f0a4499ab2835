// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "synsearch/corpus.hpp"
#include "synsearch/index.hpp"
#include "synsearch/query_graph.hpp"

namespace synsearch {

struct Capture {
  std::string name;
  TokenIndex token = 0;
  Span span;  // expanded span, or [token, token+1)
  std::string text;

  friend bool operator==(const Capture&, const Capture&) = default;
};

struct MatchResult {
  std::string sentence_id;
  std::uint32_t sentence_ordinal = 0;
  std::string sentence_text;
  std::vector<Capture> captures;  // in query-node order
  bool truncated = false;         // the sentence hit the per-sentence cap

  const Capture* find(std::string_view name) const;
  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct MatchOptions {
  std::size_t max_matches_per_sentence = 1000;
};

/// All injective node-to-token assignments satisfying node constraints and
/// edge constraints, deduplicated on the named captures and ordered by the
/// captured token indices.
std::vector<MatchResult> match_sentence(const QueryGraph& g, const SentenceGraph& s, const MatchOptions& options = {},
                                        std::uint32_t sentence_ordinal = 0);

/// Entity span if present, else NP chunk span, else the token itself.
Span expand_span(const SentenceGraph& s, TokenIndex i);

/// Lazily verifies candidate sentences in corpus order.
class ResultStream {
 public:
  ResultStream(const IndexArtifact& index, QueryGraph graph, MatchOptions options = {});

  std::optional<MatchResult> next();
  /// Sentences verified so far whose results were truncated.
  std::size_t truncated_sentences() const { return truncated_sentences_; }
  std::size_t sentences_verified() const { return sentences_verified_; }
  const QueryGraph& graph() const { return graph_; }

 private:
  const IndexArtifact* index_;
  QueryGraph graph_;
  MatchOptions options_;
  CandidateIterator candidates_;
  std::deque<MatchResult> buffer_;
  std::size_t truncated_sentences_ = 0;
  std::size_t sentences_verified_ = 0;
};

inline ResultStream run_query(const IndexArtifact& index, const QueryGraph& graph, MatchOptions options = {}) {
  return ResultStream(index, graph, options);
}

}  // namespace synsearch

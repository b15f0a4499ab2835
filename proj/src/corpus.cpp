// SPDX-License-Identifier: Apache-2.0

#include "synsearch/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace synsearch {

void SentenceGraph::add_edge(TokenIndex head, TokenIndex dependent, std::string label) {
  DepEdge e{head, dependent, std::move(label)};
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) edges.insert(it, std::move(e));
}

void SentenceGraph::normalize_edges() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

bool SentenceGraph::is_connected() const {
  const std::size_t n = tokens.size();
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& e : edges) {
    if (e.head >= n || e.dependent >= n) continue;
    auto a = find(e.head), b = find(e.dependent);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

bool SentenceGraph::has_edge(TokenIndex head, TokenIndex dependent, std::string_view label) const {
  auto it = std::lower_bound(edges.begin(), edges.end(), std::tie(head, dependent, label),
                             [](const DepEdge& e, const auto& key) {
                               return std::tie(e.head, e.dependent, e.label) < key;
                             });
  return it != edges.end() && it->head == head && it->dependent == dependent && it->label == label;
}

std::string span_text(const SentenceGraph& s, Span span) {
  std::string out;
  const auto end = std::min<std::size_t>(span.end, s.tokens.size());
  for (std::size_t i = span.start; i < end; ++i) {
    out += s.tokens[i].word;
    if (i + 1 < end && s.tokens[i].space_after) out += ' ';
  }
  return out;
}

std::string sentence_text(const SentenceGraph& s) {
  return span_text(s, Span{0, static_cast<TokenIndex>(s.tokens.size())});
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

}  // namespace synsearch

// SPDX-License-Identifier: Apache-2.0

#include "synsearch/matcher.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace synsearch {

const Capture* MatchResult::find(std::string_view name) const {
  for (const auto& c : captures)
    if (c.name == name) return &c;
  return nullptr;
}

Span expand_span(const SentenceGraph& s, TokenIndex i) {
  const auto& t = s.tokens.at(i);
  if (t.entity_span) return *t.entity_span;
  if (t.chunk_span) return *t.chunk_span;
  return {i, i + 1};
}

namespace {

struct Incident {
  NodeId other;
  const std::string* label;
  bool outgoing;  // this node is the head
};

class Search {
 public:
  Search(const QueryGraph& g, const SentenceGraph& s, std::size_t cap)
      : g_(g), s_(s), cap_(cap), incident_(g.nodes.size()), assignment_(g.nodes.size()),
        used_(s.tokens.size(), false) {
    for (const auto& e : g.edges) {
      incident_[e.from].push_back({e.to, &e.label, true});
      incident_[e.to].push_back({e.from, &e.label, false});
    }
    for (const auto& n : g.nodes)
      if (n.name) named_.push_back(n.id);
  }

  void run() {
    const auto n = g_.nodes.size();
    std::vector<std::vector<TokenIndex>> domains(n);
    for (const auto& node : g_.nodes) {
      for (const auto& t : s_.tokens)
        if (satisfies(t, node.constraint) && has_incident_labels(node.id, t.index)) domains[node.id].push_back(t.index);
      if (domains[node.id].empty()) return;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), NodeId{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](NodeId a, NodeId b) { return domains[a].size() < domains[b].size(); });
    assigned_.assign(n, false);
    extend(0, domains);
  }

  const std::set<std::vector<TokenIndex>>& results() const { return results_; }
  bool truncated() const { return truncated_; }
  const std::vector<NodeId>& named() const { return named_; }

 private:
  // Cheap pre-filter: the token must carry each incident edge label in the
  // right direction.
  bool has_incident_labels(NodeId node, TokenIndex t) const {
    for (const auto& inc : incident_[node]) {
      bool found = std::any_of(s_.edges.begin(), s_.edges.end(), [&](const DepEdge& e) {
        return e.label == *inc.label && (inc.outgoing ? e.head == t : e.dependent == t);
      });
      if (!found) return false;
    }
    return true;
  }

  bool edges_hold(NodeId node, TokenIndex t, NodeId other, TokenIndex u) const {
    for (const auto& inc : incident_[node]) {
      if (inc.other != other) continue;
      bool ok = inc.outgoing ? s_.has_edge(t, u, *inc.label) : s_.has_edge(u, t, *inc.label);
      if (!ok) return false;
    }
    return true;
  }

  void extend(std::size_t depth, const std::vector<std::vector<TokenIndex>>& domains) {
    if (stop_) return;
    if (depth == order_.size()) {
      std::vector<TokenIndex> key;
      key.reserve(named_.size());
      for (auto id : named_) key.push_back(assignment_[id]);
      results_.insert(std::move(key));
      if (results_.size() >= cap_) {
        truncated_ = true;
        stop_ = true;
      }
      return;
    }
    const auto node = order_[depth];
    for (auto t : domains[node]) {
      if (used_[t]) continue;
      assignment_[node] = t;
      assigned_[node] = true;
      used_[t] = true;

      // Forward check: prune neighbours' domains against this choice.
      auto next = domains;
      bool viable = true;
      for (const auto& inc : incident_[node]) {
        if (assigned_[inc.other]) continue;
        auto& dom = next[inc.other];
        std::erase_if(dom, [&](TokenIndex u) { return u == t || !edges_hold(node, t, inc.other, u); });
        if (dom.empty()) {
          viable = false;
          break;
        }
      }
      if (viable) extend(depth + 1, next);

      used_[t] = false;
      assigned_[node] = false;
      if (stop_) return;
    }
  }

  const QueryGraph& g_;
  const SentenceGraph& s_;
  std::size_t cap_;
  std::vector<std::vector<Incident>> incident_;
  std::vector<NodeId> named_;
  std::vector<NodeId> order_;
  std::vector<TokenIndex> assignment_;
  std::vector<bool> assigned_;
  std::vector<bool> used_;
  std::set<std::vector<TokenIndex>> results_;
  bool truncated_ = false;
  bool stop_ = false;
};

}  // namespace

std::vector<MatchResult> match_sentence(const QueryGraph& g, const SentenceGraph& s, const MatchOptions& options,
                                        std::uint32_t sentence_ordinal) {
  std::vector<MatchResult> out;
  if (g.nodes.empty() || s.tokens.size() < g.nodes.size()) return out;
  Search search(g, s, std::max<std::size_t>(options.max_matches_per_sentence, 1));
  search.run();
  if (search.results().empty()) return out;

  const auto text = sentence_text(s);
  for (const auto& key : search.results()) {
    MatchResult r;
    r.sentence_id = s.sentence_id;
    r.sentence_ordinal = sentence_ordinal;
    r.sentence_text = text;
    r.truncated = search.truncated();
    for (std::size_t k = 0; k < key.size(); ++k) {
      const auto& node = g.nodes[search.named()[k]];
      Capture c;
      c.name = *node.name;
      c.token = key[k];
      c.span = node.expand ? expand_span(s, key[k]) : Span{key[k], key[k] + 1};
      c.text = span_text(s, c.span);
      r.captures.push_back(std::move(c));
    }
    out.push_back(std::move(r));
  }
  return out;
}

ResultStream::ResultStream(const IndexArtifact& index, QueryGraph graph, MatchOptions options)
    : index_(&index), graph_(std::move(graph)), options_(options), candidates_(index, plan(graph_)) {}

std::optional<MatchResult> ResultStream::next() {
  while (buffer_.empty()) {
    auto ordinal = candidates_.next();
    if (!ordinal) return std::nullopt;
    auto sentence = index_->load_sentence(*ordinal);
    auto results = match_sentence(graph_, sentence, options_, *ordinal);
    ++sentences_verified_;
    if (!results.empty() && results.front().truncated) ++truncated_sentences_;
    for (auto& r : results) buffer_.push_back(std::move(r));
  }
  auto r = std::move(buffer_.front());
  buffer_.pop_front();
  return r;
}

}  // namespace synsearch

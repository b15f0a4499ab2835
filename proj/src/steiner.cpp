// SPDX-License-Identifier: Apache-2.0

#include "synsearch/steiner.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>

#include "synsearch/error.hpp"

namespace synsearch {
namespace {

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 4;

// All-pairs hop distances avoiding `excluded` nodes.
std::vector<std::vector<std::uint32_t>> distances(const Adjacency& adj, const std::vector<bool>& excluded) {
  const auto n = adj.size();
  std::vector<std::vector<std::uint32_t>> dist(n, std::vector<std::uint32_t>(n, kInf));
  std::deque<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (excluded[s]) continue;
    dist[s][s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (auto v : adj[u]) {
        if (excluded[v] || dist[s][v] != kInf) continue;
        dist[s][v] = dist[s][u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Dreyfus-Wagner: minimum number of nodes in a connected set containing all
// terminals, using only non-excluded nodes.
std::uint32_t steiner_cost(const Adjacency& adj, const std::vector<std::uint32_t>& terminals,
                           const std::vector<bool>& excluded) {
  const auto n = static_cast<std::uint32_t>(adj.size());
  const auto t = terminals.size();
  if (t <= 1) return static_cast<std::uint32_t>(t);
  auto dist = distances(adj, excluded);

  // Root at the last terminal; subsets range over the others.
  const std::size_t k = t - 1;
  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<std::uint32_t> dp((full + 1) * n, kInf);
  auto at = [&](std::size_t s, std::uint32_t v) -> std::uint32_t& { return dp[s * n + v]; };

  for (std::size_t i = 0; i < k; ++i)
    for (std::uint32_t v = 0; v < n; ++v)
      if (dist[terminals[i]][v] != kInf) at(std::size_t{1} << i, v) = dist[terminals[i]][v] + 1;

  std::vector<std::uint32_t> merged(n);
  for (std::size_t s = 1; s <= full; ++s) {
    if (std::has_single_bit(s)) continue;
    for (std::uint32_t v = 0; v < n; ++v) {
      std::uint32_t best = kInf;
      for (std::size_t sub = (s - 1) & s; sub > 0; sub = (sub - 1) & s) {
        if (sub < (s ^ sub)) continue;
        auto a = at(sub, v), b = at(s ^ sub, v);
        if (a != kInf && b != kInf) best = std::min(best, a + b - 1);
      }
      merged[v] = best;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      std::uint32_t best = merged[v];
      for (std::uint32_t u = 0; u < n; ++u)
        if (merged[u] != kInf && dist[u][v] != kInf) best = std::min(best, merged[u] + dist[u][v]);
      at(s, v) = best;
    }
  }
  return at(full, terminals.back());
}

bool is_tree(const Adjacency& adj) {
  std::size_t degree_sum = 0;
  for (const auto& nbrs : adj) degree_sum += nbrs.size();
  if (degree_sum / 2 + 1 != adj.size()) return false;
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::uint32_t> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        queue.push_back(v);
      }
  }
  return count == adj.size();
}

// On a tree the Steiner set is unique: strip non-terminal leaves.
std::vector<std::uint32_t> prune_tree(const Adjacency& adj, const std::vector<bool>& terminal) {
  const auto n = adj.size();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> degree(n);
  std::deque<std::uint32_t> leaves;
  for (std::uint32_t v = 0; v < n; ++v) {
    degree[v] = adj[v].size();
    if (degree[v] <= 1 && !terminal[v]) leaves.push_back(v);
  }
  while (!leaves.empty()) {
    auto v = leaves.front();
    leaves.pop_front();
    if (!alive[v]) continue;
    alive[v] = false;
    for (auto u : adj[v])
      if (alive[u] && --degree[u] == 1 && !terminal[u]) leaves.push_back(u);
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < n; ++v)
    if (alive[v]) out.push_back(v);
  return out;
}

}  // namespace

Adjacency undirected_adjacency(const SentenceGraph& g) {
  Adjacency adj(g.tokens.size());
  for (const auto& e : g.edges) {
    if (e.head >= adj.size() || e.dependent >= adj.size() || e.head == e.dependent) continue;
    adj[e.head].push_back(e.dependent);
    adj[e.dependent].push_back(e.head);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

std::vector<std::uint32_t> steiner_node_set(const Adjacency& adjacency, std::span<const std::uint32_t> terminals) {
  const auto n = static_cast<std::uint32_t>(adjacency.size());
  std::vector<std::uint32_t> forced(terminals.begin(), terminals.end());
  std::sort(forced.begin(), forced.end());
  forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
  if (forced.empty()) throw Error(ErrorKind::Internal, "minimal connected subgraph of an empty node set");
  for (auto v : forced)
    if (v >= n) throw Error(ErrorKind::Internal, "terminal " + std::to_string(v) + " out of range");
  if (forced.size() == 1) return forced;

  std::vector<bool> excluded(n, false);
  const auto target = steiner_cost(adjacency, forced, excluded);
  if (target >= kInf) throw Error(ErrorKind::Internal, "marked words are not connected in the parse");

  std::vector<bool> is_forced(n, false);
  for (auto v : forced) is_forced[v] = true;
  if (is_tree(adjacency)) return prune_tree(adjacency, is_forced);

  // Greedy over ascending node index: keep v whenever some optimal set still
  // contains everything kept so far plus v. This yields the lexicographically
  // smallest optimal set.
  for (std::uint32_t v = 0; v < n && forced.size() < target; ++v) {
    if (is_forced[v]) continue;
    auto trial = forced;
    trial.push_back(v);
    if (steiner_cost(adjacency, trial, excluded) == target) {
      forced = std::move(trial);
      is_forced[v] = true;
    } else {
      excluded[v] = true;
    }
  }
  std::sort(forced.begin(), forced.end());
  return forced;
}

}  // namespace synsearch

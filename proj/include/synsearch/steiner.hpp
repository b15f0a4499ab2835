// SPDX-License-Identifier: Apache-2.0
//
// Minimum node-count connected supersets (node-weighted Steiner sets with
// unit weights) over the undirected view of a dependency graph.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synsearch/corpus.hpp"

namespace synsearch {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

/// Undirected, duplicate-free neighbour lists.
Adjacency undirected_adjacency(const SentenceGraph& g);

/// Smallest node set containing `terminals` whose induced subgraph is
/// connected; among equally small sets, the lexicographically smallest sorted
/// sequence. Returned sorted. Throws Error(Internal) if the terminals are not
/// mutually reachable.
std::vector<std::uint32_t> steiner_node_set(const Adjacency& adjacency, std::span<const std::uint32_t> terminals);

inline std::vector<TokenIndex> minimal_connected_subgraph(const SentenceGraph& d,
                                                          std::span<const TokenIndex> marked) {
  return steiner_node_set(undirected_adjacency(d), marked);
}

}  // namespace synsearch

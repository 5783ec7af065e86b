#ifndef LVS_TOPOLOGY_HPP
#define LVS_TOPOLOGY_HPP

#include <map>
#include <span>
#include <vector>

#include "lvs/core.hpp"

namespace lvs {

/// Undirected disc graph: nodes are users, an edge joins every pair within
/// WiFi range. Irreflexive, symmetric; adjacency lists are sorted.
struct NeighborGraph {
    std::vector<UserId> nodes;                       // ascending
    std::vector<std::vector<std::uint32_t>> adjacency;  // indices into nodes, sorted

    std::size_t size() const { return nodes.size(); }
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
    std::size_t degree(std::uint32_t i) const { return adjacency[i].size(); }
};

/// Disc graph over true positions. Distances compare against wifi_range
/// inclusively; spoofed declarations play no part here.
NeighborGraph neighbor_graph(const std::map<UserId, Position>& true_positions, double wifi_range);

/// Same graph built from parallel (id, position) arrays. ids must be strictly
/// ascending.
NeighborGraph neighbor_graph(std::span<const UserId> ids, std::span<const Position> positions,
                             double wifi_range);

/// Greedy hotspot selection. Every node with at least one neighbor ends up
/// selected or adjacent to a selected node; a candidate covers itself plus
/// its neighbors (neighbors validate the hotspot back). Ties break toward the
/// smallest UserId, so the result is a deterministic function of the graph.
/// Isolated nodes are never selected.
std::vector<UserId> greedy_mhs_select(const NeighborGraph& g);

/// Minimum covering set by exhaustive search; among minimum sets, the
/// lexicographically smallest. Test oracle for the greedy ratio bound.
/// Refuses graphs with more than 20 nodes.
std::vector<UserId> optimal_mhs_bruteforce(const NeighborGraph& g);

}  // namespace lvs

#endif  // LVS_TOPOLOGY_HPP

#include "lvs/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace lvs {

namespace {

double dist2(Position a, Position b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace

bool NeighborGraph::has_edge(std::uint32_t a, std::uint32_t b) const {
    const auto& row = adjacency[a];
    return std::binary_search(row.begin(), row.end(), b);
}

NeighborGraph neighbor_graph(std::span<const UserId> ids, std::span<const Position> positions,
                             double wifi_range) {
    NeighborGraph g;
    const std::size_t n = ids.size();
    g.nodes.assign(ids.begin(), ids.end());
    g.adjacency.assign(n, {});
    if (n == 0) {
        return g;
    }

    // Hash grid with cell side = range; candidates live in the 3x3 block
    // around a point's cell.
    const double cell = wifi_range;
    const double range2 = wifi_range * wifi_range;
    auto cell_of = [&](Position p) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / cell));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / cell));
        return std::make_pair(cx, cy);
    };
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    auto key = [](std::int64_t cx, std::int64_t cy) {
        return (static_cast<std::uint64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    };
    buckets.reserve(n * 2);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto [cx, cy] = cell_of(positions[i]);
        buckets[key(cx, cy)].push_back(i);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto [cx, cy] = cell_of(positions[i]);
        for (std::int64_t ox = -1; ox <= 1; ++ox) {
            for (std::int64_t oy = -1; oy <= 1; ++oy) {
                const auto it = buckets.find(key(cx + ox, cy + oy));
                if (it == buckets.end()) continue;
                for (const std::uint32_t j : it->second) {
                    if (j <= i) continue;
                    if (dist2(positions[i], positions[j]) <= range2) {
                        g.adjacency[i].push_back(j);
                        g.adjacency[j].push_back(i);
                    }
                }
            }
        }
    }
    for (auto& row : g.adjacency) {
        std::sort(row.begin(), row.end());
    }
    return g;
}

NeighborGraph neighbor_graph(const std::map<UserId, Position>& true_positions, double wifi_range) {
    std::vector<UserId> ids;
    std::vector<Position> pos;
    ids.reserve(true_positions.size());
    pos.reserve(true_positions.size());
    for (const auto& [id, p] : true_positions) {
        ids.push_back(id);
        pos.push_back(p);
    }
    return neighbor_graph(ids, pos, wifi_range);
}

std::vector<UserId> greedy_mhs_select(const NeighborGraph& g) {
    const std::size_t n = g.size();
    std::vector<char> covered(n, 0);
    std::vector<char> selected(n, 0);
    // Isolated nodes are outside the covering universe.
    std::size_t uncovered = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.degree(i) > 0) {
            ++uncovered;
        } else {
            covered[i] = 1;
        }
    }

    auto gain = [&](std::uint32_t u) {
        std::size_t k = covered[u] ? 0u : 1u;
        for (const std::uint32_t v : g.adjacency[u]) {
            if (!covered[v]) ++k;
        }
        return k;
    };

    std::vector<UserId> result;
    while (uncovered > 0) {
        std::size_t best_gain = 0;
        std::uint32_t best = 0;
        for (std::uint32_t u = 0; u < n; ++u) {
            if (selected[u] || g.degree(u) == 0) continue;
            const std::size_t k = gain(u);
            if (k > best_gain) {  // nodes scan in ascending UserId order
                best_gain = k;
                best = u;
            }
        }
        if (best_gain == 0) {
            break;  // unreachable: every uncovered node has a neighbor
        }
        selected[best] = 1;
        if (!covered[best]) {
            covered[best] = 1;
            --uncovered;
        }
        for (const std::uint32_t v : g.adjacency[best]) {
            if (!covered[v]) {
                covered[v] = 1;
                --uncovered;
            }
        }
        result.push_back(g.nodes[best]);
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<UserId> optimal_mhs_bruteforce(const NeighborGraph& g) {
    const std::size_t n = g.size();
    if (n > 20) {
        throw std::invalid_argument("optimal_mhs_bruteforce: graph too large (" +
                                    std::to_string(n) + " nodes, limit 20)");
    }
    std::uint32_t universe = 0;  // bitmask of nodes that must be covered
    std::vector<std::uint32_t> cover_mask(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.degree(i) == 0) continue;
        universe |= 1u << i;
        cover_mask[i] = 1u << i;
        for (const std::uint32_t v : g.adjacency[i]) {
            cover_mask[i] |= 1u << v;
        }
    }
    if (universe == 0) {
        return {};
    }

    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.degree(i) > 0) candidates.push_back(i);
    }

    // Increasing cardinality; within one cardinality, combinations enumerate
    // in lexicographic order, so the first hit is the lexicographically
    // smallest minimum set.
    std::vector<std::uint32_t> pick;
    for (std::size_t k = 1; k <= candidates.size(); ++k) {
        pick.assign(k, 0);
        for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<std::uint32_t>(i);
        while (true) {
            std::uint32_t covered = 0;
            for (const std::uint32_t ci : pick) covered |= cover_mask[candidates[ci]];
            if ((covered & universe) == universe) {
                std::vector<UserId> out;
                out.reserve(k);
                for (const std::uint32_t ci : pick) out.push_back(g.nodes[candidates[ci]]);
                return out;
            }
            // next combination
            std::size_t i = k;
            while (i > 0) {
                --i;
                if (pick[i] != candidates.size() - k + i) {
                    ++pick[i];
                    for (std::size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    goto next_cardinality;
                }
            }
        }
    next_cardinality:;
    }
    return {};  // unreachable: selecting every candidate always covers
}

}  // namespace lvs

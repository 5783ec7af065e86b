#include "lvs/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace lvs {

RoundOutcome run_round(std::int64_t round, std::span<const Declaration> declarations,
                       const NeighborGraph& true_graph, double wifi_range) {
    RoundOutcome out;

    // Group declarations by claimed area, ascending.
    std::map<AreaId, std::vector<const Declaration*>> by_area;
    for (const Declaration& d : declarations) {
        by_area[d.area].push_back(&d);
    }

    std::map<UserId, std::uint32_t> true_index;
    for (std::uint32_t i = 0; i < true_graph.size(); ++i) {
        true_index.emplace(true_graph.nodes[i], i);
    }

    for (auto& [area, decls] : by_area) {
        std::sort(decls.begin(), decls.end(),
                  [](const Declaration* a, const Declaration* b) { return a->user < b->user; });
        std::vector<UserId> ids;
        std::vector<Position> declared_pos;
        ids.reserve(decls.size());
        declared_pos.reserve(decls.size());
        for (const Declaration* d : decls) {
            ids.push_back(d->user);
            declared_pos.push_back(d->position);
        }
        // The platform can only judge proximity from what was declared.
        const NeighborGraph claimed = neighbor_graph(ids, declared_pos, wifi_range);
        std::vector<UserId> mhss = greedy_mhs_select(claimed);
        for (const UserId m : mhss) {
            const auto m_it = true_index.find(m);
            if (m_it == true_index.end()) continue;
            for (const UserId n : ids) {
                if (n == m) continue;
                const auto n_it = true_index.find(n);
                if (n_it == true_index.end()) continue;
                if (true_graph.has_edge(m_it->second, n_it->second)) {
                    out.events.push_back(SpotEvent{round, m, n, area, false});
                }
            }
        }
        out.total_selected += mhss.size();
        out.selected.emplace(area, std::move(mhss));
    }
    return out;
}

bool epoch_finished(const EpochState& e, const RoundSchedule& schedule) {
    if (e.round_in_epoch >= schedule.max_rounds_per_epoch) {
        return true;
    }
    const auto declared = static_cast<double>(e.declared_users.size());
    const auto needed =
        static_cast<std::size_t>(std::ceil(schedule.coverage_fraction * declared));
    std::size_t validated = 0;
    for (const UserId u : e.declared_users) {
        const auto it = e.validator_count.find(u);
        if (it != e.validator_count.end() && it->second >= schedule.min_validators) {
            ++validated;
        }
    }
    return validated >= needed;
}

void EpochBook::begin_epoch(std::int64_t round) {
    states_.clear();
    validators_.clear();
    rounds_in_epoch_ = 0;
    started_at_ = round;
}

void EpochBook::observe_round(std::span<const Declaration> declarations) {
    ++rounds_in_epoch_;
    std::map<AreaId, std::vector<UserId>> declared;
    for (const Declaration& d : declarations) {
        declared[d.area].push_back(d.user);
    }
    // Areas with no declarations this round drop out of the tracked set; an
    // epoch only waits on areas someone currently claims to be in.
    std::map<AreaId, EpochState> next;
    for (auto& [area, users] : declared) {
        std::sort(users.begin(), users.end());
        EpochState& st = next[area];
        st.area = area;
        st.started_at = started_at_;
        st.round_in_epoch = rounds_in_epoch_;
        st.declared_users = std::move(users);
        for (const UserId u : st.declared_users) {
            const auto vit = validators_.find(u);
            if (vit == validators_.end()) continue;
            const auto ait = vit->second.find(area);
            if (ait == vit->second.end()) continue;
            st.validator_count[u] = static_cast<std::int32_t>(ait->second.size());
        }
    }
    states_ = std::move(next);
}

void EpochBook::credit(UserId holder, UserId target, AreaId target_declared_area) {
    auto& per_area = validators_[target];
    auto& set = per_area[target_declared_area];
    if (!set.insert(holder).second) {
        return;
    }
    const auto sit = states_.find(target_declared_area);
    if (sit == states_.end()) return;
    EpochState& st = sit->second;
    if (std::binary_search(st.declared_users.begin(), st.declared_users.end(), target)) {
        st.validator_count[target] = static_cast<std::int32_t>(set.size());
    }
}

bool EpochBook::all_finished(const RoundSchedule& schedule) const {
    for (const auto& [area, st] : states_) {
        if (!epoch_finished(st, schedule)) {
            return false;
        }
    }
    return true;
}

std::map<AreaId, std::int32_t> EpochBook::counts_by_area(UserId user) const {
    std::map<AreaId, std::int32_t> out;
    const auto it = validators_.find(user);
    if (it == validators_.end()) return out;
    for (const auto& [area, holders] : it->second) {
        out[area] = static_cast<std::int32_t>(holders.size());
    }
    return out;
}

}  // namespace lvs

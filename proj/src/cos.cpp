#include "lvs/cos.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lvs {

std::size_t ChainHash::operator()(const Chain& c) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint32_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mix(c.owner.value);
    for (const UserId u : c.via) mix(u.value);
    mix(0xffffffffu);  // separator so via boundaries matter
    mix(c.spotted.value);
    return static_cast<std::size_t>(h);
}

std::string to_string(const Chain& c) {
    std::string s = std::to_string(c.owner.value) + "->";
    for (const UserId u : c.via) {
        s += std::to_string(u.value);
        s += '/';
    }
    s += std::to_string(c.spotted.value);
    return s;
}

Chain direct_chain(UserId owner, UserId spotted) {
    if (owner == spotted) {
        throw std::invalid_argument("direct_chain: a user cannot spot itself");
    }
    return Chain{owner, {}, spotted};
}

bool AreaKnowledge::insert(Chain c) {
    // Raw set insert; merge_knowledge is the validating construction path.
    const UserId target = c.spotted;
    if (!chains_.insert(std::move(c)).second) {
        return false;
    }
    spotted_.insert(target);
    return true;
}

std::vector<Chain> AreaKnowledge::sorted_chains() const {
    std::vector<Chain> out(chains_.begin(), chains_.end());
    std::sort(out.begin(), out.end());
    return out;
}

void merge_knowledge(AreaKnowledge& receiver, const std::vector<Chain>& sender_chains,
                     UserId sender, std::int32_t max_chain_length,
                     std::vector<UserId>* newly_spotted) {
    const UserId self = receiver.owner();
    auto track_insert = [&](Chain c) {
        const UserId target = c.spotted;
        const bool fresh_target = receiver.spotted_targets().count(target) == 0;
        if (receiver.insert(std::move(c)) && fresh_target && newly_spotted != nullptr) {
            newly_spotted->push_back(target);
        }
    };

    if (max_chain_length >= 2 && sender != self) {
        track_insert(direct_chain(self, sender));
    }
    for (const Chain& c : sender_chains) {
        // Re-root under the receiver: self -> sender / old via... / spotted.
        if (static_cast<std::int32_t>(c.length()) + 1 > max_chain_length) continue;
        if (c.spotted == self) continue;
        if (std::find(c.via.begin(), c.via.end(), self) != c.via.end()) continue;
        Chain rerooted;
        rerooted.owner = self;
        rerooted.via.reserve(c.via.size() + 1);
        rerooted.via.push_back(sender);
        rerooted.via.insert(rerooted.via.end(), c.via.begin(), c.via.end());
        rerooted.spotted = c.spotted;
        track_insert(std::move(rerooted));
    }
}

KnowledgeStore::KnowledgeStore(std::uint32_t n_users, std::int32_t max_chain_length)
    : max_chain_length_(max_chain_length) {
    knowledge_.reserve(n_users);
    for (std::uint32_t i = 0; i < n_users; ++i) {
        knowledge_.emplace_back(UserId{i});
    }
}

std::vector<std::pair<UserId, UserId>> KnowledgeStore::exchange_round(
    std::span<const SpotEvent> events) {
    // Snapshot every participant first; all merges within a round read
    // pre-round state.
    std::map<UserId, std::vector<Chain>> snapshots;
    for (const SpotEvent& e : events) {
        for (const UserId u : {e.mhs, e.neighbor}) {
            if (snapshots.count(u) == 0) {
                snapshots.emplace(u, knowledge_[u.value].sorted_chains());
            }
        }
    }

    std::vector<std::pair<UserId, UserId>> new_pairs;
    for (const SpotEvent& e : events) {
        std::vector<UserId> fresh;
        merge_knowledge(knowledge_[e.neighbor.value], snapshots.at(e.mhs), e.mhs,
                        max_chain_length_, &fresh);
        for (const UserId t : fresh) new_pairs.emplace_back(e.neighbor, t);
        fresh.clear();
        merge_knowledge(knowledge_[e.mhs.value], snapshots.at(e.neighbor), e.neighbor,
                        max_chain_length_, &fresh);
        for (const UserId t : fresh) new_pairs.emplace_back(e.mhs, t);
    }
    return new_pairs;
}

void KnowledgeStore::reset_epoch() {
    for (AreaKnowledge& k : knowledge_) {
        k.clear();
    }
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<UserId>> collusion_candidates(
    const std::vector<const AreaKnowledge*>& area_knowledge,
    const std::vector<UserId>& declared_users) {
    std::map<UserId, std::uint32_t> index;
    for (std::uint32_t i = 0; i < declared_users.size(); ++i) {
        index.emplace(declared_users[i], i);
    }

    std::size_t chain_count = 0;
    std::size_t length_sum = 0;
    UnionFind uf(declared_users.size());
    std::vector<char> mentions_outsider(declared_users.size(), 0);
    std::vector<char> has_relayed_chain(declared_users.size(), 0);

    for (const AreaKnowledge* k : area_knowledge) {
        const auto oit = index.find(k->owner());
        if (oit == index.end()) continue;
        const std::uint32_t oi = oit->second;
        for (const Chain& c : k->chains()) {
            ++chain_count;
            length_sum += c.length();
            if (c.length() >= 3) has_relayed_chain[oi] = 1;
            auto link = [&](UserId member) {
                const auto mit = index.find(member);
                if (mit == index.end()) {
                    mentions_outsider[oi] = 1;
                } else {
                    uf.unite(oi, mit->second);
                }
            };
            for (const UserId v : c.via) link(v);
            link(c.spotted);
        }
    }
    if (chain_count == 0) {
        return {};
    }
    const double avg_chain_length =
        static_cast<double>(length_sum) / static_cast<double>(chain_count);

    std::map<std::uint32_t, std::vector<std::uint32_t>> components;
    for (std::uint32_t i = 0; i < declared_users.size(); ++i) {
        components[uf.find(i)].push_back(i);
    }

    std::vector<std::vector<UserId>> candidates;
    for (const auto& [root, members] : components) {
        if (members.size() < 2) continue;
        if (static_cast<double>(members.size()) >= avg_chain_length) continue;
        bool tainted = false;
        bool relayed = false;
        for (const std::uint32_t m : members) {
            tainted = tainted || mentions_outsider[m];
            relayed = relayed || has_relayed_chain[m];
        }
        // A lone mutual sighting is exactly what an isolated honest pair
        // produces; collusion evidence via chains of sight implies relayed
        // chains inside the group.
        if (tainted || !relayed) continue;
        std::vector<UserId> set;
        set.reserve(members.size());
        for (const std::uint32_t m : members) set.push_back(declared_users[m]);
        std::sort(set.begin(), set.end());
        candidates.push_back(std::move(set));
    }
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

std::vector<std::pair<UserId, UserId>> fraud_candidates(
    const std::vector<const AreaKnowledge*>& area_knowledge,
    const std::vector<UserId>& declared_users,
    const std::map<UserId, std::int32_t>& declared_area_counts, std::int32_t min_validators) {
    // For every user of the area: the set of immediate predecessors over all
    // chains (any owner in the area) that spot it.
    std::map<UserId, std::set<UserId>> predecessors;
    for (const AreaKnowledge* k : area_knowledge) {
        for (const Chain& c : k->chains()) {
            const UserId pred = c.via.empty() ? c.owner : c.via.back();
            predecessors[c.spotted].insert(pred);
        }
    }

    std::vector<std::pair<UserId, UserId>> candidates;
    for (const UserId target : declared_users) {
        const auto cit = declared_area_counts.find(target);
        if (cit == declared_area_counts.end() || cit->second < min_validators) {
            continue;  // only validated users can hide behind a funnel
        }
        const auto pit = predecessors.find(target);
        if (pit == predecessors.end() || pit->second.size() != 1) {
            continue;
        }
        candidates.emplace_back(target, *pit->second.begin());
    }
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

std::vector<std::vector<UserId>> CollusionDetector::epoch_end(
    const std::map<AreaId, std::vector<std::vector<UserId>>>& candidates_by_area) {
    // Streaks rebuild from scratch each epoch: anything not a candidate now
    // starts over, including in areas nobody currently declares.
    std::map<std::pair<AreaId, std::vector<UserId>>, std::int32_t> next;
    std::vector<std::vector<UserId>> flagged;
    for (const auto& [area, candidates] : candidates_by_area) {
        for (const auto& set : candidates) {
            const auto key = std::make_pair(area, set);
            const auto it = streaks_.find(key);
            const std::int32_t streak = (it == streaks_.end()) ? 1 : it->second + 1;
            next.emplace(key, streak);
            if (streak >= params_.collusion_persistence) {
                flagged.push_back(set);
            }
        }
    }
    streaks_ = std::move(next);
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

std::vector<std::pair<UserId, UserId>> FraudCoveringDetector::epoch_end(
    const std::map<AreaId, std::vector<std::pair<UserId, UserId>>>& candidates_by_area) {
    std::map<std::tuple<AreaId, UserId, UserId>, std::int32_t> next;
    std::vector<std::pair<UserId, UserId>> flagged;
    for (const auto& [area, candidates] : candidates_by_area) {
        for (const auto& [target, funnel] : candidates) {
            const auto key = std::make_tuple(area, target, funnel);
            const auto it = streaks_.find(key);
            const std::int32_t streak = (it == streaks_.end()) ? 1 : it->second + 1;
            next.emplace(key, streak);
            if (streak > params_.fraud_persistence) {
                flagged.emplace_back(target, funnel);
            }
        }
    }
    streaks_ = std::move(next);
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

}  // namespace lvs

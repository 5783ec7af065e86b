#ifndef LVS_COS_HPP
#define LVS_COS_HPP

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lvs/core.hpp"
#include "lvs/protocol.hpp"

namespace lvs {

/// One chain of sight: the owner saw `spotted`, either directly (empty via)
/// or relayed through the via path. Length counts users, owner and spotted
/// included, and is capped by max_chain_length. No user appears twice in a
/// chain.
struct Chain {
    UserId owner{};
    std::vector<UserId> via;
    UserId spotted{};

    std::size_t length() const { return via.size() + 2; }

    bool operator==(const Chain&) const = default;
    auto operator<=>(const Chain&) const = default;
};

struct ChainHash {
    std::size_t operator()(const Chain& c) const noexcept;
};

/// Log form: owner->via1/via2/.../spotted.
std::string to_string(const Chain& c);

/// Direct sighting, length 2. Self-sighting is an error.
Chain direct_chain(UserId owner, UserId spotted);

struct DetectorParams {
    std::int32_t max_chain_length = 5;     // chain length cap, in users
    std::int32_t collusion_persistence = 2;  // epochs before an isolated set is flagged
    std::int32_t fraud_persistence = 2;      // epochs a single-funnel pair may recur

    bool operator==(const DetectorParams&) const = default;
};

/// All chains one user holds within the current epoch.
class AreaKnowledge {
public:
    AreaKnowledge() = default;
    explicit AreaKnowledge(UserId owner) : owner_(owner) {}

    UserId owner() const { return owner_; }
    std::size_t size() const { return chains_.size(); }
    bool contains(const Chain& c) const { return chains_.count(c) != 0; }
    const std::unordered_set<Chain, ChainHash>& chains() const { return chains_; }

    /// Users this owner spots through any chain.
    const std::set<UserId>& spotted_targets() const { return spotted_; }

    /// Insert if valid and new; returns whether `spotted` became a target the
    /// owner had not spotted before.
    bool insert(Chain c);

    /// Sorted copy, for logs and assertions.
    std::vector<Chain> sorted_chains() const;

    void clear() { chains_.clear(); spotted_.clear(); }

private:
    UserId owner_{};
    std::unordered_set<Chain, ChainHash> chains_;
    std::set<UserId> spotted_;
};

/// Merge the sender's knowledge into the receiver after receiver directly
/// spotted sender: the receiver gains the direct chain plus every chain of
/// the sender re-rooted under the receiver. Candidates violating a chain
/// invariant (over-length, spotting the receiver itself, repeating a member)
/// are dropped; duplicates are skipped. Newly spotted targets are appended to
/// `newly_spotted` when given.
void merge_knowledge(AreaKnowledge& receiver, const std::vector<Chain>& sender_chains,
                     UserId sender, std::int32_t max_chain_length,
                     std::vector<UserId>* newly_spotted = nullptr);

/// Per-user knowledge for a whole scenario, reset at each epoch start.
class KnowledgeStore {
public:
    KnowledgeStore(std::uint32_t n_users, std::int32_t max_chain_length);

    /// Apply one round of exchanges. Both parties of every event merge the
    /// other's pre-round knowledge (snapshots are taken first, so exchanges
    /// within a round are simultaneous). Returns every (holder, target) pair
    /// where the holder spots the target for the first time this epoch.
    std::vector<std::pair<UserId, UserId>> exchange_round(std::span<const SpotEvent> events);

    void reset_epoch();

    const AreaKnowledge& of(UserId u) const { return knowledge_.at(u.value); }
    std::int32_t max_chain_length() const { return max_chain_length_; }

private:
    std::vector<AreaKnowledge> knowledge_;
    std::int32_t max_chain_length_;
};

// --- epoch-end detectors -------------------------------------------------

/// Isolated-group candidates for one area and epoch: connected components of
/// the mention relation (owner <-> any user named in an owned chain) that
/// nobody outside mentions and that mention nobody outside, restricted to
/// groups of at least two users with fewer members than the area's average
/// chain length. A group must hold at least one relayed chain (length >= 3):
/// mutual fabrication propagates chains within the group, whereas an isolated
/// honest pair only ever holds its two direct sightings.
std::vector<std::vector<UserId>> collusion_candidates(
    const std::vector<const AreaKnowledge*>& area_knowledge,
    const std::vector<UserId>& declared_users);

/// Single-funnel candidates for one area and epoch: pairs (target, funnel)
/// where the target is validated (at least min_validators distinct holders in
/// its declared area) yet every chain spotting it has the same immediate
/// predecessor. A target spotted directly by two distinct users never
/// qualifies.
std::vector<std::pair<UserId, UserId>> fraud_candidates(
    const std::vector<const AreaKnowledge*>& area_knowledge,
    const std::vector<UserId>& declared_users,
    const std::map<UserId, std::int32_t>& declared_area_counts, std::int32_t min_validators);

/// Tracks candidate persistence across consecutive epochs and emits flags.
class CollusionDetector {
public:
    explicit CollusionDetector(DetectorParams params) : params_(params) {}

    /// Feed one whole epoch's candidates, grouped by area; returns the sets
    /// flagged as malicious this epoch (candidates seen
    /// collusion_persistence consecutive epochs in the same area). A set
    /// skipping an epoch starts over.
    std::vector<std::vector<UserId>> epoch_end(
        const std::map<AreaId, std::vector<std::vector<UserId>>>& candidates_by_area);

private:
    DetectorParams params_;
    std::map<std::pair<AreaId, std::vector<UserId>>, std::int32_t> streaks_;
};

class FraudCoveringDetector {
public:
    explicit FraudCoveringDetector(DetectorParams params) : params_(params) {}

    /// Feed one whole epoch's candidates, grouped by area; returns
    /// (spoofer, coverer) pairs flagged this epoch (recurring for more than
    /// fraud_persistence consecutive epochs). Both members of a flagged pair
    /// count as malicious.
    std::vector<std::pair<UserId, UserId>> epoch_end(
        const std::map<AreaId, std::vector<std::pair<UserId, UserId>>>& candidates_by_area);

private:
    DetectorParams params_;
    std::map<std::tuple<AreaId, UserId, UserId>, std::int32_t> streaks_;
};

}  // namespace lvs

#endif  // LVS_COS_HPP

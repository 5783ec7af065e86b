#ifndef LVS_PROTOCOL_HPP
#define LVS_PROTOCOL_HPP

#include <map>
#include <set>
#include <span>
#include <vector>

#include "lvs/core.hpp"
#include "lvs/topology.hpp"

namespace lvs {

/// One mutual validation: the hotspot and the neighbor each vouch for the
/// other, in the area both claim to occupy. `fabricated` is ground truth for
/// metrics only; the platform never sees it.
struct SpotEvent {
    std::int64_t round = 0;
    UserId mhs{};
    UserId neighbor{};
    AreaId area = 0;
    bool fabricated = false;

    auto operator<=>(const SpotEvent&) const = default;
};

/// What one user tells the platform at the start of a round.
struct Declaration {
    UserId user{};
    Position position{};  // declared, not necessarily true
    AreaId area = 0;
};

struct RoundOutcome {
    std::vector<SpotEvent> events;                    // genuine events only
    std::map<AreaId, std::vector<UserId>> selected;   // hotspots per declared area
    std::size_t total_selected = 0;
};

/// One validation round. Hotspots are picked per declared area from the disc
/// graph of declared positions (all the platform knows); genuine events then
/// require a true-position edge between two users declaring the same area, so
/// a spoofer may be selected as hotspot in its fake area yet produces no
/// genuine event there.
///
/// `true_graph` must be built from the same round's true positions, with
/// nodes covering every declaring user.
RoundOutcome run_round(std::int64_t round, std::span<const Declaration> declarations,
                       const NeighborGraph& true_graph, double wifi_range);

/// Per-area epoch progress.
struct EpochState {
    AreaId area = 0;
    std::int32_t round_in_epoch = 0;
    std::vector<UserId> declared_users;              // current round, ascending
    std::map<UserId, std::int32_t> validator_count;  // distinct validators, this area
    std::int64_t started_at = 0;
};

/// True once enough declared users are validated (coverage_fraction of them
/// by at least min_validators distinct users) or the round cap is reached.
bool epoch_finished(const EpochState& e, const RoundSchedule& schedule);

/// Epoch bookkeeping across areas. Validator credits come from chain
/// holdings: a user counts as validated once per distinct holder of a chain
/// that spots it, attributed to the area the target declared in the round the
/// holding first appeared. Counts never decrease within an epoch and reset
/// when a new epoch begins.
class EpochBook {
public:
    void begin_epoch(std::int64_t round);

    /// Refresh declared sets and advance the round counter.
    void observe_round(std::span<const Declaration> declarations);

    /// Record that `holder` now holds a chain spotting `target`.
    void credit(UserId holder, UserId target, AreaId target_declared_area);

    /// Epoch ends when every tracked area satisfies epoch_finished.
    bool all_finished(const RoundSchedule& schedule) const;

    std::int32_t rounds_in_epoch() const { return rounds_in_epoch_; }
    const std::map<AreaId, EpochState>& states() const { return states_; }

    /// Distinct-validator counts for one user across areas.
    std::map<AreaId, std::int32_t> counts_by_area(UserId user) const;

private:
    std::map<AreaId, EpochState> states_;
    std::map<UserId, std::map<AreaId, std::set<UserId>>> validators_;
    std::int32_t rounds_in_epoch_ = 0;
    std::int64_t started_at_ = 0;
};

}  // namespace lvs

#endif  // LVS_PROTOCOL_HPP

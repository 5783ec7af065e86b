#ifndef LVS_REPUTATION_HPP
#define LVS_REPUTATION_HPP

#include <map>

#include "lvs/core.hpp"

namespace lvs {

/// Subjective-logic opinion. Components stay in [0,1] and sum to 1; the
/// scalar reputation is rho = b - d - u. New users start at full uncertainty,
/// so rho begins at -1 and only evidence raises it.
struct OpinionTriple {
    double belief = 0.0;
    double disbelief = 0.0;
    double uncertainty = 1.0;

    double rho() const { return belief - disbelief - uncertainty; }

    bool operator==(const OpinionTriple&) const = default;
};

struct ReputationParams {
    double belief_increment = 0.25;       // applied on a verified epoch
    double disbelief_increment = 0.6;     // applied on a fake epoch
    double uncertainty_increment = 0.15;  // applied on an unverified epoch
    double acceptance_threshold = 0.8;    // reports accepted when rho >= this

    bool operator==(const ReputationParams&) const = default;
};

enum class Verdict { Verified, NotVerified, Fake };

const char* to_string(Verdict v);

/// Epoch-end verdict for one user. `counts_by_area` holds the number of
/// distinct validators the user collected per area this epoch. Fake (enough
/// validators in a non-declared area, or a detector flag) takes precedence
/// over Verified.
Verdict classify(AreaId declared_area, const std::map<AreaId, std::int32_t>& counts_by_area,
                 std::int32_t min_validators, bool flagged_malicious);

/// One opinion update. Applies the verdict's raw increments, clamps each
/// component to [0,1], then renormalizes to sum 1 — in that order, which is
/// what keeps the pinned worked values reproducible.
OpinionTriple update_opinion(const OpinionTriple& o, Verdict v, const ReputationParams& p);

/// Report filter: accepted iff rho >= threshold (boundary inclusive).
bool accept_report(const OpinionTriple& o, double threshold);

}  // namespace lvs

#endif  // LVS_REPUTATION_HPP

#include "lvs/reputation.hpp"

#include <algorithm>

namespace lvs {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Verified: return "verified";
        case Verdict::NotVerified: return "not_verified";
        case Verdict::Fake: return "fake";
    }
    return "?";
}

Verdict classify(AreaId declared_area, const std::map<AreaId, std::int32_t>& counts_by_area,
                 std::int32_t min_validators, bool flagged_malicious) {
    if (flagged_malicious) {
        return Verdict::Fake;
    }
    for (const auto& [area, count] : counts_by_area) {
        if (area != declared_area && count > min_validators) {
            return Verdict::Fake;
        }
    }
    const auto it = counts_by_area.find(declared_area);
    if (it != counts_by_area.end() && it->second >= min_validators) {
        return Verdict::Verified;
    }
    return Verdict::NotVerified;
}

OpinionTriple update_opinion(const OpinionTriple& o, Verdict v, const ReputationParams& p) {
    double b = o.belief;
    double d = o.disbelief;
    double u = o.uncertainty;
    switch (v) {
        case Verdict::Verified:
            b += p.belief_increment;
            u -= p.belief_increment / 2.0;
            d -= p.belief_increment / 2.0;
            break;
        case Verdict::NotVerified:
            // Disbelief is deliberately untouched here.
            u += p.uncertainty_increment;
            b -= p.uncertainty_increment;
            break;
        case Verdict::Fake:
            d += p.disbelief_increment;
            b -= p.disbelief_increment / 2.0;
            u -= p.disbelief_increment / 2.0;
            break;
    }
    b = std::clamp(b, 0.0, 1.0);
    d = std::clamp(d, 0.0, 1.0);
    u = std::clamp(u, 0.0, 1.0);
    const double sum = b + d + u;  // >= the applied increment, never 0
    return OpinionTriple{b / sum, d / sum, u / sum};
}

bool accept_report(const OpinionTriple& o, double threshold) {
    return o.rho() >= threshold;
}

}  // namespace lvs

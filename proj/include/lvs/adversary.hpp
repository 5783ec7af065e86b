#ifndef LVS_ADVERSARY_HPP
#define LVS_ADVERSARY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "lvs/core.hpp"
#include "lvs/protocol.hpp"
#include "lvs/rng.hpp"

namespace lvs {

/// A lone spoofer continuously advertising a position inside fake_area while
/// physically somewhere else.
struct LsaSpec {
    UserId member{};
    AreaId fake_area = 0;

    bool operator==(const LsaSpec&) const = default;
};

/// A group advertising fake positions in a shared area and fabricating mutual
/// validations of each other there every round.
struct CollusionSpec {
    std::vector<UserId> members;
    AreaId fake_area = 0;

    bool operator==(const CollusionSpec&) const = default;
};

/// One spoofer advertising covered_area, backed by a coverer who genuinely
/// lives there and fabricates a validation of the spoofer each round while
/// otherwise behaving honestly.
struct FraudCoveringSpec {
    UserId spoofer{};
    UserId coverer{};
    AreaId covered_area = 0;

    bool operator==(const FraudCoveringSpec&) const = default;
};

using AttackerSpec = std::variant<LsaSpec, CollusionSpec, FraudCoveringSpec>;

/// Declaration for a spoofer this round: a point inside fake_area — unless
/// the attacker physically wandered into fake_area, in which case the
/// declaration switches to the smallest adjacent area for this round, so the
/// declared area never matches the true one. Requires a grid with at least
/// two areas.
Declaration lsa_declaration(UserId member, AreaId fake_area, Position true_position,
                            const AreaGrid& grid, Rng& rng);

/// Fabricated mutual validations among all colluder pairs, claimed in the
/// shared fake area. Members must be at least two.
std::vector<SpotEvent> collusion_fabrications(const CollusionSpec& spec, std::int64_t round);

/// The coverer's fabricated validation of the spoofer for this round.
SpotEvent fraud_covering_fabrication(const FraudCoveringSpec& spec, std::int64_t round);

/// Per-user view of the attacker specs, for quick role lookups.
struct CompiledRoles {
    enum class Kind : std::uint8_t { Honest, Lsa, Colluder, FraudSpoofer, FraudCoverer };

    struct Role {
        Kind kind = Kind::Honest;
        AreaId fake_area = 0;   // target area for Lsa/Colluder/FraudSpoofer
        std::size_t spec_index = 0;
    };

    std::map<UserId, Role> roles;

    Role role_of(UserId u) const {
        const auto it = roles.find(u);
        return it == roles.end() ? Role{} : it->second;
    }
    bool is_attacker(UserId u) const {
        const auto k = role_of(u).kind;
        // The coverer is malicious too: it fabricates evidence every round.
        return k != Kind::Honest;
    }
};

/// Flattens specs into per-user roles. Violations (duplicate membership,
/// spoofer == coverer, singleton collusion, ids out of range) are reported as
/// human-readable strings, one per problem.
std::vector<std::string> compile_roles(const std::vector<AttackerSpec>& specs,
                                       std::uint32_t n_users, const AreaGrid& grid,
                                       CompiledRoles& out);

/// One round of position reports, one per user, ascending. Honest users (and
/// the fraud coverer) declare their true position; spoofing roles declare per
/// lsa_declaration. When `fixed_fake_points` is given, a spoofer draws its
/// fake point once and reuses it on every round where the fake area applies.
std::vector<Declaration> collect_declarations(std::span<const Position> true_positions,
                                              const CompiledRoles& roles, const AreaGrid& grid,
                                              std::span<Rng> declaration_rngs,
                                              std::map<UserId, Position>* fixed_fake_points);

}  // namespace lvs

#endif  // LVS_ADVERSARY_HPP

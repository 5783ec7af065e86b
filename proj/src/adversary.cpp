#include "lvs/adversary.hpp"

#include <algorithm>
#include <set>

namespace lvs {

namespace {

Position uniform_point_in_cell(AreaId area, const AreaGrid& grid, Rng& rng) {
    const Position lo = grid.cell_min(area);
    return Position{lo.x + rng.uniform01() * grid.cell_size,
                    lo.y + rng.uniform01() * grid.cell_size};
}

}  // namespace

Declaration lsa_declaration(UserId member, AreaId fake_area, Position true_position,
                            const AreaGrid& grid, Rng& rng) {
    const AreaId true_area = area_of(true_position, grid);
    AreaId claimed = fake_area;
    if (true_area == fake_area) {
        // Never admit the real area: fall back to an adjacent cell this round.
        const auto adj = adjacent_areas(fake_area, grid);
        if (adj.empty()) {
            throw ConfigError("lsa_declaration: single-area grid cannot host a spoofer");
        }
        claimed = adj.front();
    }
    return Declaration{member, uniform_point_in_cell(claimed, grid, rng), claimed};
}

std::vector<SpotEvent> collusion_fabrications(const CollusionSpec& spec, std::int64_t round) {
    std::vector<UserId> members = spec.members;
    std::sort(members.begin(), members.end());
    std::vector<SpotEvent> events;
    events.reserve(members.size() * (members.size() - 1) / 2);
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            events.push_back(SpotEvent{round, members[i], members[j], spec.fake_area, true});
        }
    }
    return events;
}

SpotEvent fraud_covering_fabrication(const FraudCoveringSpec& spec, std::int64_t round) {
    return SpotEvent{round, spec.coverer, spec.spoofer, spec.covered_area, true};
}

std::vector<Declaration> collect_declarations(std::span<const Position> true_positions,
                                              const CompiledRoles& roles, const AreaGrid& grid,
                                              std::span<Rng> declaration_rngs,
                                              std::map<UserId, Position>* fixed_fake_points) {
    std::vector<Declaration> decls;
    decls.reserve(true_positions.size());
    for (std::uint32_t i = 0; i < true_positions.size(); ++i) {
        const UserId user{i};
        const auto role = roles.role_of(user);
        const Position tp = true_positions[i];
        if (role.kind == CompiledRoles::Kind::Honest ||
            role.kind == CompiledRoles::Kind::FraudCoverer) {
            decls.push_back(Declaration{user, tp, area_of(tp, grid)});
            continue;
        }
        if (fixed_fake_points != nullptr) {
            const auto cached = fixed_fake_points->find(user);
            if (cached != fixed_fake_points->end() && area_of(tp, grid) != role.fake_area) {
                decls.push_back(Declaration{user, cached->second, role.fake_area});
                continue;
            }
        }
        Declaration d = lsa_declaration(user, role.fake_area, tp, grid, declaration_rngs[i]);
        if (fixed_fake_points != nullptr && d.area == role.fake_area) {
            fixed_fake_points->emplace(user, d.position);
        }
        decls.push_back(d);
    }
    return decls;
}

std::vector<std::string> compile_roles(const std::vector<AttackerSpec>& specs,
                                       std::uint32_t n_users, const AreaGrid& grid,
                                       CompiledRoles& out) {
    std::vector<std::string> problems;
    out.roles.clear();
    std::set<UserId> seen;

    auto claim = [&](UserId u, CompiledRoles::Role role) {
        if (u.value >= n_users) {
            problems.push_back("attacker_spec: user " + std::to_string(u.value) +
                               " out of range (n_users = " + std::to_string(n_users) + ")");
            return;
        }
        if (!seen.insert(u).second) {
            problems.push_back("attacker_spec: user " + std::to_string(u.value) +
                               " appears in more than one spec");
            return;
        }
        out.roles.emplace(u, role);
    };
    auto check_area = [&](AreaId a, const char* what) {
        if (a < 0 || a >= grid.area_count()) {
            problems.push_back(std::string("attacker_spec: ") + what + " " + std::to_string(a) +
                               " outside grid");
            return false;
        }
        return true;
    };
    auto needs_second_area = [&](const char* what) {
        if (grid.area_count() < 2) {
            problems.push_back(std::string("attacker_spec: ") + what +
                               " needs a grid with at least two areas (spoofed area can never "
                               "equal the real one)");
        }
    };

    for (std::size_t si = 0; si < specs.size(); ++si) {
        const AttackerSpec& spec = specs[si];
        if (const auto* lsa = std::get_if<LsaSpec>(&spec)) {
            needs_second_area("lsa");
            if (check_area(lsa->fake_area, "fake_area")) {
                claim(lsa->member, {CompiledRoles::Kind::Lsa, lsa->fake_area, si});
            }
        } else if (const auto* col = std::get_if<CollusionSpec>(&spec)) {
            needs_second_area("collusion");
            if (col->members.size() < 2) {
                problems.push_back("attacker_spec: collusion needs at least two members");
            }
            std::set<UserId> distinct(col->members.begin(), col->members.end());
            if (distinct.size() != col->members.size()) {
                problems.push_back("attacker_spec: collusion members must be pairwise distinct");
            }
            if (check_area(col->fake_area, "fake_area")) {
                for (const UserId m : col->members) {
                    claim(m, {CompiledRoles::Kind::Colluder, col->fake_area, si});
                }
            }
        } else if (const auto* fc = std::get_if<FraudCoveringSpec>(&spec)) {
            needs_second_area("fraud_covering");
            if (fc->spoofer == fc->coverer) {
                problems.push_back("attacker_spec: fraud_covering spoofer and coverer must differ");
            }
            if (check_area(fc->covered_area, "covered_area")) {
                claim(fc->spoofer, {CompiledRoles::Kind::FraudSpoofer, fc->covered_area, si});
                claim(fc->coverer, {CompiledRoles::Kind::FraudCoverer, fc->covered_area, si});
            }
        }
    }
    return problems;
}

}  // namespace lvs

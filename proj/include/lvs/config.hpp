#ifndef LVS_CONFIG_HPP
#define LVS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lvs/adversary.hpp"
#include "lvs/core.hpp"
#include "lvs/cos.hpp"
#include "lvs/mobility.hpp"
#include "lvs/reputation.hpp"

namespace lvs {

/// Initial user placement.
///  - Uniform: everyone uniform over the whole grid (fraud coverers go inside
///    their covered area, which they must genuinely inhabit).
///  - AttackSplit: honest users uniform inside cell 0, users named in any
///    attacker spec uniform over the other cells (coverers still inside their
///    covered area).
enum class Placement { Uniform, AttackSplit };

struct ScenarioConfig {
    AreaGrid grid{};
    std::int64_t n_users = 500;
    std::vector<AttackerSpec> attacker_spec;
    double wifi_range = 50.0;
    RoundSchedule schedule{};
    ReputationParams reputation_params{};
    DetectorParams detector_params{};
    TlwParams mobility_params{};
    Placement placement = Placement::Uniform;
    /// Spoofed declarations default to a fresh random point per round; set to
    /// reuse one fixed point per attacker instead.
    bool fixed_fake_declarations = false;
    std::int64_t n_epochs = 30;
    std::uint64_t seed = 42;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Every violated invariant, not just the first. Empty means the config is
/// runnable.
std::vector<std::string> validate_config(const ScenarioConfig& c);

/// Strict JSON codec: field names match the struct fields, unknown or missing
/// fields raise ConfigError.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& c);

/// FNV-1a of the canonical serialized form, as fixed-width hex.
std::string config_digest(const ScenarioConfig& c);

}  // namespace lvs

#endif  // LVS_CONFIG_HPP

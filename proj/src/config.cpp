#include "lvs/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lvs/rng.hpp"

namespace lvs {

namespace {

using nlohmann::json;

/// Accessor that records which keys were read and rejects the rest.
class StrictObject {
public:
    StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) {
            throw ConfigError(context_ + ": expected a JSON object");
        }
    }

    const json& require(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) {
            throw ConfigError(context_ + ": missing field '" + key + "'");
        }
        return *it;
    }

    const json* optional(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : j_.items()) {
            if (seen_.count(key) == 0) {
                throw ConfigError(context_ + ": unknown field '" + key + "'");
            }
        }
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

double as_double(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + ": expected a number");
    return j.get<double>();
}

std::int64_t as_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ConfigError(what + ": expected an integer");
    return j.get<std::int64_t>();
}

UserId as_user(const json& j, const std::string& what) {
    const std::int64_t v = as_int(j, what);
    if (v < 0) throw ConfigError(what + ": negative user id");
    return UserId{static_cast<std::uint32_t>(v)};
}

Position parse_position(const json& j, const std::string& ctx) {
    StrictObject o(j, ctx);
    Position p;
    p.x = as_double(o.require("x"), ctx + ".x");
    p.y = as_double(o.require("y"), ctx + ".y");
    o.reject_unknown();
    return p;
}

AreaGrid parse_grid(const json& j) {
    StrictObject o(j, "grid");
    AreaGrid g;
    g.cell_size = as_double(o.require("cell_size"), "grid.cell_size");
    g.columns = static_cast<std::int32_t>(as_int(o.require("columns"), "grid.columns"));
    g.rows = static_cast<std::int32_t>(as_int(o.require("rows"), "grid.rows"));
    g.origin = parse_position(o.require("origin"), "grid.origin");
    o.reject_unknown();
    return g;
}

RoundSchedule parse_schedule(const json& j) {
    StrictObject o(j, "schedule");
    RoundSchedule s;
    s.round_period_s = as_double(o.require("round_period_s"), "schedule.round_period_s");
    s.setup_time_s = as_double(o.require("setup_time_s"), "schedule.setup_time_s");
    s.validation_window_s =
        as_double(o.require("validation_window_s"), "schedule.validation_window_s");
    s.max_rounds_per_epoch = static_cast<std::int32_t>(
        as_int(o.require("max_rounds_per_epoch"), "schedule.max_rounds_per_epoch"));
    s.coverage_fraction = as_double(o.require("coverage_fraction"), "schedule.coverage_fraction");
    s.min_validators =
        static_cast<std::int32_t>(as_int(o.require("min_validators"), "schedule.min_validators"));
    o.reject_unknown();
    return s;
}

ReputationParams parse_reputation(const json& j) {
    StrictObject o(j, "reputation_params");
    ReputationParams p;
    p.belief_increment = as_double(o.require("belief_increment"), "belief_increment");
    p.disbelief_increment = as_double(o.require("disbelief_increment"), "disbelief_increment");
    p.uncertainty_increment = as_double(o.require("uncertainty_increment"), "uncertainty_increment");
    p.acceptance_threshold = as_double(o.require("acceptance_threshold"), "acceptance_threshold");
    o.reject_unknown();
    return p;
}

DetectorParams parse_detector(const json& j) {
    StrictObject o(j, "detector_params");
    DetectorParams p;
    p.max_chain_length =
        static_cast<std::int32_t>(as_int(o.require("max_chain_length"), "max_chain_length"));
    p.collusion_persistence = static_cast<std::int32_t>(
        as_int(o.require("collusion_persistence"), "collusion_persistence"));
    p.fraud_persistence =
        static_cast<std::int32_t>(as_int(o.require("fraud_persistence"), "fraud_persistence"));
    o.reject_unknown();
    return p;
}

TlwParams parse_mobility(const json& j) {
    StrictObject o(j, "mobility_params");
    TlwParams p;
    p.flight_exponent = as_double(o.require("flight_exponent"), "flight_exponent");
    p.pause_exponent = as_double(o.require("pause_exponent"), "pause_exponent");
    p.min_flight_m = as_double(o.require("min_flight_m"), "min_flight_m");
    p.max_flight_m = as_double(o.require("max_flight_m"), "max_flight_m");
    p.min_pause_s = as_double(o.require("min_pause_s"), "min_pause_s");
    p.max_pause_s = as_double(o.require("max_pause_s"), "max_pause_s");
    p.speed_mps = as_double(o.require("speed_mps"), "speed_mps");
    if (const json* f = o.optional("freeze_per_epoch")) {
        if (!f->is_boolean()) throw ConfigError("mobility_params.freeze_per_epoch: expected bool");
        p.freeze_per_epoch = f->get<bool>();
    }
    o.reject_unknown();
    return p;
}

AttackerSpec parse_attacker(const json& j, std::size_t index) {
    const std::string ctx = "attacker_spec[" + std::to_string(index) + "]";
    StrictObject o(j, ctx);
    const json& kind_j = o.require("kind");
    if (!kind_j.is_string()) throw ConfigError(ctx + ".kind: expected a string");
    const std::string kind = kind_j.get<std::string>();
    if (kind == "lsa") {
        LsaSpec s;
        s.member = as_user(o.require("member"), ctx + ".member");
        s.fake_area = static_cast<AreaId>(as_int(o.require("fake_area"), ctx + ".fake_area"));
        o.reject_unknown();
        return s;
    }
    if (kind == "collusion") {
        CollusionSpec s;
        const json& members = o.require("members");
        if (!members.is_array()) throw ConfigError(ctx + ".members: expected an array");
        for (const auto& m : members) s.members.push_back(as_user(m, ctx + ".members[]"));
        s.fake_area = static_cast<AreaId>(as_int(o.require("fake_area"), ctx + ".fake_area"));
        o.reject_unknown();
        return s;
    }
    if (kind == "fraud_covering") {
        FraudCoveringSpec s;
        s.spoofer = as_user(o.require("spoofer"), ctx + ".spoofer");
        s.coverer = as_user(o.require("coverer"), ctx + ".coverer");
        s.covered_area =
            static_cast<AreaId>(as_int(o.require("covered_area"), ctx + ".covered_area"));
        o.reject_unknown();
        return s;
    }
    throw ConfigError(ctx + ".kind: unknown kind '" + kind +
                      "' (expected lsa, collusion or fraud_covering)");
}

json position_json(Position p) { return json{{"x", p.x}, {"y", p.y}}; }

json attacker_json(const AttackerSpec& spec) {
    json j;
    if (const auto* lsa = std::get_if<LsaSpec>(&spec)) {
        j["kind"] = "lsa";
        j["member"] = lsa->member.value;
        j["fake_area"] = lsa->fake_area;
    } else if (const auto* col = std::get_if<CollusionSpec>(&spec)) {
        j["kind"] = "collusion";
        json members = json::array();
        for (const UserId m : col->members) members.push_back(m.value);
        j["members"] = std::move(members);
        j["fake_area"] = col->fake_area;
    } else if (const auto* fc = std::get_if<FraudCoveringSpec>(&spec)) {
        j["kind"] = "fraud_covering";
        j["spoofer"] = fc->spoofer.value;
        j["coverer"] = fc->coverer.value;
        j["covered_area"] = fc->covered_area;
    }
    return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    StrictObject o(j, "config");
    ScenarioConfig c;
    c.grid = parse_grid(o.require("grid"));
    c.n_users = as_int(o.require("n_users"), "n_users");
    if (const json* specs = o.optional("attacker_spec")) {
        if (!specs->is_array()) throw ConfigError("attacker_spec: expected an array");
        for (std::size_t i = 0; i < specs->size(); ++i) {
            c.attacker_spec.push_back(parse_attacker((*specs)[i], i));
        }
    }
    c.wifi_range = as_double(o.require("wifi_range"), "wifi_range");
    c.schedule = parse_schedule(o.require("schedule"));
    c.reputation_params = parse_reputation(o.require("reputation_params"));
    c.detector_params = parse_detector(o.require("detector_params"));
    c.mobility_params = parse_mobility(o.require("mobility_params"));
    if (const json* p = o.optional("placement")) {
        if (!p->is_string()) throw ConfigError("placement: expected a string");
        const std::string s = p->get<std::string>();
        if (s == "uniform") {
            c.placement = Placement::Uniform;
        } else if (s == "attack_split") {
            c.placement = Placement::AttackSplit;
        } else {
            throw ConfigError("placement: unknown value '" + s +
                              "' (expected uniform or attack_split)");
        }
    }
    if (const json* f = o.optional("fixed_fake_declarations")) {
        if (!f->is_boolean()) throw ConfigError("fixed_fake_declarations: expected bool");
        c.fixed_fake_declarations = f->get<bool>();
    }
    c.n_epochs = as_int(o.require("n_epochs"), "n_epochs");
    const std::int64_t seed = as_int(o.require("seed"), "seed");
    c.seed = static_cast<std::uint64_t>(seed);
    o.reject_unknown();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& c) {
    json j;
    j["grid"] = {{"cell_size", c.grid.cell_size},
                 {"columns", c.grid.columns},
                 {"rows", c.grid.rows},
                 {"origin", position_json(c.grid.origin)}};
    j["n_users"] = c.n_users;
    json specs = json::array();
    for (const AttackerSpec& s : c.attacker_spec) specs.push_back(attacker_json(s));
    j["attacker_spec"] = std::move(specs);
    j["wifi_range"] = c.wifi_range;
    j["schedule"] = {{"round_period_s", c.schedule.round_period_s},
                     {"setup_time_s", c.schedule.setup_time_s},
                     {"validation_window_s", c.schedule.validation_window_s},
                     {"max_rounds_per_epoch", c.schedule.max_rounds_per_epoch},
                     {"coverage_fraction", c.schedule.coverage_fraction},
                     {"min_validators", c.schedule.min_validators}};
    j["reputation_params"] = {{"belief_increment", c.reputation_params.belief_increment},
                              {"disbelief_increment", c.reputation_params.disbelief_increment},
                              {"uncertainty_increment", c.reputation_params.uncertainty_increment},
                              {"acceptance_threshold", c.reputation_params.acceptance_threshold}};
    j["detector_params"] = {{"max_chain_length", c.detector_params.max_chain_length},
                            {"collusion_persistence", c.detector_params.collusion_persistence},
                            {"fraud_persistence", c.detector_params.fraud_persistence}};
    j["mobility_params"] = {{"flight_exponent", c.mobility_params.flight_exponent},
                            {"pause_exponent", c.mobility_params.pause_exponent},
                            {"min_flight_m", c.mobility_params.min_flight_m},
                            {"max_flight_m", c.mobility_params.max_flight_m},
                            {"min_pause_s", c.mobility_params.min_pause_s},
                            {"max_pause_s", c.mobility_params.max_pause_s},
                            {"speed_mps", c.mobility_params.speed_mps},
                            {"freeze_per_epoch", c.mobility_params.freeze_per_epoch}};
    j["placement"] = c.placement == Placement::Uniform ? "uniform" : "attack_split";
    j["fixed_fake_declarations"] = c.fixed_fake_declarations;
    j["n_epochs"] = c.n_epochs;
    j["seed"] = c.seed;
    return j.dump(2);
}

std::string config_digest(const ScenarioConfig& c) {
    const std::uint64_t h = fnv1a64(serialize_config(c));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> v;
    auto finite = [&](double x, const char* name) {
        if (!std::isfinite(x)) v.push_back(std::string(name) + " must be finite");
    };

    finite(c.grid.cell_size, "grid.cell_size");
    finite(c.grid.origin.x, "grid.origin.x");
    finite(c.grid.origin.y, "grid.origin.y");
    if (c.grid.cell_size <= 0) v.push_back("grid.cell_size must be > 0");
    if (c.grid.columns < 1 || c.grid.rows < 1) {
        v.push_back("grid must have at least one area (columns >= 1, rows >= 1)");
    }

    if (c.n_users < 0) v.push_back("n_users must be >= 0");
    if (c.wifi_range <= 0) v.push_back("wifi_range must be > 0");
    if (c.n_epochs < 1) v.push_back("n_epochs must be >= 1");

    const RoundSchedule& s = c.schedule;
    if (s.round_period_s <= 0) v.push_back("schedule.round_period_s must be > 0");
    if (s.setup_time_s < 0) v.push_back("schedule.setup_time_s must be >= 0");
    if (s.validation_window_s < 0) v.push_back("schedule.validation_window_s must be >= 0");
    if (s.setup_time_s + s.validation_window_s > s.round_period_s) {
        v.push_back("schedule: setup_time_s + validation_window_s exceeds round_period_s "
                    "(a round must contain its spotting window)");
    }
    if (s.max_rounds_per_epoch < 1) v.push_back("schedule.max_rounds_per_epoch must be >= 1");
    if (!(s.coverage_fraction > 0.0 && s.coverage_fraction <= 1.0)) {
        v.push_back("schedule.coverage_fraction must be in (0, 1]");
    }
    if (s.min_validators < 1) v.push_back("schedule.min_validators must be >= 1");

    const ReputationParams& r = c.reputation_params;
    auto increment = [&](double x, const char* name) {
        if (!(x > 0.0 && x < 1.0)) v.push_back(std::string(name) + " must be in (0, 1)");
    };
    increment(r.belief_increment, "reputation_params.belief_increment");
    increment(r.disbelief_increment, "reputation_params.disbelief_increment");
    increment(r.uncertainty_increment, "reputation_params.uncertainty_increment");
    if (!(r.acceptance_threshold > -1.0 && r.acceptance_threshold < 1.0)) {
        v.push_back("reputation_params.acceptance_threshold must be in (-1, 1)");
    }

    const DetectorParams& d = c.detector_params;
    if (d.max_chain_length < 1) v.push_back("detector_params.max_chain_length must be >= 1");
    if (d.collusion_persistence < 1) v.push_back("detector_params.collusion_persistence must be >= 1");
    if (d.fraud_persistence < 1) v.push_back("detector_params.fraud_persistence must be >= 1");

    const TlwParams& m = c.mobility_params;
    if (!(m.min_flight_m > 0 && m.min_flight_m <= m.max_flight_m)) {
        v.push_back("mobility_params: need 0 < min_flight_m <= max_flight_m");
    }
    if (!(m.min_pause_s > 0 && m.min_pause_s <= m.max_pause_s)) {
        v.push_back("mobility_params: need 0 < min_pause_s <= max_pause_s");
    }
    if (m.flight_exponent <= 0) v.push_back("mobility_params.flight_exponent must be > 0");
    if (m.pause_exponent <= 0) v.push_back("mobility_params.pause_exponent must be > 0");
    if (m.speed_mps <= 0) v.push_back("mobility_params.speed_mps must be > 0");

    CompiledRoles roles;
    const auto n = static_cast<std::uint32_t>(std::max<std::int64_t>(c.n_users, 0));
    for (std::string& p : compile_roles(c.attacker_spec, n, c.grid, roles)) {
        v.push_back(std::move(p));
    }
    return v;
}

}  // namespace lvs

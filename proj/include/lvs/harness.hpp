#ifndef LVS_HARNESS_HPP
#define LVS_HARNESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lvs/config.hpp"
#include "lvs/core.hpp"

namespace lvs {

struct EpochRecord {
    std::int64_t epoch = 0;  // 1-based
    std::optional<double> avg_rho_honest;
    std::optional<double> avg_rho_attackers;
    std::int32_t epoch_duration_rounds = 0;
    std::optional<double> pct_users_selected_mhs;  // mean over the epoch's rounds
    std::int64_t detector_flags = 0;               // flags active this epoch
    std::int64_t reports_accepted = 0;
    std::int64_t reports_rejected = 0;
};

struct FlagSummary {
    std::vector<std::vector<UserId>> collusion_sets;         // distinct over the run
    std::vector<std::pair<UserId, UserId>> fraud_pairs;      // distinct (spoofer, coverer)
    std::int64_t total_flag_events = 0;
};

struct MetricsSeries {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
    /// First epoch whose honest average rho exceeds the acceptance threshold.
    std::optional<std::int64_t> crossing_epoch;
    FlagSummary flags;
};

/// Optional per-round / per-epoch CSV streams.
struct RunSinks {
    std::ostream* trajectories = nullptr;  // time_s,user_id,x_m,y_m
    std::ostream* events = nullptr;        // round,area,mhs_id,neighbor_id,fabricated
    std::ostream* reputation = nullptr;    // epoch,user_id,b,d,u,rho,verdict,accepted
    std::ostream* chains = nullptr;        // epoch,owner,chain (owner->via1/.../spotted)
};

/// Run one scenario to completion. Fully deterministic in (config, seed);
/// rejects invalid configs with ConfigError. Degenerate populations produce
/// null-valued averages, never a crash.
MetricsSeries run_scenario(const ScenarioConfig& config, const RunSinks& sinks = {});

std::string render_metrics_csv(const MetricsSeries& m);
std::string render_summary_json(const MetricsSeries& m, const ScenarioConfig& config);

// --- reward model ---------------------------------------------------------

/// Proportional-share reward pool: each request pays out R split by declared
/// time, so attackers siphon R * n_a*t_a / (n_a*t_a + n_h*t_u) per request.
struct RewardModel {
    double reward_per_request = 10.0;
    double honest_declared_time = 1.0;
    double attacker_declared_time = 1.0;
    std::int64_t n_users = 1000;
    double attacker_fraction = 0.05;
    double request_interval_s = 60.0;
};

struct RevenueLoss {
    double per_request = 0.0;
    double total = 0.0;
};

RevenueLoss revenue_loss(const RewardModel& m, double horizon_s);

// --- parameter sweeps -------------------------------------------------------

struct SweepRun {
    double value = 0.0;
    std::int32_t replicate = 0;
    std::uint64_t seed = 0;
    MetricsSeries metrics;
};

struct SweepResult {
    std::string axis;
    std::vector<double> values;
    std::int32_t replicates = 0;
    std::vector<SweepRun> runs;  // grouped by value, replicate ascending

    const SweepRun& run(std::size_t value_index, std::int32_t replicate) const {
        return runs[value_index * static_cast<std::size_t>(replicates) + replicate];
    }
};

/// Names accepted as sweep axes.
std::vector<std::string> sweep_axes();

/// Copy of `base` with one axis applied. `density` means users per square
/// kilometer of one grid cell; `attacker_fraction` rebuilds attacker_spec as
/// that share of users spoofing into area 0. Unknown axes raise ConfigError
/// listing the valid names.
ScenarioConfig apply_axis(ScenarioConfig base, const std::string& axis, double value);

/// One deterministic run per (value, replicate); replicate seeds are
/// base.seed xor replicate index, so a point rerun alone reproduces exactly.
/// Runs execute in parallel on up to `jobs` threads (0 = hardware).
SweepResult sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<double>& values, std::int32_t replicates, unsigned jobs = 0);

/// Replicate columns plus mean and Student-t 95% half-width per metric.
std::string render_sweep_summary_csv(const SweepResult& s);

}  // namespace lvs

#endif  // LVS_HARNESS_HPP

#include "lvs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "lvs/cos.hpp"
#include "lvs/mobility.hpp"
#include "lvs/protocol.hpp"
#include "lvs/reputation.hpp"
#include "lvs/rng.hpp"
#include "lvs/text.hpp"
#include "lvs/topology.hpp"

namespace lvs {

namespace {

std::optional<double> mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::nullopt;
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

Position uniform_in_cell(AreaId area, const AreaGrid& grid, Rng& rng) {
    const Position lo = grid.cell_min(area);
    return Position{lo.x + rng.uniform01() * grid.cell_size,
                    lo.y + rng.uniform01() * grid.cell_size};
}

Position place_user(UserId u, const CompiledRoles& roles, const ScenarioConfig& cfg, Rng& rng) {
    const auto role = roles.role_of(u);
    if (role.kind == CompiledRoles::Kind::FraudCoverer) {
        // The coverer genuinely resides in the area it covers.
        return uniform_in_cell(role.fake_area, cfg.grid, rng);
    }
    const bool attacker = role.kind != CompiledRoles::Kind::Honest;
    if (cfg.placement == Placement::AttackSplit) {
        if (!attacker) {
            return uniform_in_cell(0, cfg.grid, rng);
        }
        // Spoofers live somewhere other than the monitored cell.
        while (true) {
            const Position p{cfg.grid.origin.x + rng.uniform01() * cfg.grid.width(),
                             cfg.grid.origin.y + rng.uniform01() * cfg.grid.height()};
            if (area_of(p, cfg.grid) != 0) return p;
        }
    }
    return Position{cfg.grid.origin.x + rng.uniform01() * cfg.grid.width(),
                    cfg.grid.origin.y + rng.uniform01() * cfg.grid.height()};
}

}  // namespace

MetricsSeries run_scenario(const ScenarioConfig& config, const RunSinks& sinks) {
    {
        const auto violations = validate_config(config);
        if (!violations.empty()) {
            std::string msg = "invalid scenario config:";
            for (const auto& v : violations) {
                msg += "\n  - " + v;
            }
            throw ConfigError(msg);
        }
    }

    const auto n = static_cast<std::uint32_t>(config.n_users);
    const AreaGrid& grid = config.grid;
    const RoundSchedule& schedule = config.schedule;
    const TlwParams& tlw = config.mobility_params;
    const double theta = config.reputation_params.acceptance_threshold;

    CompiledRoles roles;
    compile_roles(config.attacker_spec, n, grid, roles);  // validated above

    std::vector<UserId> ids(n);
    std::vector<Rng> mobility_rngs;
    std::vector<Rng> declaration_rngs;
    std::vector<MobilityState> walkers;
    mobility_rngs.reserve(n);
    declaration_rngs.reserve(n);
    walkers.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ids[i] = UserId{i};
        mobility_rngs.emplace_back(derive_stream(config.seed, "mobility", i));
        declaration_rngs.emplace_back(derive_stream(config.seed, "declaration", i));
        Rng place_rng(derive_stream(config.seed, "placement", i));
        walkers.push_back(init_mobility(place_user(ids[i], roles, config, place_rng), tlw,
                                        mobility_rngs.back()));
    }

    std::vector<OpinionTriple> opinions(n);  // full uncertainty, rho = -1
    KnowledgeStore knowledge(n, config.detector_params.max_chain_length);
    EpochBook book;
    CollusionDetector collusion_det(config.detector_params);
    FraudCoveringDetector fraud_det(config.detector_params);
    std::map<UserId, Position> fixed_fake_points;

    if (sinks.trajectories) *sinks.trajectories << "time_s,user_id,x_m,y_m\n";
    if (sinks.events) *sinks.events << "round,area,mhs_id,neighbor_id,fabricated\n";
    if (sinks.reputation) *sinks.reputation << "epoch,user_id,b,d,u,rho,verdict,accepted\n";
    if (sinks.chains) *sinks.chains << "epoch,owner,chain\n";

    auto advance_all = [&](double dt) {
        for (std::uint32_t i = 0; i < n; ++i) {
            advance(walkers[i], dt, tlw, grid, mobility_rngs[i]);
        }
    };

    MetricsSeries series;
    series.config_digest = config_digest(config);
    series.seed = config.seed;

    std::set<std::vector<UserId>> seen_collusion_sets;
    std::set<std::pair<UserId, UserId>> seen_fraud_pairs;

    std::int64_t global_round = 0;
    std::vector<AreaId> declared_area(n, 0);

    for (std::int64_t epoch = 1; epoch <= config.n_epochs; ++epoch) {
        book.begin_epoch(global_round);
        knowledge.reset_epoch();
        std::vector<double> pct_selected_per_round;

        while (true) {
            // S1: everyone reports a position; spoofers report their script.
            std::vector<Position> positions(n);
            for (std::uint32_t i = 0; i < n; ++i) positions[i] = walkers[i].position;
            const std::vector<Declaration> decls = collect_declarations(
                positions, roles, grid, declaration_rngs,
                config.fixed_fake_declarations ? &fixed_fake_points : nullptr);
            for (std::uint32_t i = 0; i < n; ++i) declared_area[i] = decls[i].area;

            // S2: select hotspots per claimed area; spotting needs true
            // proximity.
            const NeighborGraph true_graph = neighbor_graph(ids, positions, config.wifi_range);
            RoundOutcome outcome = run_round(global_round, decls, true_graph, config.wifi_range);
            std::vector<SpotEvent> events = std::move(outcome.events);

            // Forged validations are appended after the genuine ones and are
            // indistinguishable downstream; the flag is ground truth for
            // metrics only.
            for (const AttackerSpec& spec : config.attacker_spec) {
                if (const auto* col = std::get_if<CollusionSpec>(&spec)) {
                    auto forged = collusion_fabrications(*col, global_round);
                    events.insert(events.end(), forged.begin(), forged.end());
                } else if (const auto* fc = std::get_if<FraudCoveringSpec>(&spec)) {
                    const Position cover_pos = walkers[fc->coverer.value].position;
                    if (area_of(cover_pos, grid) == fc->covered_area) {
                        events.push_back(fraud_covering_fabrication(*fc, global_round));
                    }
                }
            }

            // S3: the platform ingests the round's reports.
            book.observe_round(decls);
            const auto new_pairs = knowledge.exchange_round(events);
            for (const auto& [holder, target] : new_pairs) {
                book.credit(holder, target, declared_area[target.value]);
            }

            if (n > 0) {
                pct_selected_per_round.push_back(
                    100.0 * static_cast<double>(outcome.total_selected) / static_cast<double>(n));
            }

            if (sinks.trajectories) {
                for (std::uint32_t i = 0; i < n; ++i) {
                    *sinks.trajectories
                        << format_double(static_cast<double>(global_round) *
                                         schedule.round_period_s)
                        << ',' << ids[i].value << ',' << format_double(positions[i].x) << ','
                        << format_double(positions[i].y) << '\n';
                }
            }
            if (sinks.events) {
                for (const SpotEvent& e : events) {
                    *sinks.events << e.round << ',' << e.area << ',' << e.mhs.value << ','
                                  << e.neighbor.value << ',' << (e.fabricated ? 1 : 0) << '\n';
                }
            }

            ++global_round;
            const bool finished = book.all_finished(schedule);
            if (!tlw.freeze_per_epoch) {
                advance_all(schedule.round_period_s);
            }
            if (finished) break;
        }

        // Epoch closed: detectors first, then verdicts and opinion updates.
        std::map<AreaId, std::vector<std::vector<UserId>>> collusion_cands;
        std::map<AreaId, std::vector<std::pair<UserId, UserId>>> fraud_cands;
        for (const auto& [area, st] : book.states()) {
            if (st.declared_users.empty()) continue;
            std::vector<const AreaKnowledge*> view;
            view.reserve(st.declared_users.size());
            for (const UserId u : st.declared_users) view.push_back(&knowledge.of(u));
            collusion_cands[area] = collusion_candidates(view, st.declared_users);
            fraud_cands[area] = fraud_candidates(view, st.declared_users, st.validator_count,
                                                 schedule.min_validators);
        }
        const auto flagged_sets = collusion_det.epoch_end(collusion_cands);
        const auto flagged_pairs = fraud_det.epoch_end(fraud_cands);
        std::set<UserId> flagged_users;
        for (const auto& set : flagged_sets) {
            flagged_users.insert(set.begin(), set.end());
            if (seen_collusion_sets.insert(set).second) {
                series.flags.collusion_sets.push_back(set);
            }
        }
        for (const auto& pair : flagged_pairs) {
            flagged_users.insert(pair.first);
            flagged_users.insert(pair.second);
            if (seen_fraud_pairs.insert(pair).second) {
                series.flags.fraud_pairs.push_back(pair);
            }
        }
        series.flags.total_flag_events +=
            static_cast<std::int64_t>(flagged_sets.size() + flagged_pairs.size());

        EpochRecord rec;
        rec.epoch = epoch;
        rec.epoch_duration_rounds = book.rounds_in_epoch();
        rec.pct_users_selected_mhs = mean_of(pct_selected_per_round);
        rec.detector_flags = static_cast<std::int64_t>(flagged_sets.size() + flagged_pairs.size());

        std::vector<double> honest_rho;
        std::vector<double> attacker_rho;
        for (std::uint32_t i = 0; i < n; ++i) {
            const Verdict verdict =
                classify(declared_area[i], book.counts_by_area(ids[i]), schedule.min_validators,
                         flagged_users.count(ids[i]) != 0);
            opinions[i] = update_opinion(opinions[i], verdict, config.reputation_params);
            const bool accepted = accept_report(opinions[i], theta);
            (accepted ? rec.reports_accepted : rec.reports_rejected) += 1;
            (roles.is_attacker(ids[i]) ? attacker_rho : honest_rho).push_back(opinions[i].rho());
            if (sinks.reputation) {
                *sinks.reputation << epoch << ',' << ids[i].value << ','
                                  << format_double(opinions[i].belief) << ','
                                  << format_double(opinions[i].disbelief) << ','
                                  << format_double(opinions[i].uncertainty) << ','
                                  << format_double(opinions[i].rho()) << ',' << to_string(verdict)
                                  << ',' << (accepted ? 1 : 0) << '\n';
            }
        }
        rec.avg_rho_honest = mean_of(honest_rho);
        rec.avg_rho_attackers = mean_of(attacker_rho);
        if (!series.crossing_epoch && rec.avg_rho_honest && *rec.avg_rho_honest > theta) {
            series.crossing_epoch = epoch;
        }
        series.epochs.push_back(rec);

        if (sinks.chains) {
            for (std::uint32_t i = 0; i < n; ++i) {
                for (const Chain& chain : knowledge.of(ids[i]).sorted_chains()) {
                    *sinks.chains << epoch << ',' << ids[i].value << ',' << to_string(chain)
                                  << '\n';
                }
            }
        }

        if (tlw.freeze_per_epoch) {
            advance_all(static_cast<double>(book.rounds_in_epoch()) * schedule.round_period_s);
        }
    }
    return series;
}

std::string render_metrics_csv(const MetricsSeries& m) {
    std::string out =
        "epoch,avg_rho_honest,avg_rho_attackers,epoch_duration_rounds,"
        "pct_users_selected_mhs,detector_flags,reports_accepted,reports_rejected\n";
    for (const EpochRecord& r : m.epochs) {
        out += std::to_string(r.epoch);
        out += ',';
        out += format_optional(r.avg_rho_honest);
        out += ',';
        out += format_optional(r.avg_rho_attackers);
        out += ',';
        out += std::to_string(r.epoch_duration_rounds);
        out += ',';
        out += format_optional(r.pct_users_selected_mhs);
        out += ',';
        out += std::to_string(r.detector_flags);
        out += ',';
        out += std::to_string(r.reports_accepted);
        out += ',';
        out += std::to_string(r.reports_rejected);
        out += '\n';
    }
    return out;
}

std::string render_summary_json(const MetricsSeries& m, const ScenarioConfig& config) {
    using nlohmann::json;
    json j;
    j["config_digest"] = m.config_digest;
    j["seed"] = m.seed;
    j["n_users"] = config.n_users;
    j["n_epochs"] = static_cast<std::int64_t>(m.epochs.size());

    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    json final_j(nullptr);
    if (!m.epochs.empty()) {
        const EpochRecord& r = m.epochs.back();
        final_j = json{{"avg_rho_honest", opt(r.avg_rho_honest)},
                       {"avg_rho_attackers", opt(r.avg_rho_attackers)},
                       {"epoch_duration_rounds", r.epoch_duration_rounds},
                       {"pct_users_selected_mhs", opt(r.pct_users_selected_mhs)},
                       {"reports_accepted", r.reports_accepted},
                       {"reports_rejected", r.reports_rejected}};
    }
    j["final"] = std::move(final_j);

    std::vector<double> durations;
    std::vector<double> pct;
    std::int64_t accepted = 0, rejected = 0;
    for (const EpochRecord& r : m.epochs) {
        durations.push_back(r.epoch_duration_rounds);
        if (r.pct_users_selected_mhs) pct.push_back(*r.pct_users_selected_mhs);
        accepted += r.reports_accepted;
        rejected += r.reports_rejected;
    }
    j["overall"] = json{{"mean_epoch_duration_rounds", opt(mean_of(durations))},
                        {"mean_pct_users_selected_mhs", opt(mean_of(pct))},
                        {"crossing_epoch",
                         m.crossing_epoch ? json(*m.crossing_epoch) : json(nullptr)},
                        {"total_detector_flag_events", m.flags.total_flag_events},
                        {"reports_accepted", accepted},
                        {"reports_rejected", rejected}};

    json collusion = json::array();
    for (const auto& set : m.flags.collusion_sets) {
        json members = json::array();
        for (const UserId u : set) members.push_back(u.value);
        collusion.push_back(std::move(members));
    }
    json fraud = json::array();
    for (const auto& [spoofer, coverer] : m.flags.fraud_pairs) {
        fraud.push_back(json{{"spoofer", spoofer.value}, {"coverer", coverer.value}});
    }
    j["detector"] = json{{"collusion_sets", std::move(collusion)},
                         {"fraud_pairs", std::move(fraud)}};
    return j.dump(2);
}

RevenueLoss revenue_loss(const RewardModel& m, double horizon_s) {
    if (m.reward_per_request <= 0 || m.honest_declared_time <= 0 ||
        m.attacker_declared_time <= 0 || m.n_users <= 0 || m.request_interval_s <= 0) {
        throw ConfigError("revenue_loss: all model parameters must be positive");
    }
    if (m.attacker_fraction < 0 || m.attacker_fraction > 1) {
        throw ConfigError("revenue_loss: attacker_fraction must be in [0, 1]");
    }
    if (horizon_s < 0) {
        throw ConfigError("revenue_loss: horizon must be >= 0");
    }
    const double n_attackers =
        static_cast<double>(std::llround(m.attacker_fraction * static_cast<double>(m.n_users)));
    const double n_honest = static_cast<double>(m.n_users) - n_attackers;
    const double stolen_share = n_attackers * m.attacker_declared_time;
    const double total_share = stolen_share + n_honest * m.honest_declared_time;
    RevenueLoss out;
    out.per_request = m.reward_per_request * stolen_share / total_share;
    out.total = out.per_request * (horizon_s / m.request_interval_s);
    return out;
}

namespace {

double cell_area_km2(const AreaGrid& g) {
    return (g.cell_size / 1000.0) * (g.cell_size / 1000.0);
}

}  // namespace

std::vector<std::string> sweep_axes() {
    return {"n_users",
            "density",
            "attacker_fraction",
            "wifi_range",
            "n_epochs",
            "coverage_fraction",
            "min_validators",
            "max_rounds_per_epoch",
            "acceptance_threshold",
            "max_chain_length",
            "speed_mps"};
}

ScenarioConfig apply_axis(ScenarioConfig base, const std::string& axis, double value) {
    if (axis == "n_users") {
        base.n_users = std::llround(value);
    } else if (axis == "density") {
        base.n_users = std::llround(value * cell_area_km2(base.grid));
    } else if (axis == "attacker_fraction") {
        const std::int64_t k =
            std::clamp<std::int64_t>(std::llround(value * static_cast<double>(base.n_users)), 0,
                                     base.n_users);
        base.attacker_spec.clear();
        for (std::int64_t i = 0; i < k; ++i) {
            base.attacker_spec.push_back(
                LsaSpec{UserId{static_cast<std::uint32_t>(base.n_users - k + i)}, 0});
        }
    } else if (axis == "wifi_range") {
        base.wifi_range = value;
    } else if (axis == "n_epochs") {
        base.n_epochs = std::llround(value);
    } else if (axis == "coverage_fraction") {
        base.schedule.coverage_fraction = value;
    } else if (axis == "min_validators") {
        base.schedule.min_validators = static_cast<std::int32_t>(std::llround(value));
    } else if (axis == "max_rounds_per_epoch") {
        base.schedule.max_rounds_per_epoch = static_cast<std::int32_t>(std::llround(value));
    } else if (axis == "acceptance_threshold") {
        base.reputation_params.acceptance_threshold = value;
    } else if (axis == "max_chain_length") {
        base.detector_params.max_chain_length = static_cast<std::int32_t>(std::llround(value));
    } else if (axis == "speed_mps") {
        base.mobility_params.speed_mps = value;
    } else {
        std::string msg = "unknown sweep axis '" + axis + "'; valid axes:";
        for (const auto& a : sweep_axes()) msg += " " + a;
        throw ConfigError(msg);
    }
    return base;
}

SweepResult sweep(const ScenarioConfig& base, const std::string& axis,
                  const std::vector<double>& values, std::int32_t replicates, unsigned jobs) {
    if (replicates < 1) {
        throw ConfigError("sweep: replicates must be >= 1");
    }
    SweepResult result;
    result.axis = axis;
    result.values = values;
    result.replicates = replicates;
    if (values.empty()) {
        return result;
    }

    std::vector<ScenarioConfig> configs;
    configs.reserve(values.size());
    for (const double v : values) {
        ScenarioConfig c = apply_axis(base, axis, v);
        const auto violations = validate_config(c);
        if (!violations.empty()) {
            throw ConfigError("sweep: value " + format_double(v) + " for axis '" + axis +
                              "' yields an invalid config: " + violations.front());
        }
        configs.push_back(std::move(c));
    }

    const std::size_t total = values.size() * static_cast<std::size_t>(replicates);
    result.runs.resize(total);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) break;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) break;
            }
            const std::size_t vi = i / static_cast<std::size_t>(replicates);
            const auto ri = static_cast<std::int32_t>(i % static_cast<std::size_t>(replicates));
            ScenarioConfig c = configs[vi];
            c.seed = base.seed ^ static_cast<std::uint64_t>(ri);
            try {
                SweepRun run;
                run.value = values[vi];
                run.replicate = ri;
                run.seed = c.seed;
                run.metrics = run_scenario(c);
                result.runs[i] = std::move(run);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    unsigned n_threads = jobs != 0 ? jobs : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(total)));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

namespace {

struct SummaryMetric {
    const char* name;
    std::optional<double> (*get)(const SweepRun&);
};

std::optional<double> last_rho_honest(const SweepRun& r) {
    if (r.metrics.epochs.empty()) return std::nullopt;
    return r.metrics.epochs.back().avg_rho_honest;
}
std::optional<double> last_rho_attackers(const SweepRun& r) {
    if (r.metrics.epochs.empty()) return std::nullopt;
    return r.metrics.epochs.back().avg_rho_attackers;
}
std::optional<double> mean_duration(const SweepRun& r) {
    std::vector<double> xs;
    for (const auto& e : r.metrics.epochs) xs.push_back(e.epoch_duration_rounds);
    return mean_of(xs);
}
std::optional<double> mean_pct_mhs(const SweepRun& r) {
    std::vector<double> xs;
    for (const auto& e : r.metrics.epochs) {
        if (e.pct_users_selected_mhs) xs.push_back(*e.pct_users_selected_mhs);
    }
    return mean_of(xs);
}
std::optional<double> crossing(const SweepRun& r) {
    if (!r.metrics.crossing_epoch) return std::nullopt;
    return static_cast<double>(*r.metrics.crossing_epoch);
}
std::optional<double> flag_events(const SweepRun& r) {
    return static_cast<double>(r.metrics.flags.total_flag_events);
}
std::optional<double> total_accepted(const SweepRun& r) {
    std::int64_t s = 0;
    for (const auto& e : r.metrics.epochs) s += e.reports_accepted;
    return static_cast<double>(s);
}
std::optional<double> total_rejected(const SweepRun& r) {
    std::int64_t s = 0;
    for (const auto& e : r.metrics.epochs) s += e.reports_rejected;
    return static_cast<double>(s);
}

constexpr SummaryMetric kSummaryMetrics[] = {
    {"final_avg_rho_honest", last_rho_honest},
    {"final_avg_rho_attackers", last_rho_attackers},
    {"mean_epoch_duration_rounds", mean_duration},
    {"mean_pct_users_selected_mhs", mean_pct_mhs},
    {"crossing_epoch", crossing},
    {"total_detector_flag_events", flag_events},
    {"total_reports_accepted", total_accepted},
    {"total_reports_rejected", total_rejected},
};

}  // namespace

std::string render_sweep_summary_csv(const SweepResult& s) {
    std::string out = "axis,value,metric,mean,ci95_half_width";
    for (std::int32_t r = 0; r < s.replicates; ++r) {
        out += ",rep_" + std::to_string(r);
    }
    out += '\n';

    for (std::size_t vi = 0; vi < s.values.size(); ++vi) {
        for (const SummaryMetric& metric : kSummaryMetrics) {
            std::vector<std::optional<double>> reps;
            std::vector<double> present;
            for (std::int32_t r = 0; r < s.replicates; ++r) {
                const auto v = metric.get(s.run(vi, r));
                reps.push_back(v);
                if (v) present.push_back(*v);
            }
            const auto mean = mean_of(present);
            std::optional<double> half_width;
            if (present.size() >= 2) {
                double ss = 0.0;
                for (const double x : present) ss += (x - *mean) * (x - *mean);
                const double sd =
                    std::sqrt(ss / static_cast<double>(present.size() - 1));
                const boost::math::students_t dist(static_cast<double>(present.size() - 1));
                const double t = boost::math::quantile(dist, 0.975);
                half_width = t * sd / std::sqrt(static_cast<double>(present.size()));
            }
            out += csv_field(s.axis);
            out += ',';
            out += format_double(s.values[vi]);
            out += ',';
            out += metric.name;
            out += ',';
            out += format_optional(mean);
            out += ',';
            out += format_optional(half_width);
            for (const auto& v : reps) {
                out += ',';
                out += format_optional(v);
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace lvs

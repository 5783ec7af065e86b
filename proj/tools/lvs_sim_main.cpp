#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lvs/config.hpp"
#include "lvs/harness.hpp"
#include "lvs/text.hpp"

namespace fs = std::filesystem;

namespace {

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<double> parse_values_csv(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) {
            throw lvs::ConfigError("--values: cannot parse '" + item + "' as a number");
        }
        values.push_back(v);
    }
    return values;
}

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool dump_trajectories = false;
    bool dump_events = false;
    bool dump_reputation = false;
    bool dump_chains = false;
};

int do_run(const RunOptions& opt) {
    lvs::ScenarioConfig config = lvs::load_config(opt.config_path);
    if (opt.seed) {
        config.seed = *opt.seed;
    }
    fs::create_directories(opt.out_dir);

    std::ostringstream trajectories, events, reputation, chains;
    lvs::RunSinks sinks;
    if (opt.dump_trajectories) sinks.trajectories = &trajectories;
    if (opt.dump_events) sinks.events = &events;
    if (opt.dump_reputation) sinks.reputation = &reputation;
    if (opt.dump_chains) sinks.chains = &chains;

    const lvs::MetricsSeries metrics = lvs::run_scenario(config, sinks);

    const fs::path out(opt.out_dir);
    write_file_atomic(out / "metrics.csv", lvs::render_metrics_csv(metrics));
    write_file_atomic(out / "summary.json", lvs::render_summary_json(metrics, config) + "\n");
    if (opt.dump_trajectories) write_file_atomic(out / "trajectories.csv", trajectories.str());
    if (opt.dump_events) write_file_atomic(out / "events.csv", events.str());
    if (opt.dump_reputation) write_file_atomic(out / "reputation.csv", reputation.str());
    if (opt.dump_chains) write_file_atomic(out / "chains.csv", chains.str());
    std::cout << "wrote " << (out / "metrics.csv").string() << " and summary.json\n";
    return 0;
}

struct SweepOptions {
    std::string config_path;
    std::string axis;
    std::string values_csv;
    std::int32_t replicates = 30;
    std::string out_dir;
    unsigned jobs = 0;
};

int do_sweep(const SweepOptions& opt) {
    const lvs::ScenarioConfig base = lvs::load_config(opt.config_path);
    const std::vector<double> values = parse_values_csv(opt.values_csv);
    const lvs::SweepResult result = lvs::sweep(base, opt.axis, values, opt.replicates, opt.jobs);

    const fs::path out(opt.out_dir);
    fs::create_directories(out);
    for (std::size_t vi = 0; vi < result.values.size(); ++vi) {
        for (std::int32_t r = 0; r < result.replicates; ++r) {
            const lvs::SweepRun& run = result.run(vi, r);
            const fs::path dir = out / (opt.axis + "=" + lvs::format_double(run.value)) /
                                 ("rep_" + std::to_string(r));
            fs::create_directories(dir);
            lvs::ScenarioConfig c = lvs::apply_axis(base, opt.axis, run.value);
            c.seed = run.seed;
            write_file_atomic(dir / "metrics.csv", lvs::render_metrics_csv(run.metrics));
            write_file_atomic(dir / "summary.json",
                              lvs::render_summary_json(run.metrics, c) + "\n");
        }
    }
    write_file_atomic(out / "sweep_summary.csv", lvs::render_sweep_summary_csv(result));
    std::cout << "wrote " << (out / "sweep_summary.csv").string() << " (" << result.runs.size()
              << " runs)\n";
    return 0;
}

struct RewardOptions {
    std::int64_t users = 1000;
    double attackers = 0.05;
    double reward = 10.0;
    double ta = 1.0;
    double tu = 1.0;
    double interval_s = 60.0;
    double horizon_s = 86400.0;
};

int do_reward(const RewardOptions& opt) {
    lvs::RewardModel model;
    model.n_users = opt.users;
    model.attacker_fraction = opt.attackers;
    model.reward_per_request = opt.reward;
    model.attacker_declared_time = opt.ta;
    model.honest_declared_time = opt.tu;
    model.request_interval_s = opt.interval_s;
    const lvs::RevenueLoss loss = lvs::revenue_loss(model, opt.horizon_s);
    std::printf("per_request: %.2f\n", loss.per_request);
    std::printf("total: %.2f\n", loss.total);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lvs-sim: WiFi-hotspot location validation simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", run_opt.config_path, "scenario config JSON")->required();
    run->add_option("--seed", run_opt.seed, "override the config seed");
    run->add_option("--out", run_opt.out_dir, "output directory")->required();
    run->add_flag("--dump-trajectories", run_opt.dump_trajectories,
                  "also write trajectories.csv (time_s,user_id,x_m,y_m)");
    run->add_flag("--dump-events", run_opt.dump_events,
                  "also write events.csv (round,area,mhs_id,neighbor_id,fabricated)");
    run->add_flag("--dump-reputation", run_opt.dump_reputation,
                  "also write reputation.csv (epoch,user_id,b,d,u,rho,verdict,accepted)");
    run->add_flag("--dump-chains", run_opt.dump_chains,
                  "also write chains.csv (epoch,owner,chain) with end-of-epoch knowledge");

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "run one config axis over several values");
    sweep->add_option("--config", sweep_opt.config_path, "base scenario config JSON")->required();
    sweep->add_option("--axis", sweep_opt.axis, "config axis to vary")->required();
    sweep->add_option("--values", sweep_opt.values_csv, "comma-separated values")->required();
    sweep->add_option("--replicates", sweep_opt.replicates, "replicates per value (default 30)");
    sweep->add_option("--out", sweep_opt.out_dir, "output directory")->required();
    sweep->add_option("--jobs", sweep_opt.jobs, "worker threads (default: hardware)");

    RewardOptions reward_opt;
    CLI::App* reward = app.add_subcommand("reward", "proportional-share revenue lost to spoofers");
    reward->add_option("--users", reward_opt.users, "total users")->required();
    reward->add_option("--attackers", reward_opt.attackers, "attacker fraction in [0,1]")->required();
    reward->add_option("--reward", reward_opt.reward, "reward R per sensing request")->required();
    reward->add_option("--ta", reward_opt.ta, "declared time units per attacker")->required();
    reward->add_option("--tu", reward_opt.tu, "declared time units per honest user")->required();
    reward->add_option("--interval-s", reward_opt.interval_s, "seconds between requests")->required();
    reward->add_option("--horizon-s", reward_opt.horizon_s, "time horizon in seconds")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a config error
    }

    try {
        if (run->parsed()) return do_run(run_opt);
        if (sweep->parsed()) return do_sweep(sweep_opt);
        if (reward->parsed()) return do_reward(reward_opt);
    } catch (const lvs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

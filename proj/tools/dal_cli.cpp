// Command-line front end: synthetic experiments, replay runs, a change-point
// detection demo, and covering-set inspection.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dal/dal.hpp"

namespace {

using dal::harness::ConfigError;
using dal::harness::ExperimentConfig;

struct CliOverrides {
    std::string out;
    long seed = -1;
    int trials = -1;
    int parallelism = -1;
    long thin = -1;
};

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& ov) {
    if (ov.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.trials > 0) cfg.trials = ov.trials;
    if (ov.parallelism > 0) cfg.parallelism = ov.parallelism;
    if (ov.thin > 0) cfg.thin = ov.thin;
}

int run_synth(const std::string& config_path, const CliOverrides& ov) {
    ExperimentConfig cfg = dal::harness::parse_config_file(config_path);
    apply_overrides(cfg, ov);
    const dal::harness::AggregateResult agg = dal::harness::run_experiment(cfg);
    if (ov.out.empty()) {
        dal::harness::emit_csv(agg, std::cout, cfg.thin);
    } else {
        dal::harness::emit_csv_file(agg, ov.out, cfg.thin);
        long restarts = 0;
        for (long r : agg.restart_counts) restarts += r;
        std::cout << "wrote " << ov.out << " (" << agg.restart_counts.size()
                  << " trials, " << restarts << " restarts, final mean regret "
                  << dal::harness::format_real(agg.mean_regret.back()) << ")\n";
    }
    return 0;
}

int run_replay(const std::string& file, const std::string& format,
               const std::string& policy, bool dal_enabled, double noise_sigma2,
               const CliOverrides& ov) {
    std::ostringstream cfg_text;
    cfg_text << "env.variant = " << (format == "logged" ? "replay_logged"
                                                        : "replay_matrix")
             << "\n";
    cfg_text << "env.replay_path = " << file << "\n";
    cfg_text << "algo.policy = " << policy << "\n";
    cfg_text << "dal.enabled = " << (dal_enabled ? "true" : "false") << "\n";
    if (noise_sigma2 >= 0.0) cfg_text << "env.noise_sigma2 = " << noise_sigma2 << "\n";
    ExperimentConfig cfg = dal::harness::parse_config_text(cfg_text.str());
    if (format == "matrix") {
        // Horizon comes from the file.
        cfg.T = dal::envs::load_replay_matrix(file).T;
        cfg.env.T = cfg.T;
    }
    cfg.trials = 1;
    apply_overrides(cfg, ov);
    const dal::harness::AggregateResult agg = dal::harness::run_experiment(cfg);
    if (ov.out.empty()) {
        dal::harness::emit_csv(agg, std::cout, cfg.thin);
    } else {
        dal::harness::emit_csv_file(agg, ov.out, cfg.thin);
        std::cout << "wrote " << ov.out << " (final mean reward "
                  << dal::harness::format_real(agg.mean_reward.back()) << ")\n";
    }
    return 0;
}

int run_detect_demo(const std::string& input, int column, bool skip_header,
                    const std::string& family, double sigma2, double delta_F) {
    std::ifstream in(input);
    if (!in) throw ConfigError("input file not found: " + input);
    dal::detect::GlrConfig cfg;
    cfg.delta_F = delta_F;
    cfg.delta_D = delta_F;
    if (family == "gaussian") {
        cfg.family.kind = dal::detect::KlFamily::gaussian;
        cfg.family.sigma2 = sigma2;
    } else if (family != "bernoulli") {
        throw ConfigError("family must be bernoulli or gaussian");
    }

    dal::detect::ObservationBuffer buf;
    std::string line;
    long line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        for (int c = 0; c <= column; ++c) {
            if (!std::getline(cells, cell, ','))
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         " has no column " + std::to_string(column));
        }
        double x = 0.0;
        try {
            x = std::stod(cell);
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": bad number '" + cell + "'");
        }
        buf.push(x);
        const dal::detect::DetectionResult res = dal::detect::glr_scan(buf, cfg);
        if (res.detected) {
            std::cout << "detection at sample " << buf.size() << ", split "
                      << *res.split_index << ", statistic "
                      << dal::harness::format_real(*res.statistic)
                      << ", threshold "
                      << dal::harness::format_real(
                             dal::detect::glr_threshold(buf.size(), cfg.delta_F))
                      << "\n";
            return 0;
        }
    }
    std::cout << "no detection in " << buf.size() << " samples\n";
    return 0;
}

int run_cover(const std::string& config_path) {
    ExperimentConfig cfg = dal::harness::parse_config_file(config_path);
    auto env = dal::harness::internal::make_env(
        cfg, dal::make_stream(cfg.base_seed, dal::harness::internal::kEnvStream));
    const dal::CoveringSet cover =
        dal::harness::internal::build_cover(cfg, env->actions());
    std::cout << "actions: " << env->actions().size() << "\n";
    std::cout << "cover size: " << cover.size() << "\n";
    std::cout << "indices:";
    for (std::size_t i : cover.source_indices) std::cout << ' ' << i;
    std::cout << "\n";
    const dal::ExplorationScheduler sched(cfg.T, static_cast<long>(cover.size()),
                                          env->n_contexts());
    std::cout << "alpha_1: " << dal::harness::format_real(sched.alpha)
              << ", cycle length: " << sched.cycle_length << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stationary bandit experiments with detection-augmented restarts"};
    app.require_subcommand(1);

    CliOverrides ov;

    auto* synth = app.add_subcommand("synth", "run a synthetic experiment from a config");
    std::string synth_config;
    synth->add_option("--config", synth_config, "experiment config file")->required();
    synth->add_option("--out", ov.out, "output CSV path (default: stdout)");
    synth->add_option("--seed", ov.seed, "override base_seed");
    synth->add_option("--trials", ov.trials, "override trial count");
    synth->add_option("--parallelism", ov.parallelism, "override worker threads");
    synth->add_option("--thin", ov.thin, "emit every N-th row");

    auto* replay = app.add_subcommand("replay", "run a policy over a replay file");
    std::string replay_file, replay_format = "matrix", replay_policy = "ucb1";
    bool replay_dal = true;
    double replay_noise = -1.0;
    replay->add_option("--file", replay_file, "replay data file")->required();
    replay->add_option("--format", replay_format, "matrix or logged")
        ->check(CLI::IsMember({"matrix", "logged"}));
    replay->add_option("--policy", replay_policy, "policy name");
    replay->add_flag("!--no-dal", replay_dal, "run the bare policy");
    replay->add_option("--noise-sigma2", replay_noise,
                       "gaussian noise added to matrix means");
    replay->add_option("--out", ov.out, "output CSV path");
    replay->add_option("--seed", ov.seed, "override base_seed");
    replay->add_option("--trials", ov.trials, "override trial count");
    replay->add_option("--parallelism", ov.parallelism, "override worker threads");
    replay->add_option("--thin", ov.thin, "emit every N-th row");

    auto* detect =
        app.add_subcommand("detect-demo", "scan a reward column for a change point");
    std::string demo_input, demo_family = "bernoulli";
    int demo_column = 0;
    bool demo_skip_header = false;
    double demo_sigma2 = 0.25, demo_delta_f = 0.01;
    detect->add_option("--input", demo_input, "CSV file of rewards")->required();
    detect->add_option("--column", demo_column, "column index (default 0)");
    detect->add_flag("--skip-header", demo_skip_header, "ignore the first line");
    detect->add_option("--family", demo_family, "bernoulli or gaussian")
        ->check(CLI::IsMember({"bernoulli", "gaussian"}));
    detect->add_option("--sigma2", demo_sigma2, "gaussian family variance");
    detect->add_option("--delta-f", demo_delta_f, "false-alarm budget");

    auto* cover = app.add_subcommand("cover", "print the covering set for a config");
    std::string cover_config;
    cover->add_option("--config", cover_config, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return run_synth(synth_config, ov);
        if (replay->parsed())
            return run_replay(replay_file, replay_format, replay_policy, replay_dal,
                              replay_noise, ov);
        if (detect->parsed())
            return run_detect_demo(demo_input, demo_column, demo_skip_header,
                                   demo_family, demo_sigma2, demo_delta_f);
        if (cover->parsed()) return run_cover(cover_config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

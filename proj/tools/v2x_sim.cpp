// Command-line entry point: train, test, baseline and sweep runs with CSV outputs.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "v2x/baselines.hpp"
#include "v2x/checkpoint.hpp"
#include "v2x/config.hpp"
#include "v2x/orchestrator.hpp"
#include "v2x/run_io.hpp"

namespace fs = std::filesystem;
using namespace v2x;

namespace {

RunConfig load_config(const std::string& path) {
    return path.empty() ? parse_config_text("") : parse_config_file(path);
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void report_rate_bounds(const TrainingResult& r, const ScenarioConfig& sc) {
    if (r.max_v2v_rate_mbps >= sc.bonus_v2v || r.max_v2i_rate_mbps >= sc.bonus_v2i) {
        std::cerr << "warning: observed rate exceeds its delivery bonus (V2V " << r.max_v2v_rate_mbps << " vs U="
                  << sc.bonus_v2v << ", V2I " << r.max_v2i_rate_mbps << " vs V=" << sc.bonus_v2i << " Mbps)\n";
    }
}

TrainingResult train_into(const RunConfig& config, std::uint64_t seed, bool pl_selection, const std::string& out) {
    prepare_output_dir(out);
    TrainingResult r = run_training(config, seed, pl_selection);
    save_agents(r.agents, out, config.scenario);
    write_training_log(join(out, "training_log.csv"), r.log);
    write_manifest(out, config, seed,
                   {{"command", "train"},
                    {"method", pl_selection ? "marl" : "fixed-pl"},
                    {"episodes", std::to_string(r.log.size())},
                    {"max_v2v_rate_mbps", std::to_string(r.max_v2v_rate_mbps)},
                    {"max_v2i_rate_mbps", std::to_string(r.max_v2i_rate_mbps)}});
    report_rate_bounds(r, config.scenario);
    return r;
}

bool has_leader_agents(const std::string& dir) { return fs::exists(join(dir, "pl_0.qnet")); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-agent spectrum sharing simulator for platooning C-V2X highways"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string checkpoints;
    std::string algo;
    bool fixed_pl = false;
    std::vector<int> sweep_m{4, 6};
    std::vector<std::string> sweep_methods{"marl", "fixed-pl", "greedy", "hill"};

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "INI config file; omitted keys take defaults");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_dir, "output directory")->required();
    };

    auto* train = app.add_subcommand("train", "train all agents and write checkpoints + training log");
    add_common(train);
    train->add_flag("--fixed-pl", fixed_pl, "pin leaders to the front vehicle (no leader agents)");

    auto* test = app.add_subcommand("test", "evaluate trained checkpoints over the payload grid");
    add_common(test);
    test->add_option("--checkpoints", checkpoints, "directory written by 'train'")->required();

    auto* baseline = app.add_subcommand("baseline", "run a comparison method");
    add_common(baseline);
    baseline->add_option("--algo", algo, "hill | greedy | fixed-pl")
        ->required()
        ->check(CLI::IsMember({"hill", "greedy", "fixed-pl"}));

    auto* sweep = app.add_subcommand("sweep", "all methods across the payload grid and platoon counts");
    add_common(sweep);
    sweep->add_option("--checkpoints", checkpoints, "reuse <dir>/M<M>/{marl,fixed-pl} instead of training");
    sweep->add_option("--M", sweep_m, "platoon counts")->expected(1, -1);
    sweep->add_option("--methods", sweep_methods, "subset of marl fixed-pl greedy hill")->expected(1, -1);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = load_config(config_path);

        if (*train) {
            const auto r = train_into(config, seed, !fixed_pl, out_dir);
            std::cout << "trained " << r.log.size() << " episodes; checkpoints in " << out_dir << '\n';
        } else if (*test) {
            prepare_output_dir(out_dir);
            const bool pl = has_leader_agents(checkpoints);
            const AgentSet agents = load_agents(checkpoints, config, pl);
            const auto rows = run_testing(config, agents, seed);
            write_metrics(join(out_dir, "metrics.csv"), rows);
            write_manifest(out_dir, config, seed, {{"command", "test"}, {"checkpoints", checkpoints}});
            std::cout << "wrote " << rows.size() << " metrics rows to " << join(out_dir, "metrics.csv") << '\n';
        } else if (*baseline) {
            prepare_output_dir(out_dir);
            std::vector<MetricsRow> rows;
            if (algo == "greedy") {
                rows = evaluate(config, seed, greedy_method(config), config.scenario.test_payload_grid(),
                                config.test_episodes);
            } else if (algo == "hill") {
                rows = evaluate(config, seed, hill_climb_method(config, seed), config.scenario.test_payload_grid(),
                                config.test_episodes);
            } else {
                const auto r = train_into(config, seed, false, join(out_dir, "checkpoints"));
                rows = run_testing(config, r.agents, seed);
            }
            write_metrics(join(out_dir, "metrics.csv"), rows);
            write_manifest(out_dir, config, seed, {{"command", "baseline"}, {"algo", algo}});
            std::cout << "wrote " << rows.size() << " metrics rows to " << join(out_dir, "metrics.csv") << '\n';
        } else if (*sweep) {
            prepare_output_dir(out_dir);
            const std::string metrics_path = join(out_dir, "metrics.csv");
            fs::remove(metrics_path);
            auto wants = [&](const std::string& m) {
                return std::find(sweep_methods.begin(), sweep_methods.end(), m) != sweep_methods.end();
            };
            for (int m : sweep_m) {
                RunConfig cfg = config;
                cfg.scenario.num_platoons = m;
                cfg.validate();
                const std::string tag = "M" + std::to_string(m);
                const auto grid = cfg.scenario.test_payload_grid();
                for (const std::string method : {"marl", "fixed-pl"}) {
                    if (!wants(method)) continue;
                    const bool pl = method == "marl";
                    AgentSet agents;
                    if (!checkpoints.empty()) {
                        agents = load_agents(join(join(checkpoints, tag), method), cfg, pl);
                    } else {
                        agents = train_into(cfg, seed, pl, join(join(out_dir, tag), method)).agents;
                    }
                    write_metrics(metrics_path, run_testing(cfg, agents, seed), true);
                    std::cout << tag << ' ' << method << " done\n";
                }
                if (wants("greedy"))
                    write_metrics(metrics_path, evaluate(cfg, seed, greedy_method(cfg), grid, cfg.test_episodes), true);
                if (wants("hill"))
                    write_metrics(metrics_path,
                                  evaluate(cfg, seed, hill_climb_method(cfg, seed), grid, cfg.test_episodes), true);
                std::cout << tag << " baselines done\n";
            }
            write_manifest(out_dir, config, seed, {{"command", "sweep"}});
            std::cout << "wrote " << metrics_path << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return 3;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return 4;
    } catch (const TrainingDivergence& e) {
        std::cerr << "training diverged: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// Command-line front end: run experiments from config files, benchmark the
// sweeping kernel, run the verification suites, and inspect table snapshots.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "vast/vast.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 1;
    }
    vast::ExperimentConfig config;
    try {
        config = vast::ExperimentConfig::from_file(vast::ConfigFile::parse(in));
    } catch (const vast::ConfigError& e) {
        std::cerr << "config error (" << config_path << "): " << e.what() << "\n";
        return 1;
    }
    vast::ExperimentRunner runner(config);
    vast::RunResult result = runner.run();
    auto dir = runner.write_outputs(result);

    std::cout << "preset " << config.maze_preset << ", tabulator " << config.tabulator
              << ", seed " << config.seed << ", " << config.total_steps << " steps\n";
    if (!result.rows.empty()) {
        const auto& last = result.rows.back();
        std::printf("final epoch: mean reward %.4f over %llu episodes, "
                    "mean lookup m %.3f, revisited %.1f%%\n",
                    last.mean_episode_reward,
                    static_cast<unsigned long long>(last.episodes), last.mean_lookup_m,
                    last.revisited_pct);
    }
    std::cout << "outputs written to " << dir.string() << "\n";
    return 0;
}

int cmd_bench(std::uint64_t transitions, const std::string& topology,
              std::uint64_t seed) {
    vast::BenchResult r = vast::bench_sweeps(transitions, topology, seed);
    std::printf("bench-sweeps: %llu transitions (%s topology)\n",
                static_cast<unsigned long long>(r.transitions), topology.c_str());
    std::printf("  wall time      %.4f s\n", r.seconds);
    std::printf("  queue pops     %llu (%.0f/s)\n",
                static_cast<unsigned long long>(r.pops), r.pops_per_second);
    std::printf("  value backups  %llu (%.0f/s)\n",
                static_cast<unsigned long long>(r.q_updates), r.backups_per_second);
    return 0;
}

int cmd_verify(const std::string& suite) {
    std::vector<vast::VerifyReport> reports;
    if (suite == "oracle" || suite == "all") reports.push_back(vast::verify_oracle());
    if (suite == "gradcheck" || suite == "all")
        reports.push_back(vast::verify_gradcheck());
    if (suite == "invariants" || suite == "all")
        reports.push_back(vast::verify_invariants());
    if (reports.empty()) {
        std::cerr << "unknown suite: " << suite
                  << " (expected oracle, gradcheck, invariants or all)\n";
        return 2;
    }
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << r.text << "\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

int cmd_dump_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open snapshot " << path << "\n";
        return 1;
    }
    // infer the action count from the snapshot, then reload through the table
    // so every invariant is re-validated
    std::uint32_t max_action = 0;
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t from, to;
        std::uint32_t action, count;
        if (!(ls >> from >> action >> to >> count)) {
            std::cerr << "error: bad snapshot line: " << line << "\n";
            return 1;
        }
        max_action = std::max(max_action, action);
    }
    std::stringstream replay;
    for (const auto& l : lines) replay << l << '\n';
    vast::TransitionTable table = vast::TransitionTable::load(replay, max_action + 1);
    if (!table.check_consistency()) {
        std::cerr << "error: snapshot violates table invariants\n";
        return 1;
    }

    std::size_t states = 0, pairs = 0;
    for (vast::ActionId a = 0; a <= max_action; ++a)
        pairs += table.observed_states(a).size();
    {
        std::unordered_set<std::uint64_t> seen;
        for (vast::ActionId a = 0; a <= max_action; ++a)
            for (std::uint64_t code : table.observed_states(a)) seen.insert(code);
        states = seen.size();
    }
    std::printf("table snapshot: %llu transitions, %zu states, %zu (s,a) pairs, "
                "%u actions\n",
                static_cast<unsigned long long>(table.total_transitions()), states,
                pairs, max_action + 1);
    table.save(std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VaST planning core: prioritized sweeping over tabulated states"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "sectioned key-value config file")
        ->required();

    std::uint64_t bench_transitions = 10000;
    std::string bench_topology = "random";
    std::uint64_t bench_seed = 1;
    auto* bench = app.add_subcommand("bench-sweeps", "measure sweeping throughput");
    bench->add_option("--transitions", bench_transitions, "transitions to flood");
    bench->add_option("--topology", bench_topology, "random or chain");
    bench->add_option("--seed", bench_seed, "generator seed");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "oracle, gradcheck, invariants or all")
        ->required();

    std::string snapshot_path;
    auto* dump = app.add_subcommand("dump-table", "print and validate a snapshot");
    dump->add_option("snapshot", snapshot_path, "table snapshot file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (bench->parsed()) return cmd_bench(bench_transitions, bench_topology, bench_seed);
        if (verify->parsed()) return cmd_verify(suite);
        if (dump->parsed()) return cmd_dump_table(snapshot_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

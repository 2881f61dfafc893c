#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vast/agent.hpp"
#include "vast/config.hpp"
#include "vast/maze.hpp"
#include "vast/oracle.hpp"
#include "vast/rng.hpp"
#include "vast/sweeper_service.hpp"

namespace vast {

struct ScheduleEvent {
    std::uint64_t step = 0;
    std::string kind;  // enable_teleporter | reverse_rewards | forced_run | remove_wall
    std::string arg;
};

/// Fully resolved experiment description; maps one-to-one onto the sectioned
/// config text, so parse -> to_file -> parse is lossless for known fields.
struct ExperimentConfig {
    std::uint64_t seed = 7;
    std::uint64_t total_steps = 8000;
    std::uint64_t epoch_every = 1000;
    std::uint64_t epoch_length = 300;
    std::uint64_t scale_factor = 20;  // paper-steps per desk step, reporting only
    std::string mode = "sync";        // sync | threaded
    bool export_trace = false;

    std::string maze_preset = "tmaze";
    std::optional<double> step_size;
    std::optional<double> step_penalty;
    std::optional<double> obs_noise_sigma;
    std::optional<std::uint64_t> max_episode_len;

    std::string tabulator = "grid";  // grid | lsh | learned
    double grid_cell = 0.5;
    std::uint32_t grid_bits = 4;
    std::uint32_t lsh_d = 16;

    AgentConfig agent;
    SweeperConfig sweeper;
    VariationalConfig variational;

    std::vector<ScheduleEvent> schedule;
    std::string output_dir = "out";

    static ExperimentConfig from_file(const ConfigFile& f);
    ConfigFile to_file() const;
};

inline ExperimentConfig ExperimentConfig::from_file(const ConfigFile& f) {
    ExperimentConfig c;
    c.seed = f.get_uint("experiment", "seed", c.seed);
    c.total_steps = f.get_uint("experiment", "total_steps", c.total_steps);
    c.epoch_every = f.get_uint("experiment", "epoch_every", c.epoch_every);
    c.epoch_length = f.get_uint("experiment", "epoch_length", c.epoch_length);
    c.scale_factor = f.get_uint("experiment", "scale_factor", c.scale_factor);
    c.mode = f.get_string("experiment", "mode", c.mode);
    if (c.mode != "sync" && c.mode != "threaded")
        throw ConfigError("experiment.mode must be `sync` or `threaded`");
    c.export_trace = f.get_bool("experiment", "export_trace", c.export_trace);
    c.output_dir = f.get_string("experiment", "output_dir", c.output_dir);

    c.maze_preset = f.get_string("maze", "preset", c.maze_preset);
    try {
        presets::by_name(c.maze_preset);  // validate early
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("field `preset` in [maze]: ") + e.what());
    }
    if (f.get("maze", "step_size")) c.step_size = f.get_double("maze", "step_size", 0);
    if (f.get("maze", "step_penalty"))
        c.step_penalty = f.get_double("maze", "step_penalty", 0);
    if (f.get("maze", "obs_noise_sigma"))
        c.obs_noise_sigma = f.get_double("maze", "obs_noise_sigma", 0);
    if (f.get("maze", "max_episode_len"))
        c.max_episode_len = f.get_uint("maze", "max_episode_len", 0);

    c.tabulator = f.get_string("tabulator", "kind", c.tabulator);
    if (c.tabulator != "grid" && c.tabulator != "lsh" && c.tabulator != "learned")
        throw ConfigError("tabulator.kind must be grid, lsh or learned");
    c.grid_cell = f.get_double("tabulator", "cell_size", c.grid_cell);
    c.grid_bits = static_cast<std::uint32_t>(f.get_uint("tabulator", "bits", c.grid_bits));
    c.lsh_d = static_cast<std::uint32_t>(f.get_uint("tabulator", "d", c.lsh_d));

    c.agent.epsilon_initial = f.get_double("agent", "epsilon_initial", c.agent.epsilon_initial);
    c.agent.epsilon_final = f.get_double("agent", "epsilon_final", c.agent.epsilon_final);
    c.agent.anneal_steps = f.get_uint("agent", "anneal_steps", c.agent.anneal_steps);
    c.agent.eval_epsilon = f.get_double("agent", "eval_epsilon", c.agent.eval_epsilon);
    c.agent.warmup_steps = f.get_uint("agent", "warmup_steps", c.agent.warmup_steps);
    c.agent.train_every =
        static_cast<std::uint32_t>(f.get_uint("agent", "train_every", c.agent.train_every));
    c.agent.minibatch =
        static_cast<std::uint32_t>(f.get_uint("agent", "minibatch", c.agent.minibatch));
    c.agent.replay_capacity = f.get_uint("agent", "replay_capacity", c.agent.replay_capacity);
    c.agent.k = static_cast<std::uint32_t>(f.get_uint("agent", "k", c.agent.k));

    c.sweeper.gamma = f.get_double("sweeper", "gamma", c.sweeper.gamma);
    c.sweeper.p_min = f.get_double("sweeper", "p_min", c.sweeper.p_min);

    c.variational.d = static_cast<std::uint32_t>(f.get_uint("variational", "d", c.variational.d));
    c.variational.k = c.agent.k;
    c.variational.lambda_post =
        f.get_double("variational", "lambda_post", c.variational.lambda_post);
    c.variational.lambda_prior =
        f.get_double("variational", "lambda_prior", c.variational.lambda_prior);
    c.variational.minibatch = c.agent.minibatch;
    c.variational.adam.learning_rate =
        f.get_double("variational", "learning_rate", c.variational.adam.learning_rate);
    c.variational.adam.beta1 = f.get_double("variational", "adam_beta1", c.variational.adam.beta1);
    c.variational.adam.beta2 = f.get_double("variational", "adam_beta2", c.variational.adam.beta2);
    c.variational.adam.epsilon =
        f.get_double("variational", "adam_epsilon", c.variational.adam.epsilon);
    if (auto hidden = f.get("variational", "hidden")) {
        c.variational.hidden.clear();
        std::istringstream hs(*hidden);
        std::string part;
        while (std::getline(hs, part, ','))
            c.variational.hidden.push_back(static_cast<std::size_t>(std::stoull(part)));
    }

    std::uint64_t last_step = 0;
    for (const std::string& line : f.get_all("schedule", "event")) {
        std::istringstream es(line);
        ScheduleEvent ev;
        if (!(es >> ev.step >> ev.kind))
            throw ConfigError("schedule event needs `<step> <kind> [arg]`: " + line);
        es >> ev.arg;
        if (ev.kind != "enable_teleporter" && ev.kind != "reverse_rewards" &&
            ev.kind != "forced_run" && ev.kind != "remove_wall")
            throw ConfigError("unknown schedule event kind: " + ev.kind);
        if (ev.step < last_step)
            throw ConfigError("schedule events must be sorted by step");
        last_step = ev.step;
        c.schedule.push_back(std::move(ev));
    }
    return c;
}

inline ConfigFile ExperimentConfig::to_file() const {
    ConfigFile f;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    f.set("experiment", "seed", std::to_string(seed));
    f.set("experiment", "total_steps", std::to_string(total_steps));
    f.set("experiment", "epoch_every", std::to_string(epoch_every));
    f.set("experiment", "epoch_length", std::to_string(epoch_length));
    f.set("experiment", "scale_factor", std::to_string(scale_factor));
    f.set("experiment", "mode", mode);
    f.set("experiment", "export_trace", export_trace ? "true" : "false");
    f.set("experiment", "output_dir", output_dir);
    f.set("maze", "preset", maze_preset);
    if (step_size) f.set("maze", "step_size", num(*step_size));
    if (step_penalty) f.set("maze", "step_penalty", num(*step_penalty));
    if (obs_noise_sigma) f.set("maze", "obs_noise_sigma", num(*obs_noise_sigma));
    if (max_episode_len) f.set("maze", "max_episode_len", std::to_string(*max_episode_len));
    f.set("tabulator", "kind", tabulator);
    f.set("tabulator", "cell_size", num(grid_cell));
    f.set("tabulator", "bits", std::to_string(grid_bits));
    f.set("tabulator", "d", std::to_string(lsh_d));
    f.set("agent", "epsilon_initial", num(agent.epsilon_initial));
    f.set("agent", "epsilon_final", num(agent.epsilon_final));
    f.set("agent", "anneal_steps", std::to_string(agent.anneal_steps));
    f.set("agent", "eval_epsilon", num(agent.eval_epsilon));
    f.set("agent", "warmup_steps", std::to_string(agent.warmup_steps));
    f.set("agent", "train_every", std::to_string(agent.train_every));
    f.set("agent", "minibatch", std::to_string(agent.minibatch));
    f.set("agent", "replay_capacity", std::to_string(agent.replay_capacity));
    f.set("agent", "k", std::to_string(agent.k));
    f.set("sweeper", "gamma", num(sweeper.gamma));
    f.set("sweeper", "p_min", num(sweeper.p_min));
    f.set("variational", "d", std::to_string(variational.d));
    f.set("variational", "lambda_post", num(variational.lambda_post));
    f.set("variational", "lambda_prior", num(variational.lambda_prior));
    f.set("variational", "learning_rate", num(variational.adam.learning_rate));
    f.set("variational", "adam_beta1", num(variational.adam.beta1));
    f.set("variational", "adam_beta2", num(variational.adam.beta2));
    f.set("variational", "adam_epsilon", num(variational.adam.epsilon));
    {
        std::string hidden;
        for (std::size_t i = 0; i < variational.hidden.size(); ++i) {
            if (i) hidden += ',';
            hidden += std::to_string(variational.hidden[i]);
        }
        f.set("variational", "hidden", hidden);
    }
    for (const ScheduleEvent& ev : schedule) {
        std::string line = std::to_string(ev.step) + " " + ev.kind;
        if (!ev.arg.empty()) line += " " + ev.arg;
        f.append("schedule", "event", line);
    }
    return f;
}

struct EpochRow {
    std::uint64_t step = 0;
    double mean_episode_reward = 0.0;
    std::uint64_t episodes = 0;
    double mean_lookup_m = 0.0;
    double exact_match_pct = 0.0;
    double revisited_pct = 0.0;   // cumulative, train-side
    double reassign_rate = 0.0;
};

struct RunResult {
    std::vector<EpochRow> rows;
    nlohmann::json summary;
};

/// Builds the experiment from a config, executes the schedule, and collects
/// per-epoch metrics. The synchronous mode is bit-reproducible from the seed.
class ExperimentRunner {
public:
    explicit ExperimentRunner(ExperimentConfig config) : config_(std::move(config)) {}

    RunResult run() {
        MazeSpec spec = presets::by_name(config_.maze_preset);
        if (config_.step_size) spec.step_size = *config_.step_size;
        if (config_.step_penalty) spec.step_penalty = *config_.step_penalty;
        if (config_.obs_noise_sigma) spec.obs_noise_sigma = *config_.obs_noise_sigma;
        if (config_.max_episode_len)
            spec.max_episode_len = static_cast<std::uint32_t>(*config_.max_episode_len);
        MazeEnv env(spec);

        std::shared_ptr<Tabulator> tabulator;
        std::unique_ptr<VariationalTrainer> trainer;
        LearnedTabulator* learned = nullptr;
        if (config_.tabulator == "grid") {
            std::vector<GridDim> dims(2, GridDim{config_.grid_cell, config_.grid_bits});
            if (spec.obs_dim() == 3)
                dims.push_back(GridDim{360.0 / spec.headings, heading_bits(spec), true,
                                       360.0});
            tabulator = std::make_shared<GridTabulator>(std::move(dims));
        } else if (config_.tabulator == "lsh") {
            tabulator = std::make_shared<LSHTabulator>(
                config_.lsh_d, (config_.agent.k + 1) * spec.obs_dim(),
                substream_seed(config_.seed, "lsh"));
        } else {
            VariationalConfig vcfg = config_.variational;
            vcfg.obs_dim = static_cast<std::uint32_t>(spec.obs_dim());
            vcfg.action_count = spec.action_count();
            vcfg.k = config_.agent.k;
            vcfg.init_seed = substream_seed(config_.seed, "variational-init");
            trainer = std::make_unique<VariationalTrainer>(vcfg);
            auto learned_ptr = std::make_shared<LearnedTabulator>(
                std::make_shared<Mlp>(trainer->params().encoder), vcfg.d);
            learned = learned_ptr.get();
            tabulator = learned_ptr;
        }

        RunResult result;
        if (config_.mode == "threaded") {
            SweeperService service(spec.action_count(), config_.sweeper);
            AsyncPlanner planner(service);
            Agent agent(env, planner, tabulator, config_.agent, config_.seed);
            if (trainer) agent.attach_trainer(trainer.get(), learned);
            drive(env, agent, result);
            service.shutdown();
            finish(result, env, agent, &service.sweeper(), tabulator.get());
        } else {
            Sweeper sweeper(spec.action_count(), config_.sweeper);
            SyncPlanner planner(sweeper);
            Agent agent(env, planner, tabulator, config_.agent, config_.seed);
            if (trainer) agent.attach_trainer(trainer.get(), learned);
            drive(env, agent, result);
            sweeper.sweep_to_quiescence();
            finish(result, env, agent, &sweeper, tabulator.get());
        }
        return result;
    }

    /// Write epochs.csv, summary.json, table.txt, values.txt (and trace.csv
    /// when requested) under the output directory. The VAST_OUTPUT_DIR
    /// environment variable overrides the configured path.
    std::filesystem::path write_outputs(const RunResult& result) const {
        std::filesystem::path dir = config_.output_dir;
        if (const char* env_dir = std::getenv("VAST_OUTPUT_DIR")) dir = env_dir;
        std::filesystem::create_directories(dir);

        std::ofstream csv(dir / "epochs.csv");
        write_epoch_csv(csv, result.rows);
        std::ofstream summary(dir / "summary.json");
        summary << result.summary.dump(2) << '\n';
        std::ofstream cfg(dir / "config.txt");
        config_.to_file().serialize(cfg);
        if (result.summary.contains("table_snapshot")) {
            std::ofstream table(dir / "table.txt");
            table << result.summary["table_snapshot"].get<std::string>();
            std::ofstream values(dir / "values.txt");
            values << result.summary["values_snapshot"].get<std::string>();
        }
        if (config_.export_trace && result.summary.contains("trace_csv")) {
            std::ofstream trace(dir / "trace.csv");
            trace << result.summary["trace_csv"].get<std::string>();
        }
        if (result.summary.contains("train_log_csv")) {
            std::ofstream log(dir / "train_log.csv");
            log << result.summary["train_log_csv"].get<std::string>();
        }
        return dir;
    }

    static void write_epoch_csv(std::ostream& os, const std::vector<EpochRow>& rows) {
        os << "# vast epoch metrics v1\n";
        os << "step,mean_episode_reward,episodes,mean_lookup_m,exact_match_pct,"
              "revisited_pct,reassign_rate\n";
        char buf[256];
        for (const EpochRow& r : rows) {
            std::snprintf(buf, sizeof(buf), "%llu,%.10g,%llu,%.10g,%.10g,%.10g,%.10g\n",
                          static_cast<unsigned long long>(r.step), r.mean_episode_reward,
                          static_cast<unsigned long long>(r.episodes), r.mean_lookup_m,
                          r.exact_match_pct, r.revisited_pct, r.reassign_rate);
            os << buf;
        }
    }

private:
    static std::uint32_t heading_bits(const MazeSpec& spec) {
        std::uint32_t bits = 1;
        while ((1u << bits) < spec.headings) ++bits;
        return bits;
    }

    void drive(MazeEnv& env, Agent& agent, RunResult& result) {
        std::size_t next_event = 0;
        std::uint64_t next_epoch = config_.epoch_every;
        while (agent.global_step() < config_.total_steps) {
            while (next_event < config_.schedule.size() &&
                   agent.global_step() >= config_.schedule[next_event].step) {
                execute_event(env, agent, config_.schedule[next_event]);
                ++next_event;
            }
            agent.run_episode(RunMode::Train);
            while (next_epoch <= config_.total_steps &&
                   agent.global_step() >= next_epoch) {
                result.rows.push_back(eval_epoch(agent, next_epoch));
                next_epoch += config_.epoch_every;
            }
        }
        while (next_event < config_.schedule.size() &&
               agent.global_step() >= config_.schedule[next_event].step) {
            execute_event(env, agent, config_.schedule[next_event]);
            ++next_event;
        }
    }

    void execute_event(MazeEnv& env, Agent& agent, const ScheduleEvent& ev) {
        executed_events_.push_back(ev);
        if (ev.kind == "reverse_rewards") {
            env.set_rewards(env.reversed_assignment());
        } else if (ev.kind == "enable_teleporter") {
            env.enable_teleporter(ev.arg.empty() ? 0 : std::stoull(ev.arg));
        } else if (ev.kind == "remove_wall") {
            env.remove_wall(std::stoull(ev.arg));
        } else if (ev.kind == "forced_run") {
            if (ev.arg == "tmaze") {
                auto [start, script] = presets::tmaze_forced_run();
                agent.run_scripted(start, script);
            } else if (ev.arg == "hmaze") {
                auto [start, script] = presets::hmaze_forced_run();
                agent.run_scripted(start, script);
            } else {
                throw ConfigError("unknown forced_run script: " + ev.arg);
            }
        }
    }

    EpochRow eval_epoch(Agent& agent, std::uint64_t step_mark) {
        EpochRow row;
        row.step = step_mark;
        std::uint64_t eval_steps = 0, lookups = 0, m_sum = 0, exact = 0;
        double reward = 0.0;
        while (eval_steps < config_.epoch_length) {
            EpisodeStats stats = agent.run_episode(RunMode::Eval);
            eval_steps += stats.steps;
            reward += stats.total_reward;
            lookups += stats.lookups;
            m_sum += stats.lookup_m_sum;
            exact += stats.exact_lookups;
            ++row.episodes;
        }
        row.mean_episode_reward = reward / static_cast<double>(row.episodes);
        if (lookups > 0) {
            row.mean_lookup_m =
                static_cast<double>(m_sum) / static_cast<double>(lookups);
            row.exact_match_pct =
                100.0 * static_cast<double>(exact) / static_cast<double>(lookups);
        }
        row.revisited_pct = 100.0 * agent.counters().revisit_fraction();
        row.reassign_rate = agent.counters().reassignment_rate();
        return row;
    }

    void finish(RunResult& result, MazeEnv& env, Agent& agent, const Sweeper* sweeper,
                Tabulator* tabulator) {
        nlohmann::json summary;
        summary["preset"] = config_.maze_preset;
        summary["tabulator"] = config_.tabulator;
        summary["seed"] = config_.seed;
        summary["mode"] = config_.mode;
        summary["total_steps"] = config_.total_steps;
        summary["paper_equivalent_steps"] = config_.total_steps * config_.scale_factor;
        summary["scale_factor"] = config_.scale_factor;

        double final_reward =
            result.rows.empty() ? 0.0 : result.rows.back().mean_episode_reward;
        summary["final_mean_reward"] = final_reward;
        double best = final_reward;
        for (const EpochRow& r : result.rows)
            best = std::max(best, r.mean_episode_reward);
        summary["best_mean_reward"] = best;

        summary["convergence_step"] = nullptr;
        if (final_reward > 0.0) {
            for (const EpochRow& r : result.rows) {
                if (r.mean_episode_reward >= 0.9 * final_reward) {
                    summary["convergence_step"] = r.step;
                    break;
                }
            }
        }

        summary["events"] = nlohmann::json::array();
        for (const ScheduleEvent& ev : executed_events_) {
            nlohmann::json j;
            j["step"] = ev.step;
            j["kind"] = ev.kind;
            j["arg"] = ev.arg;
            j["response_latency_steps"] = event_latency(result.rows, ev.step);
            summary["events"].push_back(j);
        }

        const AgentCounters& counters = agent.counters();
        summary["counters"] = {
            {"train_steps", counters.train_steps},
            {"gradient_steps", counters.gradient_steps},
            {"reassignments_applied", counters.reassignments_applied},
            {"revisited_pct", 100.0 * counters.revisit_fraction()},
            {"sweep_pops", sweeper->stats().pops},
            {"sweep_q_updates", sweeper->stats().q_updates},
            {"table_transitions", sweeper->table().total_transitions()},
            {"tabulator_generation", tabulator->generation()},
        };

        std::ostringstream table_snap;
        sweeper->table().save(table_snap);
        summary["table_snapshot"] = table_snap.str();
        std::ostringstream values_snap;
        sweeper->save_values(values_snap);
        summary["values_snapshot"] = values_snap.str();

        if (!agent.train_log().empty()) {
            std::ostringstream log;
            log << "# vast train log v1\n";
            log << "step,reconstruction,transition,entropy,total,reassignments\n";
            char buf[256];
            for (const TrainLogRow& r : agent.train_log()) {
                std::snprintf(buf, sizeof(buf), "%llu,%.10g,%.10g,%.10g,%.10g,%llu\n",
                              static_cast<unsigned long long>(r.step),
                              r.reconstruction, r.transition, r.entropy, r.total,
                              static_cast<unsigned long long>(r.reassignments));
                log << buf;
            }
            summary["train_log_csv"] = log.str();
        }
        if (config_.export_trace)
            summary["trace_csv"] = greedy_trace(env, *sweeper, tabulator);
        result.summary = std::move(summary);
    }

    /// Steps from the event until a test epoch first regains 80% of the last
    /// pre-event epoch reward; null when not observed.
    static nlohmann::json event_latency(const std::vector<EpochRow>& rows,
                                        std::uint64_t event_step) {
        double pre = 0.0;
        bool have_pre = false;
        for (const EpochRow& r : rows) {
            if (r.step <= event_step) {
                pre = r.mean_episode_reward;
                have_pre = true;
            }
        }
        if (!have_pre) return nullptr;
        for (const EpochRow& r : rows)
            if (r.step > event_step && r.mean_episode_reward >= 0.8 * pre)
                return r.step - event_step;
        return nullptr;
    }

    /// One greedy (epsilon = 0) episode exported as
    /// `t,x,y,heading,action,reward,state_code`. Diagnostic only.
    std::string greedy_trace(MazeEnv& env, const Sweeper& sweeper,
                             Tabulator* tabulator) {
        std::ostringstream os;
        os << "# vast trace v1\n";
        os << "t,x,y,heading,action,reward,state_code\n";
        auto [pose, obs] = env.reset(substream_seed(config_.seed, "trace"));
        ObservationHistory history(config_.agent.k, env.spec().obs_dim());
        history.push(obs);
        std::mt19937_64 tie_rng(substream_seed(config_.seed, "trace-ties"));
        char buf[256];
        StateId state = tabulator->encode(history);
        std::snprintf(buf, sizeof(buf), "0,%.10g,%.10g,%.10g,-1,0,%llu\n", env.pose().x,
                      env.pose().y, env.heading_degrees(),
                      static_cast<unsigned long long>(state.code));
        os << buf;
        for (std::uint32_t t = 1; !env.terminal(); ++t) {
            ActionId a = greedy_action(q_estimates_all(sweeper, state), tie_rng);
            StepOutcome out = env.step(a);
            history.push(out.observation);
            state = tabulator->encode(history);
            std::snprintf(buf, sizeof(buf), "%u,%.10g,%.10g,%.10g,%u,%.10g,%llu\n", t,
                          env.pose().x, env.pose().y, env.heading_degrees(), a,
                          out.reward, static_cast<unsigned long long>(state.code));
            os << buf;
        }
        return os.str();
    }

    ExperimentConfig config_;
    std::vector<ScheduleEvent> executed_events_;
};

// --- benchmarking ----------------------------------------------------------

struct BenchResult {
    std::uint64_t transitions = 0;
    std::uint64_t pops = 0;
    std::uint64_t q_updates = 0;
    double seconds = 0.0;
    double backups_per_second = 0.0;  // Q-update applications per second
    double pops_per_second = 0.0;
};

/// Flood a synthetic MDP through the add queue and sweep to quiescence on one
/// core, reporting throughput.
inline BenchResult bench_sweeps(std::uint64_t n_transitions,
                                const std::string& topology = "random",
                                std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::vector<TransitionRecord> transitions;
    transitions.reserve(n_transitions);
    if (topology == "chain") {
        // a long chain with the only reward at the end: worst-case propagation
        std::uint64_t n_states = std::max<std::uint64_t>(2, n_transitions / 4);
        for (std::uint64_t i = 0; i < n_transitions; ++i) {
            std::uint64_t s = i % n_states;
            double r = (s + 1 == n_states) ? 1.0 : 0.0;
            transitions.push_back(TransitionRecord{StateId{s}, 0, r,
                                                   StateId{(s + 1) % n_states}});
        }
    } else if (topology == "random") {
        std::uint64_t n_states = std::max<std::uint64_t>(2, n_transitions / 10);
        std::uniform_int_distribution<std::uint64_t> state(0, n_states - 1);
        std::uniform_int_distribution<ActionId> action(0, 3);
        std::uniform_real_distribution<double> reward(-1.0, 1.0);
        for (std::uint64_t i = 0; i < n_transitions; ++i)
            transitions.push_back(TransitionRecord{StateId{state(rng)}, action(rng),
                                                   reward(rng), StateId{state(rng)}});
    } else {
        throw std::invalid_argument("unknown bench topology: " + topology);
    }

    Sweeper sweeper(4, SweeperConfig{0.99, 5e-5});
    auto t0 = std::chrono::steady_clock::now();
    for (const TransitionRecord& t : transitions) sweeper.apply_add(t);
    sweeper.sweep_to_quiescence();
    auto t1 = std::chrono::steady_clock::now();

    BenchResult r;
    r.transitions = n_transitions;
    r.pops = sweeper.stats().pops;
    r.q_updates = sweeper.stats().q_updates;
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (r.seconds > 0.0) {
        r.backups_per_second = static_cast<double>(r.q_updates) / r.seconds;
        r.pops_per_second = static_cast<double>(r.pops) / r.seconds;
    }
    return r;
}

// --- verification suites ---------------------------------------------------

struct VerifyReport {
    bool passed = false;
    std::string text;
};

inline VerifyReport verify_oracle(std::uint32_t trials = 50, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    const double gamma = 0.99, p_min = 1e-9;
    const double bound = p_min * gamma / (1.0 - gamma) + 1e-9;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
        std::uniform_int_distribution<std::uint32_t> n_states(2, 50);
        std::uniform_int_distribution<std::uint32_t> n_trans(1, 500);
        std::uint32_t states = n_states(rng), count = n_trans(rng);
        std::uniform_int_distribution<std::uint64_t> state(0, states - 1);
        std::uniform_int_distribution<ActionId> action(0, 3);
        std::uniform_real_distribution<double> reward(-1.0, 1.0);

        Sweeper sweeper(4, SweeperConfig{gamma, p_min});
        EmpiricalMdp mdp(4);
        for (std::uint32_t i = 0; i < count; ++i) {
            TransitionRecord t{StateId{state(rng)}, action(rng), reward(rng),
                               StateId{state(rng)}};
            sweeper.apply_add(t);
            mdp.add(t);
        }
        sweeper.sweep_to_quiescence();
        auto q_vi = mdp.value_iteration(gamma, 1e-12);
        for (const auto& [key, q] : q_vi)
            worst = std::max(worst,
                             std::abs(q - sweeper.q_value(StateId{key.code}, key.action)));
    }
    VerifyReport report;
    report.passed = worst <= std::max(bound, 1e-6);
    std::ostringstream os;
    os << "oracle: " << trials << " random MDPs, max |Q - Q_VI| = " << worst
       << " (tolerance " << std::max(bound, 1e-6) << ") -> "
       << (report.passed ? "pass" : "FAIL");
    report.text = os.str();
    return report;
}

inline VerifyReport verify_gradcheck(std::uint32_t seeds = 3, std::uint64_t seed = 5) {
    std::mt19937_64 rng(seed);
    VariationalConfig cfg;
    cfg.d = 4;
    cfg.obs_dim = 2;
    cfg.action_count = 2;
    cfg.hidden = {6, 6};

    const char* group_names[4] = {"encoder", "decoder", "transition", "initial"};
    double group_worst[4] = {0, 0, 0, 0};
    for (std::uint32_t s = 0; s < seeds; ++s) {
        cfg.init_seed = seed + s;
        ModelParams params = ModelParams::init(cfg);
        std::vector<MinibatchItem> batch(4);
        std::normal_distribution<double> obs(0.0, 1.0);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            auto& item = batch[i];
            item.history_prev = {obs(rng), obs(rng)};
            item.history_cur = {obs(rng), obs(rng)};
            item.obs_target = {obs(rng), obs(rng)};
            item.action = static_cast<ActionId>(rng() % 2);
            item.initial = i == 0;
        }
        NoiseDraws noise = draw_noise(batch.size(), cfg.d, rng);
        ModelParams grads = params.zeros_like();
        grad_free_energy(batch, noise, params, cfg, grads);
        ModelParams fd = finite_difference_gradients(batch, noise, params, cfg);

        std::size_t enc_count = params.encoder.layers().size() * 2;
        std::size_t dec_count = params.decoder.layers().size() * 2;
        std::size_t trn_count =
            params.transition.size() * params.transition[0].layers().size() * 2;
        auto group_of = [&](std::size_t tensor_idx) {
            if (tensor_idx < enc_count) return 0;
            if (tensor_idx < enc_count + dec_count) return 1;
            if (tensor_idx < enc_count + dec_count + trn_count) return 2;
            return 3;
        };
        auto got = static_cast<const ModelParams&>(grads).tensors();
        auto want = static_cast<const ModelParams&>(fd).tensors();
        for (std::size_t t = 0; t < got.size(); ++t)
            for (std::size_t i = 0; i < got[t]->data.size(); ++i) {
                double a = got[t]->data[i], b = want[t]->data[i];
                double rel =
                    std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
                group_worst[group_of(t)] = std::max(group_worst[group_of(t)], rel);
            }
    }
    VerifyReport report;
    report.passed = true;
    std::ostringstream os;
    os << "gradcheck: max relative error per parameter group:";
    for (int g = 0; g < 4; ++g) {
        os << ' ' << group_names[g] << '=' << group_worst[g];
        if (group_worst[g] > 1e-4) report.passed = false;
    }
    os << " (tolerance 1e-4) -> " << (report.passed ? "pass" : "FAIL");
    report.text = os.str();
    return report;
}

inline VerifyReport verify_invariants(std::uint32_t rounds = 6, std::uint64_t seed = 3) {
    MazeSpec spec = presets::tmaze();
    MazeEnv env(spec);
    Sweeper sweeper(spec.action_count(), SweeperConfig{0.99, 5e-5});
    SyncPlanner planner(sweeper);
    auto grid = std::make_shared<GridTabulator>(presets::default_grid());
    AgentConfig cfg;
    cfg.replay_capacity = 400;
    cfg.warmup_steps = 200;
    Agent agent(env, planner, grid, cfg, seed);
    std::mt19937_64 rng(seed);

    bool ok = true;
    std::ostringstream os;
    for (std::uint32_t round = 0; round < rounds && ok; ++round) {
        agent.run_episode(RunMode::Train);
        std::vector<ReassignRequest> requests;
        for (const Episode& e : agent.memory().episodes()) {
            if (e.states.size() < 2 || rng() % 3) continue;
            requests.push_back(ReassignRequest{e.id, rng() % e.states.size(),
                                               StateId{rng() % 4096}});
        }
        agent.apply_reassignments(requests);
        ok = ok && memory_table_coherent(agent.memory(), sweeper.table());
        ok = ok && sweeper.table().check_consistency();
        ok = ok && sweeper.recompute_q_residual() < 1e-8;
    }
    VerifyReport report;
    report.passed = ok;
    os << "invariants: " << rounds
       << " rounds of episodes + reassignments + evictions, coherence "
       << (ok ? "held" : "BROKEN") << " -> " << (ok ? "pass" : "FAIL");
    report.text = os.str();
    return report;
}

}  // namespace vast

#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <unordered_set>
#include <vector>

#include "vast/maze.hpp"
#include "vast/qlookup.hpp"
#include "vast/replay_memory.hpp"
#include "vast/rng.hpp"
#include "vast/sweeper.hpp"
#include "vast/tabulator.hpp"
#include "vast/variational.hpp"

namespace vast {

/// Planner facade so the agent runs unchanged against the in-process sweeper
/// (deterministic, sweeps to quiescence between steps) or the channel-backed
/// sweeping service.
class PlannerClient {
public:
    virtual ~PlannerClient() = default;
    virtual void add(const TransitionRecord& t) = 0;
    virtual void remove(const TransitionRecord& t) = 0;
    virtual std::vector<std::optional<QEstimate>> q_estimates(StateId s) = 0;
    virtual std::vector<ActionValue> value_query(StateId s) = 0;
    virtual void settle() = 0;
    virtual std::uint32_t action_count() const = 0;
};

class SyncPlanner final : public PlannerClient {
public:
    explicit SyncPlanner(Sweeper& sweeper) : sweeper_(sweeper) {}

    void add(const TransitionRecord& t) override { sweeper_.apply_add(t); }
    void remove(const TransitionRecord& t) override { sweeper_.apply_delete(t); }
    std::vector<std::optional<QEstimate>> q_estimates(StateId s) override {
        return q_estimates_all(sweeper_, s);
    }
    std::vector<ActionValue> value_query(StateId s) override {
        return sweeper_.value_query(s);
    }
    void settle() override { sweeper_.sweep_to_quiescence(); }
    std::uint32_t action_count() const override { return sweeper_.action_count(); }

private:
    Sweeper& sweeper_;
};

struct AgentConfig {
    double epsilon_initial = 1.0;
    double epsilon_final = 0.1;
    std::uint64_t anneal_steps = 10000;  // counted after the warmup
    double eval_epsilon = 0.05;
    std::uint64_t warmup_steps = 500;    // pure random exploration
    std::uint32_t train_every = 4;       // gradient step cadence
    std::uint32_t minibatch = 128;
    std::size_t replay_capacity = 50000;
    std::uint32_t k = 0;                 // history frames beyond the current one
};

enum class RunMode { Train, Eval };

struct EpisodeStats {
    std::uint32_t steps = 0;
    double total_reward = 0.0;
    bool reached_terminal_zone = false;
    std::uint64_t lookups = 0;        // greedy lookups this episode
    std::uint64_t lookup_m_sum = 0;
    std::uint64_t exact_lookups = 0;  // lookups with m = 0
};

/// One row of the training log, appended per gradient step.
struct TrainLogRow {
    std::uint64_t step = 0;  // environment step at which the gradient step ran
    double reconstruction = 0.0;
    double transition = 0.0;
    double entropy = 0.0;
    double total = 0.0;
    std::uint64_t reassignments = 0;
};

/// Aggregate counters the harness samples for its per-epoch metrics.
struct AgentCounters {
    std::uint64_t train_steps = 0;           // environment steps in train mode
    std::uint64_t sa_visits = 0;
    std::uint64_t sa_revisits = 0;
    std::uint64_t greedy_lookups = 0;
    std::uint64_t exact_lookups = 0;         // greedy lookups with m = 0
    std::uint64_t lookup_m_sum = 0;
    std::uint64_t gradient_steps = 0;
    std::uint64_t reassignments_requested = 0;
    std::uint64_t reassignments_applied = 0;
    std::uint64_t minibatch_samples = 0;

    double revisit_fraction() const {
        return sa_visits == 0 ? 0.0
                              : static_cast<double>(sa_revisits) /
                                    static_cast<double>(sa_visits);
    }
    double reassignment_rate() const {
        return minibatch_samples == 0
                   ? 0.0
                   : static_cast<double>(reassignments_applied) /
                         static_cast<double>(minibatch_samples);
    }
};

/// The control loop: epsilon-greedy action selection over Hamming Q-lookups,
/// replay-memory maintenance, transition queue emission, training cadence and
/// reassignment application.
class Agent {
public:
    Agent(MazeEnv& env, PlannerClient& planner, std::shared_ptr<Tabulator> tabulator,
          AgentConfig config, std::uint64_t master_seed)
        : env_(env),
          planner_(planner),
          tabulator_(std::move(tabulator)),
          config_(config),
          memory_(config.replay_capacity),
          history_(config.k, env.spec().obs_dim()),
          action_rng_(make_rng(master_seed, "agent")),
          env_seed_rng_(make_rng(master_seed, "env")),
          train_rng_(make_rng(master_seed, "variational")) {}

    /// Wire in the toy learned tabulator; the trainer emits reassignment
    /// requests and the agent applies them and refreshes the snapshot.
    void attach_trainer(VariationalTrainer* trainer, LearnedTabulator* learned) {
        trainer_ = trainer;
        learned_ = learned;
    }

    const ReplayMemory& memory() const { return memory_; }
    const AgentCounters& counters() const { return counters_; }
    std::uint64_t global_step() const { return counters_.train_steps; }

    double current_epsilon(RunMode mode) const {
        if (mode == RunMode::Eval) return config_.eval_epsilon;
        if (counters_.train_steps < config_.warmup_steps) return 1.0;
        if (config_.anneal_steps == 0) return config_.epsilon_final;
        double t = static_cast<double>(counters_.train_steps - config_.warmup_steps) /
                   static_cast<double>(config_.anneal_steps);
        t = std::min(t, 1.0);
        return config_.epsilon_initial +
               t * (config_.epsilon_final - config_.epsilon_initial);
    }

    ActionId act(StateId s, double epsilon) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(action_rng_) < epsilon) {
            std::uniform_int_distribution<ActionId> any(0, planner_.action_count() - 1);
            return any(action_rng_);
        }
        auto estimates = planner_.q_estimates(s);
        ActionId a = greedy_action(estimates, action_rng_);
        if (estimates[a]) {
            ++counters_.greedy_lookups;
            counters_.lookup_m_sum += estimates[a]->m;
            if (estimates[a]->m == 0) ++counters_.exact_lookups;
            episode_lookups_ += 1;
            episode_m_sum_ += estimates[a]->m;
            episode_exact_ += estimates[a]->m == 0 ? 1 : 0;
        }
        return a;
    }

    EpisodeStats run_episode(RunMode mode) {
        EpisodeStats stats;
        episode_lookups_ = episode_m_sum_ = episode_exact_ = 0;
        std::uint64_t seed = env_seed_rng_();
        auto [pose, o0] = env_.reset(seed);
        history_.reset();
        history_.push(o0);
        StateId s_prev = tabulator_->encode(history_);
        if (mode == RunMode::Train) memory_.begin_episode(o0, s_prev);

        while (!env_.terminal()) {
            ActionId a = act(s_prev, current_epsilon(mode));
            StepOutcome out = env_.step(a);
            history_.push(out.observation);
            StateId s_t = tabulator_->encode(history_);
            stats.total_reward += out.reward;
            ++stats.steps;
            if (out.terminal) stats.reached_terminal_zone = env_.terminal_zone().has_value();

            if (mode == RunMode::Train) {
                memory_.append_step(out.observation, s_t, a, out.reward);
                track_visit(s_prev, a);
                planner_.add(TransitionRecord{s_prev, a, out.reward, s_t});
                ++counters_.train_steps;
                maybe_train();
            }
            planner_.settle();
            s_prev = s_t;
        }

        if (mode == RunMode::Train) {
            memory_.end_episode();
            for (const TransitionRecord& t : memory_.evict_to_capacity())
                planner_.remove(t);
            planner_.settle();
        }
        stats.lookups = episode_lookups_;
        stats.lookup_m_sum = episode_m_sum_;
        stats.exact_lookups = episode_exact_;
        return stats;
    }

    /// Scripted (forced-run) episode: memory and table are fed exactly as in
    /// training, but actions follow the script and no gradient steps run.
    EpisodeStats run_scripted(const Pose& start, const std::vector<ActionId>& script) {
        EpisodeStats stats;
        std::uint64_t seed = env_seed_rng_();
        Observation o0 = env_.reset_to(start, seed);
        history_.reset();
        history_.push(o0);
        StateId s_prev = tabulator_->encode(history_);
        memory_.begin_episode(o0, s_prev);
        for (ActionId a : script) {
            if (env_.terminal()) break;
            StepOutcome out = env_.step(a);
            history_.push(out.observation);
            StateId s_t = tabulator_->encode(history_);
            stats.total_reward += out.reward;
            ++stats.steps;
            memory_.append_step(out.observation, s_t, a, out.reward);
            track_visit(s_prev, a);
            planner_.add(TransitionRecord{s_prev, a, out.reward, s_t});
            ++counters_.train_steps;
            s_prev = s_t;
        }
        memory_.end_episode();
        for (const TransitionRecord& t : memory_.evict_to_capacity())
            planner_.remove(t);
        planner_.settle();
        return stats;
    }

    void apply_reassignments(const std::vector<ReassignRequest>& requests) {
        counters_.reassignments_requested += requests.size();
        for (const ReassignRequest& req : requests) {
            auto delta =
                memory_.apply_reassignment(req.episode_id, req.index, req.new_state);
            if (!delta) continue;  // episode already evicted
            if (delta->removed.empty() && delta->added.empty()) continue;
            for (const TransitionRecord& t : delta->removed) planner_.remove(t);
            for (const TransitionRecord& t : delta->added) planner_.add(t);
            ++counters_.reassignments_applied;
        }
    }

private:
    void track_visit(StateId s, ActionId a) {
        ++counters_.sa_visits;
        if (!visited_.insert(StateActionKey{s.code, a}).second)
            ++counters_.sa_revisits;
    }

    void maybe_train() {
        if (!trainer_) return;
        if (counters_.train_steps < config_.warmup_steps) return;
        if (config_.train_every == 0 ||
            counters_.train_steps % config_.train_every != 0)
            return;
        std::vector<MinibatchItem> batch = sample_minibatch();
        if (batch.empty()) return;
        TrainStepResult result = trainer_->train_step(batch, train_rng_);
        counters_.minibatch_samples += batch.size();
        ++counters_.gradient_steps;
        apply_reassignments(result.requests);
        if (learned_)
            learned_->set_snapshot(
                std::make_shared<Mlp>(trainer_->params().encoder));
        last_free_energy_ = result.free_energy;
        train_log_.push_back(TrainLogRow{counters_.train_steps,
                                         result.free_energy.reconstruction,
                                         result.free_energy.transition,
                                         result.free_energy.entropy,
                                         result.free_energy.total(),
                                         result.requests.size()});
    }

    std::vector<MinibatchItem> sample_minibatch() {
        std::vector<MinibatchItem> batch;
        batch.reserve(config_.minibatch);
        for (std::uint32_t i = 0; i < config_.minibatch; ++i) {
            auto window = memory_.sample_window(train_rng_);
            if (!window) break;
            const Episode& e = *window->episode;
            std::size_t j = window->index;
            MinibatchItem item;
            item.history_prev = e.flatten_window(j - 1, config_.k);
            item.history_cur = e.flatten_window(j, config_.k);
            item.obs_target = e.observations[j];
            item.action = e.actions[j - 1];
            item.initial = (j == 1);
            item.episode_id = e.id;
            item.index = j;
            item.stored_prev = e.states[j - 1];
            item.stored_cur = e.states[j];
            batch.push_back(std::move(item));
        }
        return batch;
    }

public:
    std::optional<FreeEnergyBreakdown> last_free_energy() const {
        return last_free_energy_;
    }
    const std::vector<TrainLogRow>& train_log() const { return train_log_; }

private:
    MazeEnv& env_;
    PlannerClient& planner_;
    std::shared_ptr<Tabulator> tabulator_;
    AgentConfig config_;
    ReplayMemory memory_;
    ObservationHistory history_;
    std::mt19937_64 action_rng_;
    std::mt19937_64 env_seed_rng_;
    std::mt19937_64 train_rng_;
    VariationalTrainer* trainer_ = nullptr;
    LearnedTabulator* learned_ = nullptr;
    AgentCounters counters_;
    std::unordered_set<StateActionKey, StateActionKeyHash> visited_;
    std::optional<FreeEnergyBreakdown> last_free_energy_;
    std::vector<TrainLogRow> train_log_;
    std::uint64_t episode_lookups_ = 0, episode_m_sum_ = 0, episode_exact_ = 0;
};

}  // namespace vast

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "vast/agent.hpp"
#include "vast/qlookup.hpp"
#include "vast/sweeper.hpp"

namespace vast {

/// The sweeping process: owns a Sweeper on its own thread and talks to the
/// agent over three channels (transition adds, transition deletes, value
/// queries). Messages are value copies; per Alg-style ordering, each cycle
/// applies pending adds before pending deletes, answers queries, and sweeps
/// only when both transition queues are empty. Closing the channels
/// (shutdown) drains pending transitions and stops.
class SweeperService {
public:
    struct Stats {
        SweepStats sweep;
        std::size_t add_backlog = 0;
        std::size_t delete_backlog = 0;
        std::size_t priority_queue_size = 0;
        bool idle = false;  // both queues empty and priority queue drained
    };

    SweeperService(std::uint32_t action_count, SweeperConfig config,
                   std::size_t max_batch_per_cycle = 0)
        : sweeper_(action_count, config), max_batch_(max_batch_per_cycle) {
        worker_ = std::thread([this] { run(); });
    }

    ~SweeperService() { shutdown(); }

    void enqueue_add(const TransitionRecord& t) {
        {
            std::lock_guard lock(mutex_);
            if (closed_) return;
            adds_.push_back(t);
        }
        wake_.notify_one();
    }

    void enqueue_delete(const TransitionRecord& t) {
        {
            std::lock_guard lock(mutex_);
            if (closed_) return;
            deletes_.push_back(t);
        }
        wake_.notify_one();
    }

    std::vector<std::optional<QEstimate>> q_estimates(StateId s) {
        std::promise<std::vector<std::optional<QEstimate>>> promise;
        auto future = promise.get_future();
        {
            std::lock_guard lock(mutex_);
            if (closed_) throw std::logic_error("query on a stopped sweeper service");
            estimate_queries_.push_back({s, std::move(promise)});
        }
        wake_.notify_one();
        return future.get();
    }

    std::vector<ActionValue> value_query(StateId s) {
        std::promise<std::vector<ActionValue>> promise;
        auto future = promise.get_future();
        {
            std::lock_guard lock(mutex_);
            if (closed_) throw std::logic_error("query on a stopped sweeper service");
            value_queries_.push_back({s, std::move(promise)});
        }
        wake_.notify_one();
        return future.get();
    }

    Stats stats() {
        std::lock_guard lock(mutex_);
        Stats s = stats_;
        s.add_backlog = adds_.size();
        s.delete_backlog = deletes_.size();
        return s;
    }

    /// Close the channels; the worker drains pending transitions and stops.
    void shutdown() {
        {
            std::lock_guard lock(mutex_);
            if (closed_) {
                if (worker_.joinable()) worker_.join();
                return;
            }
            closed_ = true;
        }
        wake_.notify_one();
        if (worker_.joinable()) worker_.join();
    }

    /// The underlying engine; safe to inspect only after shutdown().
    const Sweeper& sweeper() const { return sweeper_; }

    std::uint32_t action_count() const { return sweeper_.action_count(); }

private:
    struct EstimateQuery {
        StateId state;
        std::promise<std::vector<std::optional<QEstimate>>> reply;
    };
    struct ValueQuery {
        StateId state;
        std::promise<std::vector<ActionValue>> reply;
    };

    void run() {
        for (;;) {
            std::deque<TransitionRecord> adds, deletes;
            std::deque<EstimateQuery> est_queries;
            std::deque<ValueQuery> val_queries;
            bool closing = false;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [this] {
                    return closed_ || !adds_.empty() || !deletes_.empty() ||
                           !estimate_queries_.empty() || !value_queries_.empty() ||
                           !sweeper_.queue_empty();
                });
                closing = closed_;
                take_batch(adds_, adds);
                take_batch(deletes_, deletes);
                est_queries.swap(estimate_queries_);
                val_queries.swap(value_queries_);
            }

            for (const TransitionRecord& t : adds) sweeper_.apply_add(t);
            for (const TransitionRecord& t : deletes) sweeper_.apply_delete(t);
            for (EstimateQuery& q : est_queries)
                q.reply.set_value(q_estimates_all(sweeper_, q.state));
            for (ValueQuery& q : val_queries)
                q.reply.set_value(sweeper_.value_query(q.state));

            bool had_messages = !adds.empty() || !deletes.empty() ||
                                !est_queries.empty() || !val_queries.empty();
            if (closing) {
                std::lock_guard lock(mutex_);
                if (adds_.empty() && deletes_.empty() && estimate_queries_.empty() &&
                    value_queries_.empty())
                    break;
                continue;
            }
            if (!had_messages) sweeper_.sweep_step();

            {
                std::lock_guard lock(mutex_);
                stats_.sweep = sweeper_.stats();
                stats_.priority_queue_size = sweeper_.queue_size();
                stats_.idle = sweeper_.queue_empty() && adds_.empty() &&
                              deletes_.empty();
            }
        }
        std::lock_guard lock(mutex_);
        stats_.sweep = sweeper_.stats();
        stats_.priority_queue_size = sweeper_.queue_size();
        stats_.idle = sweeper_.queue_empty();
    }

    void take_batch(std::deque<TransitionRecord>& from,
                    std::deque<TransitionRecord>& to) {
        if (max_batch_ == 0 || from.size() <= max_batch_) {
            to.swap(from);
            return;
        }
        for (std::size_t i = 0; i < max_batch_; ++i) {
            to.push_back(from.front());
            from.pop_front();
        }
    }

    Sweeper sweeper_;
    std::size_t max_batch_;
    std::mutex mutex_;
    std::condition_variable wake_;
    bool closed_ = false;
    std::deque<TransitionRecord> adds_, deletes_;
    std::deque<EstimateQuery> estimate_queries_;
    std::deque<ValueQuery> value_queries_;
    Stats stats_;
    std::thread worker_;
};

/// PlannerClient over the service channels: the concurrent counterpart of
/// SyncPlanner. settle() is a no-op; sweeping happens continuously in the
/// service thread.
class AsyncPlanner final : public PlannerClient {
public:
    explicit AsyncPlanner(SweeperService& service) : service_(service) {}

    void add(const TransitionRecord& t) override { service_.enqueue_add(t); }
    void remove(const TransitionRecord& t) override { service_.enqueue_delete(t); }
    std::vector<std::optional<QEstimate>> q_estimates(StateId s) override {
        return service_.q_estimates(s);
    }
    std::vector<ActionValue> value_query(StateId s) override {
        return service_.value_query(s);
    }
    void settle() override {}
    std::uint32_t action_count() const override { return service_.action_count(); }

private:
    SweeperService& service_;
};

}  // namespace vast

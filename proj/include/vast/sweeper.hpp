#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vast/priority_queue.hpp"
#include "vast/transition_table.hpp"
#include "vast/types.hpp"

namespace vast {

struct SweeperConfig {
    double gamma = 0.99;    // discount factor
    double p_min = 5e-5;    // priority queue cutoff
};

/// Per-action view returned by value_query; count 0 marks (s,a) unobserved.
struct ActionValue {
    double q = 0.0;
    std::uint32_t count = 0;
    bool observed() const { return count > 0; }
};

struct SweepStats {
    std::uint64_t pops = 0;       // priority-queue pops (one committed U per pop)
    std::uint64_t q_updates = 0;  // individual Q(s,a) updates, queue items included
    std::uint64_t adds = 0;
    std::uint64_t deletes = 0;
};

/// Prioritized sweeping with small backups over the empirical transition
/// table. Maintains Q(s,a), V(s) = max over observed actions, and U(s), the
/// value last committed to predecessors; |U - V| is the sweep priority.
///
/// The value nodes mirror the per-action visit counts so the sweep kernel
/// runs on one hash lookup per predecessor; the TransitionTable stays the
/// authoritative count store for everything else.
///
/// Single-threaded; owns the TransitionTable and the value tables exclusively.
/// SweeperService wraps this engine with channels for the concurrent mode.
class Sweeper {
public:
    Sweeper(std::uint32_t action_count, SweeperConfig config = {})
        : config_(config), table_(action_count), queue_(config.p_min) {
        if (config.gamma < 0.0 || config.gamma >= 1.0)
            throw std::invalid_argument("gamma must lie in [0, 1)");
        if (config.p_min < 0.0) throw std::invalid_argument("p_min must be >= 0");
    }

    const SweeperConfig& config() const { return config_; }
    const TransitionTable& table() const { return table_; }
    std::uint32_t action_count() const { return table_.action_count(); }
    const SweepStats& stats() const { return stats_; }
    std::size_t queue_size() const { return queue_.size(); }

    /// Record one observed transition and fold it into Q as a running average:
    /// Q(s,a) <- [Q(s,a)(N-1) + r + gamma U(s')]/N with the incremented N.
    void apply_add(const TransitionRecord& t) {
        table_.add_transition(t);
        double u_next = u_of(t.to);
        Node& node = node_for(t.from);
        double n = static_cast<double>(++node.n[t.action]);
        double& q = node.q[t.action];
        q = (q * (n - 1.0) + t.reward + config_.gamma * u_next) / n;
        refresh_state(t.from, node);
        ++stats_.adds;
        ++stats_.q_updates;
    }

    /// Remove one transition's contribution; Q resets to 0 when N_sa hits 0
    /// and V falls back to 0 when no observed action remains.
    void apply_delete(const TransitionRecord& t) {
        table_.delete_transition(t);  // throws on desync
        double u_next = u_of(t.to);
        Node& node = node_for(t.from);
        double n = static_cast<double>(--node.n[t.action]);
        double& q = node.q[t.action];
        if (n > 0.0)
            q = (q * (n + 1.0) - (t.reward + config_.gamma * u_next)) / n;
        else
            q = 0.0;
        refresh_state(t.from, node);
        ++stats_.deletes;
        ++stats_.q_updates;
    }

    /// One small-backup step: pop the top state s', commit U(s') = V(s'), and
    /// push the change gamma N^{s'}_{sa}/N_sa * dU to every predecessor.
    /// Returns false when the queue is empty.
    bool sweep_step() {
        auto popped = queue_.pop();
        if (!popped) return false;
        StateId s_prime = *popped;
        Node& pnode = node_for(s_prime);
        double delta_u = pnode.v - pnode.u;
        pnode.u = pnode.v;
        ++stats_.pops;
        if (delta_u != 0.0) {
            double gdu = config_.gamma * delta_u;
            for (const auto& [key, c] : table_.predecessor_map(s_prime)) {
                Node& node = values_.find(key.code)->second;
                node.q[key.action] +=
                    gdu * static_cast<double>(c) / static_cast<double>(node.n[key.action]);
                refresh_state(StateId{key.code}, node);
                ++stats_.q_updates;
            }
        }
        return true;
    }

    /// Sweep until the queue drains (or max_steps). Returns steps performed.
    std::uint64_t sweep_to_quiescence(
        std::uint64_t max_steps = std::numeric_limits<std::uint64_t>::max()) {
        std::uint64_t steps = 0;
        while (steps < max_steps && sweep_step()) ++steps;
        return steps;
    }

    bool queue_empty() const { return queue_.empty(); }

    double q_value(StateId s, ActionId a) const {
        auto it = values_.find(s.code);
        return it == values_.end() ? 0.0 : it->second.q[a];
    }
    double v_value(StateId s) const {
        auto it = values_.find(s.code);
        return it == values_.end() ? 0.0 : it->second.v;
    }
    double u_value(StateId s) const { return u_of(s); }

    /// Snapshot of Q and counts for every action at s.
    std::vector<ActionValue> value_query(StateId s) const {
        std::vector<ActionValue> out(action_count());
        auto it = values_.find(s.code);
        for (ActionId a = 0; a < action_count(); ++a) {
            out[a].count = table_.count(s, a);
            out[a].q = (it == values_.end()) ? 0.0 : it->second.q[a];
        }
        return out;
    }

    /// Max residual of Q against a from-scratch recompute,
    ///   Q(s,a) =?= [sum of rewards + gamma * sum_s' N^{s'}_{sa} U(s')] / N_sa,
    /// which incremental adds, deletes and sweeps must maintain exactly.
    /// On-demand debug check for accumulated floating-point drift.
    double recompute_q_residual() const {
        double worst = 0.0;
        for (ActionId a = 0; a < action_count(); ++a) {
            for (std::uint64_t code : table_.observed_states(a)) {
                StateId s{code};
                double acc = table_.reward_sum(s, a);
                for (const auto& [to, c] : table_.successors(s, a))
                    acc += config_.gamma * static_cast<double>(c) * u_of(StateId{to});
                double expect = acc / static_cast<double>(table_.count(s, a));
                worst = std::max(worst, std::abs(expect - q_value(s, a)));
            }
        }
        return worst;
    }

    /// Newline-delimited (Q,V,U) snapshot: `V code value`, `U code value`,
    /// `Q code action value` lines, sorted by state code.
    void save_values(std::ostream& os) const {
        std::vector<std::uint64_t> codes;
        codes.reserve(values_.size());
        for (const auto& [code, _] : values_) codes.push_back(code);
        std::sort(codes.begin(), codes.end());
        os << std::setprecision(17);
        for (std::uint64_t code : codes) {
            const Node& node = values_.at(code);
            os << "V " << code << ' ' << node.v << '\n';
            os << "U " << code << ' ' << node.u << '\n';
            for (ActionId a = 0; a < action_count(); ++a)
                if (node.n[a] > 0)
                    os << "Q " << code << ' ' << a << ' ' << node.q[a] << '\n';
        }
    }

private:
    struct Node {
        double v = 0.0;
        double u = 0.0;
        std::vector<double> q;         // indexed by action
        std::vector<std::uint32_t> n;  // mirror of table counts, sweep-local
    };

    Node& node_for(StateId s) {
        Node& node = values_[s.code];
        if (node.q.empty()) {
            node.q.assign(action_count(), 0.0);
            node.n.assign(action_count(), 0);
        }
        return node;
    }

    double u_of(StateId s) const {
        auto it = values_.find(s.code);
        return it == values_.end() ? 0.0 : it->second.u;
    }

    /// Recompute V(s) over observed actions and requeue s by |U - V|.
    void refresh_state(StateId s, Node& node) {
        double v = 0.0;
        bool any = false;
        const std::size_t actions = node.q.size();
        for (std::size_t a = 0; a < actions; ++a) {
            if (node.n[a] > 0) {
                double q = node.q[a];
                v = any ? std::max(v, q) : q;
                any = true;
            }
        }
        node.v = any ? v : 0.0;
        queue_.update(s, std::abs(node.u - node.v));
    }

    SweeperConfig config_;
    TransitionTable table_;
    SweepPriorityQueue queue_;
    SweepStats stats_;
    std::unordered_map<std::uint64_t, Node> values_;
};

}  // namespace vast

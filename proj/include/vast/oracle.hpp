#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vast/types.hpp"

namespace vast {

/// Verification-only value iteration on the empirical MDP induced by a
/// transition multiset: probabilities N^{s'}_{sa}/N_sa, rewards the mean of
/// the recorded r per (s,a). Deliberately independent of the sweeping code
/// path; used by the `verify oracle` suite and the test oracles.
class EmpiricalMdp {
public:
    explicit EmpiricalMdp(std::uint32_t action_count) : action_count_(action_count) {}

    void add(const TransitionRecord& t) {
        Cell& cell = cells_[StateActionKey{t.from.code, t.action}];
        cell.n += 1;
        cell.reward_sum += t.reward;
        cell.successors[t.to.code] += 1;
        touch(t.from.code);
        touch(t.to.code);
    }

    void remove(const TransitionRecord& t) {
        auto it = cells_.find(StateActionKey{t.from.code, t.action});
        Cell& cell = it->second;
        cell.n -= 1;
        cell.reward_sum -= t.reward;
        auto jt = cell.successors.find(t.to.code);
        jt->second -= 1;
        if (jt->second == 0) cell.successors.erase(jt);
        if (cell.n == 0) cells_.erase(it);
    }

    /// Solve Q(s,a) = r(s,a) + gamma * sum_s' p(s'|s,a) V(s') to the given
    /// sup-norm tolerance on V between iterations.
    std::unordered_map<StateActionKey, double, StateActionKeyHash> value_iteration(
        double gamma, double tol = 1e-10, std::uint64_t max_iters = 1000000) const {
        std::unordered_map<std::uint64_t, double> v;
        for (std::uint64_t code : states_) v[code] = 0.0;

        std::unordered_map<StateActionKey, double, StateActionKeyHash> q;
        for (std::uint64_t iter = 0; iter < max_iters; ++iter) {
            for (const auto& [key, cell] : cells_) {
                double acc = cell.reward_sum;
                for (const auto& [to, c] : cell.successors)
                    acc += gamma * static_cast<double>(c) * v.at(to);
                q[key] = acc / static_cast<double>(cell.n);
            }
            double delta = 0.0;
            for (auto& [code, value] : v) {
                double best = 0.0;
                bool any = false;
                for (ActionId a = 0; a < action_count_; ++a) {
                    auto it = q.find(StateActionKey{code, a});
                    if (it == q.end()) continue;
                    best = any ? std::max(best, it->second) : it->second;
                    any = true;
                }
                double next = any ? best : 0.0;
                delta = std::max(delta, std::abs(next - value));
                value = next;
            }
            if (delta <= tol) break;
        }
        return q;
    }

    std::uint32_t action_count() const { return action_count_; }
    const std::vector<std::uint64_t>& states() const { return states_; }

    std::uint32_t count(StateId s, ActionId a) const {
        auto it = cells_.find(StateActionKey{s.code, a});
        return it == cells_.end() ? 0 : it->second.n;
    }

private:
    struct Cell {
        std::uint32_t n = 0;
        double reward_sum = 0.0;
        std::unordered_map<std::uint64_t, std::uint32_t> successors;
    };

    void touch(std::uint64_t code) {
        if (seen_.insert(code).second) states_.push_back(code);
    }

    std::uint32_t action_count_;
    std::unordered_map<StateActionKey, Cell, StateActionKeyHash> cells_;
    std::unordered_set<std::uint64_t> seen_;
    std::vector<std::uint64_t> states_;
};

}  // namespace vast

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "vast/sweeper.hpp"
#include "vast/transition_table.hpp"
#include "vast/types.hpp"

namespace vast {

inline std::uint32_t hamming_distance(StateId a, StateId b) {
    return static_cast<std::uint32_t>(std::popcount(a.code ^ b.code));
}

/// Q-value estimate for action selection: the experience-weighted average of
/// Q over the m-nearest observed neighbors of the query state.
struct QEstimate {
    double value = 0.0;
    std::uint32_t m = 0;        // lookup distance to the nearest neighbor set
    std::uint64_t support = 0;  // total N_sa over that set
};

/// Experience-weighted Hamming-nearest-neighbor estimate of Q(s_t, a).
/// Scans the per-action observed-state registry with XOR+popcount, keeping the
/// states at the minimal distance m and their visit-count-weighted Q average.
/// Returns nullopt when action a has never been observed anywhere.
/// An exact hit (m = 0) short-circuits: the estimate is Q(s_t, a) itself.
template <typename QFn>
std::optional<QEstimate> q_estimate(const TransitionTable& table, QFn&& q_of,
                                    StateId s_t, ActionId a) {
    const std::vector<std::uint64_t>& candidates = table.observed_states(a);
    if (candidates.empty()) return std::nullopt;

    std::uint32_t best_m = 65;
    double weighted_sum = 0.0;
    std::uint64_t support = 0;
    for (std::uint64_t code : candidates) {
        std::uint32_t dist =
            static_cast<std::uint32_t>(std::popcount(s_t.code ^ code));
        if (dist > best_m) continue;
        StateId s{code};
        if (dist < best_m) {
            best_m = dist;
            weighted_sum = 0.0;
            support = 0;
        }
        std::uint64_t n = table.count(s, a);
        weighted_sum += static_cast<double>(n) * q_of(s, a);
        support += n;
        if (dist == 0) break;  // exact match dominates; nothing can be closer
    }
    return QEstimate{weighted_sum / static_cast<double>(support), best_m, support};
}

inline std::optional<QEstimate> q_estimate(const Sweeper& sweeper, StateId s_t,
                                           ActionId a) {
    return q_estimate(
        sweeper.table(),
        [&sweeper](StateId s, ActionId act) { return sweeper.q_value(s, act); }, s_t,
        a);
}

/// Estimates for every action at s_t; entry i is nullopt if action i is
/// globally unobserved.
inline std::vector<std::optional<QEstimate>> q_estimates_all(const Sweeper& sweeper,
                                                             StateId s_t) {
    std::vector<std::optional<QEstimate>> out(sweeper.action_count());
    for (ActionId a = 0; a < sweeper.action_count(); ++a)
        out[a] = q_estimate(sweeper, s_t, a);
    return out;
}

/// Argmax over the available estimates, ties broken uniformly at random.
/// With no estimate available at all, falls back to a uniform random action.
template <typename Rng>
ActionId greedy_action(const std::vector<std::optional<QEstimate>>& estimates,
                       Rng& rng) {
    std::vector<ActionId> best;
    double best_value = 0.0;
    for (ActionId a = 0; a < estimates.size(); ++a) {
        if (!estimates[a]) continue;
        double v = estimates[a]->value;
        if (best.empty() || v > best_value) {
            best.assign(1, a);
            best_value = v;
        } else if (v == best_value) {
            best.push_back(a);
        }
    }
    if (best.empty()) {
        std::uniform_int_distribution<ActionId> any(
            0, static_cast<ActionId>(estimates.size()) - 1);
        return any(rng);
    }
    if (best.size() == 1) return best.front();
    std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
    return best[pick(rng)];
}

}  // namespace vast

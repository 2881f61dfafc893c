#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vast/tabulator.hpp"
#include "vast/transition_table.hpp"
#include "vast/types.hpp"

namespace vast {

/// One stored episode. Entry t holds (o_t, s_t); actions[t] and rewards[t]
/// belong to the step from entry t to entry t+1, so the episode head carries
/// no action or reward.
struct Episode {
    std::uint64_t id = 0;
    std::vector<Observation> observations;
    std::vector<StateId> states;
    std::vector<ActionId> actions;
    std::vector<double> rewards;
    bool complete = false;

    std::size_t transition_count() const { return actions.size(); }

    TransitionRecord transition(std::size_t t) const {
        return TransitionRecord{states[t], actions[t], rewards[t], states[t + 1]};
    }

    /// Flattened o_{idx-k : idx} window, blank frames before the start.
    std::vector<double> flatten_window(std::size_t idx, std::uint32_t k) const {
        std::size_t frame_dim = observations.front().size();
        std::vector<double> out;
        out.reserve((k + 1) * frame_dim);
        for (std::int64_t t = static_cast<std::int64_t>(idx) - k;
             t <= static_cast<std::int64_t>(idx); ++t) {
            if (t < 0) {
                out.insert(out.end(), frame_dim, 0.0);
            } else {
                const Observation& o = observations[static_cast<std::size_t>(t)];
                out.insert(out.end(), o.begin(), o.end());
            }
        }
        return out;
    }
};

/// Episode ring buffer with capacity counted in transitions. State ids are
/// updated in place by reassignments; eviction drops whole oldest episodes
/// and reports their transitions so the table can forget them too.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity_transitions)
        : capacity_(capacity_transitions) {}

    std::size_t capacity() const { return capacity_; }
    std::size_t total_transitions() const { return total_; }
    const std::deque<Episode>& episodes() const { return episodes_; }
    bool episode_open() const { return open_; }

    void begin_episode(Observation o0, StateId s0) {
        if (open_) throw std::logic_error("begin_episode with an episode open");
        Episode e;
        e.id = next_id_++;
        e.observations.push_back(std::move(o0));
        e.states.push_back(s0);
        episodes_.push_back(std::move(e));
        open_ = true;
    }

    void append_step(Observation o, StateId s, ActionId a, double r) {
        if (!open_) throw std::logic_error("append_step without an open episode");
        Episode& e = episodes_.back();
        e.observations.push_back(std::move(o));
        e.states.push_back(s);
        e.actions.push_back(a);
        e.rewards.push_back(r);
        ++total_;
    }

    void end_episode() {
        if (!open_) throw std::logic_error("end_episode without an open episode");
        episodes_.back().complete = true;
        open_ = false;
    }

    /// Drop whole oldest (completed) episodes until within capacity; the
    /// returned records must be deleted from the transition table.
    std::vector<TransitionRecord> evict_to_capacity() {
        std::vector<TransitionRecord> deletions;
        while (total_ > capacity_ && !episodes_.empty() &&
               episodes_.front().complete) {
            Episode& e = episodes_.front();
            for (std::size_t t = 0; t < e.transition_count(); ++t)
                deletions.push_back(e.transition(t));
            total_ -= e.transition_count();
            episodes_.pop_front();
        }
        return deletions;
    }

    Episode* find_episode(std::uint64_t id) {
        for (Episode& e : episodes_)
            if (e.id == id) return &e;
        return nullptr;
    }

    struct ReassignDelta {
        std::vector<TransitionRecord> removed;
        std::vector<TransitionRecord> added;
    };

    /// Relabel entry `index` of the episode, swapping the (up to) two incident
    /// transitions. Returns nullopt when the episode has been evicted; an
    /// unchanged id yields an empty delta.
    std::optional<ReassignDelta> apply_reassignment(std::uint64_t episode_id,
                                                    std::size_t index,
                                                    StateId new_state) {
        Episode* e = find_episode(episode_id);
        if (!e) return std::nullopt;
        if (index >= e->states.size()) throw std::out_of_range("reassignment index");
        StateId old_state = e->states[index];
        ReassignDelta delta;
        if (old_state == new_state) return delta;

        if (index >= 1) {  // incoming transition
            delta.removed.push_back(TransitionRecord{
                e->states[index - 1], e->actions[index - 1], e->rewards[index - 1],
                old_state});
            delta.added.push_back(TransitionRecord{e->states[index - 1],
                                                   e->actions[index - 1],
                                                   e->rewards[index - 1], new_state});
        }
        if (index + 1 < e->states.size()) {  // outgoing transition
            delta.removed.push_back(TransitionRecord{
                old_state, e->actions[index], e->rewards[index], e->states[index + 1]});
            delta.added.push_back(TransitionRecord{new_state, e->actions[index],
                                                   e->rewards[index],
                                                   e->states[index + 1]});
        }
        e->states[index] = new_state;
        return delta;
    }

    struct Window {
        const Episode* episode = nullptr;
        std::size_t index = 0;  // j >= 1
    };

    /// Uniform draw over all stored steps with a predecessor (j >= 1),
    /// including the open episode's settled steps.
    template <typename Rng>
    std::optional<Window> sample_window(Rng& rng) const {
        if (total_ == 0) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, total_ - 1);
        std::size_t offset = pick(rng);
        for (const Episode& e : episodes_) {
            if (offset < e.transition_count())
                return Window{&e, offset + 1};
            offset -= e.transition_count();
        }
        return std::nullopt;  // unreachable
    }

private:
    std::size_t capacity_;
    std::size_t total_ = 0;
    std::uint64_t next_id_ = 1;
    bool open_ = false;
    std::deque<Episode> episodes_;
};

/// Memory/table coherence: rebuilding counts from the memory's current state
/// labels must reproduce the live table exactly.
inline bool memory_table_coherent(const ReplayMemory& memory,
                                  const TransitionTable& table) {
    std::unordered_map<StateActionKey, std::unordered_map<std::uint64_t, std::uint32_t>,
                       StateActionKeyHash>
        counts;
    std::uint64_t total = 0;
    for (const Episode& e : memory.episodes()) {
        for (std::size_t t = 0; t < e.transition_count(); ++t) {
            TransitionRecord tr = e.transition(t);
            counts[StateActionKey{tr.from.code, tr.action}][tr.to.code] += 1;
            ++total;
        }
    }
    if (total != table.total_transitions()) return false;
    for (const auto& [key, successors] : counts)
        for (const auto& [to, n] : successors)
            if (table.count(StateId{key.code}, key.action, StateId{to}) != n)
                return false;
    return true;
}

}  // namespace vast

#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "vast/types.hpp"

namespace vast {

/// Max-priority queue over states with lazy invalidation: updates push a new
/// heap entry and stale ones are discarded on pop. A side map holds each
/// state's live priority, so a state is queued at most once logically.
/// Entries only ever enter above the p_min cutoff; dropping to or below the
/// cutoff unqueues the state. Ties pop in insertion order.
class SweepPriorityQueue {
public:
    explicit SweepPriorityQueue(double p_min) : p_min_(p_min) {}

    double p_min() const { return p_min_; }

    /// Set s's priority to `priority` if above the cutoff, else unqueue it.
    void update(StateId s, double priority) {
        if (priority > p_min_) {
            std::uint64_t seq = next_seq_++;
            live_[s.code] = Live{priority, seq};
            heap_.push(Entry{priority, seq, s.code});
        } else {
            live_.erase(s.code);
        }
    }

    /// Pop the highest-priority state, discarding stale entries. Empty -> nullopt.
    std::optional<StateId> pop() {
        while (!heap_.empty()) {
            Entry top = heap_.top();
            heap_.pop();
            auto it = live_.find(top.code);
            if (it != live_.end() && it->second.seq == top.seq) {
                live_.erase(it);
                return StateId{top.code};
            }
        }
        return std::nullopt;
    }

    bool empty() const { return live_.empty(); }
    std::size_t size() const { return live_.size(); }

    void clear() {
        live_.clear();
        heap_ = {};
    }

private:
    struct Entry {
        double priority;
        std::uint64_t seq;
        std::uint64_t code;
        // max by priority; FIFO among equal priorities
        friend bool operator<(const Entry& a, const Entry& b) {
            if (a.priority != b.priority) return a.priority < b.priority;
            return a.seq > b.seq;
        }
    };
    struct Live {
        double priority;
        std::uint64_t seq;
    };

    double p_min_;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Entry> heap_;
    std::unordered_map<std::uint64_t, Live> live_;
};

}  // namespace vast

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "vast/types.hpp"

namespace vast {

struct PredecessorEntry {
    StateId state;
    ActionId action = 0;
    std::uint32_t count = 0;
};

/// Empirical transition model: exact visit counts N_sa and N^{s'}_{sa} with a
/// reverse (predecessor) index and a per-action registry of observed states.
///
/// Counts are exact integers. A per-(s,a) reward sum is kept for diagnostics;
/// planning reads rewards from the queued records, not from here. Entries
/// that reach count 0 are removed from every index.
///
/// Single-writer: the sweeping context owns this table exclusively.
class TransitionTable {
public:
    explicit TransitionTable(std::uint32_t action_count) : action_count_(action_count) {
        registry_.resize(action_count);
        registry_pos_.resize(action_count);
    }

    std::uint32_t action_count() const { return action_count_; }

    void add_transition(const TransitionRecord& t) {
        check_action(t.action);
        StateEntry& entry = states_[t.from.code];
        if (entry.actions.empty()) entry.actions.resize(action_count_);
        ActionCell& cell = entry.actions[t.action];
        if (cell.count == 0) registry_insert(t.action, t.from.code);
        cell.count += 1;
        cell.reward_sum += t.reward;
        cell.successors[t.to.code] += 1;
        reverse_[t.to.code][StateActionKey{t.from.code, t.action}] += 1;
        ++total_count_;
        assert(cell.count == successor_sum(cell));
    }

    /// Deleting a transition that is not present is a hard error: it means the
    /// replay memory and the table have desynchronized.
    void delete_transition(const TransitionRecord& t) {
        check_action(t.action);
        auto sit = states_.find(t.from.code);
        if (sit == states_.end()) throw std::logic_error(desync_message(t));
        ActionCell& cell = sit->second.actions[t.action];
        auto succ = cell.successors.find(t.to.code);
        if (succ == cell.successors.end() || succ->second == 0)
            throw std::logic_error(desync_message(t));

        succ->second -= 1;
        if (succ->second == 0) cell.successors.erase(succ);
        cell.count -= 1;
        cell.reward_sum -= t.reward;
        if (cell.count == 0) {
            cell.reward_sum = 0.0;  // drop residual float dust with the entry
            registry_erase(t.action, t.from.code);
        }
        assert(cell.count == successor_sum(cell));

        auto rit = reverse_.find(t.to.code);
        auto& rmap = rit->second;
        auto pred = rmap.find(StateActionKey{t.from.code, t.action});
        pred->second -= 1;
        if (pred->second == 0) rmap.erase(pred);
        if (rmap.empty()) reverse_.erase(rit);

        if (entry_empty(sit->second)) states_.erase(sit);
        --total_count_;
    }

    std::uint32_t count(StateId s, ActionId a) const {
        auto it = states_.find(s.code);
        if (it == states_.end() || it->second.actions.empty()) return 0;
        return it->second.actions[a].count;
    }

    std::uint32_t count(StateId s, ActionId a, StateId to) const {
        auto it = states_.find(s.code);
        if (it == states_.end() || it->second.actions.empty()) return 0;
        const auto& succ = it->second.actions[a].successors;
        auto jt = succ.find(to.code);
        return jt == succ.end() ? 0 : jt->second;
    }

    /// Diagnostic running reward sum for (s,a); not used for planning.
    double reward_sum(StateId s, ActionId a) const {
        auto it = states_.find(s.code);
        if (it == states_.end() || it->second.actions.empty()) return 0.0;
        return it->second.actions[a].reward_sum;
    }

    bool observed(StateId s, ActionId a) const { return count(s, a) > 0; }

    /// True if any action has been observed from s.
    bool any_observed(StateId s) const {
        auto it = states_.find(s.code);
        if (it == states_.end()) return false;
        for (const auto& cell : it->second.actions)
            if (cell.count > 0) return true;
        return false;
    }

    /// Successor counts for (s,a): map to_code -> N^{s'}_{sa}.
    const std::unordered_map<std::uint64_t, std::uint32_t>& successors(StateId s,
                                                                       ActionId a) const {
        static const std::unordered_map<std::uint64_t, std::uint32_t> kEmpty;
        auto it = states_.find(s.code);
        if (it == states_.end() || it->second.actions.empty()) return kEmpty;
        return it->second.actions[a].successors;
    }

    /// All (s,a) with N^{s'}_{sa} > 0, with their counts.
    std::vector<PredecessorEntry> predecessors(StateId s_prime) const {
        std::vector<PredecessorEntry> out;
        auto it = reverse_.find(s_prime.code);
        if (it == reverse_.end()) return out;
        out.reserve(it->second.size());
        for (const auto& [key, c] : it->second)
            out.push_back(PredecessorEntry{StateId{key.code}, key.action, c});
        return out;
    }

    /// Zero-copy predecessor access for the sweep kernel.
    const std::unordered_map<StateActionKey, std::uint32_t, StateActionKeyHash>&
    predecessor_map(StateId s_prime) const {
        static const std::unordered_map<StateActionKey, std::uint32_t, StateActionKeyHash>
            kEmpty;
        auto it = reverse_.find(s_prime.code);
        return it == reverse_.end() ? kEmpty : it->second;
    }

    /// Registry of states with N_sa > 0 under action a (Hamming scan domain).
    const std::vector<std::uint64_t>& observed_states(ActionId a) const {
        check_action(a);
        return registry_[a];
    }

    std::uint64_t total_transitions() const { return total_count_; }

    /// Full invariant sweep: sum invariant and exact forward/reverse mirror.
    /// Used by tests and the `verify invariants` suite.
    bool check_consistency() const {
        std::uint64_t forward_total = 0;
        for (const auto& [code, entry] : states_) {
            for (ActionId a = 0; a < action_count_; ++a) {
                const ActionCell& cell = entry.actions[a];
                if (cell.count != successor_sum(cell)) return false;
                forward_total += cell.count;
                const auto& reg = registry_[a];
                bool registered =
                    registry_pos_[a].find(code) != registry_pos_[a].end();
                if ((cell.count > 0) != registered) return false;
                if (registered && reg[registry_pos_[a].at(code)] != code) return false;
                for (const auto& [to, c] : cell.successors) {
                    auto rit = reverse_.find(to);
                    if (rit == reverse_.end()) return false;
                    auto pit = rit->second.find(StateActionKey{code, a});
                    if (pit == rit->second.end() || pit->second != c) return false;
                }
            }
        }
        std::uint64_t reverse_total = 0;
        for (const auto& [to, rmap] : reverse_) {
            for (const auto& [key, c] : rmap) {
                if (c == 0) return false;
                if (count(StateId{key.code}, key.action, StateId{to}) != c) return false;
                reverse_total += c;
            }
        }
        return forward_total == total_count_ && reverse_total == total_count_;
    }

    /// Newline-delimited snapshot, one `from_code action to_code count` per
    /// line, sorted for reproducibility.
    void save(std::ostream& os) const {
        struct Row {
            std::uint64_t from;
            ActionId action;
            std::uint64_t to;
            std::uint32_t count;
        };
        std::vector<Row> rows;
        rows.reserve(states_.size());
        for (const auto& [code, entry] : states_)
            for (ActionId a = 0; a < action_count_; ++a)
                for (const auto& [to, c] : entry.actions[a].successors)
                    rows.push_back(Row{code, a, to, c});
        std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
            return std::tie(x.from, x.action, x.to) < std::tie(y.from, y.action, y.to);
        });
        for (const Row& r : rows)
            os << r.from << ' ' << r.action << ' ' << r.to << ' ' << r.count << '\n';
    }

    static TransitionTable load(std::istream& is, std::uint32_t action_count) {
        TransitionTable table(action_count);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            std::uint64_t from, to;
            std::uint32_t action, count;
            if (!(ls >> from >> action >> to >> count))
                throw std::runtime_error("table snapshot: bad line " +
                                         std::to_string(lineno));
            for (std::uint32_t i = 0; i < count; ++i)
                table.add_transition(
                    TransitionRecord{StateId{from}, action, 0.0, StateId{to}});
        }
        return table;
    }

private:
    struct ActionCell {
        std::uint32_t count = 0;
        double reward_sum = 0.0;
        std::unordered_map<std::uint64_t, std::uint32_t> successors;
    };
    struct StateEntry {
        std::vector<ActionCell> actions;  // sized lazily to action_count
    };

    void check_action(ActionId a) const {
        if (a >= action_count_) throw std::out_of_range("action id out of range");
    }

    static std::uint32_t successor_sum(const ActionCell& cell) {
        std::uint64_t sum = 0;
        for (const auto& [_, c] : cell.successors) sum += c;
        return static_cast<std::uint32_t>(sum);
    }

    static bool entry_empty(const StateEntry& e) {
        for (const auto& cell : e.actions)
            if (cell.count > 0) return false;
        return true;
    }

    static std::string desync_message(const TransitionRecord& t) {
        std::ostringstream os;
        os << "delete of unobserved transition (" << t.from.code << ", " << t.action
           << ", " << t.to.code << "): replay memory and table are out of sync";
        return os.str();
    }

    void registry_insert(ActionId a, std::uint64_t code) {
        registry_pos_[a][code] = registry_[a].size();
        registry_[a].push_back(code);
    }

    void registry_erase(ActionId a, std::uint64_t code) {
        auto& reg = registry_[a];
        auto& pos = registry_pos_[a];
        std::size_t i = pos.at(code);
        pos.erase(code);
        if (i + 1 != reg.size()) {
            reg[i] = reg.back();
            pos[reg[i]] = i;
        }
        reg.pop_back();
    }

    std::uint32_t action_count_;
    std::uint64_t total_count_ = 0;
    std::unordered_map<std::uint64_t, StateEntry> states_;
    std::unordered_map<std::uint64_t,
                       std::unordered_map<StateActionKey, std::uint32_t, StateActionKeyHash>>
        reverse_;
    std::vector<std::vector<std::uint64_t>> registry_;
    std::vector<std::unordered_map<std::uint64_t, std::size_t>> registry_pos_;
};

}  // namespace vast

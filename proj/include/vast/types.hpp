#pragma once

#include <cstdint>
#include <functional>

namespace vast {

/// Discrete latent state: a d-bit binary code packed into a 64-bit word.
/// Bits at positions >= d are zero; equality and hashing are by code value.
/// The bit width d itself is configuration-level and lives with the tabulator.
struct StateId {
    std::uint64_t code = 0;

    friend bool operator==(StateId a, StateId b) { return a.code == b.code; }
    friend bool operator!=(StateId a, StateId b) { return a.code != b.code; }
    friend bool operator<(StateId a, StateId b) { return a.code < b.code; }
};

using ActionId = std::uint32_t;

/// One observed (s, a, r, s') tuple; the payload of the add/delete queues.
struct TransitionRecord {
    StateId from;
    ActionId action = 0;
    double reward = 0.0;
    StateId to;

    friend bool operator==(const TransitionRecord& a, const TransitionRecord& b) {
        return a.from == b.from && a.action == b.action && a.reward == b.reward &&
               a.to == b.to;
    }
};

struct StateActionKey {
    std::uint64_t code = 0;
    ActionId action = 0;

    friend bool operator==(StateActionKey a, StateActionKey b) {
        return a.code == b.code && a.action == b.action;
    }
};

inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct StateIdHash {
    std::size_t operator()(StateId s) const { return static_cast<std::size_t>(mix64(s.code)); }
};

struct StateActionKeyHash {
    std::size_t operator()(StateActionKey k) const {
        return static_cast<std::size_t>(mix64(k.code ^ (static_cast<std::uint64_t>(k.action) << 56) ^
                                               (static_cast<std::uint64_t>(k.action) * 0x9e3779b97f4a7c15ULL)));
    }
};

}  // namespace vast

template <>
struct std::hash<vast::StateId> {
    std::size_t operator()(vast::StateId s) const { return vast::StateIdHash{}(s); }
};

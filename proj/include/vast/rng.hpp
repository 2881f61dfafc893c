#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "vast/types.hpp"

namespace vast {

/// All randomness flows from one master seed through named sub-streams, so
/// components (env, agent, lsh, variational) can be re-seeded independently.
inline std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(master ^ h);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::string_view name) {
    return std::mt19937_64(substream_seed(master, name));
}

}  // namespace vast

#pragma once

#include <cstdint>
#include <string_view>

namespace krecon {

// Label-based stream derivation (FNV-1a mix) so that independently
// seeded components never share random state.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL ^ base;
    for (char ch : label) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
        h *= 1099511628211ULL;
    }
    h ^= index + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
    h ^= h >> 29;
    return h;
}

} // namespace krecon

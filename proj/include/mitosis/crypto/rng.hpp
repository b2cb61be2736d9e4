#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "mitosis/core/bytes.hpp"

namespace mitosis::crypto {

// Stream seed = SHA256(seed || index || label). Independent streams for
// trials, chains and delay models without sharing mutable state.
Digest derive_stream(std::uint64_t seed, std::uint64_t index, std::string_view label);

// mt19937_64 output is fully specified by the standard; the bounded draw
// below avoids std::uniform_int_distribution, whose output is not.
class Rng {
public:
    explicit Rng(const Digest& stream_seed);
    Rng(std::uint64_t seed, std::uint64_t index, std::string_view label)
        : Rng(derive_stream(seed, index, label))
    {
    }

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    // Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

private:
    std::mt19937_64 engine_;
};

} // namespace mitosis::crypto

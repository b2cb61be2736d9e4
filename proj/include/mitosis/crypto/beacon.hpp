#pragma once

#include <cstdint>

#include "mitosis/core/types.hpp"

namespace mitosis::crypto {

struct RandomSeed {
    Digest value{};
    bool operator==(const RandomSeed&) const = default;
};

// Hash over the digests of the last min(lookback, ledger.size()) blocks.
// Throws Error{EmptyLedger}; lookback must be >= 1.
RandomSeed beacon(const Ledger& ledger, std::uint64_t lookback = 1);

} // namespace mitosis::crypto

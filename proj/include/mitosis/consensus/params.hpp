#pragma once

#include <cstdint>
#include <string_view>

#include "mitosis/core/fraction.hpp"

namespace mitosis::consensus {

enum class ConsensusKind : std::uint8_t { CFT = 1, BFT = 2 };

std::string_view kind_name(ConsensusKind kind);

// ceil((1 - alpha) * n) in exact arithmetic. Requires 0 < alpha <= 1/2, n >= 1.
std::int64_t quorum_size(std::int64_t n, const Fraction& alpha);

struct ConsensusParams {
    Fraction alpha{1, 3};
    ConsensusKind kind = ConsensusKind::BFT;

    static ConsensusParams cft() { return {Fraction{1, 2}, ConsensusKind::CFT}; }
    static ConsensusParams bft() { return {Fraction{1, 3}, ConsensusKind::BFT}; }

    std::int64_t quorum(std::int64_t n) const { return quorum_size(n, alpha); }
    bool operator==(const ConsensusParams&) const = default;
};

} // namespace mitosis::consensus

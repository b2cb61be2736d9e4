#pragma once

#include <cstdint>
#include <set>

#include "mitosis/assignment/assignment.hpp"
#include "mitosis/core/state.hpp"

namespace mitosis::chain {

// Children of "c" are "c.1" and "c.2".
ChainId child_id(const ChainId& parent, int side);
// Fusion of "a" and "b" is "a+b".
ChainId fused_id(const ChainId& a, const ChainId& b);

struct DivisionPlan {
    assignment::AssignmentOutcome validators;
    std::set<UserId> clients1;
    std::set<UserId> clients2;
    Block genesis1;
    Block genesis2;
};

// Child genesis pair for a parent snapshot. Every account goes to the child
// of its user, every asset to the child of its owner (locks intact), every
// claim outcome and claim record to the child of its claimer.
std::pair<Genesis, Genesis> split_state(const ChainState& parent, const std::set<UserId>& v1,
                                        const std::set<UserId>& v2, const std::set<UserId>& c1,
                                        const std::set<UserId>& c2, std::uint64_t split_height);

// Runs assignment over validators and clients of the snapshot at the end of
// `prefix`, seeding the randomized scheme from the beacon over `prefix`.
DivisionPlan plan_division(const Ledger& prefix, const ChainState& snapshot, assignment::Scheme scheme,
                           std::uint64_t beacon_lookback);

// Disjoint union of two chain states. alpha' = min(alpha_a, alpha_b),
// n_max' = max. Throws AssetIdCollision.
Genesis merge_states(const ChainState& a, const ChainState& b);

} // namespace mitosis::chain

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "mitosis/core/ids.hpp"
#include "mitosis/crypto/beacon.hpp"

namespace mitosis::assignment {

enum class Scheme : std::uint8_t { Deterministic = 1, Randomized = 2 };

struct AssignmentOutcome {
    std::set<UserId> v1;
    std::set<UserId> v2;
    Scheme scheme = Scheme::Deterministic;
    std::optional<crypto::RandomSeed> seed;
};

// Sorted by UserId; the first ceil(n/2) go to v1. Throws TooFew for n < 2.
AssignmentOutcome assign_deterministic(const std::set<UserId>& validators);

// Ranked by SHA256(seed || id) ascending, ties by id; the first ceil(n/2) go
// to v1. Throws TooFew for n < 2.
AssignmentOutcome assign_randomized(const std::set<UserId>& validators, const crypto::RandomSeed& seed);

// Ranking used by the randomized scheme, exposed for client splitting and
// for tests.
std::vector<UserId> rank(const std::set<UserId>& ids, const crypto::RandomSeed& seed);

// Splits `ids` with an explicit first-part size; no minimum size. Used for
// client sets, which may be empty.
std::pair<std::set<UserId>, std::set<UserId>> split(const std::vector<UserId>& ranked, std::size_t first);

} // namespace mitosis::assignment

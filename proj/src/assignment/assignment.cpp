#include "mitosis/assignment/assignment.hpp"

#include <algorithm>

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis::assignment {

namespace {

void require_two(const std::set<UserId>& validators)
{
    if (validators.size() < 2)
        throw Error(Errc::TooFew, "assignment needs at least 2 validators, got " + std::to_string(validators.size()));
}

std::size_t half_up(std::size_t n) { return (n + 1) / 2; }

} // namespace

std::pair<std::set<UserId>, std::set<UserId>> split(const std::vector<UserId>& ranked, std::size_t first)
{
    first = std::min(first, ranked.size());
    std::set<UserId> a(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(first));
    std::set<UserId> b(ranked.begin() + static_cast<std::ptrdiff_t>(first), ranked.end());
    return {std::move(a), std::move(b)};
}

AssignmentOutcome assign_deterministic(const std::set<UserId>& validators)
{
    require_two(validators);
    std::vector<UserId> ordered(validators.begin(), validators.end());
    auto [v1, v2] = split(ordered, half_up(ordered.size()));
    return {std::move(v1), std::move(v2), Scheme::Deterministic, std::nullopt};
}

std::vector<UserId> rank(const std::set<UserId>& ids, const crypto::RandomSeed& seed)
{
    std::vector<std::pair<Digest, UserId>> keyed;
    keyed.reserve(ids.size());
    for (const auto& id : ids) keyed.emplace_back(crypto::hash_fields({as_view(seed.value), as_view(id.value)}), id);
    std::sort(keyed.begin(), keyed.end());
    std::vector<UserId> out;
    out.reserve(keyed.size());
    for (auto& [h, id] : keyed) out.push_back(std::move(id));
    return out;
}

AssignmentOutcome assign_randomized(const std::set<UserId>& validators, const crypto::RandomSeed& seed)
{
    require_two(validators);
    auto ranked = rank(validators, seed);
    auto [v1, v2] = split(ranked, half_up(ranked.size()));
    return {std::move(v1), std::move(v2), Scheme::Randomized, seed};
}

} // namespace mitosis::assignment

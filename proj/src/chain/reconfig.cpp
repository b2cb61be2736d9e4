#include "mitosis/chain/reconfig.hpp"

#include <algorithm>

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/beacon.hpp"

namespace mitosis::chain {

ChainId child_id(const ChainId& parent, int side)
{
    return ChainId(parent.value + "." + std::to_string(side));
}

ChainId fused_id(const ChainId& a, const ChainId& b)
{
    return ChainId(a.value + "+" + b.value);
}

namespace {

Genesis child_genesis(const ChainState& parent, const ChainId& id, const std::set<UserId>& validators,
                      const std::set<UserId>& clients, std::uint8_t side, std::uint64_t split_height)
{
    Genesis g;
    g.config.chain = id;
    g.config.validators = validators;
    g.config.clients = clients;
    g.config.consensus = parent.config.consensus;
    g.config.n_max = parent.config.n_max;
    auto member = [&](const UserId& u) { return validators.count(u) || clients.count(u); };
    for (const auto& [u, account] : parent.accounts)
        if (member(u)) g.accounts.push_back(account);
    for (const auto& [aid, asset] : parent.assets)
        if (member(asset.owner)) g.config.initial_assets[asset.owner].push_back(asset);
    for (const auto& [nonce, outcome] : parent.claim_outcomes)
        if (member(outcome.claimer)) g.claim_outcomes.emplace(nonce, outcome);
    for (const auto& [digest, record] : parent.claim_log)
        if (member(record.claimer)) g.claim_log.emplace(digest, record);
    g.lineage = Lineage{parent.config.chain, side, split_height};
    return g;
}

} // namespace

std::pair<Genesis, Genesis> split_state(const ChainState& parent, const std::set<UserId>& v1,
                                        const std::set<UserId>& v2, const std::set<UserId>& c1,
                                        const std::set<UserId>& c2, std::uint64_t split_height)
{
    std::set<UserId> seen;
    for (const auto* part : {&v1, &v2, &c1, &c2})
        for (const auto& u : *part)
            if (!seen.insert(u).second) throw Error(Errc::InvalidParams, "overlapping split for " + u.value);
    for (const auto& [u, account] : parent.accounts)
        if (!seen.count(u)) throw Error(Errc::InvalidParams, "member missing from split: " + u.value);
    return {child_genesis(parent, child_id(parent.config.chain, 1), v1, c1, 1, split_height),
            child_genesis(parent, child_id(parent.config.chain, 2), v2, c2, 2, split_height)};
}

DivisionPlan plan_division(const Ledger& prefix, const ChainState& snapshot, assignment::Scheme scheme,
                           std::uint64_t beacon_lookback)
{
    DivisionPlan plan;
    std::vector<UserId> ranked_clients;
    if (scheme == assignment::Scheme::Deterministic) {
        plan.validators = assignment::assign_deterministic(snapshot.config.validators);
        ranked_clients.assign(snapshot.config.clients.begin(), snapshot.config.clients.end());
    } else {
        auto seed = crypto::beacon(prefix, beacon_lookback);
        plan.validators = assignment::assign_randomized(snapshot.config.validators, seed);
        ranked_clients = assignment::rank(snapshot.config.clients, seed);
    }
    std::tie(plan.clients1, plan.clients2) = assignment::split(ranked_clients, (ranked_clients.size() + 1) / 2);
    auto [g1, g2] = split_state(snapshot, plan.validators.v1, plan.validators.v2, plan.clients1, plan.clients2,
                                snapshot.last_height);
    plan.genesis1 = make_genesis_block(std::move(g1));
    plan.genesis2 = make_genesis_block(std::move(g2));
    return plan;
}

Genesis merge_states(const ChainState& a, const ChainState& b)
{
    for (const auto& [id, asset] : a.assets)
        if (b.assets.count(id)) throw Error(Errc::AssetIdCollision, "asset " + id.value + " exists on both chains");

    Genesis g;
    g.config.chain = fused_id(a.config.chain, b.config.chain);
    g.config.validators = a.config.validators;
    g.config.validators.insert(b.config.validators.begin(), b.config.validators.end());
    for (const auto* side : {&a.config.clients, &b.config.clients})
        for (const auto& c : *side)
            if (!g.config.validators.count(c)) g.config.clients.insert(c);
    const auto& pa = a.config.consensus;
    const auto& pb = b.config.consensus;
    g.config.consensus = pb.alpha < pa.alpha ? pb : pa;
    g.config.n_max = std::max(a.config.n_max, b.config.n_max);

    std::map<UserId, Account> accounts = a.accounts;
    for (const auto& [u, account] : b.accounts) {
        auto [it, inserted] = accounts.emplace(u, account);
        if (!inserted && account.role == Role::Validator) it->second = account;
    }
    for (auto& [u, account] : accounts) g.accounts.push_back(account);

    for (const auto* side : {&a, &b})
        for (const auto& [id, asset] : side->assets) g.config.initial_assets[asset.owner].push_back(asset);
    g.claim_outcomes = a.claim_outcomes;
    g.claim_outcomes.insert(b.claim_outcomes.begin(), b.claim_outcomes.end());
    g.claim_log = a.claim_log;
    g.claim_log.insert(b.claim_log.begin(), b.claim_log.end());
    g.merged_from = {a.config.chain, b.config.chain};
    return g;
}

} // namespace mitosis::chain

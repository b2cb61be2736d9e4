#pragma once

#include <string>
#include <vector>

#include "mitosis/chain/ecosystem.hpp"

namespace mitosis::testing {

inline std::vector<UserId> make_users(chain::Ecosystem& eco, const std::string& prefix, int count, Role role)
{
    std::vector<UserId> out;
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%s%02d", prefix.c_str(), i);
        out.emplace_back(name);
        eco.register_user(out.back(), role);
    }
    return out;
}

inline ChainConfig make_config(const std::string& id, const std::vector<UserId>& validators,
                               const std::vector<UserId>& clients, consensus::ConsensusParams params,
                               std::uint32_t n_max)
{
    ChainConfig config;
    config.chain = ChainId(id);
    config.validators.insert(validators.begin(), validators.end());
    config.clients.insert(clients.begin(), clients.end());
    config.consensus = params;
    config.n_max = n_max;
    return config;
}

inline Asset make_asset(const std::string& id, const UserId& owner, std::uint64_t value)
{
    return Asset{AssetId(id), owner, value, std::nullopt};
}

} // namespace mitosis::testing

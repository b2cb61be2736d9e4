#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mitosis/core/types.hpp"

namespace mitosis::chain {

struct ChainRecord {
    ChainConfig config;
    bool active = true;
    // Chains this one was fused from; empty unless created by fusion.
    std::vector<ChainId> merged_from;

    bool operator==(const ChainRecord&) const = default;
};

// Membership registry: user accounts, chain configurations and the division
// lineage forest.
class Registry {
public:
    // Throws AlreadyMember when the id is taken.
    const Account& register_user(const Account& account);
    bool has_user(const UserId& u) const { return users_.count(u) != 0; }
    const Account& user(const UserId& u) const;
    const std::map<UserId, Account>& users() const { return users_; }

    // Throws DuplicateChainId, UnregisteredValidator.
    void add_chain(const ChainConfig& config, std::optional<Lineage> lineage = std::nullopt,
                   std::vector<ChainId> merged_from = {});
    void update_chain(const ChainConfig& config);
    void retire(const ChainId& c);

    bool has_chain(const ChainId& c) const { return chains_.count(c) != 0; }
    const ChainRecord& chain(const ChainId& c) const;
    const std::map<ChainId, ChainRecord>& chains() const { return chains_; }
    std::vector<ChainId> active_chains() const;

    const std::optional<Lineage>& lineage(const ChainId& c) const;
    // True if `c` equals `ancestor` or descends from it through divisions or
    // fusions.
    bool descends_from(const ChainId& c, const ChainId& ancestor) const;

    // Accounts of a chain's validators, as the registry publishes them.
    std::map<UserId, Account> validator_accounts(const ChainId& c) const;

    // chain_id,parent_id,side,split_height; roots have empty parent fields.
    std::string lineage_csv() const;

    Bytes serialize() const;
    static Registry deserialize(ByteView bytes);

    bool operator==(const Registry&) const = default;

private:
    std::map<UserId, Account> users_;
    std::map<ChainId, ChainRecord> chains_;
    std::map<ChainId, std::optional<Lineage>> lineage_;
};

} // namespace mitosis::chain

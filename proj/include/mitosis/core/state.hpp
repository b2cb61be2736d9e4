#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "mitosis/core/types.hpp"

namespace mitosis {

namespace crypto {
class SignatureScheme;
}

// Materialized view of a chain's ledger. Fully determined by replaying the
// ledger from genesis.
struct ChainState {
    ChainConfig config;
    std::map<UserId, Account> accounts;
    std::map<AssetId, Asset> assets;
    std::uint64_t last_height = 0;
    Digest last_digest{};
    std::map<Nonce, ClaimOutcome> claim_outcomes;
    std::map<Digest, ClaimRecord> claim_log;
    std::optional<Lineage> lineage;
    std::vector<ChainId> merged_from;
    std::uint64_t predicate_evaluations = 0;

    bool is_member(const UserId& u) const { return accounts.count(u) != 0; }
    std::uint64_t total_value() const;
    Digest digest() const;

    bool operator==(const ChainState&) const = default;
};

ChainState state_from_genesis(const Block& genesis);

// Validates `tx` against `state` without modifying anything. Throws Error.
void check_transaction(const ChainState& state, const Transaction& tx,
                       const crypto::SignatureScheme& scheme);

// Validates then applies. On error `state` is left untouched.
void apply_in_place(ChainState& state, const Transaction& tx, const crypto::SignatureScheme& scheme);

// Pure transition: returns the successor state, the argument is not modified.
ChainState apply_transaction(const ChainState& state, const Transaction& tx,
                             const crypto::SignatureScheme& scheme);

// Appends a sealed block's effects (height/digest bookkeeping plus every
// transaction in order).
void apply_block(ChainState& state, const Block& block, const crypto::SignatureScheme& scheme);

// Fold of apply_transaction over the ledger. Throws Error{BrokenChain, h} on a
// height or digest mismatch at height h; transaction errors are rethrown with
// the failing height as position.
ChainState replay(const Ledger& ledger, const crypto::SignatureScheme& scheme);

} // namespace mitosis

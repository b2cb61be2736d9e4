#pragma once

#include "mitosis/xchain/tok.hpp"

namespace mitosis::xchain {

enum class TransferKind : std::uint8_t { Lock = 1, Claim = 2, Abort = 3 };

const char* transfer_kind_name(TransferKind k);

// A ToK proof about a committed lock or claim transaction, carrying that
// transaction.
struct TransferProof {
    TransferKind kind = TransferKind::Lock;
    KnowledgeProof inner;
    Transaction tx;

    bool operator==(const TransferProof&) const = default;
};

Bytes serialize(const TransferProof& proof);
TransferProof deserialize_transfer(ByteView bytes);

// Commits a Lock on the chain holding `owner` (following divisions from
// `source`) and proves its inclusion under `tag`, which the target side
// issued. Throws AssetLocked, UnknownAsset, NotOwner.
TransferProof toa_lock(chain::Ecosystem& eco, const UserId& owner, const ChainId& source, const AssetId& asset,
                       const ChainId& target_chain, const UserId& target_address, const FreshnessTag& tag);

// Commits a Claim on the chain holding `claimer` (following divisions from
// `target`). The committed verdict is 1 iff the lock proof verifies, names
// this chain and the claimer, and the lock nonce has not been claimed
// before. Returns a Claim proof, or an Abort proof for verdict 0, under
// `resolve_tag`, which the source side issued.
TransferProof toa_claim(chain::Ecosystem& eco, const UserId& claimer, const ChainId& target,
                        const TransferProof& lock_proof, const FreshnessTag& resolve_tag);

enum class Resolution : std::uint8_t { Claimed, Aborted };

// Deletes (Claim) or unlocks (Abort) the locked asset on the chain holding
// it. Throws UnknownLock, or InvalidProof with no state change.
Resolution toa_resolve(chain::Ecosystem& eco, const ChainId& source, const TransferProof& proof,
                       const FreshnessTag& tag);

// Instances of `asset` across active chains that can still be spent: unlocked
// ones plus locked ones whose lock nonce has no successful claim.
std::size_t spendable_instances(const chain::Ecosystem& eco, const AssetId& asset);

} // namespace mitosis::xchain

#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "mitosis/consensus/certificate.hpp"
#include "mitosis/core/state.hpp"
#include "mitosis/crypto/rng.hpp"

namespace mitosis::chain {
class Ecosystem;
}

namespace mitosis::xchain {

constexpr std::uint64_t kDefaultTagWindow = 100;

// Issued by the verifying side, anchored to one of its own blocks. Heights
// are lineage heights (see lineage_height).
struct FreshnessTag {
    ChainId issuer_chain;
    Digest anchor_digest{};
    std::uint64_t issued_height = 0;
    std::uint64_t expiry_height = 0;
    Nonce nonce;

    bool operator==(const FreshnessTag&) const = default;
};

// Transaction with this digest is in the block at `height`.
struct TxInclusion {
    Digest tx_digest{};
    std::uint64_t height = 0;
    bool operator==(const TxInclusion&) const = default;
};
// Total value of assets owned by `user` is at least `amount`.
struct BalanceAtLeast {
    UserId user;
    std::uint64_t amount = 0;
    bool operator==(const BalanceAtLeast&) const = default;
};
struct AssetOwnedBy {
    AssetId asset;
    UserId owner;
    bool operator==(const AssetOwnedBy&) const = default;
};
// The first committed claim for `nonce` had this verdict.
struct ClaimSettled {
    Nonce nonce;
    bool verdict = false;
    bool operator==(const ClaimSettled&) const = default;
};
// The committed claim transaction with this digest had this verdict.
struct ClaimAttempt {
    Digest claim_tx{};
    bool verdict = false;
    bool operator==(const ClaimAttempt&) const = default;
};

using Predicate = std::variant<TxInclusion, BalanceAtLeast, AssetOwnedBy, ClaimSettled, ClaimAttempt>;

// False when the predicate does not hold or cannot be evaluated on `ledger`.
bool evaluate(const Predicate& p, const Ledger& ledger, const ChainState& state);

struct KnowledgeProof {
    ChainId source_chain;
    std::uint64_t height = 0;
    Predicate predicate;
    bool verdict = false;
    FreshnessTag tag;
    consensus::QuorumCertificate certificate;

    // Canonical bytes the certificate signs: source, height, predicate,
    // verdict and tag.
    Bytes statement() const;
    bool operator==(const KnowledgeProof&) const = default;
};

// field(statement) || u32 count || (u32 |id|, id, u32 |sig|, sig) per signer.
Bytes serialize(const KnowledgeProof& proof);
KnowledgeProof deserialize_knowledge(ByteView bytes);
std::size_t serialized_size(const KnowledgeProof& proof);

struct VerifyResult {
    bool accepted = false;
    std::string reason;  // empty when accepted
};

// 1 iff the tag matches and current_height <= expiry, the certificate signs
// exactly this proof's statement with verdict 1, and the signers are at
// least quorum_size distinct validators of `source` with valid signatures.
VerifyResult tok_verify_proof(const KnowledgeProof& proof, const FreshnessTag& tag, const ChainConfig& source,
                              const std::map<UserId, Account>& accounts, const crypto::SignatureScheme& scheme,
                              std::uint64_t current_height);

// Height of `chain` counted from the root of its lineage, so that tag
// expiry keeps its meaning across divisions and fusions.
std::uint64_t lineage_height(const chain::Ecosystem& eco, const ChainId& chain);

FreshnessTag issue_tag(const chain::Ecosystem& eco, const ChainId& issuer, crypto::Rng& nonces,
                       std::uint64_t window = kDefaultTagWindow);

// The tag was issued by `verifier` or one of its ancestors and its anchor is
// the issuer's block at the issued height.
bool tag_is_genuine(const chain::Ecosystem& eco, const FreshnessTag& tag, const ChainId& verifier);

// Source validators evaluate `p` on their committed state and sign
// (p, verdict, tag). Throws PredicateFalse when a quorum signs verdict 0,
// NoQuorum when neither verdict reaches quorum, UnknownUser when the prover
// is not a member of `source`.
KnowledgeProof tok_generate_proof(chain::Ecosystem& eco, const UserId& prover, const ChainId& source,
                                  const Predicate& p, const FreshnessTag& tag);

} // namespace mitosis::xchain

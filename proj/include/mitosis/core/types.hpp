#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mitosis/consensus/params.hpp"
#include "mitosis/core/bytes.hpp"
#include "mitosis/core/ids.hpp"
#include "mitosis/crypto/keys.hpp"

namespace mitosis {

enum class Role : std::uint8_t { Client = 1, Validator = 2 };

struct Account {
    UserId user;
    crypto::PublicKey public_key;
    Role role = Role::Client;
    std::map<std::string, std::string> metadata;

    bool operator==(const Account&) const = default;
};

struct LockTarget {
    ChainId chain;
    UserId address;
    // Freshness-tag nonce of the lock; claims are idempotent on it.
    Nonce nonce;

    bool operator==(const LockTarget&) const = default;
};

// locked == lock_target.has_value() at all times.
struct Asset {
    AssetId id;
    UserId owner;
    std::uint64_t value = 0;
    std::optional<LockTarget> lock_target;

    bool locked() const { return lock_target.has_value(); }
    bool operator==(const Asset&) const = default;
};

struct ChainConfig {
    ChainId chain;
    std::set<UserId> validators;
    std::set<UserId> clients;
    consensus::ConsensusParams consensus;
    std::uint32_t n_max = 2;
    std::map<UserId, std::vector<Asset>> initial_assets;

    bool operator==(const ChainConfig&) const = default;
};

// Division lineage carried by a child's genesis block.
struct Lineage {
    ChainId parent;
    std::uint8_t side = 1;
    std::uint64_t split_height = 0;

    bool operator==(const Lineage&) const = default;
};

// Terminal outcome of the first claim of a lock nonce on a target chain.
struct ClaimOutcome {
    bool verdict = false;
    UserId claimer;
    AssetId asset;
    ChainId source_chain;

    bool operator==(const ClaimOutcome&) const = default;
};

// Outcome of one particular claim transaction (duplicates included).
struct ClaimRecord {
    Nonce nonce;
    bool verdict = false;
    UserId claimer;

    bool operator==(const ClaimRecord&) const = default;
};

// ---- transactions -------------------------------------------------------

enum class TxKind : std::uint8_t {
    Register = 0,
    AssetCreate,
    AssetTransfer,
    Lock,
    Claim,
    Resolve,
    ConfigUpdate,
    PredicateEval,
};

const char* tx_kind_name(TxKind kind);

struct RegisterTx {
    Account account;
    bool operator==(const RegisterTx&) const = default;
};
struct AssetCreateTx {
    AssetId asset;
    std::uint64_t value = 0;
    bool operator==(const AssetCreateTx&) const = default;
};
struct AssetTransferTx {
    AssetId asset;
    UserId to;
    bool operator==(const AssetTransferTx&) const = default;
};
struct LockTx {
    AssetId asset;
    std::uint64_t value = 0;
    ChainId target_chain;
    UserId target_address;
    Nonce nonce;
    bool operator==(const LockTx&) const = default;
};
struct ClaimTx {
    ChainId source_chain;
    LockTx lock;
    Digest lock_tx_digest{};
    UserId claimer;
    // Verdict of the target validators on the lock proof and its tag.
    bool proof_valid = false;
    bool operator==(const ClaimTx&) const = default;
};
struct ResolveTx {
    Nonce nonce;
    AssetId asset;
    bool claimed = false;
    Digest proof_digest{};
    bool operator==(const ResolveTx&) const = default;
};
struct ConfigUpdateTx {
    Account account;
    bool operator==(const ConfigUpdateTx&) const = default;
};
struct PredicateEvalTx {
    ChainId source_chain;
    Digest statement_digest{};
    bool verdict = false;
    bool operator==(const PredicateEvalTx&) const = default;
};

// Alternative index == TxKind value.
using TxPayload = std::variant<RegisterTx, AssetCreateTx, AssetTransferTx, LockTx, ClaimTx,
                               ResolveTx, ConfigUpdateTx, PredicateEvalTx>;

struct Transaction {
    TxPayload payload;
    UserId submitter;
    crypto::Signature signature;

    TxKind kind() const { return static_cast<TxKind>(payload.index()); }
    // Bytes covered by the submitter's signature.
    Bytes signing_bytes() const;
    Digest digest() const;

    bool operator==(const Transaction&) const = default;
};

// ---- blocks -------------------------------------------------------------

struct Genesis {
    ChainConfig config;
    std::vector<Account> accounts;
    std::map<Nonce, ClaimOutcome> claim_outcomes;
    std::map<Digest, ClaimRecord> claim_log;
    std::optional<Lineage> lineage;
    std::vector<ChainId> merged_from;

    bool operator==(const Genesis&) const = default;
};

struct Block {
    std::uint64_t height = 0;
    Digest parent_digest{};
    std::optional<Genesis> genesis;
    std::vector<Transaction> transactions;
    Digest digest{};

    // Hash over everything but `digest`.
    Digest compute_digest() const;
    void seal() { digest = compute_digest(); }

    bool operator==(const Block&) const = default;
};

using Ledger = std::vector<Block>;

Block make_genesis_block(Genesis genesis);

} // namespace mitosis

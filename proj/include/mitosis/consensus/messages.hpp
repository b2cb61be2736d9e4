#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "mitosis/core/state.hpp"
#include "mitosis/core/types.hpp"

namespace mitosis::consensus {

// Transactions handed to every validator of a chain for the given height.
struct BatchMsg {
    std::uint64_t height = 0;
    std::vector<Transaction> transactions;
};

// Signature by the sender over vote_statement(chain, block).
struct VoteMsg {
    std::shared_ptr<const Block> block;
    crypto::Signature signature;
};

// <DIVIDE, C, initiator> plus the ledger height the division snapshots.
struct DivideMsg {
    ChainId chain;
    UserId initiator;
    std::uint64_t agreed_height = 0;

    Bytes statement() const;
    bool operator==(const DivideMsg&) const = default;
};

struct DivideAckMsg {
    DivideMsg divide;
    crypto::Signature signature;
};

// Rule by which a correct validator derives the statement it is willing to
// sign from its committed ledger; nullopt means "refuse". The first argument
// is the evaluating validator, for rules that consult its local protocol state.
using StatementRule = std::function<std::optional<Bytes>(const UserId&, const Ledger&, const ChainState&)>;

struct SignRequestMsg {
    std::uint64_t request_id = 0;
    std::uint64_t height = 0;
    std::shared_ptr<const StatementRule> rule;
};

struct SignResponseMsg {
    std::uint64_t request_id = 0;
    Bytes statement;
    crypto::Signature signature;
};

using Message = std::variant<BatchMsg, VoteMsg, DivideMsg, DivideAckMsg, SignRequestMsg, SignResponseMsg>;
using MessagePtr = std::shared_ptr<const Message>;

Bytes vote_statement(const ChainId& chain, const Block& block);

} // namespace mitosis::consensus

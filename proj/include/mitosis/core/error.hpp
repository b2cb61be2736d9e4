#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mitosis {

enum class Errc {
    InvalidSignature,
    AssetLocked,
    UnknownAsset,
    UnknownUser,
    NotOwner,
    AlreadyMember,
    BrokenChain,
    EmptyLedger,
    InvalidTransaction,
    UnregisteredValidator,
    DuplicateChainId,
    UnknownChain,
    PolicyRejected,
    TriggerNotMet,
    NoQuorum,
    UnknownInitiator,
    StateDivergence,
    AssetIdCollision,
    Stalled,
    TooFew,
    UnknownLock,
    InvalidProof,
    PredicateFalse,
    InvalidParams,
    UnknownNode,
    ConfigError,
    ParseError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::uint64_t> position = std::nullopt);

    Errc code() const noexcept { return code_; }
    // Block height (replay) or line number (parsers) where the failure was detected.
    std::optional<std::uint64_t> position() const noexcept { return position_; }

private:
    Errc code_;
    std::optional<std::uint64_t> position_;
};

} // namespace mitosis

#include "mitosis/core/error.hpp"

namespace mitosis {

const char* errc_name(Errc code)
{
    switch (code) {
    case Errc::InvalidSignature: return "InvalidSignature";
    case Errc::AssetLocked: return "AssetLocked";
    case Errc::UnknownAsset: return "UnknownAsset";
    case Errc::UnknownUser: return "UnknownUser";
    case Errc::NotOwner: return "NotOwner";
    case Errc::AlreadyMember: return "AlreadyMember";
    case Errc::BrokenChain: return "BrokenChain";
    case Errc::EmptyLedger: return "EmptyLedger";
    case Errc::InvalidTransaction: return "InvalidTransaction";
    case Errc::UnregisteredValidator: return "UnregisteredValidator";
    case Errc::DuplicateChainId: return "DuplicateChainId";
    case Errc::UnknownChain: return "UnknownChain";
    case Errc::PolicyRejected: return "PolicyRejected";
    case Errc::TriggerNotMet: return "TriggerNotMet";
    case Errc::NoQuorum: return "NoQuorum";
    case Errc::UnknownInitiator: return "UnknownInitiator";
    case Errc::StateDivergence: return "StateDivergence";
    case Errc::AssetIdCollision: return "AssetIdCollision";
    case Errc::Stalled: return "Stalled";
    case Errc::TooFew: return "TooFew";
    case Errc::UnknownLock: return "UnknownLock";
    case Errc::InvalidProof: return "InvalidProof";
    case Errc::PredicateFalse: return "PredicateFalse";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ParseError: return "ParseError";
    }
    return "?";
}

Error::Error(Errc code, const std::string& what, std::optional<std::uint64_t> position)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), position_(position)
{
}

} // namespace mitosis

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mitosis/core/types.hpp"

namespace mitosis::crypto {
class SignatureScheme;
}

namespace mitosis::consensus {

struct SignerEntry {
    UserId signer;
    crypto::Signature signature;
    bool operator==(const SignerEntry&) const = default;
};

// Entries are kept as a list, not a map, so that a deserialized certificate
// carrying a duplicate signer is representable and can be rejected.
struct QuorumCertificate {
    Bytes statement;
    std::vector<SignerEntry> signatures;

    std::vector<UserId> signers() const;
    bool operator==(const QuorumCertificate&) const = default;
};

enum class CertificateCheck { Ok, NonMember, DuplicateSigner, BadSignature, BelowQuorum };

const char* check_name(CertificateCheck c);

// Every entry must be a distinct validator of `config` with a signature that
// verifies over the statement, and there must be at least quorum_size of them.
CertificateCheck verify_certificate(const QuorumCertificate& cert, const ChainConfig& config,
                                    const std::map<UserId, Account>& accounts,
                                    const crypto::SignatureScheme& scheme);

} // namespace mitosis::consensus

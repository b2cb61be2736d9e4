#include "mitosis/consensus/certificate.hpp"

#include <set>

#include "mitosis/crypto/signature.hpp"

namespace mitosis::consensus {

std::vector<UserId> QuorumCertificate::signers() const
{
    std::vector<UserId> out;
    out.reserve(signatures.size());
    for (const auto& e : signatures) out.push_back(e.signer);
    return out;
}

const char* check_name(CertificateCheck c)
{
    switch (c) {
    case CertificateCheck::Ok: return "ok";
    case CertificateCheck::NonMember: return "non-member signer";
    case CertificateCheck::DuplicateSigner: return "duplicate signer";
    case CertificateCheck::BadSignature: return "signature";
    case CertificateCheck::BelowQuorum: return "quorum";
    }
    return "?";
}

CertificateCheck verify_certificate(const QuorumCertificate& cert, const ChainConfig& config,
                                    const std::map<UserId, Account>& accounts,
                                    const crypto::SignatureScheme& scheme)
{
    std::set<UserId> seen;
    for (const auto& e : cert.signatures) {
        if (!config.validators.count(e.signer)) return CertificateCheck::NonMember;
        if (!seen.insert(e.signer).second) return CertificateCheck::DuplicateSigner;
        auto it = accounts.find(e.signer);
        if (it == accounts.end()) return CertificateCheck::NonMember;
        if (!scheme.verify(it->second.public_key, cert.statement, e.signature)) return CertificateCheck::BadSignature;
    }
    auto quorum = config.consensus.quorum(static_cast<std::int64_t>(config.validators.size()));
    if (static_cast<std::int64_t>(seen.size()) < quorum) return CertificateCheck::BelowQuorum;
    return CertificateCheck::Ok;
}

} // namespace mitosis::consensus

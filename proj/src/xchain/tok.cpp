#include "mitosis/xchain/tok.hpp"

#include "mitosis/chain/ecosystem.hpp"
#include "mitosis/core/codec.hpp"
#include "mitosis/core/error.hpp"

namespace mitosis::xchain {

namespace {

constexpr std::string_view kDomain = "MITOSIS/TOK";

void encode(ByteWriter& w, const FreshnessTag& t)
{
    w.field(t.issuer_chain.value).digest(t.anchor_digest).u64(t.issued_height).u64(t.expiry_height);
    codec::encode(w, t.nonce);
}

FreshnessTag decode_tag(ByteReader& r)
{
    FreshnessTag t;
    t.issuer_chain = ChainId(r.string_field());
    t.anchor_digest = r.digest();
    t.issued_height = r.u64();
    t.expiry_height = r.u64();
    t.nonce = codec::decode_nonce(r);
    return t;
}

void encode(ByteWriter& w, const Predicate& p)
{
    w.u8(static_cast<std::uint8_t>(p.index()));
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, TxInclusion>) {
                w.digest(q.tx_digest).u64(q.height);
            } else if constexpr (std::is_same_v<T, BalanceAtLeast>) {
                w.field(q.user.value).u64(q.amount);
            } else if constexpr (std::is_same_v<T, AssetOwnedBy>) {
                w.field(q.asset.value).field(q.owner.value);
            } else if constexpr (std::is_same_v<T, ClaimSettled>) {
                codec::encode(w, q.nonce);
                w.boolean(q.verdict);
            } else {
                w.digest(q.claim_tx).boolean(q.verdict);
            }
        },
        p);
}

Predicate decode_predicate(ByteReader& r)
{
    switch (r.u8()) {
    case 0: {
        TxInclusion p;
        p.tx_digest = r.digest();
        p.height = r.u64();
        return p;
    }
    case 1: {
        BalanceAtLeast p;
        p.user = UserId(r.string_field());
        p.amount = r.u64();
        return p;
    }
    case 2: {
        AssetOwnedBy p;
        p.asset = AssetId(r.string_field());
        p.owner = UserId(r.string_field());
        return p;
    }
    case 3: {
        ClaimSettled p;
        p.nonce = codec::decode_nonce(r);
        p.verdict = r.boolean();
        return p;
    }
    case 4: {
        ClaimAttempt p;
        p.claim_tx = r.digest();
        p.verdict = r.boolean();
        return p;
    }
    default: throw Error(Errc::ParseError, "unknown predicate kind");
    }
}

Bytes statement_of(const ChainId& source, std::uint64_t height, const Predicate& p, bool verdict,
                   const FreshnessTag& tag)
{
    ByteWriter w;
    w.field(kDomain).field(source.value).u64(height);
    encode(w, p);
    w.boolean(verdict);
    encode(w, tag);
    return std::move(w).bytes();
}

std::uint64_t lineage_offset(const chain::Ecosystem& eco, const ChainId& c)
{
    const auto& reg = eco.registry();
    if (const auto& l = reg.lineage(c)) return lineage_offset(eco, l->parent) + l->split_height;
    std::uint64_t offset = 0;
    for (const auto& m : reg.chain(c).merged_from) offset = std::max(offset, lineage_height(eco, m));
    return offset;
}

} // namespace

bool evaluate(const Predicate& p, const Ledger& ledger, const ChainState& state)
{
    return std::visit(
        [&](const auto& q) -> bool {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, TxInclusion>) {
                if (q.height >= ledger.size() || q.height > state.last_height) return false;
                for (const auto& tx : ledger[q.height].transactions)
                    if (tx.digest() == q.tx_digest) return true;
                return false;
            } else if constexpr (std::is_same_v<T, BalanceAtLeast>) {
                std::uint64_t total = 0;
                for (const auto& [id, a] : state.assets)
                    if (a.owner == q.user) total += a.value;
                return total >= q.amount;
            } else if constexpr (std::is_same_v<T, AssetOwnedBy>) {
                auto it = state.assets.find(q.asset);
                return it != state.assets.end() && it->second.owner == q.owner;
            } else if constexpr (std::is_same_v<T, ClaimSettled>) {
                auto it = state.claim_outcomes.find(q.nonce);
                return it != state.claim_outcomes.end() && it->second.verdict == q.verdict;
            } else {
                auto it = state.claim_log.find(q.claim_tx);
                return it != state.claim_log.end() && it->second.verdict == q.verdict;
            }
        },
        p);
}

Bytes KnowledgeProof::statement() const
{
    return statement_of(source_chain, height, predicate, verdict, tag);
}

Bytes serialize(const KnowledgeProof& proof)
{
    ByteWriter w;
    w.field(proof.certificate.statement);
    w.u32(static_cast<std::uint32_t>(proof.certificate.signatures.size()));
    for (const auto& e : proof.certificate.signatures) w.field(e.signer.value).field(e.signature.bytes);
    return std::move(w).bytes();
}

std::size_t serialized_size(const KnowledgeProof& proof)
{
    std::size_t size = 4 + proof.certificate.statement.size() + 4;
    for (const auto& e : proof.certificate.signatures) size += 4 + e.signer.value.size() + 4 + e.signature.bytes.size();
    return size;
}

KnowledgeProof deserialize_knowledge(ByteView bytes)
{
    ByteReader r(bytes);
    KnowledgeProof proof;
    proof.certificate.statement = r.field();
    for (auto n = r.u32(); n > 0; --n) {
        consensus::SignerEntry e;
        e.signer = UserId(r.string_field());
        e.signature.bytes = r.field();
        proof.certificate.signatures.push_back(std::move(e));
    }
    r.expect_done();

    ByteReader s(proof.certificate.statement);
    if (s.string_field() != kDomain) throw Error(Errc::ParseError, "not a knowledge statement");
    proof.source_chain = ChainId(s.string_field());
    proof.height = s.u64();
    proof.predicate = decode_predicate(s);
    proof.verdict = s.boolean();
    proof.tag = decode_tag(s);
    s.expect_done();
    return proof;
}

VerifyResult tok_verify_proof(const KnowledgeProof& proof, const FreshnessTag& tag, const ChainConfig& source,
                              const std::map<UserId, Account>& accounts, const crypto::SignatureScheme& scheme,
                              std::uint64_t current_height)
{
    if (proof.tag != tag) return {false, "tag mismatch"};
    if (current_height > tag.expiry_height) return {false, "stale tag"};
    if (!proof.verdict) return {false, "verdict"};
    if (proof.source_chain != source.chain) return {false, "source chain"};
    if (proof.certificate.statement != proof.statement()) return {false, "statement"};
    auto check = consensus::verify_certificate(proof.certificate, source, accounts, scheme);
    if (check != consensus::CertificateCheck::Ok) return {false, consensus::check_name(check)};
    return {true, {}};
}

std::uint64_t lineage_height(const chain::Ecosystem& eco, const ChainId& c)
{
    return lineage_offset(eco, c) + eco.chain(c).height();
}

FreshnessTag issue_tag(const chain::Ecosystem& eco, const ChainId& issuer, crypto::Rng& nonces, std::uint64_t window)
{
    if (window == 0) throw Error(Errc::InvalidParams, "tag window must be positive");
    const auto& c = eco.chain(issuer);
    FreshnessTag t;
    t.issuer_chain = issuer;
    t.anchor_digest = c.ledger().back().digest;
    t.issued_height = lineage_height(eco, issuer);
    t.expiry_height = t.issued_height + window;
    for (std::size_t i = 0; i < t.nonce.bytes.size(); i += 8) {
        auto x = nonces.next();
        for (std::size_t j = 0; j < 8; ++j) t.nonce.bytes[i + j] = static_cast<std::uint8_t>(x >> (8 * j));
    }
    return t;
}

bool tag_is_genuine(const chain::Ecosystem& eco, const FreshnessTag& tag, const ChainId& verifier)
{
    if (tag.expiry_height <= tag.issued_height) return false;
    if (!eco.has_chain(tag.issuer_chain) || !eco.registry().descends_from(verifier, tag.issuer_chain)) return false;
    auto offset = lineage_offset(eco, tag.issuer_chain);
    if (tag.issued_height < offset) return false;
    const auto& ledger = eco.chain(tag.issuer_chain).ledger();
    auto local = tag.issued_height - offset;
    return local < ledger.size() && ledger[local].digest == tag.anchor_digest;
}

KnowledgeProof tok_generate_proof(chain::Ecosystem& eco, const UserId& prover, const ChainId& source,
                                  const Predicate& p, const FreshnessTag& tag)
{
    auto& c = eco.chain(source);
    if (!c.state().is_member(prover)) throw Error(Errc::UnknownUser, prover.value + " is not a member of " + source.value);
    const std::uint64_t height = c.height();
    auto rule = [source, height, p, tag](const UserId&, const Ledger& ledger,
                                         const ChainState& state) -> std::optional<Bytes> {
        return statement_of(source, height, p, evaluate(p, ledger, state), tag);
    };
    auto endorsements = c.collect(prover, height, rule);

    KnowledgeProof proof{source, height, p, true, tag, {}};
    proof.certificate = c.certificate_from(endorsements, proof.statement());
    if (static_cast<std::int64_t>(proof.certificate.signatures.size()) >= c.quorum()) return proof;

    auto negative = c.certificate_from(endorsements, statement_of(source, height, p, false, tag));
    if (static_cast<std::int64_t>(negative.signatures.size()) >= c.quorum())
        throw Error(Errc::PredicateFalse, "predicate does not hold on " + source.value);
    throw Error(Errc::NoQuorum, "no verdict reached quorum on " + source.value);
}

} // namespace mitosis::xchain

#include "mitosis/core/codec.hpp"

#include "mitosis/core/error.hpp"

namespace mitosis::codec {

namespace {

void encode_id(ByteWriter& w, const std::string& s) { w.field(s); }

template <typename Id>
Id decode_id(ByteReader& r)
{
    return Id{r.string_field()};
}

template <typename T, typename F>
void encode_optional(ByteWriter& w, const std::optional<T>& v, F&& enc)
{
    w.boolean(v.has_value());
    if (v) enc(*v);
}

Role decode_role(ByteReader& r)
{
    auto v = r.u8();
    if (v != 1 && v != 2) throw Error(Errc::ParseError, "invalid role");
    return static_cast<Role>(v);
}

} // namespace

void encode(ByteWriter& w, const Fraction& f)
{
    w.u64(static_cast<std::uint64_t>(f.num())).u64(static_cast<std::uint64_t>(f.den()));
}

void encode(ByteWriter& w, const Nonce& n) { w.raw({n.bytes.data(), n.bytes.size()}); }
void encode(ByteWriter& w, const crypto::PublicKey& pk) { w.field(pk.bytes); }
void encode(ByteWriter& w, const crypto::Signature& sig) { w.field(sig.bytes); }

void encode(ByteWriter& w, const consensus::ConsensusParams& p)
{
    encode(w, p.alpha);
    w.u8(static_cast<std::uint8_t>(p.kind));
}

void encode(ByteWriter& w, const Account& a)
{
    encode_id(w, a.user.value);
    encode(w, a.public_key);
    w.u8(static_cast<std::uint8_t>(a.role));
    w.u32(static_cast<std::uint32_t>(a.metadata.size()));
    for (const auto& [k, v] : a.metadata) w.field(k).field(v);
}

void encode(ByteWriter& w, const Asset& a)
{
    encode_id(w, a.id.value);
    encode_id(w, a.owner.value);
    w.u64(a.value);
    encode_optional(w, a.lock_target, [&](const LockTarget& t) {
        encode_id(w, t.chain.value);
        encode_id(w, t.address.value);
        encode(w, t.nonce);
    });
}

void encode(ByteWriter& w, const ChainConfig& c)
{
    encode_id(w, c.chain.value);
    w.u32(static_cast<std::uint32_t>(c.validators.size()));
    for (const auto& v : c.validators) encode_id(w, v.value);
    w.u32(static_cast<std::uint32_t>(c.clients.size()));
    for (const auto& v : c.clients) encode_id(w, v.value);
    encode(w, c.consensus);
    w.u32(c.n_max);
    w.u32(static_cast<std::uint32_t>(c.initial_assets.size()));
    for (const auto& [user, assets] : c.initial_assets) {
        encode_id(w, user.value);
        w.u32(static_cast<std::uint32_t>(assets.size()));
        for (const auto& a : assets) encode(w, a);
    }
}

void encode(ByteWriter& w, const Lineage& l)
{
    encode_id(w, l.parent.value);
    w.u8(l.side).u64(l.split_height);
}

void encode(ByteWriter& w, const ClaimOutcome& c)
{
    w.boolean(c.verdict);
    encode_id(w, c.claimer.value);
    encode_id(w, c.asset.value);
    encode_id(w, c.source_chain.value);
}

void encode(ByteWriter& w, const ClaimRecord& c)
{
    encode(w, c.nonce);
    w.boolean(c.verdict);
    encode_id(w, c.claimer.value);
}

namespace {
void encode_lock(ByteWriter& w, const LockTx& p)
{
    encode_id(w, p.asset.value);
    w.u64(p.value);
    encode_id(w, p.target_chain.value);
    encode_id(w, p.target_address.value);
    encode(w, p.nonce);
}

LockTx decode_lock(ByteReader& r)
{
    LockTx p;
    p.asset = decode_id<AssetId>(r);
    p.value = r.u64();
    p.target_chain = decode_id<ChainId>(r);
    p.target_address = decode_id<UserId>(r);
    p.nonce = decode_nonce(r);
    return p;
}
} // namespace

void encode(ByteWriter& w, const TxPayload& payload)
{
    w.u8(static_cast<std::uint8_t>(payload.index()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RegisterTx> || std::is_same_v<T, ConfigUpdateTx>) {
                encode(w, p.account);
            } else if constexpr (std::is_same_v<T, AssetCreateTx>) {
                encode_id(w, p.asset.value);
                w.u64(p.value);
            } else if constexpr (std::is_same_v<T, AssetTransferTx>) {
                encode_id(w, p.asset.value);
                encode_id(w, p.to.value);
            } else if constexpr (std::is_same_v<T, LockTx>) {
                encode_lock(w, p);
            } else if constexpr (std::is_same_v<T, ClaimTx>) {
                encode_id(w, p.source_chain.value);
                encode_lock(w, p.lock);
                w.digest(p.lock_tx_digest);
                encode_id(w, p.claimer.value);
                w.boolean(p.proof_valid);
            } else if constexpr (std::is_same_v<T, ResolveTx>) {
                encode(w, p.nonce);
                encode_id(w, p.asset.value);
                w.boolean(p.claimed);
                w.digest(p.proof_digest);
            } else if constexpr (std::is_same_v<T, PredicateEvalTx>) {
                encode_id(w, p.source_chain.value);
                w.digest(p.statement_digest);
                w.boolean(p.verdict);
            }
        },
        payload);
}

void encode(ByteWriter& w, const Transaction& tx)
{
    encode(w, tx.payload);
    encode_id(w, tx.submitter.value);
    encode(w, tx.signature);
}

void encode(ByteWriter& w, const Genesis& g)
{
    encode(w, g.config);
    w.u32(static_cast<std::uint32_t>(g.accounts.size()));
    for (const auto& a : g.accounts) encode(w, a);
    w.u32(static_cast<std::uint32_t>(g.claim_outcomes.size()));
    for (const auto& [nonce, c] : g.claim_outcomes) {
        encode(w, nonce);
        encode(w, c);
    }
    w.u32(static_cast<std::uint32_t>(g.claim_log.size()));
    for (const auto& [digest, c] : g.claim_log) {
        w.digest(digest);
        encode(w, c);
    }
    encode_optional(w, g.lineage, [&](const Lineage& l) { encode(w, l); });
    w.u32(static_cast<std::uint32_t>(g.merged_from.size()));
    for (const auto& c : g.merged_from) encode_id(w, c.value);
}

void encode(ByteWriter& w, const Block& b)
{
    w.u64(b.height);
    w.digest(b.parent_digest);
    encode_optional(w, b.genesis, [&](const Genesis& g) { encode(w, g); });
    w.u32(static_cast<std::uint32_t>(b.transactions.size()));
    for (const auto& tx : b.transactions) encode(w, tx);
    w.digest(b.digest);
}

Fraction decode_fraction(ByteReader& r)
{
    auto num = r.u64();
    auto den = r.u64();
    if (num > INT64_MAX || den > INT64_MAX) throw Error(Errc::ParseError, "fraction out of range");
    return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

Nonce decode_nonce(ByteReader& r)
{
    Nonce n;
    auto raw = r.raw(n.bytes.size());
    std::copy(raw.begin(), raw.end(), n.bytes.begin());
    return n;
}

crypto::PublicKey decode_public_key(ByteReader& r) { return {r.field()}; }
crypto::Signature decode_signature(ByteReader& r) { return {r.field()}; }

consensus::ConsensusParams decode_consensus(ByteReader& r)
{
    consensus::ConsensusParams p;
    p.alpha = decode_fraction(r);
    auto kind = r.u8();
    if (kind != 1 && kind != 2) throw Error(Errc::ParseError, "invalid consensus kind");
    p.kind = static_cast<consensus::ConsensusKind>(kind);
    return p;
}

Account decode_account(ByteReader& r)
{
    Account a;
    a.user = decode_id<UserId>(r);
    a.public_key = decode_public_key(r);
    a.role = decode_role(r);
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        auto k = r.string_field();
        a.metadata[k] = r.string_field();
    }
    return a;
}

Asset decode_asset(ByteReader& r)
{
    Asset a;
    a.id = decode_id<AssetId>(r);
    a.owner = decode_id<UserId>(r);
    a.value = r.u64();
    if (r.boolean()) {
        LockTarget t;
        t.chain = decode_id<ChainId>(r);
        t.address = decode_id<UserId>(r);
        t.nonce = decode_nonce(r);
        a.lock_target = std::move(t);
    }
    return a;
}

ChainConfig decode_chain_config(ByteReader& r)
{
    ChainConfig c;
    c.chain = decode_id<ChainId>(r);
    auto nv = r.u32();
    for (std::uint32_t i = 0; i < nv; ++i) c.validators.insert(decode_id<UserId>(r));
    auto nc = r.u32();
    for (std::uint32_t i = 0; i < nc; ++i) c.clients.insert(decode_id<UserId>(r));
    c.consensus = decode_consensus(r);
    c.n_max = r.u32();
    auto na = r.u32();
    for (std::uint32_t i = 0; i < na; ++i) {
        auto user = decode_id<UserId>(r);
        auto count = r.u32();
        auto& list = c.initial_assets[user];
        for (std::uint32_t j = 0; j < count; ++j) list.push_back(decode_asset(r));
    }
    return c;
}

Lineage decode_lineage(ByteReader& r)
{
    Lineage l;
    l.parent = decode_id<ChainId>(r);
    l.side = r.u8();
    l.split_height = r.u64();
    return l;
}

ClaimOutcome decode_claim_outcome(ByteReader& r)
{
    ClaimOutcome c;
    c.verdict = r.boolean();
    c.claimer = decode_id<UserId>(r);
    c.asset = decode_id<AssetId>(r);
    c.source_chain = decode_id<ChainId>(r);
    return c;
}

ClaimRecord decode_claim_record(ByteReader& r)
{
    ClaimRecord c;
    c.nonce = decode_nonce(r);
    c.verdict = r.boolean();
    c.claimer = decode_id<UserId>(r);
    return c;
}

TxPayload decode_payload(ByteReader& r)
{
    auto kind = static_cast<TxKind>(r.u8());
    switch (kind) {
    case TxKind::Register: return RegisterTx{decode_account(r)};
    case TxKind::ConfigUpdate: return ConfigUpdateTx{decode_account(r)};
    case TxKind::AssetCreate: {
        AssetCreateTx p;
        p.asset = decode_id<AssetId>(r);
        p.value = r.u64();
        return p;
    }
    case TxKind::AssetTransfer: {
        AssetTransferTx p;
        p.asset = decode_id<AssetId>(r);
        p.to = decode_id<UserId>(r);
        return p;
    }
    case TxKind::Lock: return decode_lock(r);
    case TxKind::Claim: {
        ClaimTx p;
        p.source_chain = decode_id<ChainId>(r);
        p.lock = decode_lock(r);
        p.lock_tx_digest = r.digest();
        p.claimer = decode_id<UserId>(r);
        p.proof_valid = r.boolean();
        return p;
    }
    case TxKind::Resolve: {
        ResolveTx p;
        p.nonce = decode_nonce(r);
        p.asset = decode_id<AssetId>(r);
        p.claimed = r.boolean();
        p.proof_digest = r.digest();
        return p;
    }
    case TxKind::PredicateEval: {
        PredicateEvalTx p;
        p.source_chain = decode_id<ChainId>(r);
        p.statement_digest = r.digest();
        p.verdict = r.boolean();
        return p;
    }
    }
    throw Error(Errc::ParseError, "unknown transaction kind");
}

Transaction decode_transaction(ByteReader& r)
{
    Transaction tx;
    tx.payload = decode_payload(r);
    tx.submitter = decode_id<UserId>(r);
    tx.signature = decode_signature(r);
    return tx;
}

Genesis decode_genesis(ByteReader& r)
{
    Genesis g;
    g.config = decode_chain_config(r);
    auto na = r.u32();
    for (std::uint32_t i = 0; i < na; ++i) g.accounts.push_back(decode_account(r));
    auto no = r.u32();
    for (std::uint32_t i = 0; i < no; ++i) {
        auto nonce = decode_nonce(r);
        g.claim_outcomes[nonce] = decode_claim_outcome(r);
    }
    auto nl = r.u32();
    for (std::uint32_t i = 0; i < nl; ++i) {
        auto d = r.digest();
        g.claim_log[d] = decode_claim_record(r);
    }
    if (r.boolean()) g.lineage = decode_lineage(r);
    auto nm = r.u32();
    for (std::uint32_t i = 0; i < nm; ++i) g.merged_from.push_back(decode_id<ChainId>(r));
    return g;
}

Block decode_block(ByteReader& r)
{
    Block b;
    b.height = r.u64();
    b.parent_digest = r.digest();
    if (r.boolean()) b.genesis = decode_genesis(r);
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) b.transactions.push_back(decode_transaction(r));
    b.digest = r.digest();
    return b;
}

} // namespace mitosis::codec

#include "mitosis/xchain/toa.hpp"

#include "mitosis/chain/ecosystem.hpp"
#include "mitosis/core/codec.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis::xchain {

const char* transfer_kind_name(TransferKind k)
{
    switch (k) {
    case TransferKind::Lock: return "lock";
    case TransferKind::Claim: return "claim";
    case TransferKind::Abort: return "abort";
    }
    return "?";
}

Bytes serialize(const TransferProof& proof)
{
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(proof.kind));
    w.field(serialize(proof.inner));
    w.field(codec::to_bytes(proof.tx));
    return std::move(w).bytes();
}

TransferProof deserialize_transfer(ByteView bytes)
{
    ByteReader r(bytes);
    TransferProof proof;
    auto kind = r.u8();
    if (kind < 1 || kind > 3) throw Error(Errc::ParseError, "unknown transfer proof kind");
    proof.kind = static_cast<TransferKind>(kind);
    proof.inner = deserialize_knowledge(r.field());
    auto tx_bytes = r.field();
    ByteReader tr(tx_bytes);
    proof.tx = codec::decode_transaction(tr);
    tr.expect_done();
    r.expect_done();
    return proof;
}

namespace {

const Block& commit_one(chain::Ecosystem& eco, const ChainId& chain_id, const Transaction& tx)
{
    check_transaction(eco.chain(chain_id).state(), tx, eco.scheme());
    const Block& block = eco.chain(chain_id).order(tx.submitter, {tx});
    if (block.transactions.size() != 1 || block.transactions.front() != tx)
        throw Error(Errc::InvalidTransaction, "transaction not committed on " + chain_id.value, block.height);
    return block;
}

bool source_verifies(const chain::Ecosystem& eco, const KnowledgeProof& inner, const FreshnessTag& tag,
                     const ChainId& verifier)
{
    if (!tag_is_genuine(eco, tag, verifier)) return false;
    if (!eco.registry().has_chain(inner.source_chain)) return false;
    const auto& reg = eco.registry();
    auto result = tok_verify_proof(inner, tag, reg.chain(inner.source_chain).config,
                                   reg.validator_accounts(inner.source_chain), eco.scheme(),
                                   lineage_height(eco, verifier));
    return result.accepted;
}

} // namespace

TransferProof toa_lock(chain::Ecosystem& eco, const UserId& owner, const ChainId& source, const AssetId& asset,
                       const ChainId& target_chain, const UserId& target_address, const FreshnessTag& tag)
{
    ChainId src = eco.route(source, owner);
    const auto& state = eco.chain(src).state();
    auto it = state.assets.find(asset);
    if (it == state.assets.end()) throw Error(Errc::UnknownAsset, "unknown asset " + asset.value);
    auto tx = eco.sign_tx(owner, LockTx{asset, it->second.value, target_chain, target_address, tag.nonce});
    const Block& block = commit_one(eco, src, tx);
    auto inner = tok_generate_proof(eco, owner, src, TxInclusion{tx.digest(), block.height}, tag);
    return {TransferKind::Lock, std::move(inner), std::move(tx)};
}

TransferProof toa_claim(chain::Ecosystem& eco, const UserId& claimer, const ChainId& target,
                        const TransferProof& lock_proof, const FreshnessTag& resolve_tag)
{
    const auto* lock = std::get_if<LockTx>(&lock_proof.tx.payload);
    if (lock_proof.kind != TransferKind::Lock || !lock) throw Error(Errc::InvalidProof, "not a lock proof");
    ChainId tgt = eco.route(target, claimer);

    const auto* inclusion = std::get_if<TxInclusion>(&lock_proof.inner.predicate);
    bool valid = inclusion && inclusion->tx_digest == lock_proof.tx.digest() &&
                 eco.registry().descends_from(tgt, lock->target_chain) &&
                 source_verifies(eco, lock_proof.inner, lock_proof.inner.tag, tgt);

    const bool seen = eco.chain(tgt).state().claim_outcomes.count(lock->nonce) != 0;
    auto tx = eco.sign_tx(claimer, ClaimTx{lock_proof.inner.source_chain, *lock, lock_proof.tx.digest(), claimer, valid});
    commit_one(eco, tgt, tx);
    const Digest claim_digest = tx.digest();
    const bool verdict = eco.chain(tgt).state().claim_log.at(claim_digest).verdict;

    Predicate p = seen ? Predicate{ClaimAttempt{claim_digest, verdict}} : Predicate{ClaimSettled{lock->nonce, verdict}};
    auto inner = tok_generate_proof(eco, claimer, tgt, p, resolve_tag);
    return {verdict ? TransferKind::Claim : TransferKind::Abort, std::move(inner), std::move(tx)};
}

Resolution toa_resolve(chain::Ecosystem& eco, const ChainId& source, const TransferProof& proof,
                       const FreshnessTag& tag)
{
    const auto* claim = std::get_if<ClaimTx>(&proof.tx.payload);
    if (proof.kind == TransferKind::Lock || !claim) throw Error(Errc::InvalidProof, "not a claim or abort proof");
    const Nonce& nonce = claim->lock.nonce;
    const AssetId& asset = claim->lock.asset;

    std::optional<ChainId> holder;
    for (const auto& id : eco.active_chains()) {
        if (!eco.registry().descends_from(id, source)) continue;
        const auto& assets = eco.chain(id).state().assets;
        auto it = assets.find(asset);
        if (it != assets.end() && it->second.locked() && it->second.lock_target->nonce == nonce) {
            holder = id;
            break;
        }
    }
    if (!holder) throw Error(Errc::UnknownLock, "no open lock " + nonce.hex() + " on " + asset.value);
    const Asset& locked = eco.chain(*holder).state().assets.at(asset);

    const bool claimed = proof.kind == TransferKind::Claim;
    const auto* settled = std::get_if<ClaimSettled>(&proof.inner.predicate);
    bool valid = settled && settled->nonce == nonce && settled->verdict == claimed &&
                 eco.registry().descends_from(proof.inner.source_chain, locked.lock_target->chain) &&
                 source_verifies(eco, proof.inner, tag, *holder);
    if (!valid) throw Error(Errc::InvalidProof, "resolution proof rejected for lock " + nonce.hex());

    Digest proof_digest = crypto::sha256(serialize(proof.inner));
    auto tx = eco.sign_tx(locked.owner, ResolveTx{nonce, asset, claimed, proof_digest});
    commit_one(eco, *holder, tx);
    return claimed ? Resolution::Claimed : Resolution::Aborted;
}

std::size_t spendable_instances(const chain::Ecosystem& eco, const AssetId& asset)
{
    std::set<Nonce> claimed;
    for (const auto& id : eco.active_chains())
        for (const auto& [nonce, outcome] : eco.chain(id).state().claim_outcomes)
            if (outcome.verdict) claimed.insert(nonce);
    std::size_t count = 0;
    for (const auto& id : eco.active_chains()) {
        const auto& assets = eco.chain(id).state().assets;
        auto it = assets.find(asset);
        if (it == assets.end()) continue;
        if (!it->second.locked() || !claimed.count(it->second.lock_target->nonce)) ++count;
    }
    return count;
}

} // namespace mitosis::xchain

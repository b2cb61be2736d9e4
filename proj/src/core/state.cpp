#include "mitosis/core/state.hpp"

#include "mitosis/core/codec.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"
#include "mitosis/crypto/signature.hpp"

namespace mitosis {

std::uint64_t ChainState::total_value() const
{
    std::uint64_t total = 0;
    for (const auto& [id, asset] : assets) total += asset.value;
    return total;
}

Digest ChainState::digest() const
{
    ByteWriter w;
    w.field(std::string_view("MITOSIS/STATE"));
    codec::encode(w, config);
    w.u32(static_cast<std::uint32_t>(accounts.size()));
    for (const auto& [id, a] : accounts) codec::encode(w, a);
    w.u32(static_cast<std::uint32_t>(assets.size()));
    for (const auto& [id, a] : assets) codec::encode(w, a);
    w.u64(last_height);
    w.digest(last_digest);
    w.u32(static_cast<std::uint32_t>(claim_outcomes.size()));
    for (const auto& [nonce, c] : claim_outcomes) {
        codec::encode(w, nonce);
        codec::encode(w, c);
    }
    w.u32(static_cast<std::uint32_t>(claim_log.size()));
    for (const auto& [d, c] : claim_log) {
        w.digest(d);
        codec::encode(w, c);
    }
    w.boolean(lineage.has_value());
    if (lineage) codec::encode(w, *lineage);
    w.u32(static_cast<std::uint32_t>(merged_from.size()));
    for (const auto& c : merged_from) w.field(c.value);
    w.u64(predicate_evaluations);
    return crypto::sha256(w.bytes());
}

ChainState state_from_genesis(const Block& genesis)
{
    if (!genesis.genesis || genesis.height != 0) throw Error(Errc::BrokenChain, "missing genesis", 0);
    const auto& g = *genesis.genesis;
    if (g.config.validators.empty()) throw Error(Errc::InvalidTransaction, "genesis without validators", 0);
    if (g.config.n_max < 2) throw Error(Errc::InvalidTransaction, "n_max must be >= 2", 0);

    ChainState s;
    s.config = g.config;
    for (const auto& a : g.accounts) {
        if (!s.accounts.emplace(a.user, a).second)
            throw Error(Errc::InvalidTransaction, "duplicate genesis account " + a.user.value, 0);
    }
    for (const auto& v : g.config.validators)
        if (!s.is_member(v)) throw Error(Errc::UnknownUser, "validator without account: " + v.value, 0);
    for (const auto& c : g.config.clients)
        if (!s.is_member(c)) throw Error(Errc::UnknownUser, "client without account: " + c.value, 0);
    for (const auto& [owner, list] : g.config.initial_assets) {
        for (const auto& asset : list) {
            if (asset.owner != owner || !s.is_member(owner))
                throw Error(Errc::UnknownUser, "asset owner mismatch for " + asset.id.value, 0);
            if (!s.assets.emplace(asset.id, asset).second)
                throw Error(Errc::InvalidTransaction, "duplicate asset id " + asset.id.value, 0);
        }
    }
    s.claim_outcomes = g.claim_outcomes;
    s.claim_log = g.claim_log;
    s.lineage = g.lineage;
    s.merged_from = g.merged_from;
    s.last_height = 0;
    s.last_digest = genesis.digest;
    return s;
}

namespace {

const Account& member(const ChainState& s, const UserId& u)
{
    auto it = s.accounts.find(u);
    if (it == s.accounts.end()) throw Error(Errc::UnknownUser, "unknown user " + u.value);
    return it->second;
}

const Asset& asset_of(const ChainState& s, const AssetId& id)
{
    auto it = s.assets.find(id);
    if (it == s.assets.end()) throw Error(Errc::UnknownAsset, "unknown asset " + id.value);
    return it->second;
}

void verify_sig(const crypto::SignatureScheme& scheme, const crypto::PublicKey& pk, const Transaction& tx)
{
    if (!scheme.verify(pk, tx.signing_bytes(), tx.signature))
        throw Error(Errc::InvalidSignature, std::string(tx_kind_name(tx.kind())) + " by " + tx.submitter.value);
}

const Asset& owned_unlocked(const ChainState& s, const AssetId& id, const UserId& owner)
{
    const auto& a = asset_of(s, id);
    if (a.owner != owner) throw Error(Errc::NotOwner, owner.value + " does not own " + id.value);
    if (a.locked()) throw Error(Errc::AssetLocked, id.value + " is locked");
    return a;
}

bool claim_verdict(const ChainState& s, const ClaimTx& p)
{
    return p.proof_valid && p.lock.target_address == p.claimer && !s.claim_outcomes.count(p.lock.nonce) &&
           !s.assets.count(p.lock.asset);
}

} // namespace

void check_transaction(const ChainState& s, const Transaction& tx, const crypto::SignatureScheme& scheme)
{
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RegisterTx> || std::is_same_v<T, ConfigUpdateTx>) {
                constexpr Role expected = std::is_same_v<T, RegisterTx> ? Role::Client : Role::Validator;
                if (p.account.user != tx.submitter || p.account.role != expected)
                    throw Error(Errc::InvalidTransaction, "registration must be self-submitted with matching role");
                verify_sig(scheme, p.account.public_key, tx);
                if (s.is_member(p.account.user))
                    throw Error(Errc::AlreadyMember, p.account.user.value + " already a member");
            } else {
                verify_sig(scheme, member(s, tx.submitter).public_key, tx);
                if constexpr (std::is_same_v<T, AssetCreateTx>) {
                    if (s.assets.count(p.asset))
                        throw Error(Errc::InvalidTransaction, "asset id in use: " + p.asset.value);
                } else if constexpr (std::is_same_v<T, AssetTransferTx>) {
                    owned_unlocked(s, p.asset, tx.submitter);
                    member(s, p.to);
                } else if constexpr (std::is_same_v<T, LockTx>) {
                    const auto& a = owned_unlocked(s, p.asset, tx.submitter);
                    if (a.value != p.value) throw Error(Errc::InvalidTransaction, "lock value mismatch");
                } else if constexpr (std::is_same_v<T, ClaimTx>) {
                    if (p.claimer != tx.submitter) throw Error(Errc::InvalidTransaction, "claim not by claimer");
                } else if constexpr (std::is_same_v<T, ResolveTx>) {
                    auto it = s.assets.find(p.asset);
                    if (it == s.assets.end() || !it->second.locked() || it->second.lock_target->nonce != p.nonce)
                        throw Error(Errc::UnknownLock, "no open lock " + p.nonce.hex() + " on " + p.asset.value);
                }
            }
        },
        tx.payload);
}

void apply_in_place(ChainState& s, const Transaction& tx, const crypto::SignatureScheme& scheme)
{
    check_transaction(s, tx, scheme);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RegisterTx>) {
                s.accounts.emplace(p.account.user, p.account);
                s.config.clients.insert(p.account.user);
            } else if constexpr (std::is_same_v<T, ConfigUpdateTx>) {
                s.accounts.emplace(p.account.user, p.account);
                s.config.validators.insert(p.account.user);
            } else if constexpr (std::is_same_v<T, AssetCreateTx>) {
                s.assets.emplace(p.asset, Asset{p.asset, tx.submitter, p.value, std::nullopt});
            } else if constexpr (std::is_same_v<T, AssetTransferTx>) {
                s.assets.at(p.asset).owner = p.to;
            } else if constexpr (std::is_same_v<T, LockTx>) {
                s.assets.at(p.asset).lock_target = LockTarget{p.target_chain, p.target_address, p.nonce};
            } else if constexpr (std::is_same_v<T, ClaimTx>) {
                bool verdict = claim_verdict(s, p);
                if (!s.claim_outcomes.count(p.lock.nonce))
                    s.claim_outcomes.emplace(p.lock.nonce,
                                             ClaimOutcome{verdict, p.claimer, p.lock.asset, p.source_chain});
                s.claim_log[tx.digest()] = ClaimRecord{p.lock.nonce, verdict, p.claimer};
                if (verdict) s.assets.emplace(p.lock.asset, Asset{p.lock.asset, p.claimer, p.lock.value, std::nullopt});
            } else if constexpr (std::is_same_v<T, ResolveTx>) {
                if (p.claimed)
                    s.assets.erase(p.asset);
                else
                    s.assets.at(p.asset).lock_target.reset();
            } else if constexpr (std::is_same_v<T, PredicateEvalTx>) {
                ++s.predicate_evaluations;
            }
        },
        tx.payload);
}

ChainState apply_transaction(const ChainState& state, const Transaction& tx, const crypto::SignatureScheme& scheme)
{
    ChainState next = state;
    apply_in_place(next, tx, scheme);
    return next;
}

void apply_block(ChainState& state, const Block& block, const crypto::SignatureScheme& scheme)
{
    if (block.genesis || block.height != state.last_height + 1 || block.parent_digest != state.last_digest ||
        block.digest != block.compute_digest())
        throw Error(Errc::BrokenChain, "block does not extend the ledger", block.height);
    for (const auto& tx : block.transactions) {
        try {
            apply_in_place(state, tx, scheme);
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), block.height);
        }
    }
    state.last_height = block.height;
    state.last_digest = block.digest;
}

ChainState replay(const Ledger& ledger, const crypto::SignatureScheme& scheme)
{
    if (ledger.empty()) throw Error(Errc::EmptyLedger, "nothing to replay");
    const auto& genesis = ledger.front();
    if (genesis.digest != genesis.compute_digest()) throw Error(Errc::BrokenChain, "genesis digest", 0);
    ChainState state = state_from_genesis(genesis);
    for (std::size_t h = 1; h < ledger.size(); ++h) apply_block(state, ledger[h], scheme);
    return state;
}

} // namespace mitosis

#include <doctest.h>

#include "fixtures.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/xchain/toa.hpp"

using namespace mitosis;
using namespace mitosis::xchain;
using mitosis::testing::make_asset;
using mitosis::testing::make_config;
using mitosis::testing::make_users;

namespace {

struct TwoChains {
    chain::Ecosystem eco;
    crypto::Rng nonces{5, 0, "test/nonces"};
    std::vector<UserId> vs;
    std::vector<UserId> vt;
    UserId alice{"alice"};
    UserId bob{"bob"};
    ChainId S{"S"};
    ChainId T{"T"};

    explicit TwoChains(chain::EcosystemOptions opts = {}) : eco(opts)
    {
        vs = make_users(eco, "s", 4, Role::Validator);
        vt = make_users(eco, "t", 4, Role::Validator);
        eco.register_user(alice, Role::Client);
        eco.register_user(bob, Role::Client);
        auto cs = make_config("S", vs, {alice}, consensus::ConsensusParams::bft(), 4);
        cs.initial_assets[alice] = {make_asset("coin", alice, 50), make_asset("gem", alice, 7)};
        eco.chain_creation(cs);
        eco.chain_creation(make_config("T", vt, {bob}, consensus::ConsensusParams::bft(), 4));
    }

    FreshnessTag tag_from(const ChainId& c, std::uint64_t window = kDefaultTagWindow)
    {
        return issue_tag(eco, c, nonces, window);
    }

    // Advances a chain by `blocks` empty blocks.
    void tick(const ChainId& c, int blocks)
    {
        for (int i = 0; i < blocks; ++i) eco.chain(c).order(eco.chain(c).correct_validators().front(), {});
    }

    std::uint64_t height(const ChainId& c) { return lineage_height(eco, c); }

    VerifyResult verify(const KnowledgeProof& p, const FreshnessTag& tag, std::uint64_t h)
    {
        const auto& reg = eco.registry();
        return tok_verify_proof(p, tag, reg.chain(p.source_chain).config, reg.validator_accounts(p.source_chain),
                                eco.scheme(), h);
    }
};

Errc error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::ParseError;
}

} // namespace

TEST_CASE("transaction inclusion proof carries a quorum of source signatures")
{
    TwoChains w;
    const auto& block = w.eco.submit(w.S, w.alice, {AssetCreateTx{AssetId("new"), 3}});
    auto tag = w.tag_from(w.T);
    auto proof = tok_generate_proof(w.eco, w.alice, w.S, TxInclusion{block.transactions[0].digest(), 1}, tag);
    CHECK(proof.verdict);
    CHECK(proof.certificate.signatures.size() == 4);
    CHECK(w.verify(proof, tag, w.height(w.T)).accepted);
}

TEST_CASE("generic predicates")
{
    TwoChains w;
    auto tag = w.tag_from(w.T);
    auto proof = tok_generate_proof(w.eco, w.alice, w.S, BalanceAtLeast{w.alice, 57}, tag);
    CHECK(w.verify(proof, tag, w.height(w.T)).accepted);
    CHECK(error_of([&] { tok_generate_proof(w.eco, w.alice, w.S, BalanceAtLeast{w.alice, 58}, tag); }) ==
          Errc::PredicateFalse);
    CHECK(error_of([&] { tok_generate_proof(w.eco, w.alice, w.S, AssetOwnedBy{AssetId("coin"), w.bob}, tag); }) ==
          Errc::PredicateFalse);
    CHECK(error_of([&] { tok_generate_proof(w.eco, w.alice, w.S, TxInclusion{Digest{}, 99}, tag); }) ==
          Errc::PredicateFalse);
    CHECK(error_of([&] { tok_generate_proof(w.eco, w.bob, w.S, BalanceAtLeast{w.alice, 1}, tag); }) ==
          Errc::UnknownUser);
}

TEST_CASE("two refusing validators out of four give NoQuorum")
{
    TwoChains w;
    auto& net = w.eco.network();
    net.inject_fault(w.vs[0], netsim::Fault::byzantine(netsim::Strategy::Withhold), net.now());
    net.inject_fault(w.vs[1], netsim::Fault::crash(), net.now());
    auto tag = w.tag_from(w.T);
    CHECK(error_of([&] { tok_generate_proof(w.eco, w.alice, w.S, BalanceAtLeast{w.alice, 1}, tag); }) ==
          Errc::NoQuorum);
}

TEST_CASE("verification failures and their reasons")
{
    TwoChains w;
    auto tag = w.tag_from(w.T, 10);
    auto proof = tok_generate_proof(w.eco, w.alice, w.S, BalanceAtLeast{w.alice, 1}, tag);
    auto h = w.height(w.T);

    auto short_proof = proof;
    short_proof.certificate.signatures.resize(2);
    CHECK(w.verify(short_proof, tag, h).reason == "quorum");

    CHECK(w.verify(proof, tag, tag.expiry_height).accepted);
    CHECK(w.verify(proof, tag, tag.expiry_height + 1).reason == "stale tag");

    auto other = w.tag_from(w.T);
    CHECK(w.verify(proof, other, h).reason == "tag mismatch");

    auto swapped = proof;
    swapped.predicate = BalanceAtLeast{w.alice, 2};
    CHECK(w.verify(swapped, tag, h).reason == "statement");

    auto substituted = proof;
    substituted.certificate.signatures[0].signer = w.vt[0];
    CHECK(w.verify(substituted, tag, h).reason == "non-member signer");

    auto forged = proof;
    forged.certificate.signatures[0].signature.bytes[3] ^= 0x40;
    CHECK(w.verify(forged, tag, h).reason == "signature");
}

TEST_CASE("proof bytes grow linearly with the number of signers")
{
    TwoChains w;
    auto tag = w.tag_from(w.T);
    auto proof = tok_generate_proof(w.eco, w.alice, w.S, BalanceAtLeast{w.alice, 1}, tag);
    auto bytes = serialize(proof);
    std::size_t expected = 4 + proof.certificate.statement.size() + 4;
    for (const auto& e : proof.certificate.signatures) expected += 8 + e.signer.value.size() + e.signature.bytes.size();
    CHECK(bytes.size() == expected);
    CHECK(serialized_size(proof) == expected);
    auto back = deserialize_knowledge(bytes);
    CHECK(back == proof);

    auto fewer = proof;
    fewer.certificate.signatures.pop_back();
    // Simulated signatures are 32 bytes and ids "sNN" are 3.
    CHECK(serialize(proof).size() - serialize(fewer).size() == 8 + 3 + 32);

    bytes.push_back(0);
    CHECK(error_of([&] { deserialize_knowledge(bytes); }) == Errc::ParseError);
}

TEST_CASE("lock, claim and resolve move an asset exactly once")
{
    TwoChains w;
    auto lock_tag = w.tag_from(w.T);
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, lock_tag);
    CHECK(lock.kind == TransferKind::Lock);
    CHECK(w.eco.chain(w.S).state().assets.at(AssetId("coin")).locked());
    CHECK(w.verify(lock.inner, lock_tag, w.height(w.T)).accepted);
    CHECK(spendable_instances(w.eco, AssetId("coin")) == 1);

    // Locked assets cannot move in-chain.
    auto transfer = w.eco.sign_tx(w.alice, AssetTransferTx{AssetId("coin"), w.vs[0]});
    CHECK(error_of([&] { check_transaction(w.eco.chain(w.S).state(), transfer, w.eco.scheme()); }) ==
          Errc::AssetLocked);
    CHECK(error_of([&] { toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, w.tag_from(w.T)); }) ==
          Errc::AssetLocked);

    auto resolve_tag = w.tag_from(w.S);
    auto claim = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    CHECK(claim.kind == TransferKind::Claim);
    CHECK(w.eco.chain(w.T).state().assets.at(AssetId("coin")).owner == w.bob);
    CHECK(w.eco.chain(w.T).state().assets.at(AssetId("coin")).value == 50);
    CHECK(spendable_instances(w.eco, AssetId("coin")) == 1);

    CHECK(toa_resolve(w.eco, w.S, claim, resolve_tag) == Resolution::Claimed);
    CHECK(w.eco.chain(w.S).state().assets.count(AssetId("coin")) == 0);
    CHECK(spendable_instances(w.eco, AssetId("coin")) == 1);
    CHECK(error_of([&] { toa_resolve(w.eco, w.S, claim, resolve_tag); }) == Errc::UnknownLock);

    // Claiming the same lock again aborts and creates nothing.
    auto again = toa_claim(w.eco, w.bob, w.T, lock, w.tag_from(w.S));
    CHECK(again.kind == TransferKind::Abort);
    CHECK(w.eco.chain(w.T).state().assets.size() == 1);
}

TEST_CASE("a stale lock proof fails successfully and the abort unlocks")
{
    TwoChains w;
    auto lock_tag = w.tag_from(w.T, 2);
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("gem"), w.T, w.bob, lock_tag);
    w.tick(w.T, 3);
    auto resolve_tag = w.tag_from(w.S);
    auto abort = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    CHECK(abort.kind == TransferKind::Abort);
    CHECK(w.eco.chain(w.T).state().assets.count(AssetId("gem")) == 0);
    CHECK_FALSE(w.eco.chain(w.T).state().claim_outcomes.at(std::get<LockTx>(lock.tx.payload).nonce).verdict);
    CHECK(toa_resolve(w.eco, w.S, abort, resolve_tag) == Resolution::Aborted);
    CHECK_FALSE(w.eco.chain(w.S).state().assets.at(AssetId("gem")).locked());
    CHECK(spendable_instances(w.eco, AssetId("gem")) == 1);
}

TEST_CASE("a claim by someone other than the target address aborts")
{
    TwoChains w;
    w.eco.join_chain(UserId("alice"), w.T, Role::Client);
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("gem"), w.T, w.bob, w.tag_from(w.T));
    auto proof = toa_claim(w.eco, w.alice, w.T, lock, w.tag_from(w.S));
    CHECK(proof.kind == TransferKind::Abort);
    // The real recipient can no longer claim this nonce.
    auto late = toa_claim(w.eco, w.bob, w.T, lock, w.tag_from(w.S));
    CHECK(late.kind == TransferKind::Abort);
    CHECK(w.eco.chain(w.T).state().assets.count(AssetId("gem")) == 0);
}

TEST_CASE("invalid resolution proofs leave the source untouched")
{
    TwoChains w;
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, w.tag_from(w.T));
    auto resolve_tag = w.tag_from(w.S);
    auto claim = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    auto before = w.eco.chain(w.S).state();

    auto tampered = claim;
    tampered.inner.certificate.signatures[0].signature.bytes[0] ^= 1;
    tampered.inner.certificate.signatures.resize(3);
    tampered.inner.certificate.signatures.pop_back();
    CHECK(error_of([&] { toa_resolve(w.eco, w.S, tampered, resolve_tag); }) == Errc::InvalidProof);

    // A claim proof relabelled as abort must not unlock.
    auto relabelled = claim;
    relabelled.kind = TransferKind::Abort;
    CHECK(error_of([&] { toa_resolve(w.eco, w.S, relabelled, resolve_tag); }) == Errc::InvalidProof);

    // The abort of a duplicate claim does not settle the lock.
    auto duplicate = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    CHECK(duplicate.kind == TransferKind::Abort);
    CHECK(error_of([&] { toa_resolve(w.eco, w.S, duplicate, resolve_tag); }) == Errc::InvalidProof);

    // A tag the source never issued is rejected.
    auto foreign_tag = w.tag_from(w.T);
    auto foreign = toa_claim(w.eco, w.bob, w.T, lock, foreign_tag);
    CHECK(error_of([&] { toa_resolve(w.eco, w.S, foreign, foreign_tag); }) == Errc::InvalidProof);

    CHECK(w.eco.chain(w.S).state().assets == before.assets);
    CHECK(toa_resolve(w.eco, w.S, claim, resolve_tag) == Resolution::Claimed);
}

TEST_CASE("transfer proofs round trip through bytes")
{
    TwoChains w;
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, w.tag_from(w.T));
    auto bytes = serialize(lock);
    CHECK(deserialize_transfer(bytes) == lock);
    bytes[0] = 9;
    CHECK(error_of([&] { deserialize_transfer(bytes); }) == Errc::ParseError);
}

TEST_CASE("claims follow the target address into a divided target chain")
{
    chain::EcosystemOptions opts;
    opts.assignment = assignment::Scheme::Deterministic;
    TwoChains w(opts);
    auto lock_tag = w.tag_from(w.T);
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, lock_tag);
    auto div = w.eco.chain_division(w.T);
    ChainId home = w.eco.route(w.T, w.bob);
    CHECK((home == div.child1 || home == div.child2));

    auto resolve_tag = w.tag_from(w.S);
    auto claim = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    CHECK(claim.kind == TransferKind::Claim);
    CHECK(claim.inner.source_chain == home);
    CHECK(w.eco.chain(home).state().assets.count(AssetId("coin")) == 1);
    CHECK(toa_resolve(w.eco, w.S, claim, resolve_tag) == Resolution::Claimed);
    CHECK(spendable_instances(w.eco, AssetId("coin")) == 1);
}

TEST_CASE("a lock survives division of the source chain")
{
    chain::EcosystemOptions opts;
    opts.assignment = assignment::Scheme::Deterministic;
    TwoChains w(opts);
    auto lock = toa_lock(w.eco, w.alice, w.S, AssetId("coin"), w.T, w.bob, w.tag_from(w.T));
    w.eco.chain_division(w.S);
    ChainId holder = w.eco.route(w.S, w.alice);
    CHECK(w.eco.chain(holder).state().assets.at(AssetId("coin")).locked());

    auto resolve_tag = w.tag_from(holder);
    auto claim = toa_claim(w.eco, w.bob, w.T, lock, resolve_tag);
    CHECK(claim.kind == TransferKind::Claim);
    CHECK(toa_resolve(w.eco, w.S, claim, resolve_tag) == Resolution::Claimed);
    CHECK(w.eco.chain(holder).state().assets.count(AssetId("coin")) == 0);
}

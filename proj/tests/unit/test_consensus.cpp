#include <doctest.h>

#include "fixtures.hpp"
#include "mitosis/consensus/certificate.hpp"
#include "mitosis/crypto/rng.hpp"

using namespace mitosis;
using mitosis::testing::make_config;
using mitosis::testing::make_users;

namespace {

struct Net {
    chain::Ecosystem eco;
    std::vector<UserId> validators;
    std::vector<UserId> clients;
    ChainId id{"c"};

    Net(int n, consensus::ConsensusParams params, chain::EcosystemOptions opts = {}) : eco(opts)
    {
        validators = make_users(eco, "v", n, Role::Validator);
        clients = make_users(eco, "u", 2, Role::Client);
        eco.chain_creation(make_config("c", validators, clients, params, 100));
    }

    consensus::Chain& chain() { return eco.chain(id); }

    const Block& create(const std::string& asset, std::uint64_t value = 1)
    {
        return eco.submit(id, clients[0], {AssetCreateTx{AssetId(asset), value}});
    }
};

std::vector<Transaction> one_tx(Net& net, const std::string& asset)
{
    return {net.eco.sign_tx(net.clients[0], AssetCreateTx{AssetId(asset), 1})};
}

} // namespace

TEST_CASE("quorum size is the exact ceiling of (1 - alpha) n")
{
    CHECK(consensus::quorum_size(4, Fraction{1, 3}) == 3);
    CHECK(consensus::quorum_size(10, Fraction{1, 2}) == 5);
    CHECK(consensus::quorum_size(1, Fraction{1, 3}) == 1);
    CHECK(consensus::quorum_size(5, Fraction{1, 3}) == 4);
    CHECK(consensus::quorum_size(3, Fraction{1, 2}) == 2);
    CHECK_THROWS_AS(consensus::quorum_size(0, Fraction{1, 3}), Error);
    CHECK_THROWS_AS(consensus::quorum_size(4, Fraction{2, 3}), Error);
    CHECK_THROWS_AS(consensus::quorum_size(4, Fraction{0, 1}), Error);
}

TEST_CASE("quorum size is monotone and within one of (1 - alpha) n")
{
    for (auto alpha : {Fraction{1, 3}, Fraction{1, 2}, Fraction{2, 7}, Fraction{3, 10}}) {
        std::int64_t previous = 0;
        for (std::int64_t n = 1; n <= 300; ++n) {
            auto q = consensus::quorum_size(n, alpha);
            CHECK(q >= previous);
            previous = q;
            // (1 - a) n <= q < (1 - a) n + 1, multiplied through by den.
            auto lhs = (alpha.den() - alpha.num()) * n;
            CHECK(lhs <= q * alpha.den());
            CHECK(q * alpha.den() < lhs + alpha.den());
        }
    }
}

TEST_CASE("all honest validators commit identical blocks")
{
    Net net(4, consensus::ConsensusParams::bft());
    const auto& block = net.create("a1", 7);
    CHECK(block.height == 1);
    CHECK(block.transactions.size() == 1);
    for (const auto& [id, r] : net.chain().replicas()) {
        REQUIRE(r.ledger.size() == 2);
        CHECK(r.ledger[1].digest == block.digest);
        CHECK(r.state.assets.at(AssetId("a1")).value == 7);
    }
    CHECK(net.chain().safety_violations() == 0);
}

TEST_CASE("ordering costs n batch messages plus n squared votes")
{
    for (int n : {1, 4, 7}) {
        Net net(n, consensus::ConsensusParams::bft());
        net.create("a");
        CHECK(net.eco.network().messages(net.id, "order") == static_cast<std::uint64_t>(n + n * n));
    }
}

TEST_CASE("one crash out of four is tolerated at alpha 1/3")
{
    Net net(4, consensus::ConsensusParams::bft());
    net.eco.network().inject_fault(net.validators[2], netsim::Fault::crash(), net.eco.network().now());
    const auto& block = net.create("a1");
    CHECK(block.height == 1);
    CHECK(net.chain().correct_validators().size() == 3);
    for (const auto& v : net.chain().correct_validators()) CHECK(net.chain().replica(v).state.last_height == 1);
}

TEST_CASE("two crashes out of four stall the chain")
{
    Net net(4, consensus::ConsensusParams::bft());
    auto now = net.eco.network().now();
    net.eco.network().inject_fault(net.validators[0], netsim::Fault::crash(), now);
    net.eco.network().inject_fault(net.validators[3], netsim::Fault::crash(), now);
    try {
        net.create("a1");
        FAIL("expected Stalled");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Stalled);
    }
}

TEST_CASE("crash scheduled in the future takes effect at its tick")
{
    Net net(4, consensus::ConsensusParams::bft());
    auto& network = net.eco.network();
    network.inject_fault(net.validators[1], netsim::Fault::crash(), network.now() + 1000000);
    CHECK(network.fault(net.validators[1]).is_correct());
    net.create("a1");
    network.advance_to(network.now() + 1000000);
    CHECK(network.is_crashed(net.validators[1]));
    CHECK_THROWS_AS(network.inject_fault(UserId("nobody"), netsim::Fault::crash(), network.now()), Error);
}

TEST_CASE("an equivocator cannot split correct validators")
{
    // Every position of the equivocator, under many randomized delay schedules.
    for (int who = 0; who < 4; ++who) {
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            chain::EcosystemOptions opts;
            opts.seed = seed;
            opts.delay = {1, 9};
            Net net(4, consensus::ConsensusParams::bft(), opts);
            auto& network = net.eco.network();
            network.inject_fault(net.validators[who], netsim::Fault::byzantine(netsim::Strategy::Equivocate),
                                 network.now());
            auto b1 = net.eco.sign_tx(net.clients[0], AssetCreateTx{AssetId("x"), 1});
            auto b2 = net.eco.sign_tx(net.clients[1], AssetCreateTx{AssetId("y"), 1});
            net.chain().order(net.clients[0], {b1, b2});
            net.chain().order(net.clients[0], one_tx(net, "z"));
            CHECK(net.chain().safety_violations() == 0);
            const auto& ref = net.chain().reference();
            CHECK(ref.state.last_height == 2);
            CHECK(ref.ledger[1].transactions.size() == 2);
        }
    }
}

TEST_CASE("consistency holds over randomized fault schedules within the bound")
{
    crypto::Rng rng(7, 0, "test/faults");
    for (int trial = 0; trial < 60; ++trial) {
        chain::EcosystemOptions opts;
        opts.seed = 100 + trial;
        opts.delay = {1, 6};
        int n = 4 + static_cast<int>(rng.below(6));
        auto params = rng.below(2) ? consensus::ConsensusParams::bft() : consensus::ConsensusParams::cft();
        Net net(n, params, opts);
        // Largest f with f < alpha n.
        int f_max = static_cast<int>(params.alpha.ceil_mul(n)) - 1;
        int f = f_max > 0 ? static_cast<int>(rng.below(f_max + 1)) : 0;
        auto& network = net.eco.network();
        for (int i = 0; i < f; ++i) {
            auto kind = rng.below(4);
            netsim::Fault fault = kind == 0 ? netsim::Fault::crash()
                                            : netsim::Fault::byzantine(static_cast<netsim::Strategy>(kind - 1));
            network.inject_fault(net.validators[static_cast<std::size_t>(i)], fault, network.now());
        }
        for (int h = 0; h < 3; ++h) net.create("a" + std::to_string(h));
        CHECK(net.chain().safety_violations() == 0);
        for (const auto& v : net.chain().correct_validators()) CHECK(net.chain().replica(v).state.last_height == 3);
    }
}

TEST_CASE("invalid transactions are filtered out of the block")
{
    Net net(4, consensus::ConsensusParams::bft());
    auto good = net.eco.sign_tx(net.clients[0], AssetCreateTx{AssetId("a"), 1});
    auto forged = good;
    forged.submitter = net.clients[1];
    auto dup = net.eco.sign_tx(net.clients[1], AssetCreateTx{AssetId("a"), 2});
    const auto& block = net.chain().order(net.clients[0], {good, forged, dup});
    REQUIRE(block.transactions.size() == 1);
    CHECK(block.transactions[0] == good);
}

TEST_CASE("certificate collection")
{
    Net net(4, consensus::ConsensusParams::bft());
    Bytes stmt{1, 2, 3};
    auto& network = net.eco.network();

    SUBCASE("all honest gives four signers")
    {
        auto cert = net.chain().collect_certificate(net.clients[0], stmt);
        CHECK(cert.signatures.size() == 4);
        CHECK(network.messages(net.id, "certificate") == 8);
        CHECK(consensus::verify_certificate(cert, net.chain().config(), net.chain().accounts(), net.eco.scheme()) ==
              consensus::CertificateCheck::Ok);
    }
    SUBCASE("one refusing validator still meets quorum 3")
    {
        network.inject_fault(net.validators[1], netsim::Fault::byzantine(netsim::Strategy::Withhold), network.now());
        auto cert = net.chain().collect_certificate(net.clients[0], stmt);
        CHECK(cert.signatures.size() == 3);
    }
    SUBCASE("two refusing validators give NoQuorum")
    {
        network.inject_fault(net.validators[1], netsim::Fault::byzantine(netsim::Strategy::Withhold), network.now());
        network.inject_fault(net.validators[2], netsim::Fault::byzantine(netsim::Strategy::BadSig), network.now());
        try {
            net.chain().collect_certificate(net.clients[0], stmt);
            FAIL("expected NoQuorum");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NoQuorum);
        }
    }
}

TEST_CASE("certificate verification rejects malformed signer sets")
{
    Net net(4, consensus::ConsensusParams::bft());
    auto cert = net.chain().collect_certificate(net.clients[0], Bytes{9});
    const auto& config = net.chain().config();
    const auto& accounts = net.chain().accounts();
    const auto& scheme = net.eco.scheme();

    auto dup = cert;
    dup.signatures[1] = dup.signatures[0];
    CHECK(consensus::verify_certificate(dup, config, accounts, scheme) == consensus::CertificateCheck::DuplicateSigner);

    auto outsider = cert;
    outsider.signatures[0].signer = net.clients[0];
    CHECK(consensus::verify_certificate(outsider, config, accounts, scheme) == consensus::CertificateCheck::NonMember);

    auto short_cert = cert;
    short_cert.signatures.resize(2);
    CHECK(consensus::verify_certificate(short_cert, config, accounts, scheme) ==
          consensus::CertificateCheck::BelowQuorum);

    auto tampered = cert;
    tampered.statement = Bytes{8};
    CHECK(consensus::verify_certificate(tampered, config, accounts, scheme) ==
          consensus::CertificateCheck::BadSignature);
}

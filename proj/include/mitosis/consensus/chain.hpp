#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "mitosis/consensus/certificate.hpp"
#include "mitosis/consensus/messages.hpp"
#include "mitosis/core/state.hpp"
#include "mitosis/crypto/signature.hpp"
#include "mitosis/netsim/network.hpp"

namespace mitosis::consensus {

// One validator's copy of a chain.
struct Replica {
    UserId id;
    crypto::KeyPair keys;
    Ledger ledger;
    ChainState state;
    // Set once the validator commits to a division or fusion snapshot.
    std::optional<std::uint64_t> halted_at;

    struct Tally {
        std::shared_ptr<const Block> block;
        std::set<UserId> voters;
    };
    std::uint64_t voted_height = 0;
    std::map<Digest, Tally> tallies;
    std::set<Digest> rejected;
};

struct Endorsement {
    UserId signer;
    Bytes statement;
    crypto::Signature signature;
};

// A chain replicated by its validators over the simulated network.
//
// Consensus is leaderless quorum collection: the submitter hands a batch to
// every validator, each correct validator deterministically builds the same
// block from its committed state and broadcasts a signed vote, and a
// validator commits the first well-formed block for which it holds
// quorum_size votes from distinct validators.
class Chain {
public:
    Chain(const Block& genesis, const std::map<UserId, crypto::KeyPair>& validator_keys,
          netsim::Network& network, const crypto::SignatureScheme& scheme, netsim::Tick stall_timeout);

    Chain(const Chain&) = delete;
    Chain& operator=(const Chain&) = delete;

    const ChainId& id() const { return id_; }
    // Public view (what the membership registry publishes).
    const ChainConfig& config() const { return config_; }
    const std::map<UserId, Account>& accounts() const { return accounts_; }
    std::int64_t quorum() const;

    bool has_replica(const UserId& v) const { return replicas_.count(v) != 0; }
    const Replica& replica(const UserId& v) const;
    Replica& replica_mut(const UserId& v);
    const std::map<UserId, Replica>& replicas() const { return replicas_; }

    // Correct validators in id order.
    std::vector<UserId> correct_validators() const;
    // State/ledger of the lowest-id correct validator that holds the highest
    // committed height. Throws Stalled when there is no correct validator.
    const Replica& reference() const;
    const ChainState& state() const { return reference().state; }
    const Ledger& ledger() const { return reference().ledger; }
    std::uint64_t height() const { return reference().state.last_height; }

    // Orders one batch at the next height. Throws Error{Stalled} when not every
    // correct validator commits it before the stall timeout.
    const Block& order(const UserId& submitter, std::vector<Transaction> batch);

    // Asks every validator to sign the statement derived by `rule` at
    // `height`; returns every well-formed response, unverified.
    std::vector<Endorsement> collect(const UserId& requester, std::uint64_t height, StatementRule rule);

    // Collects signatures over a fixed statement. Throws NoQuorum.
    QuorumCertificate collect_certificate(const UserId& requester, const Bytes& statement);

    // Keeps only endorsements over `statement` from distinct current
    // validators with valid signatures.
    QuorumCertificate certificate_from(const std::vector<Endorsement>& endorsements, const Bytes& statement) const;

    // New validator replica bootstrapped from a correct validator's ledger.
    void add_replica(const UserId& v, const crypto::KeyPair& keys);
    // Refreshes the public view after committed membership changes.
    void refresh_public_view();

    void halt_at(std::uint64_t height);
    void resume();
    bool halted() const { return halted_; }

    // Correct validators disagreeing on a committed block at the same height.
    std::uint64_t safety_violations() const;

    void on_message(const netsim::Envelope& env);

    std::uint64_t messages() const { return network_.messages(id_); }

private:
    void handle_batch(Replica& r, const netsim::Envelope& env, const BatchMsg& msg);
    void handle_vote(Replica& r, const netsim::Envelope& env, const VoteMsg& msg);
    void handle_sign_request(Replica& r, const netsim::Envelope& env, const SignRequestMsg& msg);
    void broadcast(const Replica& from, const MessagePtr& msg, const std::string& label);
    bool run_until(const std::function<bool()>& done);
    crypto::Signature sign_as(const Replica& r, const Bytes& statement, bool corrupt) const;

    ChainId id_;
    netsim::Network& network_;
    const crypto::SignatureScheme& scheme_;
    netsim::Tick stall_timeout_;
    ChainConfig config_;
    std::map<UserId, Account> accounts_;
    std::map<UserId, Replica> replicas_;
    bool halted_ = false;

    std::uint64_t next_request_ = 1;
    std::map<std::uint64_t, std::vector<Endorsement>> responses_;
};

} // namespace mitosis::consensus

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mitosis/assignment/assignment.hpp"
#include "mitosis/chain/reconfig.hpp"
#include "mitosis/chain/registry.hpp"
#include "mitosis/consensus/chain.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/netsim/network.hpp"

namespace mitosis::chain {

// Decides whether a user may join a chain as a validator.
using AccessPolicy = std::function<bool(const Account&, const ChainConfig&)>;
// Division trigger evaluated by each validator on its committed state.
using TriggerPredicate = std::function<bool(const ChainState&)>;

bool size_trigger(const ChainState& state);

struct EcosystemOptions {
    std::uint64_t seed = 1;
    crypto::SchemeKind signature = crypto::SchemeKind::Simulated;
    netsim::DelayModel delay{1, 1};
    netsim::Tick stall_timeout = 1000;
    assignment::Scheme assignment = assignment::Scheme::Randomized;
    std::uint64_t beacon_lookback = 1;
};

enum class DivisionPhase : std::uint8_t { Idle, Proposed, Acked, Assigned, Reconfigured };

const char* phase_name(DivisionPhase p);

// One validator's view of a division in progress.
struct DivisionState {
    ChainId chain;
    UserId initiator;
    std::uint64_t agreed_height = 0;
    DivisionPhase phase = DivisionPhase::Idle;
    // Verified acks over the accepted DIVIDE statement.
    std::map<UserId, crypto::Signature> acks;
    // Verified acks that arrived before this validator accepted a DIVIDE.
    std::vector<std::pair<UserId, consensus::DivideAckMsg>> early;
    std::optional<Errc> rejected;
    // RECONFIG statement this validator is willing to certify.
    Bytes reconfig_statement;
};

struct DivisionResult {
    ChainId parent;
    ChainId child1;
    ChainId child2;
    std::uint64_t agreed_height = 0;
    assignment::AssignmentOutcome assignment;
    consensus::QuorumCertificate certificate;
};

// Statement certified by the parent's validators before the membership
// registry accepts a division.
Bytes reconfig_statement(const ChainId& parent, std::uint64_t agreed_height, const Digest& genesis1,
                         const Digest& genesis2);

// All chains of a deployment, the registry, and the shared network.
class Ecosystem {
public:
    explicit Ecosystem(EcosystemOptions options = {});
    Ecosystem(const Ecosystem&) = delete;
    Ecosystem& operator=(const Ecosystem&) = delete;

    const EcosystemOptions& options() const { return options_; }
    netsim::Network& network() { return network_; }
    const netsim::Network& network() const { return network_; }
    const crypto::SignatureScheme& scheme() const { return *scheme_; }
    const Registry& registry() const { return registry_; }

    // Keys derive from (seed, id). Throws AlreadyMember.
    const Account& register_user(const UserId& user, Role role, std::map<std::string, std::string> metadata = {});
    const crypto::KeyPair& keys(const UserId& user) const;

    // Throws UnregisteredValidator, UnknownUser (client), DuplicateChainId.
    const Block& chain_creation(ChainConfig config);

    bool has_chain(const ChainId& c) const { return chains_.count(c) != 0; }
    consensus::Chain& chain(const ChainId& c);
    const consensus::Chain& chain(const ChainId& c) const;
    std::vector<ChainId> active_chains() const { return registry_.active_chains(); }

    void set_access_policy(AccessPolicy policy) { policy_ = std::move(policy); }
    void set_trigger(TriggerPredicate trigger) { trigger_ = std::move(trigger); }

    // Joins commit as one Register (client) or ConfigUpdate (validator) tx.
    // Throws PolicyRejected, AlreadyMember, UnknownUser, Stalled.
    ChainConfig join_chain(const UserId& user, const ChainId& chain, Role role);
    // Several joins committed in a single block.
    ChainConfig join_batch(const ChainId& chain, const std::vector<UserId>& users, Role role);

    Transaction sign_tx(const UserId& submitter, TxPayload payload) const;
    // Orders signed transactions; returns the committed block.
    const Block& submit(const ChainId& chain, const UserId& submitter, std::vector<TxPayload> payloads);

    // Algorithm 1 driven by `initiator` (default: first correct validator).
    // Throws TriggerNotMet, UnknownInitiator, NoQuorum, StateDivergence; on
    // any failure the parent keeps running.
    DivisionResult chain_division(const ChainId& chain, std::optional<UserId> initiator = std::nullopt);
    // Per-validator state of the most recent division attempt on `chain`.
    const DivisionState* division_state(const ChainId& chain, const UserId& validator) const;

    // Throws AssetIdCollision, NoQuorum, UnknownChain.
    ChainId chain_fusion(const ChainId& a, const ChainId& b);

    // Active chain currently holding `member`, following divisions and
    // fusions from `chain`. Throws UnknownChain if there is none.
    ChainId route(const ChainId& chain, const UserId& member) const;

    std::uint64_t safety_violations() const;

private:
    void deliver(const netsim::Envelope& env);
    void on_divide(const netsim::Envelope& env, const consensus::DivideMsg& msg);
    void on_divide_ack(const netsim::Envelope& env, const consensus::DivideAckMsg& msg);
    void accept_ack(DivisionState& st, consensus::Chain& c, const consensus::Replica& r, const UserId& from,
                    const consensus::DivideAckMsg& msg);
    void advance(DivisionState& st, consensus::Chain& c, const UserId& v);
    const DivisionPlan& plan_for(const consensus::Chain& c, const consensus::Replica& r, std::uint64_t height);
    void start_chain(const Block& genesis);
    void abort_division(const ChainId& chain);

    EcosystemOptions options_;
    netsim::Network network_;
    std::unique_ptr<crypto::SignatureScheme> scheme_;
    Registry registry_;
    std::map<UserId, crypto::KeyPair> keys_;
    std::map<ChainId, std::unique_ptr<consensus::Chain>> chains_;
    AccessPolicy policy_;
    TriggerPredicate trigger_;
    std::map<std::pair<ChainId, UserId>, DivisionState> divisions_;
    // Plans are a pure function of the ledger prefix; cached by its tip digest.
    std::map<Digest, DivisionPlan> plans_;
};

} // namespace mitosis::chain

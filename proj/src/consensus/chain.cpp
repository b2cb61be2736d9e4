#include "mitosis/consensus/chain.hpp"

#include <algorithm>

#include "mitosis/core/error.hpp"

namespace mitosis::consensus {

Chain::Chain(const Block& genesis, const std::map<UserId, crypto::KeyPair>& validator_keys,
             netsim::Network& network, const crypto::SignatureScheme& scheme, netsim::Tick stall_timeout)
    : network_(network), scheme_(scheme), stall_timeout_(stall_timeout)
{
    if (!genesis.genesis) throw Error(Errc::InvalidParams, "chain needs a genesis block");
    ChainState initial = state_from_genesis(genesis);
    id_ = initial.config.chain;
    for (const auto& v : initial.config.validators) {
        auto it = validator_keys.find(v);
        if (it == validator_keys.end()) throw Error(Errc::UnregisteredValidator, "no keys for validator " + v.value);
        Replica r;
        r.id = v;
        r.keys = it->second;
        r.ledger = {genesis};
        r.state = initial;
        replicas_.emplace(v, std::move(r));
    }
    config_ = initial.config;
    accounts_ = initial.accounts;
}

std::int64_t Chain::quorum() const
{
    return config_.consensus.quorum(static_cast<std::int64_t>(config_.validators.size()));
}

const Replica& Chain::replica(const UserId& v) const
{
    auto it = replicas_.find(v);
    if (it == replicas_.end()) throw Error(Errc::UnknownNode, v.value + " is not a validator of " + id_.value);
    return it->second;
}

Replica& Chain::replica_mut(const UserId& v)
{
    auto it = replicas_.find(v);
    if (it == replicas_.end()) throw Error(Errc::UnknownNode, v.value + " is not a validator of " + id_.value);
    return it->second;
}

std::vector<UserId> Chain::correct_validators() const
{
    std::vector<UserId> out;
    for (const auto& [id, r] : replicas_)
        if (network_.is_correct(id)) out.push_back(id);
    return out;
}

const Replica& Chain::reference() const
{
    const Replica* best = nullptr;
    for (const auto& [id, r] : replicas_) {
        if (!network_.is_correct(id)) continue;
        if (!best || r.state.last_height > best->state.last_height) best = &r;
    }
    if (!best) throw Error(Errc::Stalled, "chain " + id_.value + " has no correct validator");
    return *best;
}

crypto::Signature Chain::sign_as(const Replica& r, const Bytes& statement, bool corrupt) const
{
    auto sig = scheme_.sign(r.keys.secret_key, statement);
    if (corrupt && !sig.bytes.empty()) sig.bytes[0] ^= 0x01;
    return sig;
}

void Chain::broadcast(const Replica& from, const MessagePtr& msg, const std::string& label)
{
    for (const auto& v : from.state.config.validators) network_.send(from.id, v, id_, msg, label);
}

bool Chain::run_until(const std::function<bool()>& done)
{
    network_.run(network_.now() + stall_timeout_);
    return done();
}

const Block& Chain::order(const UserId& submitter, std::vector<Transaction> batch)
{
    if (halted_) throw Error(Errc::Stalled, "chain " + id_.value + " is halted");
    const std::uint64_t target = height() + 1;
    auto msg = std::make_shared<const Message>(BatchMsg{target, std::move(batch)});
    for (const auto& v : config_.validators) network_.send(submitter, v, id_, msg, "order");
    bool committed = run_until([&] {
        for (const auto& v : correct_validators())
            if (replicas_.at(v).state.last_height < target) return false;
        return true;
    });
    if (!committed) throw Error(Errc::Stalled, "chain " + id_.value + " did not commit height " + std::to_string(target),
                                target);
    refresh_public_view();
    return reference().ledger.at(target);
}

std::vector<Endorsement> Chain::collect(const UserId& requester, std::uint64_t height, StatementRule rule)
{
    const std::uint64_t request = next_request_++;
    auto msg = std::make_shared<const Message>(
        SignRequestMsg{request, height, std::make_shared<const StatementRule>(std::move(rule))});
    responses_[request];
    for (const auto& v : config_.validators) network_.send(requester, v, id_, msg, "certificate");
    run_until([] { return true; });
    auto out = std::move(responses_[request]);
    responses_.erase(request);
    return out;
}

QuorumCertificate Chain::certificate_from(const std::vector<Endorsement>& endorsements, const Bytes& statement) const
{
    std::map<UserId, crypto::Signature> accepted;
    for (const auto& e : endorsements) {
        if (e.statement != statement || !config_.validators.count(e.signer) || accepted.count(e.signer)) continue;
        auto acct = accounts_.find(e.signer);
        if (acct == accounts_.end()) continue;
        if (!scheme_.verify(acct->second.public_key, statement, e.signature)) continue;
        accepted.emplace(e.signer, e.signature);
    }
    QuorumCertificate cert{statement, {}};
    for (auto& [signer, sig] : accepted) cert.signatures.push_back({signer, sig});
    return cert;
}

QuorumCertificate Chain::collect_certificate(const UserId& requester, const Bytes& statement)
{
    auto endorsements = collect(requester, height(),
                                [statement](const UserId&, const Ledger&, const ChainState&) -> std::optional<Bytes> {
                                    return statement;
                                });
    auto cert = certificate_from(endorsements, statement);
    if (static_cast<std::int64_t>(cert.signatures.size()) < quorum())
        throw Error(Errc::NoQuorum, "chain " + id_.value + ": " + std::to_string(cert.signatures.size()) +
                                        " signatures, quorum is " + std::to_string(quorum()));
    return cert;
}

void Chain::add_replica(const UserId& v, const crypto::KeyPair& keys)
{
    const Replica& ref = reference();
    Replica r;
    r.id = v;
    r.keys = keys;
    r.ledger = ref.ledger;
    r.state = ref.state;
    r.halted_at = ref.halted_at;
    r.voted_height = ref.state.last_height;
    replicas_.insert_or_assign(v, std::move(r));
}

void Chain::refresh_public_view()
{
    const Replica& ref = reference();
    config_ = ref.state.config;
    accounts_ = ref.state.accounts;
}

void Chain::halt_at(std::uint64_t height)
{
    halted_ = true;
    for (auto& [id, r] : replicas_) r.halted_at = height;
}

void Chain::resume()
{
    halted_ = false;
    for (auto& [id, r] : replicas_) r.halted_at.reset();
}

std::uint64_t Chain::safety_violations() const
{
    auto correct = correct_validators();
    std::set<std::uint64_t> bad;
    for (std::size_t i = 0; i < correct.size(); ++i) {
        const auto& a = replicas_.at(correct[i]).ledger;
        for (std::size_t j = i + 1; j < correct.size(); ++j) {
            const auto& b = replicas_.at(correct[j]).ledger;
            auto common = std::min(a.size(), b.size());
            for (std::size_t h = 0; h < common; ++h)
                if (a[h].digest != b[h].digest) bad.insert(h);
        }
    }
    return bad.size();
}

void Chain::on_message(const netsim::Envelope& env)
{
    const Message& m = *env.body;
    if (const auto* resp = std::get_if<SignResponseMsg>(&m)) {
        auto it = responses_.find(resp->request_id);
        if (it != responses_.end()) it->second.push_back({env.from, resp->statement, resp->signature});
        return;
    }
    auto rit = replicas_.find(env.to);
    if (rit == replicas_.end()) return;
    Replica& r = rit->second;
    if (const auto* batch = std::get_if<BatchMsg>(&m))
        handle_batch(r, env, *batch);
    else if (const auto* vote = std::get_if<VoteMsg>(&m))
        handle_vote(r, env, *vote);
    else if (const auto* req = std::get_if<SignRequestMsg>(&m))
        handle_sign_request(r, env, *req);
}

void Chain::handle_batch(Replica& r, const netsim::Envelope&, const BatchMsg& msg)
{
    if (r.halted_at && msg.height > *r.halted_at) return;
    if (msg.height != r.state.last_height + 1 || r.voted_height >= msg.height) return;
    r.voted_height = msg.height;

    const auto& fault = network_.fault(r.id);
    if (fault.kind == netsim::Fault::Kind::Byzantine && fault.strategy == netsim::Strategy::Withhold) return;

    ChainState scratch = r.state;
    auto block = std::make_shared<Block>();
    block->height = msg.height;
    block->parent_digest = r.state.last_digest;
    for (const auto& tx : msg.transactions) {
        try {
            apply_in_place(scratch, tx, scheme_);
            block->transactions.push_back(tx);
        } catch (const Error&) {
        }
    }
    block->seal();

    if (fault.kind == netsim::Fault::Kind::Byzantine && fault.strategy == netsim::Strategy::Equivocate) {
        auto alt = std::make_shared<Block>(*block);
        if (!alt->transactions.empty())
            alt->transactions.pop_back();
        else
            alt->parent_digest[0] ^= 0x01;
        alt->seal();
        std::size_t index = 0;
        for (const auto& v : r.state.config.validators) {
            std::shared_ptr<const Block> pick = (index++ % 2 == 0) ? block : alt;
            auto vote = std::make_shared<const Message>(
                VoteMsg{pick, sign_as(r, vote_statement(id_, *pick), false)});
            network_.send(r.id, v, id_, vote, "order");
        }
        return;
    }

    bool corrupt = fault.kind == netsim::Fault::Kind::Byzantine && fault.strategy == netsim::Strategy::BadSig;
    auto vote = std::make_shared<const Message>(VoteMsg{block, sign_as(r, vote_statement(id_, *block), corrupt)});
    broadcast(r, vote, "order");
}

void Chain::handle_vote(Replica& r, const netsim::Envelope& env, const VoteMsg& msg)
{
    if (!msg.block) return;
    const Block& block = *msg.block;
    if (r.halted_at && block.height > *r.halted_at) return;
    if (block.height != r.state.last_height + 1) return;
    if (!r.state.config.validators.count(env.from)) return;
    auto acct = r.state.accounts.find(env.from);
    if (acct == r.state.accounts.end()) return;
    if (!scheme_.verify(acct->second.public_key, vote_statement(id_, block), msg.signature)) return;

    if (r.rejected.count(block.digest)) return;
    auto& tally = r.tallies[block.digest];
    if (!tally.block) {
        if (block.compute_digest() != block.digest || block.parent_digest != r.state.last_digest) {
            r.rejected.insert(block.digest);
            r.tallies.erase(block.digest);
            return;
        }
        tally.block = msg.block;
    }
    tally.voters.insert(env.from);

    auto q = r.state.config.consensus.quorum(static_cast<std::int64_t>(r.state.config.validators.size()));
    if (static_cast<std::int64_t>(tally.voters.size()) < q) return;

    ChainState next = r.state;
    try {
        apply_block(next, block, scheme_);
    } catch (const Error&) {
        r.rejected.insert(block.digest);
        return;
    }
    r.state = std::move(next);
    r.ledger.push_back(block);
    r.tallies.clear();
    r.rejected.clear();
}

void Chain::handle_sign_request(Replica& r, const netsim::Envelope& env, const SignRequestMsg& msg)
{
    const auto& fault = network_.fault(r.id);
    if (fault.kind == netsim::Fault::Kind::Byzantine && fault.strategy == netsim::Strategy::Withhold) return;
    if (!msg.rule || msg.height > r.state.last_height) return;

    std::optional<Bytes> statement;
    if (msg.height == r.state.last_height) {
        statement = (*msg.rule)(r.id, r.ledger, r.state);
    } else {
        Ledger prefix(r.ledger.begin(), r.ledger.begin() + static_cast<std::ptrdiff_t>(msg.height + 1));
        statement = (*msg.rule)(r.id, prefix, replay(prefix, scheme_));
    }
    if (!statement) return;

    bool corrupt = false;
    if (fault.kind == netsim::Fault::Kind::Byzantine) {
        if (fault.strategy == netsim::Strategy::Equivocate) statement->push_back(0xff);
        if (fault.strategy == netsim::Strategy::BadSig) corrupt = true;
    }
    auto sig = sign_as(r, *statement, corrupt);
    network_.send(r.id, env.from, id_,
                  std::make_shared<const Message>(SignResponseMsg{msg.request_id, std::move(*statement), sig}),
                  "certificate");
}

} // namespace mitosis::consensus

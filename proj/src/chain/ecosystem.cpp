#include "mitosis/chain/ecosystem.hpp"

#include <algorithm>

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/rng.hpp"

namespace mitosis::chain {

bool size_trigger(const ChainState& state)
{
    return state.config.validators.size() >= state.config.n_max;
}

const char* phase_name(DivisionPhase p)
{
    switch (p) {
    case DivisionPhase::Idle: return "Idle";
    case DivisionPhase::Proposed: return "Proposed";
    case DivisionPhase::Acked: return "Acked";
    case DivisionPhase::Assigned: return "Assigned";
    case DivisionPhase::Reconfigured: return "Reconfigured";
    }
    return "?";
}

Bytes reconfig_statement(const ChainId& parent, std::uint64_t agreed_height, const Digest& genesis1,
                         const Digest& genesis2)
{
    ByteWriter w;
    w.field(std::string_view("RECONFIG")).field(parent.value).u64(agreed_height).digest(genesis1).digest(genesis2);
    return std::move(w).bytes();
}

namespace {

Bytes snapshot_statement(const ChainId& chain, const ChainState& state)
{
    ByteWriter w;
    w.field(std::string_view("SNAPSHOT")).field(chain.value).u64(state.last_height).digest(state.digest());
    return std::move(w).bytes();
}

bool is_byzantine(const netsim::Fault& f, netsim::Strategy s)
{
    return f.kind == netsim::Fault::Kind::Byzantine && f.strategy == s;
}

} // namespace

Ecosystem::Ecosystem(EcosystemOptions options)
    : options_(options),
      network_(options.seed, options.delay),
      scheme_(crypto::make_scheme(options.signature, crypto::derive_stream(options.seed, 0, "signature/master"))),
      trigger_(size_trigger)
{
    if (options.beacon_lookback < 1) throw Error(Errc::InvalidParams, "beacon lookback must be >= 1");
}

const Account& Ecosystem::register_user(const UserId& user, Role role, std::map<std::string, std::string> metadata)
{
    if (user.empty()) throw Error(Errc::InvalidParams, "empty user id");
    ByteWriter seed;
    seed.field(std::string_view("user-key")).u64(options_.seed).field(user.value);
    auto kp = scheme_->derive_keypair(seed.bytes());
    const auto& account = registry_.register_user(Account{user, kp.public_key, role, std::move(metadata)});
    keys_.emplace(user, std::move(kp));
    network_.add_node(user, [this](const netsim::Envelope& env) { deliver(env); });
    return account;
}

const crypto::KeyPair& Ecosystem::keys(const UserId& user) const
{
    auto it = keys_.find(user);
    if (it == keys_.end()) throw Error(Errc::UnknownUser, "unknown user " + user.value);
    return it->second;
}

void Ecosystem::start_chain(const Block& genesis)
{
    std::map<UserId, crypto::KeyPair> validator_keys;
    for (const auto& v : genesis.genesis->config.validators) validator_keys.emplace(v, keys(v));
    auto c = std::make_unique<consensus::Chain>(genesis, validator_keys, network_, *scheme_, options_.stall_timeout);
    chains_.insert_or_assign(c->id(), std::move(c));
}

const Block& Ecosystem::chain_creation(ChainConfig config)
{
    for (const auto& v : config.validators)
        if (!registry_.has_user(v)) throw Error(Errc::UnregisteredValidator, "validator not registered: " + v.value);
    if (registry_.has_chain(config.chain) || chains_.count(config.chain))
        throw Error(Errc::DuplicateChainId, "chain id in use: " + config.chain.value);
    if (config.validators.empty()) throw Error(Errc::InvalidParams, "chain without validators");

    Genesis g;
    g.config = config;
    for (const auto& v : config.validators) {
        Account a = registry_.user(v);
        a.role = Role::Validator;
        g.accounts.push_back(a);
    }
    for (const auto& c : config.clients) {
        if (config.validators.count(c)) throw Error(Errc::AlreadyMember, c.value + " is already a validator");
        Account a = registry_.user(c);
        a.role = Role::Client;
        g.accounts.push_back(a);
    }
    std::sort(g.accounts.begin(), g.accounts.end(), [](const Account& x, const Account& y) { return x.user < y.user; });
    Block genesis = make_genesis_block(std::move(g));
    state_from_genesis(genesis);
    registry_.add_chain(config);
    start_chain(genesis);
    return chain(config.chain).ledger().front();
}

consensus::Chain& Ecosystem::chain(const ChainId& c)
{
    auto it = chains_.find(c);
    if (it == chains_.end()) throw Error(Errc::UnknownChain, "unknown chain " + c.value);
    return *it->second;
}

const consensus::Chain& Ecosystem::chain(const ChainId& c) const
{
    auto it = chains_.find(c);
    if (it == chains_.end()) throw Error(Errc::UnknownChain, "unknown chain " + c.value);
    return *it->second;
}

Transaction Ecosystem::sign_tx(const UserId& submitter, TxPayload payload) const
{
    Transaction tx{std::move(payload), submitter, {}};
    tx.signature = scheme_->sign(keys(submitter).secret_key, tx.signing_bytes());
    return tx;
}

const Block& Ecosystem::submit(const ChainId& chain_id, const UserId& submitter, std::vector<TxPayload> payloads)
{
    if (!registry_.chain(chain_id).active) throw Error(Errc::UnknownChain, "chain " + chain_id.value + " is retired");
    std::vector<Transaction> batch;
    batch.reserve(payloads.size());
    for (auto& p : payloads) batch.push_back(sign_tx(submitter, std::move(p)));
    return chain(chain_id).order(submitter, std::move(batch));
}

ChainConfig Ecosystem::join_chain(const UserId& user, const ChainId& chain_id, Role role)
{
    return join_batch(chain_id, {user}, role);
}

ChainConfig Ecosystem::join_batch(const ChainId& chain_id, const std::vector<UserId>& users, Role role)
{
    if (users.empty()) throw Error(Errc::InvalidParams, "nothing to join");
    if (!registry_.chain(chain_id).active) throw Error(Errc::UnknownChain, "chain " + chain_id.value + " is retired");
    auto& c = chain(chain_id);
    std::vector<Transaction> batch;
    ChainState scratch = c.state();
    for (const auto& u : users) {
        Account account = registry_.user(u);
        account.role = role;
        if (role == Role::Validator && policy_ && !policy_(account, c.config()))
            throw Error(Errc::PolicyRejected, u.value + " rejected by the access policy of " + chain_id.value);
        TxPayload payload = role == Role::Validator ? TxPayload{ConfigUpdateTx{account}} : TxPayload{RegisterTx{account}};
        auto tx = sign_tx(u, std::move(payload));
        apply_in_place(scratch, tx, *scheme_);
        batch.push_back(std::move(tx));
    }
    const Block& block = c.order(users.front(), std::move(batch));
    if (block.transactions.size() != users.size())
        throw Error(Errc::InvalidTransaction, "join not fully committed on " + chain_id.value, block.height);
    if (role == Role::Validator)
        for (const auto& u : users) c.add_replica(u, keys(u));
    c.refresh_public_view();
    registry_.update_chain(c.config());
    return c.config();
}

void Ecosystem::deliver(const netsim::Envelope& env)
{
    const auto& body = *env.body;
    if (const auto* d = std::get_if<consensus::DivideMsg>(&body))
        on_divide(env, *d);
    else if (const auto* a = std::get_if<consensus::DivideAckMsg>(&body))
        on_divide_ack(env, *a);
    else if (auto it = chains_.find(env.chain); it != chains_.end())
        it->second->on_message(env);
}

void Ecosystem::on_divide(const netsim::Envelope& env, const consensus::DivideMsg& msg)
{
    auto cit = chains_.find(msg.chain);
    if (cit == chains_.end() || env.chain != msg.chain) return;
    auto& c = *cit->second;
    const UserId& v = env.to;
    if (!c.has_replica(v)) return;
    const auto& fault = network_.fault(v);
    if (is_byzantine(fault, netsim::Strategy::Withhold)) return;

    auto& st = divisions_[{msg.chain, v}];
    st.chain = msg.chain;
    if (st.phase != DivisionPhase::Idle) return;
    // Channels are authenticated: a DIVIDE names its sender as initiator.
    if (env.from != msg.initiator) return;
    const auto& r = c.replica(v);
    if (!r.state.config.validators.count(msg.initiator)) {
        st.rejected = Errc::UnknownInitiator;
        return;
    }
    if (!trigger_(r.state)) {
        st.rejected = Errc::TriggerNotMet;
        return;
    }
    if (r.state.last_height < msg.agreed_height) {
        st.rejected = Errc::StateDivergence;
        return;
    }
    st.rejected.reset();
    st.initiator = msg.initiator;
    st.agreed_height = msg.agreed_height;
    st.phase = DivisionPhase::Proposed;

    auto sig = scheme_->sign(r.keys.secret_key, msg.statement());
    if (is_byzantine(fault, netsim::Strategy::BadSig)) sig.bytes[0] ^= 0x01;
    auto ack = std::make_shared<const consensus::Message>(consensus::DivideAckMsg{msg, sig});
    bool equivocate = is_byzantine(fault, netsim::Strategy::Equivocate);
    std::size_t index = 0;
    for (const auto& peer : r.state.config.validators) {
        if (!equivocate || index % 2 == 0) network_.send(v, peer, msg.chain, ack, "divide");
        ++index;
    }

    auto early = std::move(st.early);
    st.early.clear();
    for (const auto& [from, pending] : early) accept_ack(st, c, r, from, pending);
    advance(st, c, v);
}

void Ecosystem::accept_ack(DivisionState& st, consensus::Chain&, const consensus::Replica&, const UserId& from,
                           const consensus::DivideAckMsg& msg)
{
    if (msg.divide != consensus::DivideMsg{st.chain, st.initiator, st.agreed_height}) return;
    st.acks.emplace(from, msg.signature);
}

void Ecosystem::on_divide_ack(const netsim::Envelope& env, const consensus::DivideAckMsg& msg)
{
    auto cit = chains_.find(msg.divide.chain);
    if (cit == chains_.end() || env.chain != msg.divide.chain) return;
    auto& c = *cit->second;
    const UserId& v = env.to;
    if (!c.has_replica(v)) return;
    if (is_byzantine(network_.fault(v), netsim::Strategy::Withhold)) return;
    const auto& r = c.replica(v);
    if (!r.state.config.validators.count(env.from)) return;
    auto acct = r.state.accounts.find(env.from);
    if (acct == r.state.accounts.end()) return;
    if (!scheme_->verify(acct->second.public_key, msg.divide.statement(), msg.signature)) return;

    auto& st = divisions_[{msg.divide.chain, v}];
    st.chain = msg.divide.chain;
    if (st.phase == DivisionPhase::Idle) {
        st.early.emplace_back(env.from, msg);
        return;
    }
    accept_ack(st, c, r, env.from, msg);
    advance(st, c, v);
}

void Ecosystem::advance(DivisionState& st, consensus::Chain& c, const UserId& v)
{
    if (st.phase != DivisionPhase::Proposed) return;
    const auto& r = c.replica(v);
    auto n = static_cast<std::int64_t>(r.state.config.validators.size());
    if (static_cast<std::int64_t>(st.acks.size()) < r.state.config.consensus.quorum(n)) return;
    st.phase = DivisionPhase::Acked;
    c.halt_at(st.agreed_height);
    st.phase = DivisionPhase::Assigned;
    const auto& plan = plan_for(c, r, st.agreed_height);
    st.reconfig_statement = reconfig_statement(st.chain, st.agreed_height, plan.genesis1.digest, plan.genesis2.digest);
    st.phase = DivisionPhase::Reconfigured;
}

const DivisionPlan& Ecosystem::plan_for(const consensus::Chain&, const consensus::Replica& r, std::uint64_t height)
{
    const Digest& tip = r.ledger.at(height).digest;
    if (auto it = plans_.find(tip); it != plans_.end()) return it->second;
    Ledger prefix(r.ledger.begin(), r.ledger.begin() + static_cast<std::ptrdiff_t>(height + 1));
    ChainState snapshot = height == r.state.last_height ? r.state : replay(prefix, *scheme_);
    auto plan = plan_division(prefix, snapshot, options_.assignment, options_.beacon_lookback);
    return plans_.emplace(tip, std::move(plan)).first->second;
}

const DivisionState* Ecosystem::division_state(const ChainId& chain_id, const UserId& validator) const
{
    auto it = divisions_.find({chain_id, validator});
    return it == divisions_.end() ? nullptr : &it->second;
}

void Ecosystem::abort_division(const ChainId& chain_id)
{
    chain(chain_id).resume();
}

DivisionResult Ecosystem::chain_division(const ChainId& chain_id, std::optional<UserId> initiator)
{
    if (!registry_.chain(chain_id).active) throw Error(Errc::UnknownChain, "chain " + chain_id.value + " is retired");
    auto& c = chain(chain_id);
    if (!initiator) {
        auto correct = c.correct_validators();
        if (correct.empty()) throw Error(Errc::NoQuorum, "no correct validator on " + chain_id.value);
        initiator = correct.front();
    }
    if (!network_.has_node(*initiator)) throw Error(Errc::UnknownNode, "unknown initiator " + initiator->value);

    for (auto it = divisions_.begin(); it != divisions_.end();)
        it = it->first.first == chain_id ? divisions_.erase(it) : std::next(it);

    const std::uint64_t h = c.has_replica(*initiator) ? c.replica(*initiator).state.last_height : c.height();
    auto divide = std::make_shared<const consensus::Message>(consensus::DivideMsg{chain_id, *initiator, h});
    for (const auto& v : c.config().validators) network_.send(*initiator, v, chain_id, divide, "divide");
    network_.run(network_.now() + options_.stall_timeout);

    bool proposed = false;
    std::optional<Errc> reason;
    std::vector<UserId> reconfigured;
    for (const auto& v : c.correct_validators()) {
        auto it = divisions_.find({chain_id, v});
        if (it == divisions_.end()) continue;
        const auto& st = it->second;
        if (st.phase != DivisionPhase::Idle) proposed = true;
        if (st.rejected && !reason) reason = st.rejected;
        if (st.phase == DivisionPhase::Reconfigured) reconfigured.push_back(v);
    }
    if (!proposed) {
        abort_division(chain_id);
        Errc code = reason.value_or(Errc::NoQuorum);
        throw Error(code, "division of " + chain_id.value + " not accepted by any correct validator");
    }
    if (reconfigured.empty()) {
        abort_division(chain_id);
        throw Error(Errc::NoQuorum, "division of " + chain_id.value + ": no correct validator collected a quorum of acks");
    }
    const Bytes statement = divisions_.at({chain_id, reconfigured.front()}).reconfig_statement;
    for (const auto& v : reconfigured) {
        if (divisions_.at({chain_id, v}).reconfig_statement != statement) {
            abort_division(chain_id);
            throw Error(Errc::StateDivergence, "validators disagree on the children of " + chain_id.value);
        }
    }

    auto rule = [this, chain_id, statement](const UserId& signer, const Ledger&,
                                            const ChainState&) -> std::optional<Bytes> {
        auto it = divisions_.find({chain_id, signer});
        if (it == divisions_.end() || it->second.phase != DivisionPhase::Reconfigured ||
            it->second.reconfig_statement != statement)
            return std::nullopt;
        return statement;
    };
    auto cert = c.certificate_from(c.collect(*initiator, h, rule), statement);
    if (static_cast<std::int64_t>(cert.signatures.size()) < c.quorum()) {
        abort_division(chain_id);
        throw Error(Errc::NoQuorum, "division of " + chain_id.value + ": " + std::to_string(cert.signatures.size()) +
                                        " reconfiguration signatures, quorum is " + std::to_string(c.quorum()));
    }

    const auto& plan = plans_.at(c.replica(reconfigured.front()).ledger.at(h).digest);
    registry_.retire(chain_id);
    registry_.add_chain(plan.genesis1.genesis->config, plan.genesis1.genesis->lineage);
    registry_.add_chain(plan.genesis2.genesis->config, plan.genesis2.genesis->lineage);
    start_chain(plan.genesis1);
    start_chain(plan.genesis2);
    return {chain_id, plan.genesis1.genesis->config.chain, plan.genesis2.genesis->config.chain, h, plan.validators,
            cert};
}

ChainId Ecosystem::chain_fusion(const ChainId& a, const ChainId& b)
{
    if (a == b) throw Error(Errc::InvalidParams, "cannot fuse a chain with itself");
    for (const auto& id : {a, b})
        if (!registry_.chain(id).active) throw Error(Errc::UnknownChain, "chain " + id.value + " is retired");
    auto& ca = chain(a);
    auto& cb = chain(b);
    Genesis merged = merge_states(ca.state(), cb.state());
    if (registry_.has_chain(merged.config.chain))
        throw Error(Errc::DuplicateChainId, "chain id in use: " + merged.config.chain.value);

    ca.halt_at(ca.height());
    cb.halt_at(cb.height());
    try {
        for (auto* c : {&ca, &cb}) {
            auto correct = c->correct_validators();
            c->collect_certificate(correct.front(), snapshot_statement(c->id(), c->state()));
        }
    } catch (const Error&) {
        ca.resume();
        cb.resume();
        throw;
    }

    Block genesis = make_genesis_block(std::move(merged));
    const auto& config = genesis.genesis->config;
    registry_.retire(a);
    registry_.retire(b);
    registry_.add_chain(config, std::nullopt, {a, b});
    start_chain(genesis);
    return config.chain;
}

ChainId Ecosystem::route(const ChainId& chain_id, const UserId& member) const
{
    for (const auto& id : registry_.active_chains()) {
        const auto& config = registry_.chain(id).config;
        if ((config.validators.count(member) || config.clients.count(member)) && registry_.descends_from(id, chain_id))
            return id;
    }
    throw Error(Errc::UnknownChain, "no active chain from " + chain_id.value + " holds " + member.value);
}

std::uint64_t Ecosystem::safety_violations() const
{
    std::uint64_t total = 0;
    for (const auto& [id, c] : chains_) total += c->safety_violations();
    return total;
}

} // namespace mitosis::chain

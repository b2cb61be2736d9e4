#include "mitosis/netsim/network.hpp"

#include "mitosis/core/error.hpp"

namespace mitosis::netsim {

const char* strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::Equivocate: return "equivocate";
    case Strategy::Withhold: return "withhold";
    case Strategy::BadSig: return "badsig";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name)
{
    if (name == "equivocate") return Strategy::Equivocate;
    if (name == "withhold") return Strategy::Withhold;
    if (name == "badsig") return Strategy::BadSig;
    throw Error(Errc::ConfigError, "unknown byzantine strategy '" + name + "'");
}

Network::Network(std::uint64_t seed, DelayModel delay) : delay_(delay), rng_(seed, 0, "netsim/delay")
{
    if (delay.min > delay.max) throw Error(Errc::ConfigError, "delay_min > delay_max");
}

void Network::add_node(const NodeId& node, Handler handler)
{
    nodes_[node] = std::move(handler);
    faults_.emplace(node, Fault::correct());
}

const Fault& Network::fault(const NodeId& node) const
{
    auto it = faults_.find(node);
    if (it == faults_.end()) throw Error(Errc::UnknownNode, "unknown node " + node.value);
    return it->second;
}

bool Network::is_correct(const NodeId& node) const
{
    auto it = ever_faulty_.find(node);
    return fault(node).is_correct() && (it == ever_faulty_.end() || !it->second);
}

void Network::push(Tick time, std::variant<Delivery, FaultSwitch> what)
{
    queue_.push(Event{time, seq_++, std::move(what)});
}

void Network::send(const NodeId& from, const NodeId& to, const ChainId& chain, consensus::MessagePtr body,
                   const std::string& label)
{
    if (!has_node(from)) throw Error(Errc::UnknownNode, "unknown sender " + from.value);
    if (!has_node(to)) throw Error(Errc::UnknownNode, "unknown recipient " + to.value);
    if (is_crashed(from)) return;
    ++total_sent_;
    ++counters_[{chain, label}];
    Tick delay = delay_.min == delay_.max ? delay_.min : rng_.between(delay_.min, delay_.max);
    push(now_ + delay, Delivery{Envelope{from, to, chain, std::move(body)}});
}

void Network::inject_fault(const NodeId& node, Fault fault, Tick at)
{
    if (!has_node(node)) throw Error(Errc::UnknownNode, "unknown node " + node.value);
    if (at < now_) throw Error(Errc::InvalidParams, "fault scheduled in the past");
    if (at == now_) {
        faults_[node] = fault;
        if (!fault.is_correct()) ever_faulty_[node] = true;
        return;
    }
    push(at, FaultSwitch{node, fault});
}

std::size_t Network::run(Tick deadline)
{
    std::size_t processed = 0;
    while (!queue_.empty() && queue_.top().time <= deadline) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = std::max(now_, ev.time);
        ++processed;
        if (auto* sw = std::get_if<FaultSwitch>(&ev.what)) {
            faults_[sw->node] = sw->fault;
            if (!sw->fault.is_correct()) ever_faulty_[sw->node] = true;
            continue;
        }
        auto& env = std::get<Delivery>(ev.what).envelope;
        if (is_crashed(env.to)) continue;
        ++delivered_;
        nodes_.at(env.to)(env);
    }
    return processed;
}

void Network::advance_to(Tick t)
{
    run(t);
    now_ = std::max(now_, t);
}

std::uint64_t Network::messages(const ChainId& chain) const
{
    std::uint64_t total = 0;
    for (auto it = counters_.lower_bound({chain, std::string()}); it != counters_.end() && it->first.first == chain;
         ++it)
        total += it->second;
    return total;
}

std::uint64_t Network::messages(const ChainId& chain, const std::string& label) const
{
    auto it = counters_.find({chain, label});
    return it == counters_.end() ? 0 : it->second;
}

std::uint64_t Network::messages_labelled(const std::string& label) const
{
    std::uint64_t total = 0;
    for (const auto& [key, count] : counters_)
        if (key.second == label) total += count;
    return total;
}

} // namespace mitosis::netsim

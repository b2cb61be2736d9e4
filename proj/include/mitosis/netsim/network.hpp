#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "mitosis/consensus/messages.hpp"
#include "mitosis/core/ids.hpp"
#include "mitosis/crypto/rng.hpp"

namespace mitosis::netsim {

using NodeId = UserId;
using Tick = std::uint64_t;

// Bounded delivery delay, drawn uniformly in [min, max] ticks.
struct DelayModel {
    Tick min = 1;
    Tick max = 1;
};

enum class Strategy : std::uint8_t { Equivocate, Withhold, BadSig };

struct Fault {
    enum class Kind : std::uint8_t { Correct, Crash, Byzantine } kind = Kind::Correct;
    Strategy strategy = Strategy::Withhold;

    static Fault correct() { return {}; }
    static Fault crash() { return {Kind::Crash, Strategy::Withhold}; }
    static Fault byzantine(Strategy s) { return {Kind::Byzantine, s}; }
    bool is_correct() const { return kind == Kind::Correct; }
    bool operator==(const Fault&) const = default;
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct Envelope {
    NodeId from;
    NodeId to;
    ChainId chain;
    consensus::MessagePtr body;
};

using Handler = std::function<void(const Envelope&)>;

// Deterministic discrete-event network. Events are processed in (time, seq)
// order; seq is the global scheduling counter, so equal-time events keep
// their scheduling order.
class Network {
public:
    Network(std::uint64_t seed, DelayModel delay);

    void add_node(const NodeId& node, Handler handler);
    bool has_node(const NodeId& node) const { return nodes_.count(node) != 0; }

    // Schedules delivery at now + delay. Sends from crashed nodes are dropped
    // and not counted; deliveries to crashed nodes invoke no handler.
    void send(const NodeId& from, const NodeId& to, const ChainId& chain, consensus::MessagePtr body,
              const std::string& label);

    // Switches the node's behaviour at `at` (>= now). Throws UnknownNode.
    void inject_fault(const NodeId& node, Fault fault, Tick at);

    const Fault& fault(const NodeId& node) const;
    bool is_crashed(const NodeId& node) const { return fault(node).kind == Fault::Kind::Crash; }
    // A node is correct if it has never been faulty.
    bool is_correct(const NodeId& node) const;

    Tick now() const { return now_; }
    bool idle() const { return queue_.empty(); }
    // Processes events with time <= deadline until the queue drains.
    std::size_t run(Tick deadline);
    // Advances the clock without processing anything past it.
    void advance_to(Tick t);

    std::uint64_t messages_sent() const { return total_sent_; }
    std::uint64_t messages(const ChainId& chain) const;
    std::uint64_t messages(const ChainId& chain, const std::string& label) const;
    std::uint64_t messages_labelled(const std::string& label) const;
    std::uint64_t deliveries() const { return delivered_; }

private:
    struct Delivery {
        Envelope envelope;
    };
    struct FaultSwitch {
        NodeId node;
        Fault fault;
    };
    struct Event {
        Tick time;
        std::uint64_t seq;
        std::variant<Delivery, FaultSwitch> what;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void push(Tick time, std::variant<Delivery, FaultSwitch> what);

    DelayModel delay_;
    crypto::Rng rng_;
    Tick now_ = 0;
    std::uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::map<NodeId, Handler> nodes_;
    std::map<NodeId, Fault> faults_;
    std::map<NodeId, bool> ever_faulty_;
    std::map<std::pair<ChainId, std::string>, std::uint64_t> counters_;
    std::uint64_t total_sent_ = 0;
    std::uint64_t delivered_ = 0;
};

} // namespace mitosis::netsim

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mitosis/assignment/assignment.hpp"
#include "mitosis/consensus/params.hpp"
#include "mitosis/core/fraction.hpp"
#include "mitosis/crypto/keys.hpp"
#include "mitosis/netsim/network.hpp"

namespace mitosis::netsim {

struct ChainSpec {
    std::string name;
    std::uint32_t validators = 4;
    std::uint32_t faulty = 0;
    Fault fault = Fault::byzantine(Strategy::Withhold);
    std::uint32_t clients = 0;
    std::uint32_t assets_per_client = 0;
    consensus::ConsensusParams consensus = consensus::ConsensusParams::bft();
    std::uint32_t n_max = 20;
    std::uint32_t line = 0;
};

// Validators arriving at every active chain, `rate` per epoch, until the chain
// reaches its n_max. Of the arrivals into a chain since its creation, exactly
// floor(beta * k) of the first k are faulty.
struct JoinSpec {
    std::uint32_t rate = 0;
    Fraction beta{0, 1};
    Fault fault = Fault::byzantine(Strategy::Withhold);
    // Chains this many divisions below a root take no more arrivals.
    std::uint32_t max_generation = UINT32_MAX;
};

struct FaultSpec {
    std::string node;
    Fault fault;
    std::uint32_t epoch = 0;
    std::uint32_t line = 0;
};

struct FusionSpec {
    std::string a;
    std::string b;
    std::uint32_t epoch = 0;
    std::uint32_t line = 0;
};

struct Scenario {
    std::uint64_t seed = 1;
    std::uint32_t horizon = 10;
    std::uint32_t sample_every = 1;
    crypto::SchemeKind signature = crypto::SchemeKind::Simulated;
    DelayModel delay{1, 1};
    Tick stall_timeout = 1000;
    assignment::Scheme assignment = assignment::Scheme::Randomized;
    std::vector<ChainSpec> chains;
    std::optional<JoinSpec> join;
    std::vector<FaultSpec> faults;
    std::vector<FusionSpec> fusions;
};

// Throws Error{ConfigError, message, line}.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);

struct MetricsRow {
    Tick tick = 0;
    std::uint32_t epoch = 0;
    ChainId chain;
    std::uint64_t n = 0;
    std::uint64_t f = 0;
    Fraction beta{0, 1};
    std::uint32_t divisions = 0;
    std::uint64_t messages = 0;
};

struct DivisionRecord {
    std::uint32_t epoch = 0;
    ChainId parent;
    ChainId child1;
    ChainId child2;
    std::uint64_t n = 0;
    std::uint64_t f = 0;
    Fraction alpha{1, 2};
    std::uint64_t n1 = 0;
    std::uint64_t f1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t f2 = 0;
    // Some child has f_i >= alpha * n_i.
    bool violated = false;
};

// A chain that started at (n0, f0) and has since doubled through arrivals.
struct RebalanceRecord {
    ChainId chain;
    std::uint64_t n0 = 0;
    std::uint64_t f0 = 0;
    std::uint64_t n = 0;
    std::uint64_t f = 0;
    Fraction join_beta{0, 1};
    // f / n == (f0 / n0 + join_beta) / 2
    bool holds = false;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::vector<DivisionRecord> divisions;
    std::vector<RebalanceRecord> rebalances;
    std::vector<std::string> events;
    std::string lineage_csv;
    std::uint64_t fusions = 0;
    std::uint64_t safety_violations = 0;
    std::uint64_t messages = 0;
    std::vector<ChainId> final_chains;
};

// Runs the epoch loop to the horizon or until no chain has work left.
MetricsReport run_scenario(const Scenario& scenario);

// tick,chain_id,n,f,beta,divisions,messages
void write_metrics_csv(std::ostream& os, const MetricsReport& report);
void write_events(std::ostream& os, const MetricsReport& report);

} // namespace mitosis::netsim

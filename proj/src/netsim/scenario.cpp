#include "mitosis/netsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "mitosis/analysis/violation.hpp"
#include "mitosis/chain/ecosystem.hpp"
#include "mitosis/core/error.hpp"

namespace mitosis::netsim {

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(std::uint32_t line, const std::string& msg)
{
    throw Error(Errc::ConfigError, "line " + std::to_string(line) + ": " + msg, line);
}

std::uint64_t number(const std::string& v, std::uint32_t line)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) fail(line, "expected a non-negative integer, got '" + v + "'");
    return out;
}

std::uint32_t number32(const std::string& v, std::uint32_t line)
{
    auto n = number(v, line);
    if (n > UINT32_MAX) fail(line, "value out of range: " + v);
    return static_cast<std::uint32_t>(n);
}

Fraction rational(const std::string& v, std::uint32_t line)
{
    try {
        return Fraction::parse(v);
    } catch (const Error& e) {
        fail(line, e.what());
    }
}

Fault fault_kind(const std::string& v, std::uint32_t line)
{
    if (v == "crash") return Fault::crash();
    try {
        return Fault::byzantine(parse_strategy(v));
    } catch (const Error& e) {
        fail(line, std::string(e.what()) + " (expected crash, withhold, equivocate or badsig)");
    }
}

consensus::ConsensusParams consensus_preset(const std::string& v, std::uint32_t line)
{
    if (v == "bft") return consensus::ConsensusParams::bft();
    if (v == "cft") return consensus::ConsensusParams::cft();
    fail(line, "unknown consensus '" + v + "' (expected bft or cft)");
}

enum class Section { None, Ecosystem, Chain, Join, Fault, Fusion };

} // namespace

Scenario parse_scenario(std::istream& in)
{
    Scenario sc;
    Section section = Section::None;
    std::uint32_t section_line = 0;
    std::set<std::string> seen_keys;
    std::set<std::string> chain_names;
    bool seen_ecosystem = false;
    std::string raw;
    std::uint32_t line = 0;

    auto close_section = [&] {
        if (section == Section::Fault && sc.faults.back().node.empty()) fail(section_line, "[fault] needs node");
        if (section == Section::Fusion && (sc.fusions.back().a.empty() || sc.fusions.back().b.empty()))
            fail(section_line, "[fusion] needs a and b");
        if (section == Section::Chain) {
            const auto& c = sc.chains.back();
            if (c.validators == 0) fail(section_line, "chain " + c.name + " needs at least one validator");
            if (c.faulty > c.validators) fail(section_line, "chain " + c.name + " has more faulty than validators");
            if (c.n_max < 2) fail(section_line, "n_max must be >= 2");
        }
    };

    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') fail(line, "unterminated section header");
            close_section();
            std::string head = trim(std::string_view(text).substr(1, text.size() - 2));
            auto space = head.find_first_of(" \t");
            std::string kind = head.substr(0, space);
            std::string arg = space == std::string::npos ? "" : trim(std::string_view(head).substr(space));
            seen_keys.clear();
            section_line = line;
            if (kind == "chain") {
                if (arg.empty()) fail(line, "[chain] needs a name");
                if (arg.find_first_of(" \t,+.") != std::string::npos) fail(line, "invalid chain name '" + arg + "'");
                if (!chain_names.insert(arg).second) fail(line, "duplicate chain " + arg);
                section = Section::Chain;
                sc.chains.push_back(ChainSpec{});
                sc.chains.back().name = arg;
                sc.chains.back().line = line;
                continue;
            }
            if (!arg.empty()) fail(line, "[" + kind + "] takes no argument");
            if (kind == "ecosystem") {
                if (seen_ecosystem) fail(line, "duplicate [ecosystem]");
                seen_ecosystem = true;
                section = Section::Ecosystem;
            } else if (kind == "join") {
                if (sc.join) fail(line, "duplicate [join]");
                sc.join = JoinSpec{};
                section = Section::Join;
            } else if (kind == "fault") {
                sc.faults.push_back(FaultSpec{});
                sc.faults.back().line = line;
                section = Section::Fault;
            } else if (kind == "fusion") {
                sc.fusions.push_back(FusionSpec{});
                sc.fusions.back().line = line;
                section = Section::Fusion;
            } else {
                fail(line, "unknown section [" + kind + "]");
            }
            continue;
        }

        auto eq = text.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        std::string key = trim(std::string_view(text).substr(0, eq));
        std::string value = trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) fail(line, "empty key");
        if (value.empty()) fail(line, "empty value for " + key);
        if (section == Section::None) fail(line, "key '" + key + "' outside of any section");
        if (!seen_keys.insert(key).second) fail(line, "duplicate key " + key);

        auto unknown = [&] { fail(line, "unknown key '" + key + "'"); };
        switch (section) {
        case Section::Ecosystem:
            if (key == "seed") sc.seed = number(value, line);
            else if (key == "horizon") sc.horizon = number32(value, line);
            else if (key == "sample_every") sc.sample_every = number32(value, line);
            else if (key == "delay_min") sc.delay.min = number(value, line);
            else if (key == "delay_max") sc.delay.max = number(value, line);
            else if (key == "stall_timeout") sc.stall_timeout = number(value, line);
            else if (key == "signature") {
                if (value == "simulated") sc.signature = crypto::SchemeKind::Simulated;
                else if (value == "ed25519") sc.signature = crypto::SchemeKind::Ed25519;
                else fail(line, "unknown signature '" + value + "' (expected simulated or ed25519)");
            } else if (key == "assignment") {
                if (value == "randomized") sc.assignment = assignment::Scheme::Randomized;
                else if (value == "deterministic") sc.assignment = assignment::Scheme::Deterministic;
                else fail(line, "unknown assignment '" + value + "' (expected randomized or deterministic)");
            } else unknown();
            break;
        case Section::Chain: {
            auto& c = sc.chains.back();
            if (key == "validators") c.validators = number32(value, line);
            else if (key == "faulty") c.faulty = number32(value, line);
            else if (key == "strategy") c.fault = fault_kind(value, line);
            else if (key == "clients") c.clients = number32(value, line);
            else if (key == "assets_per_client") c.assets_per_client = number32(value, line);
            else if (key == "consensus") {
                auto alpha = c.consensus.alpha;
                bool custom = seen_keys.count("alpha") != 0;
                c.consensus = consensus_preset(value, line);
                if (custom) c.consensus.alpha = alpha;
            } else if (key == "alpha") {
                auto a = rational(value, line);
                if (a.num() == 0 || a > Fraction{1, 2}) fail(line, "alpha must be in (0, 1/2]");
                c.consensus.alpha = a;
            } else if (key == "n_max") c.n_max = number32(value, line);
            else unknown();
            break;
        }
        case Section::Join: {
            auto& j = *sc.join;
            if (key == "rate") j.rate = number32(value, line);
            else if (key == "beta") {
                j.beta = rational(value, line);
                if (j.beta > Fraction{1, 1}) fail(line, "beta must be in [0, 1]");
            } else if (key == "strategy") j.fault = fault_kind(value, line);
            else if (key == "max_generation") j.max_generation = number32(value, line);
            else unknown();
            break;
        }
        case Section::Fault: {
            auto& f = sc.faults.back();
            if (key == "node") f.node = value;
            else if (key == "kind") f.fault = fault_kind(value, line);
            else if (key == "epoch") f.epoch = number32(value, line);
            else unknown();
            break;
        }
        case Section::Fusion: {
            auto& f = sc.fusions.back();
            if (key == "a") f.a = value;
            else if (key == "b") f.b = value;
            else if (key == "epoch") f.epoch = number32(value, line);
            else unknown();
            break;
        }
        case Section::None: break;
        }
    }
    close_section();

    if (sc.chains.empty()) fail(line == 0 ? 1 : line, "scenario defines no chain");
    if (sc.horizon == 0) fail(line, "horizon must be positive");
    if (sc.sample_every == 0) fail(line, "sample_every must be positive");
    if (sc.delay.min > sc.delay.max) fail(line, "delay_min > delay_max");
    return sc;
}

Scenario parse_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigError, "cannot open scenario " + path);
    return parse_scenario(in);
}

namespace {

struct ChainInfo {
    std::uint32_t generation = 0;
    std::uint64_t n0 = 0;
    std::uint64_t f0 = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t faulty_arrivals = 0;
    bool rebalance_recorded = false;
    bool stalled = false;
};

class Runner {
public:
    explicit Runner(const Scenario& sc)
        : sc_(sc), eco_(chain::EcosystemOptions{sc.seed, sc.signature, sc.delay, sc.stall_timeout, sc.assignment, 1})
    {
    }

    MetricsReport run();

private:
    std::uint64_t faulty_in(const ChainConfig& config) const
    {
        std::uint64_t f = 0;
        for (const auto& v : config.validators) f += eco_.network().is_correct(v) ? 0 : 1;
        return f;
    }

    void event(const std::string& text)
    {
        char head[64];
        std::snprintf(head, sizeof head, "epoch=%u tick=%llu ", epoch_, static_cast<unsigned long long>(eco_.network().now()));
        report_.events.push_back(head + text);
    }

    void create(const ChainSpec& spec);
    bool step(const ChainId& c);
    void divide(const ChainId& c);
    void grow(const ChainId& c, std::uint64_t n, std::uint64_t n_max);
    void sample();

    const Scenario& sc_;
    chain::Ecosystem eco_;
    MetricsReport report_;
    std::map<ChainId, ChainInfo> info_;
    std::uint32_t epoch_ = 0;
    std::uint64_t next_joiner_ = 0;
};

void Runner::create(const ChainSpec& spec)
{
    ChainConfig config;
    config.chain = ChainId(spec.name);
    config.consensus = spec.consensus;
    config.n_max = spec.n_max;
    char name[96];
    for (std::uint32_t i = 0; i < spec.validators; ++i) {
        std::snprintf(name, sizeof name, "%s-v%02u", spec.name.c_str(), i);
        UserId v(name);
        eco_.register_user(v, Role::Validator);
        if (i < spec.faulty) eco_.network().inject_fault(v, spec.fault, eco_.network().now());
        config.validators.insert(v);
    }
    for (std::uint32_t i = 0; i < spec.clients; ++i) {
        std::snprintf(name, sizeof name, "%s-c%02u", spec.name.c_str(), i);
        UserId u(name);
        eco_.register_user(u, Role::Client);
        config.clients.insert(u);
        for (std::uint32_t k = 0; k < spec.assets_per_client; ++k) {
            std::snprintf(name, sizeof name, "%s-c%02u-a%u", spec.name.c_str(), i, k);
            config.initial_assets[u].push_back(Asset{AssetId(name), u, k + 1, std::nullopt});
        }
    }
    eco_.chain_creation(config);
    auto f = faulty_in(config);
    info_[config.chain] = ChainInfo{0, config.validators.size(), f};
    event("create chain=" + spec.name + " n=" + std::to_string(config.validators.size()) + " f=" + std::to_string(f));
}

void Runner::divide(const ChainId& c)
{
    const auto config = eco_.chain(c).config();
    const auto n = config.validators.size();
    const auto f = faulty_in(config);
    try {
        auto result = eco_.chain_division(c);
        DivisionRecord rec;
        rec.epoch = epoch_;
        rec.parent = c;
        rec.child1 = result.child1;
        rec.child2 = result.child2;
        rec.n = n;
        rec.f = f;
        rec.alpha = config.consensus.alpha;
        const auto& c1 = eco_.chain(result.child1).config();
        const auto& c2 = eco_.chain(result.child2).config();
        rec.n1 = c1.validators.size();
        rec.f1 = faulty_in(c1);
        rec.n2 = c2.validators.size();
        rec.f2 = faulty_in(c2);
        rec.violated = analysis::violates(static_cast<std::int64_t>(rec.f1), static_cast<std::int64_t>(rec.n1), rec.alpha) ||
                       analysis::violates(static_cast<std::int64_t>(rec.f2), static_cast<std::int64_t>(rec.n2), rec.alpha);
        report_.divisions.push_back(rec);
        auto gen = info_[c].generation + 1;
        info_[result.child1] = ChainInfo{gen, rec.n1, rec.f1};
        info_[result.child2] = ChainInfo{gen, rec.n2, rec.f2};
        event("divide parent=" + c.value + " height=" + std::to_string(result.agreed_height) + " n=" +
              std::to_string(n) + " f=" + std::to_string(f) + " child1=" + rec.child1.value + " n1=" +
              std::to_string(rec.n1) + " f1=" + std::to_string(rec.f1) + " child2=" + rec.child2.value +
              " n2=" + std::to_string(rec.n2) + " f2=" + std::to_string(rec.f2) +
              (rec.violated ? " threshold_violated" : ""));
    } catch (const Error& e) {
        info_[c].stalled = true;
        event("divide-failed chain=" + c.value + " error=" + errc_name(e.code()) + " " + e.what());
    }
}

void Runner::grow(const ChainId& c, std::uint64_t n, std::uint64_t n_max)
{
    const auto& join = *sc_.join;
    auto& info = info_[c];
    auto k = std::min<std::uint64_t>(join.rate, n_max - n);
    std::vector<UserId> batch;
    std::uint64_t faulty = 0;
    char name[32];
    for (std::uint64_t i = 0; i < k; ++i) {
        std::snprintf(name, sizeof name, "j%05llu", static_cast<unsigned long long>(next_joiner_++));
        UserId u(name);
        eco_.register_user(u, Role::Validator);
        auto index = info.arrivals + i + 1;
        if (join.beta.floor_mul(static_cast<std::int64_t>(index)) > join.beta.floor_mul(static_cast<std::int64_t>(index - 1))) {
            eco_.network().inject_fault(u, join.fault, eco_.network().now());
            ++faulty;
        }
        batch.push_back(u);
    }
    try {
        const auto config = eco_.join_batch(c, batch, Role::Validator);
        info.arrivals += k;
        info.faulty_arrivals += faulty;
        event("join chain=" + c.value + " count=" + std::to_string(k) + " faulty=" + std::to_string(faulty) +
              " n=" + std::to_string(config.validators.size()));
        if (!info.rebalance_recorded && info.arrivals >= info.n0) {
            info.rebalance_recorded = true;
            RebalanceRecord r{c, info.n0, info.f0, config.validators.size(), faulty_in(config), join.beta, false};
            if (r.n0 > 0 && r.n > 0)
                r.holds = Fraction(static_cast<std::int64_t>(r.f), static_cast<std::int64_t>(r.n)) ==
                          (Fraction(static_cast<std::int64_t>(r.f0), static_cast<std::int64_t>(r.n0)) + join.beta) *
                              Fraction{1, 2};
            report_.rebalances.push_back(r);
        }
    } catch (const Error& e) {
        info.stalled = true;
        event("join-failed chain=" + c.value + " error=" + errc_name(e.code()) + " " + e.what());
    }
}

bool Runner::step(const ChainId& c)
{
    auto& info = info_[c];
    if (info.stalled) return false;
    const auto& config = eco_.chain(c).config();
    if (chain::size_trigger(eco_.chain(c).state())) {
        divide(c);
        return true;
    }
    if (sc_.join && sc_.join->rate > 0 && info.generation < sc_.join->max_generation &&
        config.validators.size() < config.n_max) {
        grow(c, config.validators.size(), config.n_max);
        return true;
    }
    return false;
}

void Runner::sample()
{
    for (const auto& c : eco_.active_chains()) {
        const auto& config = eco_.chain(c).config();
        MetricsRow row;
        row.tick = eco_.network().now();
        row.epoch = epoch_;
        row.chain = c;
        row.n = config.validators.size();
        row.f = faulty_in(config);
        row.beta = Fraction(static_cast<std::int64_t>(row.f), static_cast<std::int64_t>(row.n));
        row.divisions = info_[c].generation;
        row.messages = eco_.network().messages(c);
        report_.rows.push_back(row);
    }
}

MetricsReport Runner::run()
{
    for (const auto& spec : sc_.chains) create(spec);
    std::uint32_t last_scheduled = 0;
    for (const auto& f : sc_.faults) last_scheduled = std::max(last_scheduled, f.epoch);
    for (const auto& f : sc_.fusions) last_scheduled = std::max(last_scheduled, f.epoch);

    for (epoch_ = 0; epoch_ < sc_.horizon; ++epoch_) {
        bool work = false;
        for (const auto& f : sc_.faults) {
            if (f.epoch != epoch_) continue;
            UserId node(f.node);
            if (!eco_.network().has_node(node)) fail(f.line, "unknown node " + f.node);
            eco_.network().inject_fault(node, f.fault, eco_.network().now());
            event(std::string("fault node=") + f.node + " kind=" +
                  (f.fault.kind == Fault::Kind::Crash ? "crash" : strategy_name(f.fault.strategy)));
            work = true;
        }
        for (const auto& f : sc_.fusions) {
            if (f.epoch != epoch_) continue;
            ChainId a(f.a);
            ChainId b(f.b);
            if (!eco_.registry().has_chain(a) || !eco_.registry().has_chain(b))
                fail(f.line, "fusion names an unknown chain");
            try {
                auto fused = eco_.chain_fusion(a, b);
                const auto& config = eco_.chain(fused).config();
                auto gen = std::max(info_[a].generation, info_[b].generation);
                info_[fused] = ChainInfo{gen, config.validators.size(), faulty_in(config)};
                ++report_.fusions;
                event("fuse a=" + f.a + " b=" + f.b + " chain=" + fused.value + " n=" +
                      std::to_string(config.validators.size()) + " alpha=" + config.consensus.alpha.str());
            } catch (const Error& e) {
                event("fuse-failed a=" + f.a + " b=" + f.b + " error=" + errc_name(e.code()) + " " + e.what());
            }
            work = true;
        }
        for (const auto& c : eco_.active_chains()) work = step(c) || work;
        if (epoch_ % sc_.sample_every == 0) sample();
        if (!work && epoch_ >= last_scheduled) {
            if (epoch_ % sc_.sample_every != 0) sample();
            break;
        }
    }
    report_.safety_violations = eco_.safety_violations();
    report_.messages = eco_.network().messages_sent();
    report_.lineage_csv = eco_.registry().lineage_csv();
    report_.final_chains = eco_.active_chains();
    event("end chains=" + std::to_string(report_.final_chains.size()) + " divisions=" +
          std::to_string(report_.divisions.size()) + " fusions=" + std::to_string(report_.fusions) +
          " messages=" + std::to_string(report_.messages) + " safety_violations=" +
          std::to_string(report_.safety_violations));
    return std::move(report_);
}

} // namespace

MetricsReport run_scenario(const Scenario& scenario)
{
    Runner runner(scenario);
    return runner.run();
}

void write_metrics_csv(std::ostream& os, const MetricsReport& report)
{
    os << "tick,chain_id,n,f,beta,divisions,messages\n";
    char beta[32];
    for (const auto& r : report.rows) {
        std::snprintf(beta, sizeof beta, "%.10g", r.beta.to_double());
        os << r.tick << ',' << r.chain << ',' << r.n << ',' << r.f << ',' << beta << ',' << r.divisions << ','
           << r.messages << '\n';
    }
}

void write_events(std::ostream& os, const MetricsReport& report)
{
    for (const auto& e : report.events) os << e << '\n';
}

} // namespace mitosis::netsim

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "mitosis/analysis/violation.hpp"
#include "mitosis/chain/ecosystem.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/crypto/signature.hpp"
#include "mitosis/netsim/scenario.hpp"
#include "mitosis/xchain/toa.hpp"

using namespace mitosis;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kBadInput = 2;
constexpr int kSafetyViolation = 3;

Bytes read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, "cannot read " + path);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidParams, "cannot write " + path.string());
    out << text;
}

void write_file(const std::filesystem::path& path, const Bytes& bytes)
{
    write_file(path, std::string(bytes.begin(), bytes.end()));
}

std::vector<std::int64_t> parse_list(const std::string& text)
{
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw Error(Errc::InvalidParams, "invalid size '" + item + "' in --n");
        out.push_back(v);
    }
    if (out.empty()) throw Error(Errc::InvalidParams, "--n is empty");
    return out;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

int simulate(const SimulateArgs& a)
{
    netsim::Scenario sc;
    try {
        sc = netsim::parse_scenario_file(a.scenario);
    } catch (const Error& e) {
        std::cerr << a.scenario << ": " << e.what() << '\n';
        return kBadInput;
    }
    if (a.seed) sc.seed = *a.seed;
    auto report = netsim::run_scenario(sc);

    std::filesystem::create_directories(a.out);
    std::filesystem::path dir(a.out);
    std::ostringstream metrics;
    netsim::write_metrics_csv(metrics, report);
    write_file(dir / "metrics.csv", metrics.str());
    write_file(dir / "lineage.csv", report.lineage_csv);
    std::ostringstream events;
    netsim::write_events(events, report);
    write_file(dir / "events.log", events.str());

    std::cout << "chains=" << report.final_chains.size() << " divisions=" << report.divisions.size()
              << " fusions=" << report.fusions << " messages=" << report.messages
              << " safety_violations=" << report.safety_violations << '\n';
    return report.safety_violations == 0 ? kOk : kSafetyViolation;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    std::string alpha = "1/2";
    std::string n = "10,40,50,100";
    std::int64_t beta_steps = 20;
    std::uint64_t trials = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int analyze(const AnalyzeArgs& a)
{
    std::vector<analysis::CurvePoint> points;
    try {
        auto alpha = Fraction::parse(a.alpha);
        auto sizes = parse_list(a.n);
        points = analysis::sweep_curves(sizes, alpha, a.beta_steps, a.trials, a.seed);
    } catch (const Error& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return kBadInput;
    }
    std::ostringstream csv;
    analysis::write_csv(csv, points, a.trials > 0);
    if (a.out.empty())
        std::cout << csv.str();
    else
        write_file(a.out, csv.str());
    return kOk;
}

// ---- divide-demo ------------------------------------------------------------

struct DivideArgs {
    std::uint64_t seed = 1;
    std::uint32_t n = 10;
    std::uint32_t faulty = 0;
    std::string alpha = "1/2";
    std::uint32_t clients = 4;
};

std::string join_ids(const std::set<UserId>& ids)
{
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : " ") + id.value;
    return out;
}

int divide_demo(const DivideArgs& a)
{
    Fraction alpha;
    try {
        alpha = Fraction::parse(a.alpha);
        consensus::quorum_size(a.n, alpha);
    } catch (const Error& e) {
        std::cerr << "divide-demo: " << e.what() << '\n';
        return kBadInput;
    }
    if (a.n < 2 || a.faulty > a.n) {
        std::cerr << "divide-demo: need n >= 2 and faulty <= n\n";
        return kBadInput;
    }

    chain::Ecosystem eco(chain::EcosystemOptions{a.seed});
    ChainConfig config;
    config.chain = ChainId("C");
    config.consensus = {alpha, alpha == Fraction{1, 2} ? consensus::ConsensusKind::CFT : consensus::ConsensusKind::BFT};
    config.n_max = a.n;
    char name[32];
    for (std::uint32_t i = 0; i < a.n; ++i) {
        std::snprintf(name, sizeof name, "v%02u", i);
        eco.register_user(UserId(name), Role::Validator);
        if (i >= a.n - a.faulty)
            eco.network().inject_fault(UserId(name), netsim::Fault::byzantine(netsim::Strategy::Withhold), 0);
        config.validators.emplace(name);
    }
    for (std::uint32_t i = 0; i < a.clients; ++i) {
        std::snprintf(name, sizeof name, "u%02u", i);
        UserId u(name);
        eco.register_user(u, Role::Client);
        config.clients.insert(u);
        config.initial_assets[u] = {Asset{AssetId(std::string(name) + "-coin"), u, i + 1u, std::nullopt}};
    }
    eco.chain_creation(config);
    const auto before = eco.network().messages(config.chain, "divide");

    std::cout << "chain C n=" << a.n << " faulty=" << a.faulty << " alpha=" << alpha.str()
              << " quorum=" << eco.chain(config.chain).quorum() << '\n';
    try {
        auto result = eco.chain_division(config.chain);
        auto f_of = [&](const std::set<UserId>& vs) {
            int f = 0;
            for (const auto& v : vs) f += eco.network().is_correct(v) ? 0 : 1;
            return f;
        };
        std::cout << "divided at height " << result.agreed_height << " with "
                  << result.certificate.signatures.size() << " reconfiguration signatures\n";
        std::cout << "divide messages " << eco.network().messages(config.chain, "divide") - before << '\n';
        for (const auto& [id, vs] : {std::pair{result.child1, result.assignment.v1}, {result.child2, result.assignment.v2}}) {
            const auto& cfg = eco.chain(id).config();
            std::cout << id << " validators=" << join_ids(vs) << " faulty=" << f_of(vs)
                      << " clients=" << join_ids(cfg.clients) << '\n';
        }
        if (result.assignment.seed)
            std::cout << "assignment seed " << to_hex(as_view(result.assignment.seed->value)) << '\n';
        std::cout << eco.registry().lineage_csv();
    } catch (const Error& e) {
        std::cout << "division failed: " << errc_name(e.code()) << ": " << e.what() << '\n';
        return kRejected;
    }
    return kOk;
}

// ---- xfer-demo --------------------------------------------------------------

struct XferArgs {
    std::uint64_t seed = 1;
    std::string out = ".";
};

int xfer_demo(const XferArgs& a)
{
    chain::Ecosystem eco(chain::EcosystemOptions{a.seed, crypto::SchemeKind::Ed25519});
    crypto::Rng nonces(a.seed, 0, "xfer-demo/nonces");
    auto make_chain = [&](const std::string& id, const UserId& client) {
        ChainConfig c;
        c.chain = ChainId(id);
        c.consensus = consensus::ConsensusParams::bft();
        c.n_max = 8;
        for (int i = 0; i < 4; ++i) {
            UserId v(id + "-v" + std::to_string(i));
            eco.register_user(v, Role::Validator);
            c.validators.insert(v);
        }
        eco.register_user(client, Role::Client);
        c.clients.insert(client);
        return c;
    };
    UserId alice("alice");
    UserId bob("bob");
    auto src = make_chain("S", alice);
    src.initial_assets[alice] = {Asset{AssetId("coin"), alice, 50, std::nullopt}};
    auto dst = make_chain("T", bob);
    eco.chain_creation(src);
    eco.chain_creation(dst);

    auto lock_tag = xchain::issue_tag(eco, dst.chain, nonces);
    auto lock = xchain::toa_lock(eco, alice, src.chain, AssetId("coin"), dst.chain, bob, lock_tag);
    auto resolve_tag = xchain::issue_tag(eco, src.chain, nonces);
    auto claim = xchain::toa_claim(eco, bob, dst.chain, lock, resolve_tag);
    auto resolution = xchain::toa_resolve(eco, src.chain, claim, resolve_tag);

    std::filesystem::create_directories(a.out);
    std::filesystem::path dir(a.out);
    write_file(dir / "lock.proof", xchain::serialize(lock.inner));
    write_file(dir / "claim.proof", xchain::serialize(claim.inner));
    write_file(dir / "registry.bin", eco.registry().serialize());

    std::cout << "lock   S height " << lock.inner.height << " proof " << xchain::serialized_size(lock.inner)
              << " bytes, " << lock.inner.certificate.signatures.size() << " signatures\n";
    std::cout << "claim  T height " << claim.inner.height << " kind " << xchain::transfer_kind_name(claim.kind)
              << " proof " << xchain::serialized_size(claim.inner) << " bytes\n";
    std::cout << "resolve " << (resolution == xchain::Resolution::Claimed ? "claimed" : "aborted") << '\n';
    std::cout << "coin on S: " << eco.chain(src.chain).state().assets.count(AssetId("coin"))
              << ", on T: " << eco.chain(dst.chain).state().assets.count(AssetId("coin"))
              << " owned by " << eco.chain(dst.chain).state().assets.at(AssetId("coin")).owner << '\n';
    std::cout << "lock tag expires at height " << lock_tag.expiry_height << '\n';
    return kOk;
}

// ---- verify-proof -----------------------------------------------------------

struct VerifyArgs {
    std::string proof;
    std::string registry;
    std::optional<std::uint64_t> height;
};

int verify_proof(const VerifyArgs& a)
{
    xchain::KnowledgeProof proof;
    chain::Registry registry;
    try {
        proof = xchain::deserialize_knowledge(read_file(a.proof));
        registry = chain::Registry::deserialize(read_file(a.registry));
    } catch (const Error& e) {
        std::cerr << "verify-proof: " << e.what() << '\n';
        return kBadInput;
    }
    if (!registry.has_chain(proof.source_chain)) {
        std::cout << "rejected: source chain\n";
        return kRejected;
    }
    crypto::Ed25519Scheme scheme;
    auto result = xchain::tok_verify_proof(proof, proof.tag, registry.chain(proof.source_chain).config,
                                           registry.validator_accounts(proof.source_chain), scheme,
                                           a.height.value_or(proof.tag.issued_height));
    if (result.accepted) {
        std::cout << "accepted\n";
        return kOk;
    }
    std::cout << "rejected: " << result.reason << '\n';
    return kRejected;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mitosis ecosystem simulator and division analyzer"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "run a scenario and write metrics.csv, lineage.csv, events.log");
    s->add_option("--scenario", sim.scenario, "scenario file")->required();
    s->add_option("--seed", sim.seed, "overrides the scenario seed");
    s->add_option("--out", sim.out, "output directory");

    AnalyzeArgs an;
    auto* z = app.add_subcommand("analyze", "division violation probability sweep as CSV");
    z->add_option("--alpha", an.alpha, "fault threshold p/q in (0, 1/2]");
    z->add_option("--n", an.n, "comma-separated parent sizes");
    z->add_option("--beta-steps", an.beta_steps, "grid points in [0, alpha)");
    z->add_option("--trials", an.trials, "Monte Carlo trials per point (0: none)");
    z->add_option("--seed", an.seed, "Monte Carlo seed");
    z->add_option("--out", an.out, "output file (default: stdout)");

    DivideArgs dv;
    auto* d = app.add_subcommand("divide-demo", "divide one chain and print the outcome");
    d->add_option("--seed", dv.seed);
    d->add_option("--n", dv.n, "validators");
    d->add_option("--faulty", dv.faulty, "withholding validators");
    d->add_option("--alpha", dv.alpha, "fault threshold p/q");
    d->add_option("--clients", dv.clients);

    XferArgs xf;
    auto* x = app.add_subcommand("xfer-demo", "cross-chain transfer; writes lock.proof, claim.proof, registry.bin");
    x->add_option("--seed", xf.seed);
    x->add_option("--out", xf.out, "output directory");

    VerifyArgs vp;
    auto* v = app.add_subcommand("verify-proof", "check a knowledge proof against a registry");
    v->add_option("--proof", vp.proof)->required();
    v->add_option("--registry", vp.registry)->required();
    v->add_option("--height", vp.height, "current height of the verifying chain (default: tag issue height)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (*s) return simulate(sim);
        if (*z) return analyze(an);
        if (*d) return divide_demo(dv);
        if (*x) return xfer_demo(xf);
        if (*v) return verify_proof(vp);
    } catch (const Error& e) {
        std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}

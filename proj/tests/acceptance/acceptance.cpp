// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "fixtures.hpp"
#include "mitosis/analysis/violation.hpp"
#include "mitosis/assignment/assignment.hpp"
#include "mitosis/crypto/rng.hpp"
#include "mitosis/netsim/scenario.hpp"
#include "oracles.hpp"
#include "partition_check.hpp"
#include "toa_schedule.hpp"
#include "tok_fuzz.hpp"

using namespace mitosis;
using namespace mitosis::testing;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- 1 ----------------------------------------------------------------------

Verdict exact_vs_enumeration()
{
    auto t0 = std::chrono::steady_clock::now();
    int cases = 0;
    int mismatches = 0;
    for (int n = 2; n <= 12; ++n)
        for (int f = 0; f <= n; ++f)
            for (auto [p, q] : {std::pair{1LL, 3LL}, std::pair{1LL, 2LL}}) {
                ++cases;
                auto exact = analysis::violation_probability_exact({n, f, Fraction{p, q}});
                if (exact != brute_violation(n, f, p, q)) ++mismatches;
            }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {mismatches == 0 && secs < 10,
            std::to_string(cases) + " (n, f, alpha) cases, " + std::to_string(mismatches) + " mismatches, " +
                fmt("%.2f s", secs)};
}

// ---- 2 ----------------------------------------------------------------------

Verdict analyze_curves()
{
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::int64_t> sizes{10, 40, 50, 100};
    std::vector<std::string> failures;
    std::size_t points_total = 0;
    bool eleven_21 = false;
    int regime_points = 0;
    int rounded_out = 0;
    auto dir = scratch_dir("acceptance-curves");

    for (auto alpha : {Fraction{1, 2}, Fraction{1, 3}}) {
        auto points = analysis::sweep_curves(sizes, alpha, 20, 100000, 1);
        points_total += points.size();

        // The CLI emits exactly these curves.
        auto run = run_cli(dir, "analyze --alpha " + alpha.str() + " --n 10,40,50,100 --beta-steps 20 --trials 100000 --seed 1");
        std::ostringstream expected;
        analysis::write_csv(expected, points, true);
        if (run.exit_code != 0 || run.out != expected.str()) failures.push_back("CLI output differs for alpha " + alpha.str());

        const Fraction regime = alpha == Fraction{1, 3} ? Fraction{1, 4} : Fraction{2, 5};
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            std::string where = "n=" + std::to_string(p.n) + " alpha=" + alpha.str() + " beta=" + p.beta.str();
            if (p.beta == Fraction{0, 1} && p.exact != 0) failures.push_back("(a) " + where);
            if (i > 0 && points[i - 1].n == p.n && p.exact < points[i - 1].exact) failures.push_back("(b) " + where);
            double exact = analysis::to_double(p.exact);
            if (alpha <= p.beta + p.beta && exact > p.bound.combined) failures.push_back("(d) " + where);
            // The regime is about the faulty ratio a chain actually has; with
            // f rounded from the grid value that is f/n, not beta.
            const Fraction realized{p.f, p.n};
            if (p.beta <= regime && realized <= regime) {
                ++regime_points;
                if (exact > analysis::violation_bound_at(alpha, realized, p.n).single_tail)
                    failures.push_back("(e) " + where);
            } else if (p.beta <= regime) {
                ++rounded_out;
            }
            if (p.n == 10 && alpha == Fraction{1, 2} && p.beta == Fraction{2, 5})
                eleven_21 = p.exact == analysis::Rational(11, 21) && p.f == 4;
        }
    }
    if (!eleven_21) failures.push_back("(c) exact(n=10, beta=0.4, alpha=1/2) != 11/21");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 120) failures.push_back("runtime");
    std::string detail = std::to_string(points_total) + " grid points with 1e5 Monte Carlo trials each, " +
                         std::to_string(regime_points) + " in the low-beta regime (" + std::to_string(rounded_out) +
                         " rounded above it), " + fmt("%.1f s", secs);
    if (!failures.empty()) detail += "; first failure " + failures.front() + " (" + std::to_string(failures.size()) + " total)";
    return {failures.empty(), detail};
}

// ---- 3 ----------------------------------------------------------------------

Verdict montecarlo_agreement()
{
    crypto::Rng rng(2024, 0, "acceptance/mc-params");
    const std::uint64_t trials = 100000;
    int failures = 0;
    int nondeterministic = 0;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        auto n = static_cast<std::int64_t>(rng.between(2, 100));
        auto f = static_cast<std::int64_t>(rng.between(0, static_cast<std::uint64_t>(n)));
        Fraction alpha = rng.below(2) ? Fraction{1, 3} : Fraction{1, 2};
        analysis::DivisionParams d{n, f, alpha};
        double exact = analysis::to_double(analysis::violation_probability_exact(d));
        auto seed = rng.next();
        auto mc = analysis::violation_frequency_montecarlo(d, trials, seed);
        if (analysis::violation_frequency_montecarlo(d, trials, seed).violations != mc.violations) ++nondeterministic;
        // The estimated standard error is zero when no trial (or every trial)
        // violates; the binomial error at the exact p covers that case.
        double sigma = std::max(mc.stderr_, std::sqrt(exact * (1 - exact) / static_cast<double>(trials)));
        double diff = std::abs(mc.frequency - exact);
        if (sigma == 0 ? diff != 0 : diff > 4 * sigma) ++failures;
        if (sigma > 0) worst = std::max(worst, diff / sigma);
    }
    return {failures == 0 && nondeterministic == 0,
            "20 parameter sets, 1e5 trials each, " + std::to_string(failures) + " outside 4 stderr (worst " +
                fmt("%.2f", worst) + " stderr), " + std::to_string(nondeterministic) + " nondeterministic"};
}

// ---- 4 ----------------------------------------------------------------------

Verdict assignment_distribution()
{
    std::set<UserId> ids;
    std::set<UserId> faulty;
    for (int i = 0; i < 10; ++i) {
        UserId u("validator-" + std::to_string(i));
        ids.insert(u);
        if (i % 3 == 0) faulty.insert(u);  // 0, 3, 6, 9
    }
    const int seeds = 100000;
    std::vector<int> counts(5, 0);
    for (int s = 0; s < seeds; ++s) {
        crypto::RandomSeed seed{crypto::derive_stream(static_cast<std::uint64_t>(s), 0, "acceptance/assignment")};
        auto out = assignment::assign_randomized(ids, seed);
        int f1 = 0;
        for (const auto& v : out.v1) f1 += static_cast<int>(faulty.count(v));
        ++counts[static_cast<std::size_t>(f1)];
    }
    double tv = 0;
    for (int k = 0; k <= 4; ++k)
        tv += std::abs(counts[static_cast<std::size_t>(k)] / static_cast<double>(seeds) -
                       analysis::to_double(analysis::hypergeom_pmf({10, 4, 5}, k)));
    tv /= 2;
    return {tv < 0.01, "n=10, f=4, 1e5 seeds, total variation " + fmt("%.5f", tv)};
}

// ---- 5 ----------------------------------------------------------------------

Verdict division_conformance()
{
    int runs = 0;
    int wrong_outcome = 0;
    int wrong_messages = 0;
    int outsider_divisions = 0;
    for (int n : {4, 7, 10}) {
        for (auto params : {consensus::ConsensusParams::bft(), consensus::ConsensusParams::cft()}) {
            const auto q = params.quorum(n);
            for (int withheld = 0; withheld < n; ++withheld) {
                for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                    ++runs;
                    chain::EcosystemOptions opts;
                    opts.seed = seed;
                    opts.delay = {1, 1 + seed};
                    chain::Ecosystem eco(opts);
                    auto vs = make_users(eco, "v", n, Role::Validator);
                    ChainId id("c");
                    eco.chain_creation(make_config("c", vs, {}, params, static_cast<std::uint32_t>(n)));
                    // Withholders chosen by seed, not always the highest ids.
                    crypto::Rng rng(seed, static_cast<std::uint64_t>(n * 100 + withheld), "acceptance/withhold");
                    std::vector<UserId> order(vs);
                    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
                    for (int i = 0; i < withheld; ++i)
                        eco.network().inject_fault(order[static_cast<std::size_t>(i)],
                                                   netsim::Fault::byzantine(netsim::Strategy::Withhold),
                                                   eco.network().now());
                    bool completed = true;
                    try {
                        eco.chain_division(id);
                    } catch (const Error&) {
                        completed = false;
                    }
                    if (completed != (n - withheld >= q)) ++wrong_outcome;
                    // DIVIDE to every member plus an ack from every sending
                    // member to every member.
                    auto expected = static_cast<std::uint64_t>(n + (n - withheld) * n);
                    if (eco.network().messages(id, "divide") != expected) ++wrong_messages;
                    if (withheld == 0 && expected != static_cast<std::uint64_t>(n + n * n)) ++wrong_messages;
                }
            }
            // Outsiders never trigger a division.
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                chain::EcosystemOptions opts;
                opts.seed = seed;
                chain::Ecosystem eco(opts);
                auto vs = make_users(eco, "v", n, Role::Validator);
                auto outsiders = make_users(eco, "x", 2, Role::Validator);
                auto client = make_users(eco, "c", 1, Role::Client);
                ChainId id("c");
                eco.chain_creation(make_config("c", vs, client, params, static_cast<std::uint32_t>(n)));
                for (const auto& who : {outsiders[0], outsiders[1], client[0]}) {
                    try {
                        eco.chain_division(id, who);
                        ++outsider_divisions;
                    } catch (const Error& e) {
                        if (e.code() != Errc::UnknownInitiator) ++outsider_divisions;
                    }
                    for (const auto& v : vs) {
                        const auto* st = eco.division_state(id, v);
                        if (st && st->phase != chain::DivisionPhase::Idle) ++outsider_divisions;
                    }
                    if (!eco.registry().chain(id).active || eco.chain(id).halted()) ++outsider_divisions;
                }
            }
        }
    }
    return {wrong_outcome == 0 && wrong_messages == 0 && outsider_divisions == 0,
            std::to_string(runs) + " withholding runs at n in {4, 7, 10}: " + std::to_string(wrong_outcome) +
                " wrong outcomes, " + std::to_string(wrong_messages) + " wrong message counts; " +
                std::to_string(outsider_divisions) + " divisions by non-members"};
}

// ---- 6 ----------------------------------------------------------------------

Verdict division_partition()
{
    std::uint64_t violations = 0;
    std::uint64_t accounts = 0;
    std::uint64_t assets = 0;
    std::string first;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        auto out = division_partition_case(seed);
        violations += out.violations;
        accounts += out.accounts;
        assets += out.assets;
        if (first.empty() && !out.problems.empty()) first = out.problems.front();
    }
    return {violations == 0, "1000 seeded divisions, " + std::to_string(accounts) + " accounts and " +
                                 std::to_string(assets) + " assets checked, " + std::to_string(violations) +
                                 " violations" + (first.empty() ? "" : "; " + first)};
}

// ---- 7 ----------------------------------------------------------------------

Verdict toa_safety()
{
    std::uint64_t locks = 0;
    std::uint64_t claimed = 0;
    std::uint64_t aborted = 0;
    std::uint64_t double_spends = 0;
    std::uint64_t unresolved = 0;
    std::uint64_t problems = 0;
    std::string first;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
        ToaSchedule schedule(seed);
        auto out = schedule.run(12);
        locks += out.locks;
        claimed += out.claimed;
        aborted += out.aborted;
        double_spends += out.double_spends;
        unresolved += out.unresolved;
        problems += out.problems.size();
        if (first.empty() && !out.problems.empty()) first = out.problems.front();
    }
    return {double_spends == 0 && unresolved == 0 && problems == 0,
            "10000 schedules, " + std::to_string(locks) + " locks (" + std::to_string(claimed) + " claimed, " +
                std::to_string(aborted) + " aborted), " + std::to_string(double_spends) + " double spends, " +
                std::to_string(unresolved) + " unresolved" + (first.empty() ? "" : "; " + first)};
}

// ---- 8 ----------------------------------------------------------------------

Verdict tok_soundness()
{
    TokFuzz fuzz(8);
    auto out = fuzz.run(100, 100);
    std::string reasons;
    for (const auto& [r, c] : out.reasons) reasons += (reasons.empty() ? "" : ", ") + r + " " + std::to_string(c);
    return {out.forged == 10000 && out.forged_rejected == out.forged && out.honest_accepted == out.honest,
            std::to_string(out.forged_rejected) + "/" + std::to_string(out.forged) + " forged rejected, " +
                std::to_string(out.honest_accepted) + "/" + std::to_string(out.honest) + " honest accepted (" +
                reasons + ")"};
}

// ---- 9 ----------------------------------------------------------------------

Verdict growth_dynamic()
{
    auto sc = netsim::parse_scenario_file(MITOSIS_SOURCE_DIR "/scenarios/growth.mit");
    std::uint64_t divisions = 0;
    std::uint64_t observed = 0;
    double expected = 0;
    double variance = 0;
    std::uint64_t first_observed = 0;
    std::uint64_t rebalances = 0;
    std::uint64_t rebalance_failures = 0;
    std::uint64_t short_runs = 0;
    std::uint64_t safety = 0;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache;
    const std::uint64_t seeds = 1000;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        sc.seed = seed;
        auto report = netsim::run_scenario(sc);
        safety += report.safety_violations;
        for (const auto& r : report.rebalances) {
            ++rebalances;
            if (!r.holds || r.n != 2 * r.n0) ++rebalance_failures;
        }
        // Three generations reached unless a child stalled on its way.
        bool stalled = false;
        for (const auto& e : report.events) stalled |= e.find("failed") != std::string::npos;
        if (!stalled && report.final_chains.size() != 8) ++short_runs;
        for (std::size_t i = 0; i < report.divisions.size(); ++i) {
            const auto& d = report.divisions[i];
            auto key = std::pair{d.n, d.f};
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, analysis::to_double(analysis::violation_probability_exact(
                                            {static_cast<std::int64_t>(d.n), static_cast<std::int64_t>(d.f), d.alpha})))
                         .first;
            double p = it->second;
            ++divisions;
            expected += p;
            variance += p * (1 - p);
            observed += d.violated ? 1 : 0;
            if (i == 0) first_observed += d.violated ? 1 : 0;
        }
    }
    double sd = std::sqrt(variance);
    bool incidence = std::abs(static_cast<double>(observed) - expected) <= 4 * sd;
    // The first division of every run is the same (n = 20, f = 4) split.
    double p0 = analysis::to_double(analysis::violation_probability_exact({20, 4, Fraction{1, 2}}));
    double sd0 = std::sqrt(p0 * (1 - p0) * static_cast<double>(seeds));
    bool first_ok = std::abs(static_cast<double>(first_observed) - p0 * static_cast<double>(seeds)) <= 4 * sd0;
    return {incidence && first_ok && rebalance_failures == 0 && rebalances > 0 && short_runs == 0 && safety == 0,
            "1000 seeds, " + std::to_string(divisions) + " divisions, violations observed " + std::to_string(observed) +
                " vs expected " + fmt("%.1f", expected) + " (sd " + fmt("%.1f", sd) + "); first division " +
                std::to_string(first_observed) + " vs " + fmt("%.1f", p0 * static_cast<double>(seeds)) + "; " +
                std::to_string(rebalances) + " doublings, " + std::to_string(rebalance_failures) +
                " off (b'+b)/2; " + std::to_string(short_runs) + " runs short of 3 generations; " +
                std::to_string(safety) + " safety violations"};
}

// ---- 10 ---------------------------------------------------------------------

Verdict cli_determinism()
{
    const std::string scenario = MITOSIS_SOURCE_DIR "/scenarios/growth.mit";
    struct Case {
        std::string name;
        std::string args;
        std::vector<std::string> files;
    };
    std::vector<Case> cases{
        {"simulate", "simulate --scenario " + scenario + " --seed 9 --out out", {"out/metrics.csv", "out/lineage.csv", "out/events.log"}},
        {"analyze", "analyze --alpha 1/3 --n 10,40 --trials 20000 --seed 9 --out sweep.csv", {"sweep.csv"}},
        {"divide-demo", "divide-demo --n 9 --faulty 2 --seed 9", {}},
        {"xfer-demo", "xfer-demo --seed 9 --out xfer", {"xfer/lock.proof", "xfer/claim.proof", "xfer/registry.bin"}},
        {"verify-proof", "verify-proof --proof ../xfer-demo-1/xfer/lock.proof --registry ../xfer-demo-1/xfer/registry.bin", {}},
    };
    auto root = scratch_dir("acceptance-determinism");
    std::vector<std::string> differing;
    for (const auto& c : cases) {
        auto a = run_cli(root / (c.name + "-1"), c.args);
        auto b = run_cli(root / (c.name + "-2"), c.args);
        bool same = a.exit_code == 0 && b.exit_code == 0 && a.out == b.out && a.err == b.err &&
                    (!a.out.empty() || !c.files.empty());
        for (const auto& f : c.files) {
            auto fa = slurp(root / (c.name + "-1") / f);
            same = same && !fa.empty() && fa == slurp(root / (c.name + "-2") / f);
        }
        if (!same) differing.push_back(c.name);
    }
    std::string detail = std::to_string(cases.size()) + " subcommands run twice";
    if (!differing.empty()) detail += "; differing: " + differing.front();
    return {differing.empty(), detail};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"exact probability equals split enumeration for n <= 12", exact_vs_enumeration},
        {"analyze curves: shape and bounds", analyze_curves},
        {"Monte Carlo agrees with the exact probability", montecarlo_agreement},
        {"randomized assignment follows the hypergeometric law", assignment_distribution},
        {"division protocol conformance", division_conformance},
        {"children partition the parent snapshot", division_partition},
        {"lock/claim/resolve never double spends", toa_safety},
        {"forged knowledge proofs are rejected", tok_soundness},
        {"growth and division dynamic", growth_dynamic},
        {"CLI output is deterministic", cli_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " -- "
                  << v.detail << " [" << fmt("%.1f s", secs) << "]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
    return failed == 0 ? 0 : 1;
}

#include "mitosis/analysis/violation.hpp"

#include <cmath>
#include <cstdio>

#include "mitosis/assignment/assignment.hpp"
#include "mitosis/core/error.hpp"
#include "mitosis/crypto/rng.hpp"

namespace mitosis::analysis {

void DivisionParams::validate() const
{
    if (n < 2) throw Error(Errc::InvalidParams, "division needs n >= 2");
    if (f < 0 || f > n) throw Error(Errc::InvalidParams, "need 0 <= f <= n");
    if (alpha.num() == 0 || alpha > Fraction{1, 2}) throw Error(Errc::InvalidParams, "alpha must be in (0, 1/2]");
}

bool violates(std::int64_t f_i, std::int64_t n_i, const Fraction& alpha)
{
    // f_i * q >= p * n_i
    return static_cast<__int128>(f_i) * alpha.den() >= static_cast<__int128>(alpha.num()) * n_i;
}

Rational violation_probability_exact(const DivisionParams& d)
{
    d.validate();
    HypergeomParams h{d.n, d.f, d.n1()};
    BigInt favourable = 0;
    for (auto k = h.support_min(); k <= h.support_max(); ++k)
        if (violates(k, d.n1(), d.alpha) || violates(d.f - k, d.n2(), d.alpha))
            favourable += binomial(d.f, k) * binomial(d.n - d.f, d.n1() - k);
    return Rational(favourable, binomial(d.n, d.n1()));
}

ViolationBound violation_bound_at(const Fraction& alpha, const Fraction& beta, std::int64_t n)
{
    double gap = alpha.to_double() - beta.to_double();
    double single = std::exp(-gap * gap * static_cast<double>(n));
    return {single, 2.0 * single};
}

ViolationBound violation_probability_bound(const DivisionParams& d)
{
    d.validate();
    if (!(d.beta() < d.alpha)) throw Error(Errc::InvalidParams, "bound requires beta < alpha");
    return violation_bound_at(d.alpha, d.beta(), d.n);
}

MonteCarloResult violation_frequency_montecarlo(const DivisionParams& d, std::uint64_t trials, std::uint64_t seed,
                                                SplitMode mode)
{
    d.validate();
    if (trials < 1) throw Error(Errc::InvalidParams, "need at least one trial");
    const auto n1 = d.n1();
    const auto n2 = d.n2();

    std::set<UserId> ids;
    std::set<UserId> faulty;
    if (mode == SplitMode::Assignment) {
        for (std::int64_t i = 0; i < d.n; ++i) {
            char name[24];
            std::snprintf(name, sizeof name, "v%05lld", static_cast<long long>(i));
            ids.emplace(name);
            if (i < d.f) faulty.emplace(name);
        }
    }

    MonteCarloResult out;
    out.trials = trials;
    for (std::uint64_t chunk = 0; chunk * kMonteCarloChunk < trials; ++chunk) {
        crypto::Rng rng(seed, chunk, mode == SplitMode::Direct ? "mc/direct" : "mc/assignment");
        auto end = std::min(trials, (chunk + 1) * kMonteCarloChunk);
        for (auto t = chunk * kMonteCarloChunk; t < end; ++t) {
            std::int64_t f1 = 0;
            if (mode == SplitMode::Direct) {
                auto left = static_cast<std::uint64_t>(d.n);
                auto marked = static_cast<std::uint64_t>(d.f);
                for (std::int64_t i = 0; i < n1; ++i, --left) {
                    if (rng.below(left) < marked) {
                        ++f1;
                        --marked;
                    }
                }
            } else {
                crypto::RandomSeed s;
                for (std::size_t i = 0; i < s.value.size(); i += 8) {
                    auto x = rng.next();
                    for (std::size_t j = 0; j < 8; ++j) s.value[i + j] = static_cast<std::uint8_t>(x >> (8 * j));
                }
                auto outcome = assignment::assign_randomized(ids, s);
                for (const auto& v : outcome.v1) f1 += faulty.count(v);
            }
            if (violates(f1, n1, d.alpha) || violates(d.f - f1, n2, d.alpha)) ++out.violations;
        }
    }
    out.frequency = static_cast<double>(out.violations) / static_cast<double>(trials);
    out.stderr_ = std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(trials));
    return out;
}

std::vector<Fraction> beta_grid(const Fraction& alpha, std::int64_t steps)
{
    if (steps < 1) throw Error(Errc::InvalidParams, "beta grid needs at least one step");
    std::vector<Fraction> grid;
    for (std::int64_t j = 0; j < steps; ++j) grid.push_back(alpha * Fraction{j, steps});
    return grid;
}

std::vector<CurvePoint> sweep_curves(const std::vector<std::int64_t>& n_list, const Fraction& alpha,
                                     std::int64_t beta_steps, std::uint64_t trials, std::uint64_t seed)
{
    auto grid = beta_grid(alpha, beta_steps);
    std::vector<CurvePoint> points;
    for (auto n : n_list) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            CurvePoint p;
            p.n = n;
            p.alpha = alpha;
            p.beta = grid[j];
            p.f = grid[j].round_mul(n);
            DivisionParams d{n, p.f, alpha};
            p.exact = violation_probability_exact(d);
            p.bound = violation_bound_at(alpha, p.beta, n);
            if (trials > 0) {
                auto stream = crypto::derive_stream(seed, static_cast<std::uint64_t>(n) << 20 | j, "sweep");
                std::uint64_t point_seed = 0;
                for (int b = 0; b < 8; ++b) point_seed = point_seed << 8 | stream[static_cast<std::size_t>(b)];
                p.montecarlo = violation_frequency_montecarlo(d, trials, point_seed);
            }
            points.push_back(std::move(p));
        }
    }
    return points;
}

void write_csv(std::ostream& os, const std::vector<CurvePoint>& points, bool with_montecarlo)
{
    os << "n,alpha,beta,f,exact,bound_single,bound_combined";
    if (with_montecarlo) os << ",mc_freq,mc_stderr";
    os << '\n';
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    auto short_num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return std::string(buf);
    };
    for (const auto& p : points) {
        os << p.n << ',' << p.alpha.str() << ',' << short_num(p.beta.to_double()) << ',' << p.f << ','
           << num(to_double(p.exact)) << ',' << num(p.bound.single_tail) << ',' << num(p.bound.combined);
        if (with_montecarlo) {
            const auto& mc = p.montecarlo.value();
            os << ',' << num(mc.frequency) << ',' << num(mc.stderr_);
        }
        os << '\n';
    }
}

} // namespace mitosis::analysis

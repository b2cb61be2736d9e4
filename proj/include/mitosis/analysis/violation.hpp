#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "mitosis/analysis/hypergeom.hpp"

namespace mitosis::analysis {

// A parent chain of n validators, f of them faulty, divided into children
// of ceil(n/2) and floor(n/2) validators under threshold alpha.
struct DivisionParams {
    std::int64_t n = 0;
    std::int64_t f = 0;
    Fraction alpha{1, 2};

    // Throws InvalidParams unless n >= 2, 0 <= f <= n, 0 < alpha <= 1/2.
    void validate() const;
    Fraction beta() const { return Fraction{f, n}; }
    std::int64_t n1() const { return (n + 1) / 2; }
    std::int64_t n2() const { return n / 2; }
};

// A child of size n_i with f_i faulty violates its bound iff f_i >= alpha n_i.
bool violates(std::int64_t f_i, std::int64_t n_i, const Fraction& alpha);

// P(child 1 or child 2 violates) with f_1 ~ H(n, f, ceil(n/2)), exactly.
Rational violation_probability_exact(const DivisionParams& d);

struct ViolationBound {
    double single_tail = 1.0;
    double combined = 1.0;
};

// e^{-(alpha - beta)^2 n} and twice that. Throws InvalidParams if beta >= alpha.
ViolationBound violation_probability_bound(const DivisionParams& d);
// Same closed form at an arbitrary beta (used on the sweep grid).
ViolationBound violation_bound_at(const Fraction& alpha, const Fraction& beta, std::int64_t n);

enum class SplitMode : std::uint8_t {
    // Sequential draws without replacement.
    Direct,
    // Hash ranking of validator ids under a fresh seed per trial.
    Assignment,
};

struct MonteCarloResult {
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    double frequency = 0.0;
    double stderr_ = 0.0;
};

// Trials run in chunks of kMonteCarloChunk, each with its own RNG stream
// derived from (seed, chunk index), so results do not depend on scheduling.
constexpr std::uint64_t kMonteCarloChunk = 4096;

MonteCarloResult violation_frequency_montecarlo(const DivisionParams& d, std::uint64_t trials, std::uint64_t seed,
                                                SplitMode mode = SplitMode::Direct);

struct CurvePoint {
    std::int64_t n = 0;
    Fraction alpha;
    Fraction beta;  // grid value j * alpha / K
    std::int64_t f = 0;
    Rational exact;
    ViolationBound bound;
    std::optional<MonteCarloResult> montecarlo;
};

// beta_j = j * alpha / K for j = 0..K-1; f = round-half-up(beta_j * n).
std::vector<Fraction> beta_grid(const Fraction& alpha, std::int64_t steps);

std::vector<CurvePoint> sweep_curves(const std::vector<std::int64_t>& n_list, const Fraction& alpha,
                                     std::int64_t beta_steps, std::uint64_t trials, std::uint64_t seed);

// n,alpha,beta,f,exact,bound_single,bound_combined[,mc_freq,mc_stderr]
void write_csv(std::ostream& os, const std::vector<CurvePoint>& points, bool with_montecarlo);

} // namespace mitosis::analysis

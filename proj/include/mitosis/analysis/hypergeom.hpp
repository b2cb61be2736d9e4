#pragma once

#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "mitosis/core/fraction.hpp"

namespace mitosis::analysis {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational to_rational(const Fraction& f);
// Correctly rounded for any magnitude the analysis produces.
double to_double(const Rational& r);
BigInt binomial(std::int64_t n, std::int64_t k);

// H(N, M, n): marked elements among n draws without replacement from N
// items of which M are marked.
struct HypergeomParams {
    std::int64_t N = 0;
    std::int64_t M = 0;
    std::int64_t n = 0;

    // Throws InvalidParams unless 0 <= M <= N and 0 <= n <= N.
    void validate() const;
    std::int64_t support_min() const;
    std::int64_t support_max() const;
};

// C(M,k) C(N-M,n-k) / C(N,n); zero outside the support.
Rational hypergeom_pmf(const HypergeomParams& p, std::int64_t k);
// nM/N.
Rational hypergeom_mean(const HypergeomParams& p);

// P(X >= E[X] + t n) and P(X <= E[X] - t n), exactly.
Rational upper_tail_exact(const HypergeomParams& p, const Fraction& t);
Rational lower_tail_exact(const HypergeomParams& p, const Fraction& t);

struct TailBound {
    double bound = 1.0;
    // 0 <= t <= nM/N; outside this range the bound is still returned.
    bool in_validity_range = true;
};

// e^{-2 t^2 n}, which bounds both tails.
TailBound tail_bound(const HypergeomParams& p, const Fraction& t);

} // namespace mitosis::analysis

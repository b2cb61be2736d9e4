#pragma once

#include "mitosis/analysis/hypergeom.hpp"

namespace mitosis::testing {

// Enumerates every split of n validators (faulty = the first f) into a first
// child of ceil(n/2) and counts splits where some child has f_i * q >= p * n_i.
inline analysis::Rational brute_violation(int n, int f, long long p, long long q)
{
    const int n1 = (n + 1) / 2;
    const int n2 = n / 2;
    const unsigned faulty = (1u << f) - 1;
    long long bad = 0;
    long long total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != n1) continue;
        ++total;
        const int f1 = __builtin_popcount(mask & faulty);
        const int f2 = f - f1;
        if (f1 * q >= p * n1 || f2 * q >= p * n2) ++bad;
    }
    return analysis::Rational(bad, total);
}

} // namespace mitosis::testing

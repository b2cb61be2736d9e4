#include "mitosis/analysis/hypergeom.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "mitosis/core/error.hpp"

namespace mitosis::analysis {

Rational to_rational(const Fraction& f)
{
    return Rational(BigInt(f.num()), BigInt(f.den()));
}

double to_double(const Rational& r)
{
    using Float = boost::multiprecision::cpp_bin_float_100;
    Float q = Float(numerator(r)) / Float(denominator(r));
    return q.convert_to<double>();
}

BigInt binomial(std::int64_t n, std::int64_t k)
{
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

void HypergeomParams::validate() const
{
    if (N < 0 || M < 0 || n < 0 || M > N || n > N)
        throw Error(Errc::InvalidParams, "hypergeometric parameters need 0 <= M <= N and 0 <= n <= N");
}

std::int64_t HypergeomParams::support_min() const
{
    return std::max<std::int64_t>(0, n + M - N);
}

std::int64_t HypergeomParams::support_max() const
{
    return std::min(n, M);
}

Rational hypergeom_pmf(const HypergeomParams& p, std::int64_t k)
{
    p.validate();
    if (k < p.support_min() || k > p.support_max()) return 0;
    return Rational(binomial(p.M, k) * binomial(p.N - p.M, p.n - k), binomial(p.N, p.n));
}

Rational hypergeom_mean(const HypergeomParams& p)
{
    p.validate();
    if (p.N == 0) return 0;
    return Rational(BigInt(p.n) * p.M, BigInt(p.N));
}

namespace {

BigInt ceil_of(const Rational& r)
{
    BigInt q = numerator(r) / denominator(r);
    if (q * denominator(r) < numerator(r)) ++q;
    return q;
}

BigInt floor_of(const Rational& r)
{
    BigInt q = numerator(r) / denominator(r);
    if (q * denominator(r) > numerator(r)) --q;
    return q;
}

Rational sum_pmf(const HypergeomParams& p, const BigInt& lo, const BigInt& hi)
{
    BigInt from = std::max<BigInt>(lo, p.support_min());
    BigInt to = std::min<BigInt>(hi, p.support_max());
    BigInt total = 0;
    for (BigInt k = from; k <= to; ++k) {
        auto kk = k.convert_to<std::int64_t>();
        total += binomial(p.M, kk) * binomial(p.N - p.M, p.n - kk);
    }
    return Rational(total, binomial(p.N, p.n));
}

} // namespace

Rational upper_tail_exact(const HypergeomParams& p, const Fraction& t)
{
    p.validate();
    Rational threshold = hypergeom_mean(p) + to_rational(t) * p.n;
    return sum_pmf(p, ceil_of(threshold), p.n);
}

Rational lower_tail_exact(const HypergeomParams& p, const Fraction& t)
{
    p.validate();
    Rational threshold = hypergeom_mean(p) - to_rational(t) * p.n;
    return sum_pmf(p, 0, floor_of(threshold));
}

TailBound tail_bound(const HypergeomParams& p, const Fraction& t)
{
    p.validate();
    TailBound out;
    double td = t.to_double();
    out.bound = std::exp(-2.0 * td * td * static_cast<double>(p.n));
    out.in_validity_range = to_rational(t) <= hypergeom_mean(p);
    return out;
}

} // namespace mitosis::analysis

#include "mitosis/core/fraction.hpp"

#include <charconv>
#include <numeric>

#include "mitosis/core/error.hpp"

namespace mitosis {

namespace {
using wide = __int128;

std::int64_t checked(wide v)
{
    if (v > INT64_MAX || v < INT64_MIN) throw Error(Errc::InvalidParams, "fraction overflow");
    return static_cast<std::int64_t>(v);
}

std::int64_t parse_int(std::string_view s, std::string_view whole)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(Errc::ParseError, "invalid rational '" + std::string(whole) + "'");
    return v;
}
} // namespace

Fraction::Fraction(std::int64_t num, std::int64_t den)
{
    if (den == 0) throw Error(Errc::InvalidParams, "zero denominator");
    if (num < 0 || den < 0) throw Error(Errc::InvalidParams, "negative fraction");
    auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Fraction Fraction::parse(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return {parse_int(text, text), 1};
    return {parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text)};
}

std::int64_t Fraction::ceil_mul(std::int64_t n) const
{
    wide p = static_cast<wide>(num_) * n;
    wide q = den_;
    return checked((p + q - 1) / q);
}

std::int64_t Fraction::floor_mul(std::int64_t n) const
{
    return checked(static_cast<wide>(num_) * n / den_);
}

std::int64_t Fraction::round_mul(std::int64_t n) const
{
    // floor(p*n/q + 1/2) = floor((2pn + q) / 2q)
    wide p = static_cast<wide>(num_) * n;
    return checked((2 * p + den_) / (2 * static_cast<wide>(den_)));
}

Fraction Fraction::one_minus() const
{
    if (num_ > den_) throw Error(Errc::InvalidParams, "1 - x for x > 1");
    return {den_ - num_, den_};
}

std::string Fraction::str() const
{
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b)
{
    wide lhs = static_cast<wide>(a.num_) * b.den_;
    wide rhs = static_cast<wide>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Fraction operator+(const Fraction& a, const Fraction& b)
{
    return {checked(static_cast<wide>(a.num_) * b.den_ + static_cast<wide>(b.num_) * a.den_),
            checked(static_cast<wide>(a.den_) * b.den_)};
}

Fraction operator*(const Fraction& a, const Fraction& b)
{
    return {checked(static_cast<wide>(a.num_) * b.num_), checked(static_cast<wide>(a.den_) * b.den_)};
}

Fraction operator/(const Fraction& a, const Fraction& b)
{
    return {checked(static_cast<wide>(a.num_) * b.den_), checked(static_cast<wide>(a.den_) * b.num_)};
}

} // namespace mitosis

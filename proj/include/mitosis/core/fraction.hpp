#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace mitosis {

// Exact non-negative rational p/q kept in lowest terms. Used for fault
// thresholds and faulty ratios so that threshold comparisons never touch
// floating point.
class Fraction {
public:
    constexpr Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den);

    static Fraction parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    // ceil(this * n), exactly.
    std::int64_t ceil_mul(std::int64_t n) const;
    // floor(this * n), exactly.
    std::int64_t floor_mul(std::int64_t n) const;
    // round-half-up(this * n), exactly.
    std::int64_t round_mul(std::int64_t n) const;

    Fraction one_minus() const;
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend bool operator==(const Fraction& a, const Fraction& b) = default;
    friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b);

    friend Fraction operator+(const Fraction& a, const Fraction& b);
    friend Fraction operator*(const Fraction& a, const Fraction& b);
    friend Fraction operator/(const Fraction& a, const Fraction& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Fraction min(const Fraction& a, const Fraction& b) { return b < a ? b : a; }

} // namespace mitosis

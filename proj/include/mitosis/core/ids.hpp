#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include "mitosis/core/bytes.hpp"

namespace mitosis {

// Opaque byte-string identifiers. Ordering is lexicographic over the raw
// bytes (std::string compares through char_traits, i.e. as unsigned char).
template <typename Tag>
struct Identifier {
    std::string value;

    Identifier() = default;
    explicit Identifier(std::string v) : value(std::move(v)) {}

    auto operator<=>(const Identifier&) const = default;
    bool operator==(const Identifier&) const = default;

    bool empty() const { return value.empty(); }
    const std::string& str() const { return value; }
};

template <typename Tag>
std::ostream& operator<<(std::ostream& os, const Identifier<Tag>& id)
{
    return os << id.value;
}

struct UserTag {};
struct ChainTag {};
struct AssetTag {};

using UserId = Identifier<UserTag>;
using ChainId = Identifier<ChainTag>;
using AssetId = Identifier<AssetTag>;

// 128-bit freshness/lock nonce.
struct Nonce {
    std::array<std::uint8_t, 16> bytes{};

    auto operator<=>(const Nonce&) const = default;
    bool operator==(const Nonce&) const = default;

    std::string hex() const { return to_hex({bytes.data(), bytes.size()}); }
};

} // namespace mitosis

template <typename Tag>
struct std::hash<mitosis::Identifier<Tag>> {
    std::size_t operator()(const mitosis::Identifier<Tag>& id) const noexcept
    {
        return std::hash<std::string>{}(id.value);
    }
};

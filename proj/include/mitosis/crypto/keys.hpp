#pragma once

#include <compare>
#include <cstdint>

#include "mitosis/core/bytes.hpp"

namespace mitosis::crypto {

enum class SchemeKind : std::uint8_t {
    Ed25519 = 1,
    // Keyed MAC under a simulator-held master secret. Nodes can only sign with
    // keys handed to them, so forgery is excluded by construction.
    Simulated = 2,
};

struct PublicKey {
    Bytes bytes;
    auto operator<=>(const PublicKey&) const = default;
};

struct SecretKey {
    Bytes bytes;
};

struct Signature {
    Bytes bytes;
    bool operator==(const Signature&) const = default;
};

struct KeyPair {
    PublicKey public_key;
    SecretKey secret_key;
};

} // namespace mitosis::crypto

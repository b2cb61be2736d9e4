#include "mitosis/crypto/hash.hpp"

#include <sodium.h>

#include <stdexcept>

namespace mitosis::crypto {

namespace {
struct SodiumInit {
    SodiumInit()
    {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    }
};
void ensure_sodium() { static SodiumInit init; }
} // namespace

Digest sha256(ByteView data)
{
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest hmac_sha256(ByteView key, ByteView data)
{
    ensure_sodium();
    Digest out{};
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, data.data(), data.size());
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

Digest hash_fields(std::initializer_list<ByteView> parts)
{
    ByteWriter w;
    for (auto p : parts) w.field(p);
    return sha256(w.bytes());
}

} // namespace mitosis::crypto

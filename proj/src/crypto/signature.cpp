#include "mitosis/crypto/signature.hpp"

#include <sodium.h>

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis::crypto {

Ed25519Scheme::Ed25519Scheme()
{
    sha256({}); // forces sodium_init
}

KeyPair Ed25519Scheme::derive_keypair(ByteView seed) const
{
    auto s = sha256(seed);
    KeyPair kp;
    kp.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.bytes.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data(), s.data());
    return kp;
}

Signature Ed25519Scheme::sign(const SecretKey& sk, ByteView message) const
{
    if (sk.bytes.size() != crypto_sign_SECRETKEYBYTES) throw Error(Errc::InvalidParams, "bad ed25519 secret key");
    Signature sig;
    sig.bytes.resize(crypto_sign_BYTES);
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk.bytes.data());
    return sig;
}

bool Ed25519Scheme::verify(const PublicKey& pk, ByteView message, const Signature& sig) const
{
    if (pk.bytes.size() != crypto_sign_PUBLICKEYBYTES || sig.bytes.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), pk.bytes.data()) == 0;
}

SimulatedScheme::SimulatedScheme(const Digest& master) : master_(master) {}

namespace {
Bytes mac_input(ByteView pk, ByteView message)
{
    Bytes in;
    in.reserve(pk.size() + message.size());
    in.insert(in.end(), pk.begin(), pk.end());
    in.insert(in.end(), message.begin(), message.end());
    return in;
}
} // namespace

KeyPair SimulatedScheme::derive_keypair(ByteView seed) const
{
    auto sk = sha256(seed);
    auto pk = sha256(as_view(sk));
    return {PublicKey{Bytes(pk.begin(), pk.end())}, SecretKey{Bytes(sk.begin(), sk.end())}};
}

Signature SimulatedScheme::sign(const SecretKey& sk, ByteView message) const
{
    auto pk = sha256(sk.bytes);
    auto mac = hmac_sha256(as_view(master_), mac_input(as_view(pk), message));
    return {Bytes(mac.begin(), mac.end())};
}

bool SimulatedScheme::verify(const PublicKey& pk, ByteView message, const Signature& sig) const
{
    if (pk.bytes.size() != 32 || sig.bytes.size() != 32) return false;
    auto mac = hmac_sha256(as_view(master_), mac_input(pk.bytes, message));
    return sodium_memcmp(mac.data(), sig.bytes.data(), 32) == 0;
}

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind, const Digest& master_seed)
{
    if (kind == SchemeKind::Ed25519) return std::make_unique<Ed25519Scheme>();
    return std::make_unique<SimulatedScheme>(master_seed);
}

} // namespace mitosis::crypto

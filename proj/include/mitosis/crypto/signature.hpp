#pragma once

#include <memory>

#include "mitosis/core/bytes.hpp"
#include "mitosis/crypto/keys.hpp"

namespace mitosis::crypto {

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;

    virtual SchemeKind kind() const = 0;
    // Deterministic key generation from seed material.
    virtual KeyPair derive_keypair(ByteView seed) const = 0;
    virtual Signature sign(const SecretKey& sk, ByteView message) const = 0;
    virtual bool verify(const PublicKey& pk, ByteView message, const Signature& sig) const = 0;
};

class Ed25519Scheme final : public SignatureScheme {
public:
    Ed25519Scheme();

    SchemeKind kind() const override { return SchemeKind::Ed25519; }
    KeyPair derive_keypair(ByteView seed) const override;
    Signature sign(const SecretKey& sk, ByteView message) const override;
    bool verify(const PublicKey& pk, ByteView message, const Signature& sig) const override;
};

// sig = HMAC-SHA256(master, pk || message) where pk = SHA256(sk). Only the
// simulator holds `master`; it is never handed to protocol code.
class SimulatedScheme final : public SignatureScheme {
public:
    explicit SimulatedScheme(const Digest& master);

    SchemeKind kind() const override { return SchemeKind::Simulated; }
    KeyPair derive_keypair(ByteView seed) const override;
    Signature sign(const SecretKey& sk, ByteView message) const override;
    bool verify(const PublicKey& pk, ByteView message, const Signature& sig) const override;

private:
    Digest master_;
};

std::unique_ptr<SignatureScheme> make_scheme(SchemeKind kind, const Digest& master_seed);

} // namespace mitosis::crypto

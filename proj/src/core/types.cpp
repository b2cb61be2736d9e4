#include "mitosis/core/types.hpp"

#include "mitosis/core/codec.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis {

const char* tx_kind_name(TxKind kind)
{
    switch (kind) {
    case TxKind::Register: return "Register";
    case TxKind::AssetCreate: return "AssetCreate";
    case TxKind::AssetTransfer: return "AssetTransfer";
    case TxKind::Lock: return "Lock";
    case TxKind::Claim: return "Claim";
    case TxKind::Resolve: return "Resolve";
    case TxKind::ConfigUpdate: return "ConfigUpdate";
    case TxKind::PredicateEval: return "PredicateEval";
    }
    return "?";
}

Bytes Transaction::signing_bytes() const
{
    ByteWriter w;
    w.field(std::string_view("MITOSIS/TX"));
    codec::encode(w, payload);
    w.field(submitter.value);
    return std::move(w).bytes();
}

Digest Transaction::digest() const
{
    return crypto::sha256(codec::to_bytes(*this));
}

Digest Block::compute_digest() const
{
    ByteWriter w;
    w.field(std::string_view("MITOSIS/BLOCK"));
    w.u64(height);
    w.digest(parent_digest);
    w.boolean(genesis.has_value());
    if (genesis) codec::encode(w, *genesis);
    w.u32(static_cast<std::uint32_t>(transactions.size()));
    for (const auto& tx : transactions) w.digest(tx.digest());
    return crypto::sha256(w.bytes());
}

Block make_genesis_block(Genesis genesis)
{
    Block b;
    b.height = 0;
    b.genesis = std::move(genesis);
    b.seal();
    return b;
}

} // namespace mitosis

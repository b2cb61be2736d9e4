#pragma once

#include "mitosis/core/bytes.hpp"
#include "mitosis/core/types.hpp"

// Canonical serialization of the domain types. Every encode has a matching
// decode; decode(encode(x)) == x.
namespace mitosis::codec {

void encode(ByteWriter& w, const Fraction& f);
void encode(ByteWriter& w, const Nonce& n);
void encode(ByteWriter& w, const crypto::PublicKey& pk);
void encode(ByteWriter& w, const crypto::Signature& sig);
void encode(ByteWriter& w, const consensus::ConsensusParams& p);
void encode(ByteWriter& w, const Account& a);
void encode(ByteWriter& w, const Asset& a);
void encode(ByteWriter& w, const ChainConfig& c);
void encode(ByteWriter& w, const Lineage& l);
void encode(ByteWriter& w, const ClaimOutcome& c);
void encode(ByteWriter& w, const ClaimRecord& c);
void encode(ByteWriter& w, const TxPayload& p);
void encode(ByteWriter& w, const Transaction& tx);
void encode(ByteWriter& w, const Genesis& g);
void encode(ByteWriter& w, const Block& b);

Fraction decode_fraction(ByteReader& r);
Nonce decode_nonce(ByteReader& r);
crypto::PublicKey decode_public_key(ByteReader& r);
crypto::Signature decode_signature(ByteReader& r);
consensus::ConsensusParams decode_consensus(ByteReader& r);
Account decode_account(ByteReader& r);
Asset decode_asset(ByteReader& r);
ChainConfig decode_chain_config(ByteReader& r);
Lineage decode_lineage(ByteReader& r);
ClaimOutcome decode_claim_outcome(ByteReader& r);
ClaimRecord decode_claim_record(ByteReader& r);
TxPayload decode_payload(ByteReader& r);
Transaction decode_transaction(ByteReader& r);
Genesis decode_genesis(ByteReader& r);
Block decode_block(ByteReader& r);

template <typename T>
Bytes to_bytes(const T& value)
{
    ByteWriter w;
    encode(w, value);
    return std::move(w).bytes();
}

} // namespace mitosis::codec

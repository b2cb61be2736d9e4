#pragma once

#include <initializer_list>

#include "mitosis/core/bytes.hpp"

namespace mitosis::crypto {

Digest sha256(ByteView data);
Digest hmac_sha256(ByteView key, ByteView data);

// sha256 over the concatenation of length-prefixed parts.
Digest hash_fields(std::initializer_list<ByteView> parts);

} // namespace mitosis::crypto

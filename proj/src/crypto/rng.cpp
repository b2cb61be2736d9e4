#include "mitosis/crypto/rng.hpp"

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis::crypto {

Digest derive_stream(std::uint64_t seed, std::uint64_t index, std::string_view label)
{
    ByteWriter w;
    w.u64(seed).u64(index).field(label);
    return sha256(w.bytes());
}

Rng::Rng(const Digest& stream_seed)
{
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = (s << 8) | stream_seed[i];
    engine_.seed(s);
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) throw Error(Errc::InvalidParams, "empty range");
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % bound;
}

} // namespace mitosis::crypto

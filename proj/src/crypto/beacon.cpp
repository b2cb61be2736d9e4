#include "mitosis/crypto/beacon.hpp"

#include "mitosis/core/error.hpp"
#include "mitosis/crypto/hash.hpp"

namespace mitosis::crypto {

RandomSeed beacon(const Ledger& ledger, std::uint64_t lookback)
{
    if (ledger.empty()) throw Error(Errc::EmptyLedger, "beacon over empty ledger");
    if (lookback == 0) throw Error(Errc::InvalidParams, "lookback must be positive");
    auto count = std::min<std::uint64_t>(lookback, ledger.size());
    ByteWriter w;
    w.field(std::string_view("MITOSIS/BEACON"));
    w.u64(count);
    for (auto i = ledger.size() - count; i < ledger.size(); ++i) w.digest(ledger[i].digest);
    return {sha256(w.bytes())};
}

} // namespace mitosis::crypto

#include "mitosis/consensus/params.hpp"

#include "mitosis/core/error.hpp"

namespace mitosis::consensus {

std::string_view kind_name(ConsensusKind kind)
{
    return kind == ConsensusKind::CFT ? "CFT" : "BFT";
}

std::int64_t quorum_size(std::int64_t n, const Fraction& alpha)
{
    if (n < 1) throw Error(Errc::InvalidParams, "quorum of an empty validator set");
    if (alpha.num() == 0 || alpha > Fraction{1, 2}) throw Error(Errc::InvalidParams, "alpha must be in (0, 1/2]");
    return alpha.one_minus().ceil_mul(n);
}

} // namespace mitosis::consensus

#include "mitosis/consensus/messages.hpp"

namespace mitosis::consensus {

Bytes DivideMsg::statement() const
{
    ByteWriter w;
    w.field(std::string_view("DIVIDE")).field(chain.value).field(initiator.value).u64(agreed_height);
    return std::move(w).bytes();
}

Bytes vote_statement(const ChainId& chain, const Block& block)
{
    ByteWriter w;
    w.field(std::string_view("VOTE")).field(chain.value).u64(block.height).digest(block.digest);
    return std::move(w).bytes();
}

} // namespace mitosis::consensus

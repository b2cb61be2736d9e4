#include "mitosis/chain/registry.hpp"

#include <sstream>

#include "mitosis/core/codec.hpp"
#include "mitosis/core/error.hpp"

namespace mitosis::chain {

namespace {
constexpr std::string_view kMagic = "MITOSIS/REGISTRY/1";
}

const Account& Registry::register_user(const Account& account)
{
    auto [it, inserted] = users_.emplace(account.user, account);
    if (!inserted) throw Error(Errc::AlreadyMember, "user " + account.user.value + " already registered");
    return it->second;
}

const Account& Registry::user(const UserId& u) const
{
    auto it = users_.find(u);
    if (it == users_.end()) throw Error(Errc::UnknownUser, "unknown user " + u.value);
    return it->second;
}

void Registry::add_chain(const ChainConfig& config, std::optional<Lineage> lineage, std::vector<ChainId> merged_from)
{
    if (chains_.count(config.chain)) throw Error(Errc::DuplicateChainId, "chain id in use: " + config.chain.value);
    for (const auto& v : config.validators)
        if (!has_user(v)) throw Error(Errc::UnregisteredValidator, "validator not registered: " + v.value);
    if (lineage && !chains_.count(lineage->parent))
        throw Error(Errc::UnknownChain, "unknown parent chain " + lineage->parent.value);
    chains_.emplace(config.chain, ChainRecord{config, true, std::move(merged_from)});
    lineage_.emplace(config.chain, std::move(lineage));
}

void Registry::update_chain(const ChainConfig& config)
{
    auto it = chains_.find(config.chain);
    if (it == chains_.end()) throw Error(Errc::UnknownChain, "unknown chain " + config.chain.value);
    it->second.config = config;
}

void Registry::retire(const ChainId& c)
{
    auto it = chains_.find(c);
    if (it == chains_.end()) throw Error(Errc::UnknownChain, "unknown chain " + c.value);
    it->second.active = false;
}

const ChainRecord& Registry::chain(const ChainId& c) const
{
    auto it = chains_.find(c);
    if (it == chains_.end()) throw Error(Errc::UnknownChain, "unknown chain " + c.value);
    return it->second;
}

std::vector<ChainId> Registry::active_chains() const
{
    std::vector<ChainId> out;
    for (const auto& [id, rec] : chains_)
        if (rec.active) out.push_back(id);
    return out;
}

const std::optional<Lineage>& Registry::lineage(const ChainId& c) const
{
    auto it = lineage_.find(c);
    if (it == lineage_.end()) throw Error(Errc::UnknownChain, "unknown chain " + c.value);
    return it->second;
}

bool Registry::descends_from(const ChainId& c, const ChainId& ancestor) const
{
    if (c == ancestor) return true;
    if (!has_chain(c)) return false;
    if (const auto& l = lineage(c); l && descends_from(l->parent, ancestor)) return true;
    for (const auto& m : chain(c).merged_from)
        if (descends_from(m, ancestor)) return true;
    return false;
}

std::map<UserId, Account> Registry::validator_accounts(const ChainId& c) const
{
    std::map<UserId, Account> out;
    for (const auto& v : chain(c).config.validators) out.emplace(v, user(v));
    return out;
}

std::string Registry::lineage_csv() const
{
    std::ostringstream os;
    os << "chain_id,parent_id,side,split_height\n";
    for (const auto& [id, l] : lineage_) {
        os << id.value << ',';
        if (l)
            os << l->parent.value << ',' << static_cast<int>(l->side) << ',' << l->split_height;
        else
            os << ",,";
        os << '\n';
    }
    return os.str();
}

Bytes Registry::serialize() const
{
    ByteWriter w;
    w.field(kMagic);
    w.u32(static_cast<std::uint32_t>(users_.size()));
    for (const auto& [id, a] : users_) codec::encode(w, a);
    w.u32(static_cast<std::uint32_t>(chains_.size()));
    for (const auto& [id, rec] : chains_) {
        codec::encode(w, rec.config);
        w.boolean(rec.active);
        w.u32(static_cast<std::uint32_t>(rec.merged_from.size()));
        for (const auto& m : rec.merged_from) w.field(m.value);
        const auto& l = lineage_.at(id);
        w.boolean(l.has_value());
        if (l) codec::encode(w, *l);
    }
    return std::move(w).bytes();
}

Registry Registry::deserialize(ByteView bytes)
{
    ByteReader r(bytes);
    if (r.string_field() != kMagic) throw Error(Errc::ParseError, "not a registry file");
    Registry reg;
    for (auto n = r.u32(); n > 0; --n) {
        auto a = codec::decode_account(r);
        if (!reg.users_.emplace(a.user, a).second) throw Error(Errc::ParseError, "duplicate user " + a.user.value);
    }
    for (auto n = r.u32(); n > 0; --n) {
        ChainRecord rec;
        rec.config = codec::decode_chain_config(r);
        rec.active = r.boolean();
        for (auto m = r.u32(); m > 0; --m) rec.merged_from.emplace_back(r.string_field());
        std::optional<Lineage> l;
        if (r.boolean()) l = codec::decode_lineage(r);
        auto id = rec.config.chain;
        if (!reg.chains_.emplace(id, std::move(rec)).second)
            throw Error(Errc::ParseError, "duplicate chain " + id.value);
        reg.lineage_.emplace(id, std::move(l));
    }
    r.expect_done();
    return reg;
}

} // namespace mitosis::chain

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mitosis {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_view(const Digest& d) { return {d.data(), d.size()}; }
inline ByteView as_view(std::string_view s)
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Canonical encoding: big-endian fixed-width integers, variable-length
// fields prefixed with a u32 length. Field order is the declaration order of
// the encoded type.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
    ByteWriter& raw(ByteView bytes);
    ByteWriter& field(ByteView bytes);
    ByteWriter& field(std::string_view s) { return field(as_view(s)); }
    ByteWriter& digest(const Digest& d) { return raw(as_view(d)); }

    const Bytes& bytes() const& { return out_; }
    Bytes bytes() && { return std::move(out_); }
    std::size_t size() const { return out_.size(); }

private:
    Bytes out_;
};

// Throws Error{Errc::ParseError} on truncated or trailing input.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    bool boolean();
    Bytes raw(std::size_t n);
    Bytes field();
    std::string string_field();
    Digest digest();

    bool done() const { return pos_ == in_.size(); }
    void expect_done() const;

private:
    void need(std::size_t n) const;

    ByteView in_;
    std::size_t pos_ = 0;
};

} // namespace mitosis

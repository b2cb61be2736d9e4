#include "mitosis/core/bytes.hpp"

#include "mitosis/core/error.hpp"

namespace mitosis {

std::string to_hex(ByteView bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

namespace {
int nibble(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
} // namespace

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0) throw Error(Errc::ParseError, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(Errc::ParseError, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::raw(ByteView bytes)
{
    out_.insert(out_.end(), bytes.begin(), bytes.end());
    return *this;
}

ByteWriter& ByteWriter::field(ByteView bytes)
{
    u32(static_cast<std::uint32_t>(bytes.size()));
    return raw(bytes);
}

void ByteReader::need(std::size_t n) const
{
    if (in_.size() - pos_ < n) throw Error(Errc::ParseError, "truncated input", pos_);
}

std::uint8_t ByteReader::u8()
{
    need(1);
    return in_[pos_++];
}

std::uint32_t ByteReader::u32()
{
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64()
{
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
}

bool ByteReader::boolean()
{
    auto v = u8();
    if (v > 1) throw Error(Errc::ParseError, "invalid boolean", pos_ - 1);
    return v == 1;
}

Bytes ByteReader::raw(std::size_t n)
{
    need(n);
    Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_),
              in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
}

Bytes ByteReader::field() { return raw(u32()); }

std::string ByteReader::string_field()
{
    auto b = field();
    return {b.begin(), b.end()};
}

Digest ByteReader::digest()
{
    need(32);
    Digest d{};
    std::copy_n(in_.begin() + static_cast<std::ptrdiff_t>(pos_), 32, d.begin());
    pos_ += 32;
    return d;
}

void ByteReader::expect_done() const
{
    if (!done()) throw Error(Errc::ParseError, "trailing bytes", pos_);
}

} // namespace mitosis

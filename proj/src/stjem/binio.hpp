// Copyright (c) 2026 the stjem authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "stjem/errors.hpp"

namespace stjem::binio {

// Little-endian primitives with explicit byte order so checkpoint files are
// identical across hosts. Readers track the byte offset for error reports.

inline void put_u8(std::ostream& os, std::uint8_t v) {
    os.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) {
    put_u64(os, std::bit_cast<std::uint64_t>(v));
}

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    std::uint8_t u8() {
        char c;
        if (!is_.get(c)) fail("unexpected end of file");
        ++offset_;
        return static_cast<std::uint8_t>(c);
    }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string bytes(std::size_t n) {
        std::string s(n, '\0');
        if (!is_.read(s.data(), static_cast<std::streamsize>(n)))
            fail("unexpected end of file");
        offset_ += n;
        return s;
    }

    void expect_magic(const std::string& magic, const std::string& what) {
        std::size_t at = offset_;
        if (bytes(magic.size()) != magic)
            throw format_error(what + ": bad magic", at);
    }

    bool at_eof() {
        return is_.peek() == std::char_traits<char>::eof();
    }

    std::size_t offset() const noexcept { return offset_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw format_error(what, offset_);
    }

private:
    std::istream& is_;
    std::size_t offset_ = 0;
};

}  // namespace stjem::binio

#include "twincensus/util.hpp"

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace twincensus {

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("count '" + std::string(whole) + "': empty field");
    std::uint64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("count '" + std::string(whole) + "': expected digits");
        std::uint64_t d = static_cast<std::uint64_t>(c - '0');
        if (v > (UINT64_MAX - d) / 10)
            throw std::invalid_argument("count '" + std::string(whole) + "': overflow");
        v = 10 * v + d;
    }
    return v;
}

}  // namespace

std::uint64_t parse_count(std::string_view text) {
    size_t b = text.find_first_not_of(" \t");
    size_t e = text.find_last_not_of(" \t");
    if (b == std::string_view::npos) throw std::invalid_argument("count: empty");
    std::string_view s = text.substr(b, e - b + 1);

    if (size_t caret = s.find('^'); caret != std::string_view::npos) {
        std::uint64_t base = parse_u64(s.substr(0, caret), s);
        std::uint64_t exp = parse_u64(s.substr(caret + 1), s);
        if (base < 2) throw std::invalid_argument("count '" + std::string(s) + "': base must be >= 2");
        std::uint64_t v = 1;
        for (std::uint64_t i = 0; i < exp; ++i) {
            if (v > UINT64_MAX / base)
                throw std::invalid_argument("count '" + std::string(s) + "': overflow");
            v *= base;
        }
        return v;
    }

    if (s.find_first_of("eE.") != std::string_view::npos) {
        std::string buf(s);
        errno = 0;
        char* end = nullptr;
        double d = std::strtod(buf.c_str(), &end);
        if (errno != 0 || end == buf.c_str() || *end != '\0')
            throw std::invalid_argument("count '" + buf + "': malformed number");
        if (!(d >= 0) || d >= 1.8446744073709552e19)
            throw std::invalid_argument("count '" + buf + "': out of range");
        double r = std::nearbyint(d);
        if (r != d)
            throw std::invalid_argument("count '" + buf + "': not an integer");
        return static_cast<std::uint64_t>(r);
    }

    return parse_u64(s, s);
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t crc64_xz(const void* data, std::size_t n) {
    static const std::array<std::uint64_t, 256> table = [] {
        std::array<std::uint64_t, 256> t{};
        const std::uint64_t poly = 0xC96C5795D7870F42ULL;  // reflected 0x42F0E1EBA9EA3693
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint64_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? (c >> 1) ^ poly : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint64_t crc = ~0ULL;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return ~crc;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
    }
}

}  // namespace twincensus

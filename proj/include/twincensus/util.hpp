#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace twincensus {

// Accepts "2^22", "1e8", or plain digits. Throws std::invalid_argument on
// malformed text, overflow, or a non-integral scientific value.
std::uint64_t parse_count(std::string_view text);

// Shortest exact decimal form (%.17g): round-trips through strtod.
std::string format_real(double v);

// CRC-64/XZ: poly 0x42F0E1EBA9EA3693 reflected, init and xorout all-ones.
std::uint64_t crc64_xz(const void* data, std::size_t n);

// Writes to <path>.tmp then renames, so readers never see a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace twincensus

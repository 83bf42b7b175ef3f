#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvgen {

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view data);

/// First 8 bytes of SHA-256, big-endian. Used to seed deterministic mocks.
std::uint64_t sha256_u64(std::string_view data);

std::string base64_encode(std::span<const std::uint8_t> data);
std::string base64_encode(std::string_view data);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace mvgen

#include "mvgen/util/hashing.h"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <cctype>

#include "mvgen/util/error.h"

namespace mvgen {

namespace {

std::array<unsigned char, SHA256_DIGEST_LENGTH> sha256_raw(std::string_view data) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest.data());
  return digest;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  static constexpr char kHex[] = "0123456789abcdef";
  auto digest = sha256_raw(data);
  std::string out;
  out.reserve(digest.size() * 2);
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

std::uint64_t sha256_u64(std::string_view data) {
  auto digest = sha256_raw(data);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | digest[i];
  return v;
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  if (data.empty()) return {};
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                          static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_encode(std::string_view data) {
  return base64_encode(
      std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  }
  if (clean.empty()) return {};
  if (clean.size() % 4 != 0) {
    throw Error(ErrorCode::BackendMalformed, "base64 payload length is not a multiple of 4");
  }
  std::vector<std::uint8_t> out(3 * clean.size() / 4);
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                          static_cast<int>(clean.size()));
  if (n < 0) throw Error(ErrorCode::BackendMalformed, "invalid base64 payload");
  // EVP_DecodeBlock does not strip padding.
  std::size_t pad = 0;
  if (clean.ends_with("==")) pad = 2;
  else if (clean.ends_with('=')) pad = 1;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace mvgen

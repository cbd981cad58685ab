#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace passgate {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

inline Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// base64url (RFC 4648 section 5), no padding on output. Decoding accepts
// optional trailing '=' and rejects anything outside the url-safe alphabet.
std::string base64url_encode(ByteView data);
Bytes base64url_decode(std::string_view text);

// RFC 4648 base32, uppercase, no padding on output. Decoding is
// case-insensitive and ignores trailing '='.
std::string base32_encode(ByteView data);
Bytes base32_decode(std::string_view text);

std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view text);

}  // namespace passgate

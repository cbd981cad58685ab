#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "passgate/common/bytes.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "passgate/webauthn/cose_key.hpp"

namespace passgate::webauthn {

namespace flags {
inline constexpr std::uint8_t kUserPresent = 0x01;         // UP, bit 0
inline constexpr std::uint8_t kUserVerified = 0x04;        // UV, bit 2
inline constexpr std::uint8_t kAttestedCredential = 0x40;  // AT, bit 6
inline constexpr std::uint8_t kExtensionData = 0x80;       // ED, bit 7
}  // namespace flags

inline constexpr std::size_t kAuthenticatorDataMinLength = 37;
inline constexpr std::size_t kMaxCredentialIdLength = 1023;

struct AttestedCredential {
  std::array<std::uint8_t, 16> aaguid{};
  Bytes credential_id;
  CosePublicKey public_key;
};

//  rp_id_hash (32) | flags (1) | sign_count (4, big-endian)
//  [ aaguid (16) | cred_id_len (2, big-endian) | cred_id | COSE_Key ]   if AT
//  [ extensions (CBOR map) ]                                            if ED
struct AuthenticatorData {
  std::array<std::uint8_t, 32> rp_id_hash{};
  std::uint8_t flags = 0;
  std::uint32_t counter = 0;
  std::optional<AttestedCredential> attested_credential;
  std::optional<CborValue> extensions;

  bool user_present() const { return (flags & flags::kUserPresent) != 0; }
  bool user_verified() const { return (flags & flags::kUserVerified) != 0; }
  bool has_attested_credential() const { return (flags & flags::kAttestedCredential) != 0; }
  bool has_extensions() const { return (flags & flags::kExtensionData) != 0; }
};

/// Errors: TooShort (< 37 bytes), MalformedCredentialData (AT/ED sections
/// missing, truncated or followed by stray bytes), plus COSE key errors.
AuthenticatorData parse_authenticator_data(ByteView data);

}  // namespace passgate::webauthn

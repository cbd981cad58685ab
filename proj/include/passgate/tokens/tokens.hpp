#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "passgate/common/bytes.hpp"
#include "passgate/common/clock.hpp"
#include "passgate/storage/store.hpp"

namespace passgate::tokens {

inline constexpr std::size_t kMinSecretBytes = 32;
inline constexpr Duration kDefaultLifetime = std::chrono::hours{1};

struct TokenClaims {
  std::string subject;  // user_id
  std::string email;
  std::int64_t issued_at = 0;   // unix seconds
  std::int64_t expires_at = 0;  // unix seconds
  std::string token_id;         // 16 random bytes, base64url

  friend bool operator==(const TokenClaims&, const TokenClaims&) = default;
};

/// Compact JWS, `header.payload.signature`, HS256.
struct SignedToken {
  std::string compact;
};

/// Signs with HMAC-SHA256. Throws ConfigError for secrets under 32 bytes and
/// InvalidArgument when expires_at <= issued_at.
SignedToken sign_token(const TokenClaims& claims, ByteView secret);

/// Structure, `alg` allowlist, signature and expiry. Does not consult any
/// revocation list. Throws Malformed, BadSignature or Expired.
TokenClaims verify_token(std::string_view token, ByteView secret, std::int64_t now_unix);

/// Same checks plus the blacklist. Revoked carries "Token has been revoked".
TokenClaims verify_token(std::string_view token, ByteView secret, std::int64_t now_unix,
                         const storage::Store& blacklist);

/// Parses the payload without checking the signature. Throws Malformed.
TokenClaims decode_unverified(std::string_view token);

/// Issues, verifies and revokes tokens against a store. Construction fails
/// with ConfigError unless lifetime <= blacklist TTL, which is what makes a
/// blacklist entry outlive the token it revokes.
class TokenService {
 public:
  TokenService(Bytes secret, storage::Store& store, Duration lifetime = kDefaultLifetime,
               Duration blacklist_ttl = storage::kDefaultBlacklistTtl);

  SignedToken issue(std::string_view user_id, std::string_view email) const;
  TokenClaims verify(std::string_view token) const;
  /// Idempotent. Throws Malformed for strings that are not a JWT.
  void revoke(std::string_view token);

  Duration lifetime() const { return lifetime_; }

 private:
  Bytes secret_;
  storage::Store& store_;
  Duration lifetime_;
  Duration blacklist_ttl_;
};

}  // namespace passgate::tokens

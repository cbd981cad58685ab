#include "passgate/tokens/tokens.hpp"

#include <json.hpp>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

namespace passgate::tokens {
namespace {

using nlohmann::json;

struct Parts {
  std::string_view header;
  std::string_view payload;
  std::string_view signature;
  std::string_view signing_input;
};

Parts split(std::string_view token) {
  auto first = token.find('.');
  if (first == std::string_view::npos) throw Error(Errc::Malformed, "token has no segments");
  auto second = token.find('.', first + 1);
  if (second == std::string_view::npos || token.find('.', second + 1) != std::string_view::npos) {
    throw Error(Errc::Malformed, "token must have exactly three segments");
  }
  Parts p{token.substr(0, first), token.substr(first + 1, second - first - 1),
          token.substr(second + 1), token.substr(0, second)};
  // An empty signature is an unsecured JWS; the alg check rejects it.
  if (p.header.empty() || p.payload.empty()) {
    throw Error(Errc::Malformed, "empty token segment");
  }
  return p;
}

json decode_segment(std::string_view segment) {
  try {
    auto raw = base64url_decode(segment);
    auto j = json::parse(raw.begin(), raw.end());
    if (!j.is_object()) throw Error(Errc::Malformed, "token segment is not a JSON object");
    return j;
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw;
    throw Error(Errc::Malformed, "token segment is not base64url");
  } catch (const json::exception&) {
    throw Error(Errc::Malformed, "token segment is not JSON");
  }
}

TokenClaims claims_from(const json& payload) {
  try {
    TokenClaims c;
    c.subject = payload.at("sub").get<std::string>();
    c.email = payload.at("email").get<std::string>();
    c.issued_at = payload.at("iat").get<std::int64_t>();
    c.expires_at = payload.at("exp").get<std::int64_t>();
    c.token_id = payload.at("jti").get<std::string>();
    return c;
  } catch (const json::exception&) {
    throw Error(Errc::Malformed, "token payload is missing claims");
  }
}

Bytes signature_for(std::string_view signing_input, ByteView secret) {
  return crypto::hmac_sha256(
      secret, ByteView(reinterpret_cast<const std::uint8_t*>(signing_input.data()),
                       signing_input.size()));
}

void check_secret(ByteView secret) {
  if (secret.size() < kMinSecretBytes) {
    throw Error(Errc::ConfigError, "JWT secret must be at least 32 bytes");
  }
}

}  // namespace

SignedToken sign_token(const TokenClaims& claims, ByteView secret) {
  check_secret(secret);
  if (claims.expires_at <= claims.issued_at) {
    throw Error(Errc::InvalidArgument, "token must expire after it is issued");
  }
  const json header = {{"alg", "HS256"}, {"typ", "JWT"}};
  const json payload = {{"sub", claims.subject},    {"email", claims.email},
                        {"iat", claims.issued_at},  {"exp", claims.expires_at},
                        {"jti", claims.token_id}};
  auto signing_input =
      base64url_encode(to_bytes(header.dump())) + "." + base64url_encode(to_bytes(payload.dump()));
  auto sig = signature_for(signing_input, secret);
  return SignedToken{signing_input + "." + base64url_encode(sig)};
}

TokenClaims decode_unverified(std::string_view token) {
  auto parts = split(token);
  decode_segment(parts.header);
  return claims_from(decode_segment(parts.payload));
}

TokenClaims verify_token(std::string_view token, ByteView secret, std::int64_t now_unix) {
  check_secret(secret);
  auto parts = split(token);
  auto header = decode_segment(parts.header);
  // Only HS256 is ever accepted; "none" and asymmetric algorithms are refused
  // before any key material is touched.
  if (!header.contains("alg") || !header["alg"].is_string() || header["alg"] != "HS256") {
    throw Error(Errc::BadSignature, "unsupported token algorithm");
  }
  Bytes presented;
  try {
    presented = base64url_decode(parts.signature);
  } catch (const Error&) {
    throw Error(Errc::Malformed, "token signature is not base64url");
  }
  if (!crypto::constant_time_equal(presented, signature_for(parts.signing_input, secret))) {
    throw Error(Errc::BadSignature, "token signature does not verify");
  }
  auto claims = claims_from(decode_segment(parts.payload));
  if (now_unix >= claims.expires_at) throw Error(Errc::Expired, "Token has expired");
  return claims;
}

TokenClaims verify_token(std::string_view token, ByteView secret, std::int64_t now_unix,
                         const storage::Store& blacklist) {
  auto claims = verify_token(token, secret, now_unix);
  if (blacklist.blacklist_contains(token)) throw Error(Errc::Revoked, "Token has been revoked");
  return claims;
}

TokenService::TokenService(Bytes secret, storage::Store& store, Duration lifetime,
                           Duration blacklist_ttl)
    : secret_(std::move(secret)), store_(store), lifetime_(lifetime), blacklist_ttl_(blacklist_ttl) {
  check_secret(secret_);
  if (lifetime_ < std::chrono::seconds{1}) throw Error(Errc::ConfigError, "token lifetime too short");
  if (lifetime_ > blacklist_ttl_) {
    throw Error(Errc::ConfigError, "token lifetime must not exceed the blacklist TTL");
  }
}

SignedToken TokenService::issue(std::string_view user_id, std::string_view email) const {
  const auto now = to_unix_seconds(store_.clock().now());
  TokenClaims claims{
      .subject = std::string(user_id),
      .email = std::string(email),
      .issued_at = now,
      .expires_at = now + std::chrono::duration_cast<std::chrono::seconds>(lifetime_).count(),
      .token_id = base64url_encode(crypto::random_bytes(16)),
  };
  return sign_token(claims, secret_);
}

TokenClaims TokenService::verify(std::string_view token) const {
  return verify_token(token, secret_, to_unix_seconds(store_.clock().now()), store_);
}

void TokenService::revoke(std::string_view token) {
  decode_unverified(token);
  store_.blacklist_add(token, blacklist_ttl_);
}

}  // namespace passgate::tokens

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "passgate/common/bytes.hpp"
#include "passgate/common/clock.hpp"
#include "passgate/password/password.hpp"
#include "passgate/webauthn/cose_key.hpp"

namespace passgate::storage {

struct UserRecord {
  std::string user_id;  // assigned by the store when empty
  std::string email;
  std::optional<password::PasswordHash> password_hash;
  std::optional<std::string> oauth_subject;
  Timestamp created_at{};

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

/// Staging row for a registration whose email code has not been confirmed yet.
struct TempRegistration {
  std::string email;
  bool otp_verified = false;
  std::optional<password::PasswordHash> password_hash;
  Timestamp created_at{};

  friend bool operator==(const TempRegistration&, const TempRegistration&) = default;
};

struct PasskeyCredentialRecord {
  Bytes credential_id;
  webauthn::CosePublicKey public_key;
  std::uint32_t counter = 0;
  std::string device_name;
  std::string user_id;
  Timestamp created_at{};

  friend bool operator==(const PasskeyCredentialRecord&, const PasskeyCredentialRecord&) = default;
};

enum class CeremonyPurpose { Registration, Authentication };
enum class SessionStatus { Pending, Completed, Expired };

std::string_view to_string(CeremonyPurpose p);
std::string_view to_string(SessionStatus s);

/// State of one WebAuthn ceremony. Pending is the only non-terminal status.
struct PasskeySessionRecord {
  std::string session_id;
  Bytes challenge;
  CeremonyPurpose purpose = CeremonyPurpose::Registration;
  std::optional<std::string> user_id;
  Timestamp expires_at{};
  SessionStatus status = SessionStatus::Pending;

  friend bool operator==(const PasskeySessionRecord&, const PasskeySessionRecord&) = default;
};

inline constexpr Duration kDefaultBlacklistTtl = std::chrono::hours{1};

struct TokenBlacklistEntry {
  std::string token;
  Timestamp created_at{};
  Duration ttl = kDefaultBlacklistTtl;

  Timestamp expires_at() const { return created_at + ttl; }
  friend bool operator==(const TokenBlacklistEntry&, const TokenBlacklistEntry&) = default;
};

/// Loose syntactic check: one '@', nonempty local part, a dot in the domain,
/// no whitespace, at most 254 bytes.
bool is_well_formed_email(std::string_view email);
std::string normalize_email(std::string_view email);

/// 16 random bytes, base64url.
std::string new_opaque_id();

}  // namespace passgate::storage

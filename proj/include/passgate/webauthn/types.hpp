#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "passgate/common/bytes.hpp"

namespace passgate::webauthn {

inline constexpr std::size_t kChallengeBytes = 32;

struct Challenge {
  Bytes bytes;
  friend bool operator==(const Challenge&, const Challenge&) = default;
};

/// 32 bytes from the CSPRNG. Throws Error(EntropyError).
Challenge generate_challenge();

enum class UserVerification { Required, Preferred, Discouraged };

std::string_view to_string(UserVerification uv);
UserVerification user_verification_from(std::string_view s);

struct RelyingPartyEntity {
  std::string id;
  std::string name;
};

struct UserEntity {
  Bytes id;
  std::string name;
  std::string display_name;
};

struct RegistrationOptions {
  Challenge challenge;
  RelyingPartyEntity rp;
  UserEntity user;
  std::vector<std::int64_t> pub_key_cred_params{-7};
  std::uint32_t timeout_ms = 300'000;
  std::vector<Bytes> exclude_credentials;
  UserVerification user_verification = UserVerification::Preferred;
  std::string attestation = "none";
};

struct AuthenticationOptions {
  Challenge challenge;
  std::string rp_id;
  std::vector<Bytes> allow_credentials;  // empty: discoverable credentials
  std::uint32_t timeout_ms = 300'000;
  UserVerification user_verification = UserVerification::Preferred;
};

struct RegistrationResponse {
  Bytes raw_id;
  Bytes client_data_json;
  Bytes attestation_object;
};

struct AuthenticationResponse {
  Bytes raw_id;
  Bytes client_data_json;
  Bytes authenticator_data;
  Bytes signature;
  std::optional<Bytes> user_handle;
};

// JSON mapping follows the W3C PublicKeyCredential*JSON shapes: binary fields
// are base64url strings without padding. from_json throws MalformedResponse.
nlohmann::json to_json(const RegistrationOptions& o);
nlohmann::json to_json(const AuthenticationOptions& o);
nlohmann::json to_json(const RegistrationResponse& r);
nlohmann::json to_json(const AuthenticationResponse& r);

RegistrationOptions registration_options_from_json(const nlohmann::json& j);
AuthenticationOptions authentication_options_from_json(const nlohmann::json& j);
RegistrationResponse registration_response_from_json(const nlohmann::json& j);
AuthenticationResponse authentication_response_from_json(const nlohmann::json& j);

/// True when `rp_id` equals the origin's host or is a dot-separated suffix
/// of it ("example.com" for "https://login.example.com:8443").
bool rp_id_matches_origin(std::string_view rp_id, std::string_view origin);

/// Host part of "scheme://host[:port]"; empty when the origin is malformed.
std::string origin_host(std::string_view origin);

}  // namespace passgate::webauthn

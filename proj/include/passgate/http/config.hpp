#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "passgate/common/bytes.hpp"
#include "passgate/flows/auth_service.hpp"

namespace passgate::http {

struct AppConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Base URL browsers use to reach this server; the OAuth redirect URI is
  /// built from it. Empty means http://localhost:<port>.
  std::string public_url;
  /// Raw HMAC key, at least 32 bytes. Empty means a random per-process key.
  Bytes jwt_secret;
  Duration token_ttl = tokens::kDefaultLifetime;
  Duration blacklist_ttl = storage::kDefaultBlacklistTtl;
  std::optional<std::filesystem::path> snapshot_path;
  std::string mailer = "log";  // "log" or "capture"
  std::string oauth = "mock";  // only the built-in mock provider
  /// TLS terminates in front of this process: send HSTS and Secure cookies.
  bool tls = false;
  /// Origin allowed by CORS. Empty means flows.origin.
  std::string cors_origin;
  std::size_t max_body_bytes = 64 * 1024;
  /// How often expired records are dropped. Zero disables the sweeper.
  Duration sweep_interval = std::chrono::minutes{1};
  flows::FlowConfig flows;

  std::string effective_public_url() const;
  std::string effective_cors_origin() const;

  /// Throws ConfigError.
  void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view name)>;

/// Reads PORT, HOST, PUBLIC_URL, RP_ID, RP_NAME, EXPECTED_ORIGIN, JWT_SECRET,
/// TOKEN_TTL, SWEEP_INTERVAL, SNAPSHOT_PATH, MAILER, OAUTH, TLS, CORS_ORIGIN,
/// REGISTRATION_CODE_TTL, LOGIN_CODE_TTL, BCRYPT_COST,
/// REQUIRE_USER_VERIFICATION and RATE_LIMIT_{REGISTER_CODE,LOGIN,PASSKEY}
/// ("max/window_seconds"). Unset variables keep the defaults.
/// Throws ConfigError for unparsable values.
AppConfig config_from_env(const EnvLookup& lookup, AppConfig base = {});
AppConfig config_from_env(AppConfig base = {});

/// "10/60" -> {10, 60 s}. Throws ConfigError.
flows::RateLimit parse_rate_limit(std::string_view text);

}  // namespace passgate::http

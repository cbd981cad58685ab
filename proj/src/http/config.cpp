#include "passgate/http/config.hpp"

#include <charconv>
#include <cstdlib>

#include "passgate/webauthn/types.hpp"

namespace passgate::http {

namespace {

long long parse_int(std::string_view name, std::string_view text, long long lo, long long hi) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < lo || value > hi) {
    throw Error(Errc::ConfigError, std::string(name) + " must be an integer in [" +
                                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return value;
}

bool parse_bool(std::string_view name, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off" || text.empty()) return false;
  throw Error(Errc::ConfigError, std::string(name) + " must be a boolean");
}

Duration seconds_of(std::string_view name, std::string_view text) {
  return std::chrono::seconds{parse_int(name, text, 1, 365LL * 24 * 3600)};
}

}  // namespace

flows::RateLimit parse_rate_limit(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw Error(Errc::ConfigError, "rate limit must look like max/window_seconds");
  }
  flows::RateLimit limit;
  limit.max = static_cast<std::uint32_t>(parse_int("rate limit max", text.substr(0, slash), 1, 1'000'000));
  limit.window = seconds_of("rate limit window", text.substr(slash + 1));
  return limit;
}

std::string AppConfig::effective_public_url() const {
  if (!public_url.empty()) return public_url;
  return "http://localhost:" + std::to_string(port);
}

std::string AppConfig::effective_cors_origin() const {
  return cors_origin.empty() ? flows.origin : cors_origin;
}

void AppConfig::validate() const {
  if (port < 0 || port > 65535) throw Error(Errc::ConfigError, "port out of range");
  if (!jwt_secret.empty() && jwt_secret.size() < tokens::kMinSecretBytes) {
    throw Error(Errc::ConfigError, "JWT secret must be at least 32 bytes");
  }
  if (token_ttl <= Duration::zero() || token_ttl > blacklist_ttl) {
    throw Error(Errc::ConfigError, "token TTL must be positive and no longer than the blacklist TTL");
  }
  if (mailer != "log" && mailer != "capture") {
    throw Error(Errc::ConfigError, "MAILER must be 'log' or 'capture'; SMTP delivery is not built in");
  }
  if (oauth != "mock") {
    throw Error(Errc::ConfigError, "OAUTH must be 'mock'; no external provider client is built in");
  }
  if (webauthn::origin_host(effective_public_url()).empty()) {
    throw Error(Errc::ConfigError, "PUBLIC_URL is not a valid origin");
  }
  flows.validate();
}

AppConfig config_from_env(const EnvLookup& lookup, AppConfig base) {
  AppConfig c = std::move(base);
  auto get = [&](std::string_view name) { return lookup(name); };

  if (auto v = get("PORT")) c.port = static_cast<int>(parse_int("PORT", *v, 0, 65535));
  if (auto v = get("HOST")) c.host = *v;
  if (auto v = get("PUBLIC_URL")) c.public_url = *v;
  if (auto v = get("RP_ID")) c.flows.rp_id = *v;
  if (auto v = get("RP_NAME")) c.flows.rp_name = *v;
  if (auto v = get("EXPECTED_ORIGIN")) c.flows.origin = *v;
  if (auto v = get("JWT_SECRET")) c.jwt_secret = to_bytes(*v);
  if (auto v = get("TOKEN_TTL")) c.token_ttl = seconds_of("TOKEN_TTL", *v);
  if (auto v = get("SWEEP_INTERVAL")) c.sweep_interval = seconds_of("SWEEP_INTERVAL", *v);
  if (auto v = get("SNAPSHOT_PATH"); v && !v->empty()) c.snapshot_path = *v;
  if (auto v = get("MAILER")) c.mailer = *v;
  if (auto v = get("OAUTH")) c.oauth = *v;
  if (auto v = get("TLS")) c.tls = parse_bool("TLS", *v);
  if (auto v = get("CORS_ORIGIN")) c.cors_origin = *v;
  if (auto v = get("REGISTRATION_CODE_TTL")) {
    c.flows.registration_code_ttl = seconds_of("REGISTRATION_CODE_TTL", *v);
  }
  if (auto v = get("LOGIN_CODE_TTL")) c.flows.login_code_ttl = seconds_of("LOGIN_CODE_TTL", *v);
  if (auto v = get("BCRYPT_COST")) {
    c.flows.password_cost = static_cast<int>(parse_int("BCRYPT_COST", *v, 4, 16));
  }
  if (auto v = get("REQUIRE_USER_VERIFICATION")) {
    c.flows.require_user_verification = parse_bool("REQUIRE_USER_VERIFICATION", *v);
  }
  if (auto v = get("RATE_LIMIT_REGISTER_CODE")) c.flows.code_request_limit = parse_rate_limit(*v);
  if (auto v = get("RATE_LIMIT_LOGIN")) c.flows.password_login_limit = parse_rate_limit(*v);
  if (auto v = get("RATE_LIMIT_PASSKEY")) c.flows.passkey_verify_limit = parse_rate_limit(*v);
  return c;
}

AppConfig config_from_env(AppConfig base) {
  return config_from_env(
      [](std::string_view name) -> std::optional<std::string> {
        const char* v = std::getenv(std::string(name).c_str());
        if (v == nullptr) return std::nullopt;
        return std::string(v);
      },
      std::move(base));
}

}  // namespace passgate::http

#include "passgate/flows/auth_service.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "passgate/common/crypto.hpp"
#include "passgate/password/password.hpp"
#include "passgate/webauthn/relying_party.hpp"

namespace passgate::flows {

using storage::CeremonyPurpose;
using storage::SessionStatus;

namespace {

constexpr std::string_view kRegistrationPrefix = "reg:";
constexpr std::string_view kLoginPrefix = "login:";
constexpr std::string_view kOAuthStatePrefix = "oauth-state:";
constexpr std::string_view kTotpUsedPrefix = "totp-used:";

std::string key_for(std::string_view prefix, std::string_view rest) {
  std::string key(prefix);
  key += rest;
  return key;
}

std::string require_email(std::string_view email) {
  if (!storage::is_well_formed_email(email)) {
    throw Error(Errc::InvalidArgument, "email address is not valid");
  }
  return storage::normalize_email(email);
}

std::string describe_ttl(Duration ttl) {
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(ttl).count();
  if (secs % 60 == 0 && secs >= 60) {
    auto mins = secs / 60;
    return std::to_string(mins) + (mins == 1 ? " minute" : " minutes");
  }
  return std::to_string(secs) + (secs == 1 ? " second" : " seconds");
}

std::string clean_device_name(std::string_view name) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!name.empty() && is_space(name.front())) name.remove_prefix(1);
  while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
  if (name.empty()) return "Passkey";
  if (name.size() > kMaxDeviceNameLength) {
    throw Error(Errc::InvalidArgument, "device name is longer than 64 bytes");
  }
  for (unsigned char c : name) {
    if (c < 0x20 || c == 0x7F) throw Error(Errc::InvalidArgument, "device name has control characters");
  }
  return std::string(name);
}

std::uint32_t millis(Duration d) {
  return static_cast<std::uint32_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(d).count());
}

}  // namespace

void FlowConfig::validate() const {
  auto positive = [](Duration d, const char* what) {
    if (d <= Duration::zero()) throw Error(Errc::ConfigError, std::string(what) + " must be positive");
  };
  positive(registration_code_ttl, "registration code TTL");
  positive(login_code_ttl, "login code TTL");
  positive(oauth_state_ttl, "OAuth state TTL");
  positive(ceremony_ttl, "ceremony TTL");
  if (code_digits != 6 && code_digits != 8) throw Error(Errc::ConfigError, "code digits must be 6 or 8");
  if (max_code_attempts < 1) throw Error(Errc::ConfigError, "max code attempts must be >= 1");
  if (password_cost < password::kMinCost || password_cost > password::kMaxCost) {
    throw Error(Errc::ConfigError, "bcrypt cost out of range");
  }
  for (const auto* limit : {&code_request_limit, &password_login_limit, &passkey_verify_limit}) {
    if (limit->max == 0 || limit->window <= Duration::zero()) {
      throw Error(Errc::ConfigError, "rate limit needs max >= 1 and a positive window");
    }
  }
  if (!webauthn::rp_id_matches_origin(rp_id, origin)) {
    throw Error(Errc::ConfigError,
                "RP ID '" + rp_id + "' is not a registrable suffix of origin '" + origin + "'");
  }
}

AuthService::AuthService(FlowConfig config, storage::Store& store, tokens::TokenService& tokens,
                         Mailer& mailer, OAuthProvider& oauth)
    : config_(std::move(config)),
      store_(store),
      tokens_(tokens),
      mailer_(mailer),
      oauth_(oauth),
      dummy_hash_(password::hash_password(base64url_encode(crypto::random_bytes(18)),
                                          config_.password_cost)) {
  config_.validate();
  limiter_.configure(std::string(routes::kCodeRequest), config_.code_request_limit);
  limiter_.configure(std::string(routes::kPasswordLogin), config_.password_login_limit);
  limiter_.configure(std::string(routes::kPasskeyVerify), config_.passkey_verify_limit);
}

// ---- emailed codes ----------------------------------------------------------

void AuthService::issue_code(std::string_view cache_key, std::string_view email, Duration ttl,
                             std::string_view subject) {
  auto code = otp::generate_numeric_code(config_.code_digits);
  nlohmann::json entry = {{"code", code}, {"attempts", 0}};
  store_.ttl_put(cache_key, to_bytes(entry.dump()), ttl);
  mailer_.send({std::string(email), std::string(subject),
                "Your " + config_.mail_sender_name + " verification code is " + code +
                    ". It expires in " + describe_ttl(ttl) + "."});
}

AuthService::CodeCheck AuthService::consume_code(std::string_view cache_key,
                                                 std::string_view code) {
  CodeCheck result = CodeCheck::Expired;
  store_.ttl_modify(cache_key, [&](const Bytes* current) {
    if (current == nullptr) {
      result = CodeCheck::Expired;
      return storage::TtlMutation::keep();
    }
    auto entry = nlohmann::json::parse(to_string(*current));
    auto expected = entry.at("code").get<std::string>();
    if (crypto::constant_time_equal(std::string_view(expected), code)) {
      result = CodeCheck::Accepted;
      return storage::TtlMutation::erase();
    }
    result = CodeCheck::Mismatch;
    int attempts = entry.at("attempts").get<int>() + 1;
    if (attempts >= config_.max_code_attempts) return storage::TtlMutation::erase();
    entry["attempts"] = attempts;
    return storage::TtlMutation::replace(to_bytes(entry.dump()));
  });
  return result;
}

void AuthService::require_code(std::string_view cache_key, std::string_view code) {
  switch (consume_code(cache_key, code)) {
    case CodeCheck::Accepted: return;
    case CodeCheck::Mismatch: throw Error(Errc::CodeMismatch, "Verification code is incorrect");
    case CodeCheck::Expired:
      throw Error(Errc::CodeExpired, "Verification code has expired or was already used");
  }
}

// ---- registration -------------------------------------------------------------

void AuthService::request_registration_code(std::string_view email) {
  auto normalized = require_email(email);
  limiter_.enforce(routes::kCodeRequest, normalized, now());
  if (store_.find_user_by_email(normalized)) {
    throw Error(Errc::AlreadyRegistered, "An account with this email already exists");
  }
  store_.put_temp_registration({normalized, false, std::nullopt, now()});
  issue_code(key_for(kRegistrationPrefix, normalized), normalized, config_.registration_code_ttl,
             "Your registration code");
}

void AuthService::verify_registration_code(std::string_view email, std::string_view code) {
  auto normalized = require_email(email);
  if (!store_.find_temp_registration(normalized)) {
    throw Error(Errc::NotFound, "No pending registration for this email");
  }
  require_code(key_for(kRegistrationPrefix, normalized), code);
  store_.mark_temp_verified(normalized);
}

std::string AuthService::set_password_and_promote(std::string_view email,
                                                  std::string_view password) {
  auto normalized = require_email(email);
  auto temp = store_.find_temp_registration(normalized);
  if (!temp) throw Error(Errc::NotFound, "No pending registration for this email");
  if (!temp->otp_verified) throw Error(Errc::NotVerified, "Email code has not been verified");
  password::check_policy(password);
  if (store_.find_user_by_email(normalized)) {
    throw Error(Errc::AlreadyRegistered, "An account with this email already exists");
  }
  auto hash = password::hash_password(password, config_.password_cost);
  temp->password_hash = hash;
  store_.put_temp_registration(*temp);

  storage::UserRecord user;
  user.email = normalized;
  user.password_hash = hash;
  user.created_at = now();
  try {
    return store_.promote_temp_registration(normalized, std::move(user));
  } catch (const Error& e) {
    if (e.code() == Errc::UniquenessViolation) {
      throw Error(Errc::AlreadyRegistered, "An account with this email already exists");
    }
    throw;
  }
}

// ---- password + code login ----------------------------------------------------

void AuthService::login_password_step(std::string_view email, std::string_view password,
                                      std::string_view client_key) {
  limiter_.enforce(routes::kPasswordLogin, client_key, now());
  std::optional<storage::UserRecord> user;
  std::string normalized;
  if (storage::is_well_formed_email(email)) {
    normalized = storage::normalize_email(email);
    user = store_.find_user_by_email(normalized);
  }
  bool ok = false;
  if (user && user->password_hash) {
    ok = password::verify_password(password, *user->password_hash);
  } else {
    password::verify_password(password, dummy_hash_);  // equalize timing
  }
  if (!ok) throw Error(Errc::InvalidCredentials, "Invalid email or password");
  issue_code(key_for(kLoginPrefix, normalized), normalized, config_.login_code_ttl,
             "Your login code");
}

tokens::SignedToken AuthService::login_code_step(std::string_view email, std::string_view code) {
  auto normalized = require_email(email);
  require_code(key_for(kLoginPrefix, normalized), code);
  auto user = store_.find_user_by_email(normalized);
  if (!user) throw Error(Errc::InvalidCredentials, "Invalid email or password");
  return tokens_.issue(user->user_id, user->email);
}

// ---- OAuth ----------------------------------------------------------------------

std::string AuthService::oauth_start() {
  auto state = storage::new_opaque_id();
  store_.ttl_put(key_for(kOAuthStatePrefix, state), Bytes{1}, config_.oauth_state_ttl);
  return oauth_.authorize_url(state);
}

OAuthLogin AuthService::oauth_callback(std::string_view code, std::string_view state) {
  bool known_state = false;
  if (!state.empty()) {
    store_.ttl_modify(key_for(kOAuthStatePrefix, state), [&](const Bytes* current) {
      known_state = current != nullptr;
      return current ? storage::TtlMutation::erase() : storage::TtlMutation::keep();
    });
  }
  if (!known_state) throw Error(Errc::StateMismatch, "OAuth state does not match an issued state");
  if (code.empty()) throw Error(Errc::CodeExchangeFailed, "missing authorization code");

  auto identity = oauth_.exchange_code(code);
  if (identity.subject.empty() || !storage::is_well_formed_email(identity.email)) {
    throw Error(Errc::CodeExchangeFailed, "provider returned an incomplete identity");
  }

  for (int attempt = 0; attempt < 2; ++attempt) {
    if (auto user = store_.find_user_by_oauth_subject(identity.subject)) {
      return {tokens_.issue(user->user_id, user->email), user->user_id, false};
    }
    if (auto user = store_.find_user_by_email(identity.email)) {
      if (user->oauth_subject && *user->oauth_subject != identity.subject) {
        throw Error(Errc::AlreadyRegistered, "Email is linked to a different external account");
      }
      user->oauth_subject = identity.subject;
      store_.upsert_user(*user);
      return {tokens_.issue(user->user_id, user->email), user->user_id, false};
    }
    storage::UserRecord fresh;
    fresh.email = storage::normalize_email(identity.email);
    fresh.oauth_subject = identity.subject;
    fresh.created_at = now();
    try {
      auto id = store_.upsert_user(fresh);
      return {tokens_.issue(id, fresh.email), id, true};
    } catch (const Error& e) {
      if (e.code() != Errc::UniquenessViolation) throw;
      // lost a race with a concurrent first login; the lookup now succeeds
    }
  }
  throw Error(Errc::CodeExchangeFailed, "could not resolve user for external account");
}

// ---- passkeys ---------------------------------------------------------------------

webauthn::CeremonyExpectations AuthService::expectations() const {
  return {config_.origin, config_.rp_id, now(), config_.require_user_verification};
}

PasskeyCeremony AuthService::passkey_register_options(std::string_view user_id) {
  auto user = store_.find_user_by_id(user_id);
  if (!user) throw Error(Errc::NotFound, "User not found");

  webauthn::RegistrationOptions options;
  options.challenge = webauthn::generate_challenge();
  options.rp = {config_.rp_id, config_.rp_name};
  options.user = {to_bytes(user->user_id), user->email, user->email};
  options.timeout_ms = millis(config_.ceremony_ttl);
  options.user_verification = config_.require_user_verification
                                  ? webauthn::UserVerification::Required
                                  : webauthn::UserVerification::Preferred;
  for (const auto& cred : store_.list_credentials(user->user_id)) {
    options.exclude_credentials.push_back(cred.credential_id);
  }

  storage::PasskeySessionRecord session;
  session.session_id = storage::new_opaque_id();
  session.challenge = options.challenge.bytes;
  session.purpose = CeremonyPurpose::Registration;
  session.user_id = user->user_id;
  session.expires_at = now() + config_.ceremony_ttl;
  store_.put_session(session);
  return {session.session_id, std::move(options)};
}

storage::PasskeyCredentialRecord AuthService::passkey_register_verify(
    std::string_view user_id, std::string_view session_id,
    const webauthn::RegistrationResponse& response, std::string_view device_name,
    std::string_view client_key) {
  limiter_.enforce(routes::kPasskeyVerify, client_key, now());
  auto name = clean_device_name(device_name);
  auto session = store_.find_session(session_id);
  if (!session) throw Error(Errc::SessionNotFound, "Unknown passkey session");
  if (!session->user_id || *session->user_id != user_id) {
    throw Error(Errc::Forbidden, "Passkey session belongs to another user");
  }

  webauthn::VerifiedRegistration verified;
  try {
    verified = webauthn::verify_registration(
        response, *session, expectations(),
        [this](ByteView id) { return store_.find_credential(id).has_value(); });
  } catch (const Error&) {
    store_.finish_session(session_id, SessionStatus::Expired);
    throw;
  }
  if (!store_.finish_session(session_id, SessionStatus::Completed)) {
    throw Error(Errc::SessionAlreadyUsed, "Passkey session was already used");
  }

  storage::PasskeyCredentialRecord record;
  record.credential_id = verified.credential_id;
  record.public_key = verified.public_key;
  record.counter = verified.counter;
  record.device_name = std::move(name);
  record.user_id = std::string(user_id);
  record.created_at = now();
  try {
    store_.add_credential(record);
  } catch (const Error& e) {
    if (e.code() == Errc::UniquenessViolation) {
      throw Error(Errc::CredentialAlreadyRegistered, "Credential is already registered");
    }
    throw;
  }
  return record;
}

PasskeyAssertionCeremony AuthService::passkey_auth_options(std::optional<std::string_view> email) {
  webauthn::AuthenticationOptions options;
  options.challenge = webauthn::generate_challenge();
  options.rp_id = config_.rp_id;
  options.timeout_ms = millis(config_.ceremony_ttl);
  options.user_verification = config_.require_user_verification
                                  ? webauthn::UserVerification::Required
                                  : webauthn::UserVerification::Preferred;

  storage::PasskeySessionRecord session;
  session.session_id = storage::new_opaque_id();
  session.challenge = options.challenge.bytes;
  session.purpose = CeremonyPurpose::Authentication;
  session.expires_at = now() + config_.ceremony_ttl;

  if (email && !email->empty()) {
    auto normalized = require_email(*email);
    if (auto user = store_.find_user_by_email(normalized)) {
      session.user_id = user->user_id;
      for (const auto& cred : store_.list_credentials(user->user_id)) {
        options.allow_credentials.push_back(cred.credential_id);
      }
    } else {
      // same shape as a known user without passkeys; nothing can match
      session.user_id = "";
    }
  }
  store_.put_session(session);
  return {session.session_id, std::move(options)};
}

PasskeyLogin AuthService::passkey_auth_verify(std::string_view session_id,
                                              const webauthn::AuthenticationResponse& response,
                                              std::string_view client_key) {
  limiter_.enforce(routes::kPasskeyVerify, client_key, now());
  auto session = store_.find_session(session_id);
  if (!session) throw Error(Errc::SessionNotFound, "Unknown passkey session");

  storage::PasskeyCredentialRecord stored;
  webauthn::VerifiedAuthentication verified;
  try {
    webauthn::check_session(*session, CeremonyPurpose::Authentication, now());
    auto cred = store_.find_credential(response.raw_id);
    if (!cred || (session->user_id && cred->user_id != *session->user_id)) {
      throw Error(Errc::UnknownCredential, "Unknown credential");
    }
    stored = std::move(*cred);
    verified = webauthn::verify_assertion(response, stored, *session, expectations());
  } catch (const Error&) {
    store_.finish_session(session_id, SessionStatus::Expired);
    throw;
  }
  if (!store_.finish_session(session_id, SessionStatus::Completed)) {
    throw Error(Errc::SessionAlreadyUsed, "Passkey session was already used");
  }
  if (!store_.update_counter(stored.credential_id, stored.counter, verified.new_counter)) {
    throw Error(Errc::CounterRegression, "Signature counter changed concurrently");
  }
  auto user = store_.find_user_by_id(stored.user_id);
  if (!user) throw Error(Errc::UnknownCredential, "Unknown credential");
  return {tokens_.issue(user->user_id, user->email), user->user_id, verified.new_counter};
}

std::vector<PasskeySummary> AuthService::list_passkeys(std::string_view user_id) const {
  std::vector<PasskeySummary> out;
  for (const auto& cred : store_.list_credentials(user_id)) {
    out.push_back({cred.credential_id, cred.device_name, cred.created_at, cred.counter});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at
                                        : a.credential_id < b.credential_id;
  });
  return out;
}

void AuthService::delete_passkey(std::string_view user_id, ByteView credential_id) {
  auto cred = store_.find_credential(credential_id);
  if (!cred) throw Error(Errc::NotFound, "Passkey not found");
  if (cred->user_id != user_id) throw Error(Errc::Forbidden, "Passkey belongs to another user");
  store_.delete_credential(credential_id);
}

// ---- tokens -------------------------------------------------------------------------

tokens::TokenClaims AuthService::authenticate(std::string_view bearer) const {
  return tokens_.verify(bearer);
}

void AuthService::logout(std::string_view bearer) {
  tokens_.verify(bearer);
  tokens_.revoke(bearer);
}

// ---- TOTP ---------------------------------------------------------------------------

bool AuthService::accept_totp_once(std::string_view user_id, const otp::OtpSecret& secret,
                                   std::string_view code, int window) {
  auto unix_now = to_unix_seconds(now());
  auto step = otp::match_totp_step(secret, code, unix_now, window);
  if (!step) return false;
  bool fresh = false;
  auto key = key_for(kTotpUsedPrefix, std::string(user_id) + ":" + std::to_string(*step));
  Duration guard = std::chrono::seconds{otp::kDefaultStep * (2 * window + 2)};
  store_.ttl_modify(key, [&](const Bytes* current) {
    if (current) return storage::TtlMutation::keep();
    fresh = true;
    return storage::TtlMutation::put(Bytes{1}, guard);
  });
  return fresh;
}

}  // namespace passgate::flows

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "passgate/common/clock.hpp"
#include "passgate/flows/mailer.hpp"
#include "passgate/flows/oauth.hpp"
#include "passgate/flows/rate_limiter.hpp"
#include "passgate/otp/otp.hpp"
#include "passgate/storage/store.hpp"
#include "passgate/tokens/tokens.hpp"
#include "passgate/webauthn/relying_party.hpp"
#include "passgate/webauthn/types.hpp"

namespace passgate::flows {

/// Route names used as rate-limiter keys.
namespace routes {
inline constexpr std::string_view kCodeRequest = "register-code";
inline constexpr std::string_view kPasswordLogin = "login";
inline constexpr std::string_view kPasskeyVerify = "passkey-verify";
}  // namespace routes

struct FlowConfig {
  Duration registration_code_ttl = std::chrono::seconds{30};
  Duration login_code_ttl = std::chrono::seconds{300};
  int code_digits = 6;
  int max_code_attempts = 3;
  int password_cost = password::kDefaultCost;

  RateLimit code_request_limit{3, std::chrono::minutes{1}};
  RateLimit password_login_limit{10, std::chrono::minutes{1}};
  RateLimit passkey_verify_limit{20, std::chrono::minutes{1}};

  Duration oauth_state_ttl = std::chrono::minutes{10};

  std::string rp_id = "localhost";
  std::string rp_name = "PassGate";
  std::string origin = "http://localhost:8080";
  Duration ceremony_ttl = std::chrono::minutes{5};
  bool require_user_verification = false;

  std::string mail_sender_name = "PassGate";

  /// Throws ConfigError for out-of-range values or an rp_id that is not a
  /// registrable suffix of the origin's host.
  void validate() const;
};

struct PasskeyCeremony {
  std::string session_id;
  webauthn::RegistrationOptions options;
};

struct PasskeyAssertionCeremony {
  std::string session_id;
  webauthn::AuthenticationOptions options;
};

struct PasskeySummary {
  Bytes credential_id;
  std::string device_name;
  Timestamp created_at{};
  std::uint32_t counter = 0;
};

struct PasskeyLogin {
  tokens::SignedToken token;
  std::string user_id;
  std::uint32_t new_counter = 0;
};

struct OAuthLogin {
  tokens::SignedToken token;
  std::string user_id;
  bool created = false;
};

/// The five authentication flows. Stateless apart from the rate limiter:
/// everything else lives in the store, and every check-then-consume step
/// goes through one of the store's atomic operations.
///
/// Every failure is an exception; no method hands out a token on an error path.
class AuthService {
 public:
  AuthService(FlowConfig config, storage::Store& store, tokens::TokenService& tokens,
              Mailer& mailer, OAuthProvider& oauth);

  // registration with an emailed code
  void request_registration_code(std::string_view email);
  void verify_registration_code(std::string_view email, std::string_view code);
  std::string set_password_and_promote(std::string_view email, std::string_view password);

  // password + emailed code
  void login_password_step(std::string_view email, std::string_view password,
                           std::string_view client_key);
  tokens::SignedToken login_code_step(std::string_view email, std::string_view code);

  // OAuth authorization code flow
  std::string oauth_start();
  OAuthLogin oauth_callback(std::string_view code, std::string_view state);

  // passkeys
  PasskeyCeremony passkey_register_options(std::string_view user_id);
  storage::PasskeyCredentialRecord passkey_register_verify(
      std::string_view user_id, std::string_view session_id,
      const webauthn::RegistrationResponse& response, std::string_view device_name,
      std::string_view client_key);
  PasskeyAssertionCeremony passkey_auth_options(std::optional<std::string_view> email = {});
  PasskeyLogin passkey_auth_verify(std::string_view session_id,
                                   const webauthn::AuthenticationResponse& response,
                                   std::string_view client_key);
  std::vector<PasskeySummary> list_passkeys(std::string_view user_id) const;
  void delete_passkey(std::string_view user_id, ByteView credential_id);

  // bearer tokens
  tokens::TokenClaims authenticate(std::string_view bearer) const;
  void logout(std::string_view bearer);

  /// TOTP check with a used-step guard: a code is accepted at most once per
  /// (user, time step).
  bool accept_totp_once(std::string_view user_id, const otp::OtpSecret& secret,
                        std::string_view code, int window = otp::kDefaultWindow);

  const FlowConfig& config() const { return config_; }
  RateLimiter& limiter() { return limiter_; }
  storage::Store& store() { return store_; }

 private:
  enum class CodeCheck { Accepted, Mismatch, Expired };

  void issue_code(std::string_view cache_key, std::string_view email, Duration ttl,
                  std::string_view subject);
  CodeCheck consume_code(std::string_view cache_key, std::string_view code);
  void require_code(std::string_view cache_key, std::string_view code);
  webauthn::CeremonyExpectations expectations() const;
  Timestamp now() const { return store_.clock().now(); }

  FlowConfig config_;
  storage::Store& store_;
  tokens::TokenService& tokens_;
  Mailer& mailer_;
  OAuthProvider& oauth_;
  RateLimiter limiter_;
  password::PasswordHash dummy_hash_;
};

inline constexpr std::size_t kMaxDeviceNameLength = 64;

}  // namespace passgate::flows

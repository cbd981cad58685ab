#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "passgate/common/clock.hpp"

namespace passgate::flows {

struct OAuthIdentity {
  std::string subject;
  std::string email;
};

class OAuthProvider {
 public:
  virtual ~OAuthProvider() = default;
  /// Where to send the browser. `state` is echoed back to the callback.
  virtual std::string authorize_url(std::string_view state) const = 0;
  /// Trades an authorization code for the user's identity. Throws CodeExchangeFailed.
  virtual OAuthIdentity exchange_code(std::string_view code) = 0;
};

/// In-process stand-in for an OpenID provider. `authorize` plays the consent
/// screen: it mints a single-use code bound to an email address.
class MockOAuthProvider final : public OAuthProvider {
 public:
  MockOAuthProvider(std::shared_ptr<const Clock> clock, std::string authorize_endpoint,
                    std::string redirect_uri, Duration code_ttl = std::chrono::minutes{10});

  std::string authorize_url(std::string_view state) const override;
  OAuthIdentity exchange_code(std::string_view code) override;

  /// Throws InvalidArgument for a malformed email.
  std::string authorize(std::string_view email);

  const std::string& redirect_uri() const { return redirect_uri_; }

  /// Stable subject for an email: "mock-" + first 16 hex chars of SHA-256(email).
  static std::string subject_for(std::string_view email);

 private:
  struct Grant {
    OAuthIdentity identity;
    Timestamp expires_at{};
  };

  std::shared_ptr<const Clock> clock_;
  std::string authorize_endpoint_;
  std::string redirect_uri_;
  Duration code_ttl_;
  std::mutex mutex_;
  std::map<std::string, Grant, std::less<>> grants_;
};

/// RFC 3986 unreserved characters pass through, everything else is %XX.
std::string url_encode(std::string_view s);

}  // namespace passgate::flows

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "passgate/emulator/authenticator.hpp"

namespace httplib {
class Client;
}

namespace passgate::client {

struct Reply {
  int status = 0;
  nlohmann::json body;  // null when the body is not JSON
  std::multimap<std::string, std::string, std::less<>> headers;

  bool ok() const { return status >= 200 && status < 300; }
  std::string header(std::string_view name) const;
  /// ApiError "code", or "http_<status>" when the body has none.
  std::string error_code() const;
  std::string error_message() const;
};

/// Thin JSON client for the service's HTTP API. Redirects are not followed.
class ApiClient {
 public:
  explicit ApiClient(std::string base_url);
  ~ApiClient();
  ApiClient(ApiClient&&) noexcept;
  ApiClient& operator=(ApiClient&&) noexcept;

  using Headers = std::vector<std::pair<std::string, std::string>>;

  /// Throws Error(InvalidArgument) when the server cannot be reached.
  Reply get(const std::string& path, const std::string& bearer = {}, const Headers& extra = {});
  Reply post(const std::string& path, const nlohmann::json& body, const std::string& bearer = {},
             const Headers& extra = {});
  Reply del(const std::string& path, const std::string& bearer = {});

  const std::string& base_url() const { return base_; }

 private:
  std::string base_;
  std::unique_ptr<httplib::Client> http_;
};

/// "/a/b?c=d" from "http://host:port/a/b?c=d"; a bare path is returned as is.
std::string path_and_query(std::string_view url);
/// Value of one query parameter, percent-decoded.
std::optional<std::string> query_param(std::string_view url, std::string_view name);

/// start -> mock authorize -> callback. Returns the bearer token.
/// Throws Error(CodeExchangeFailed) naming the failed hop.
std::string oauth_login(ApiClient& api, std::string_view email);

struct DemoOptions {
  std::string server = "http://127.0.0.1:8080";
  std::string email;
  /// Origin the emulated browser reports; empty means the server URL.
  std::string origin;
  std::optional<emulator::Tamper> tamper;
  /// Apply the tamper to the registration ceremony instead of the login.
  bool tamper_registration = false;
  std::string device_name = "demo authenticator";
  emulator::AttestationFormat attestation = emulator::AttestationFormat::None;
};

struct DemoStep {
  std::string name;
  bool ok = false;
  int status = 0;  // HTTP status, 0 for local steps
  std::string detail;
};

struct DemoReport {
  std::vector<DemoStep> steps;
  bool ok = false;
  std::string failed_step;

  nlohmann::json to_json() const;
};

/// oauth-login, register-options, emulate-create, register-verify,
/// auth-options, emulate-get, auth-verify, me. A login-stage tamper first
/// runs one honest login (warmup-* steps) so the stored counter is nonzero.
/// Stops at the first failed step.
DemoReport run_demo(const DemoOptions& options, emulator::EmulatedAuthenticator& authenticator,
                    const std::function<void(const DemoStep&)>& on_step = {});

}  // namespace passgate::client

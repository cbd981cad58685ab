#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "passgate/common/error.hpp"
#include "passgate/flows/auth_service.hpp"

namespace httplib {
class Server;
}

namespace passgate::http {

inline constexpr const char* kCeremonyCookie = "pg_ceremony";

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;

  nlohmann::json to_json() const;
};

/// HTTP status for a library error code.
int http_status(Errc code);

/// Turns any exception into the wire envelope. 5xx messages are generic.
ApiError to_api_error(const std::exception& e);

struct ServerOptions {
  std::string cors_origin;
  bool tls = false;
  std::size_t max_body_bytes = 64 * 1024;
  std::string oauth_callback_path = "/auth/oauth/callback";
};

/// JSON API over cpp-httplib. Handlers run on the server's worker threads;
/// all shared state sits behind the AuthService's store.
class ApiServer {
 public:
  /// `mock` enables the built-in provider's authorize endpoint.
  ApiServer(ServerOptions options, flows::AuthService& service, flows::MockOAuthProvider* mock);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Returns the bound port, or -1. Port 0 picks a free one.
  int bind(const std::string& host, int port);
  /// Blocks until stop(). Call after bind().
  bool listen_after_bind();
  /// Stops accepting and lets in-flight requests finish.
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

  httplib::Server& raw() { return *server_; }

 private:
  void install_routes();

  ServerOptions options_;
  flows::AuthService& service_;
  flows::MockOAuthProvider* mock_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace passgate::http

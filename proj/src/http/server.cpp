#include "passgate/http/server.hpp"

#include <cctype>
#include <ctime>

#include <httplib.h>

namespace passgate::http {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

std::string iso8601(Timestamp t) {
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
  std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void write_error(httplib::Response& res, const ApiError& err) {
  write_json(res, err.status, err.to_json());
}

json parse_body(const httplib::Request& req, bool allow_empty = false) {
  if (req.body.empty() && allow_empty) return json::object();
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(Errc::BadRequest, "Request body must be a JSON object");
  }
  return body;
}

std::string string_field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || !it->is_string()) {
    throw Error(Errc::BadRequest, std::string("Missing string field '") + name + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(Errc::BadRequest, std::string("Field '") + name + "' must be a string");
  return it->get<std::string>();
}

const json& object_field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end() || !it->is_object()) {
    throw Error(Errc::BadRequest, std::string("Missing object field '") + name + "'");
  }
  return *it;
}

std::string bearer_token(const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  constexpr std::string_view kScheme = "bearer ";
  if (header.size() <= kScheme.size()) throw Error(Errc::Unauthorized, "Missing bearer token");
  for (std::size_t i = 0; i < kScheme.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(header[i])) != kScheme[i]) {
      throw Error(Errc::Unauthorized, "Missing bearer token");
    }
  }
  auto token = header.substr(kScheme.size());
  while (!token.empty() && token.front() == ' ') token.erase(token.begin());
  if (token.empty()) throw Error(Errc::Unauthorized, "Missing bearer token");
  return token;
}

std::optional<std::string> cookie_value(const httplib::Request& req, std::string_view name) {
  for (std::size_t n = 0, count = req.get_header_value_count("Cookie"); n < count; ++n) {
    const std::string value = req.get_header_value("Cookie", n);
    std::string_view header = value;
    while (!header.empty()) {
      auto semi = header.find(';');
      auto part = header.substr(0, semi);
      header = semi == std::string_view::npos ? std::string_view{} : header.substr(semi + 1);
      while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
      auto eq = part.find('=');
      if (eq != std::string_view::npos && part.substr(0, eq) == name) {
        return std::string(part.substr(eq + 1));
      }
    }
  }
  return std::nullopt;
}

/// The body's session_id is authoritative; a cookie, when sent, must agree.
std::string ceremony_session(const httplib::Request& req, const json& body) {
  auto session_id = string_field(body, "session_id");
  if (auto cookie = cookie_value(req, kCeremonyCookie); cookie && *cookie != session_id) {
    throw Error(Errc::SessionMismatch, "Session cookie does not match session_id");
  }
  return session_id;
}

std::string ceremony_cookie(const std::string& session_id, Duration ttl, bool tls) {
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(ttl).count();
  std::string c = std::string(kCeremonyCookie) + "=" + session_id +
                  "; Path=/auth/passkey; Max-Age=" + std::to_string(secs) +
                  "; HttpOnly; SameSite=Strict";
  if (tls) c += "; Secure";
  return c;
}

std::string clear_ceremony_cookie(bool tls) {
  std::string c = std::string(kCeremonyCookie) +
                  "=; Path=/auth/passkey; Max-Age=0; HttpOnly; SameSite=Strict";
  if (tls) c += "; Secure";
  return c;
}

json passkey_json(const Bytes& id, const std::string& name, Timestamp created, std::uint32_t counter) {
  return {{"id", base64url_encode(id)},
          {"device_name", name},
          {"created_at", iso8601(created)},
          {"counter", counter}};
}

ApiError generic_error(int status) {
  switch (status) {
    case 400: return {400, "bad_request", "Bad request"};
    case 401: return {401, "unauthorized", "Authentication required"};
    case 403: return {403, "forbidden", "Forbidden"};
    case 404: return {404, "not_found", "Resource not found"};
    case 405: return {405, "method_not_allowed", "Method not allowed"};
    case 413: return {413, "payload_too_large", "Request body too large"};
    case 414: return {414, "uri_too_long", "Request URI too long"};
    case 416: return {416, "range_not_satisfiable", "Range not satisfiable"};
    case 429: return {429, "rate_limited", "Too many requests"};
    default: break;
  }
  if (status >= 500) return {status, "internal_error", "Internal server error"};
  return {status, "http_error", "Request failed"};
}

}  // namespace

json ApiError::to_json() const {
  return {{"status", status}, {"code", code}, {"message", message}};
}

int http_status(Errc code) {
  switch (code) {
    case Errc::Unauthorized:
    case Errc::Malformed:
    case Errc::BadSignature:
    case Errc::Expired:
    case Errc::Revoked:
    case Errc::InvalidCredentials:
    case Errc::CodeMismatch:
    case Errc::CodeExpired:
    case Errc::CodeExchangeFailed:
    case Errc::UnknownCredential:
    case Errc::CounterRegression:
      return 401;
    case Errc::Forbidden:
      return 403;
    case Errc::NotFound:
    case Errc::SessionNotFound:
      return 404;
    case Errc::AlreadyRegistered:
    case Errc::UniquenessViolation:
    case Errc::CredentialAlreadyRegistered:
      return 409;
    case Errc::RateLimited:
      return 429;
    case Errc::ConfigError:
    case Errc::EntropyError:
    case Errc::SnapshotError:
      return 500;
    default:
      return 400;
  }
}

ApiError to_api_error(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    int status = http_status(err->code());
    if (status >= 500) return generic_error(status);
    return {status, std::string(errc_name(err->code())), err->what()};
  }
  if (dynamic_cast<const json::exception*>(&e) != nullptr) {
    return {400, "bad_request", "Request body is not valid JSON"};
  }
  return generic_error(500);
}

ApiServer::ApiServer(ServerOptions options, flows::AuthService& service,
                     flows::MockOAuthProvider* mock)
    : options_(std::move(options)),
      service_(service),
      mock_(mock),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() {
  if (server_->is_running()) server_->stop();
}

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen_after_bind() { return server_->listen_after_bind(); }
void ApiServer::stop() { server_->stop(); }
bool ApiServer::is_running() const { return server_->is_running(); }
void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

void ApiServer::install_routes() {
  auto& srv = *server_;
  srv.set_payload_max_length(options_.max_body_bytes);

  const bool tls = options_.tls;
  const std::string cors_origin = options_.cors_origin;

  srv.set_pre_routing_handler([cors_origin](const httplib::Request& req, httplib::Response& res) {
    auto origin = req.get_header_value("Origin");
    bool allowed = !origin.empty() && origin == cors_origin;
    if (allowed) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Credentials", "true");
    }
    if (!origin.empty()) res.set_header("Vary", "Origin");
    if (req.method == "OPTIONS") {
      if (allowed) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
      }
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.set_post_routing_handler([tls](const httplib::Request&, httplib::Response& res) {
    res.set_header("X-Content-Type-Options", "nosniff");
    res.set_header("X-Frame-Options", "DENY");
    res.set_header("Referrer-Policy", "no-referrer");
    res.set_header("Content-Security-Policy",
                   "default-src 'none'; frame-ancestors 'none'; base-uri 'none'; form-action 'none'");
    res.set_header("Cross-Origin-Opener-Policy", "same-origin");
    res.set_header("Cache-Control", "no-store");
    if (tls) res.set_header("Strict-Transport-Security", "max-age=31536000; includeSubDomains");
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    write_error(res, generic_error(res.status));
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    write_error(res, generic_error(500));
  });

  using Fn = std::function<void(const httplib::Request&, httplib::Response&)>;
  auto guard = [](Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const flows::RateLimitedError& e) {
        write_error(res, to_api_error(e));
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(e.retry_after()).count();
        res.set_header("Retry-After", std::to_string(std::max<long long>(1, (ms + 999) / 1000)));
      } catch (const std::exception& e) {
        write_error(res, to_api_error(e));
      } catch (...) {
        write_error(res, generic_error(500));
      }
    };
  };

  auto& svc = service_;
  const auto ceremony_ttl = svc.config().ceremony_ttl;

  srv.Get("/health", guard([](const auto&, auto& res) { write_json(res, 200, {{"status", "ok"}}); }));

  // registration with an emailed code
  srv.Post("/auth/register/code", guard([&svc](const auto& req, auto& res) {
    auto body = parse_body(req);
    svc.request_registration_code(string_field(body, "email"));
    write_json(res, 200, {{"message", "Verification code sent"}});
  }));
  srv.Post("/auth/register/verify", guard([&svc](const auto& req, auto& res) {
    auto body = parse_body(req);
    svc.verify_registration_code(string_field(body, "email"), string_field(body, "code"));
    write_json(res, 200, {{"verified", true}});
  }));
  srv.Post("/auth/register/password", guard([&svc](const auto& req, auto& res) {
    auto body = parse_body(req);
    auto id = svc.set_password_and_promote(string_field(body, "email"), string_field(body, "password"));
    write_json(res, 201, {{"user_id", id}});
  }));

  // password + code login
  srv.Post("/auth/login", guard([&svc](const auto& req, auto& res) {
    auto body = parse_body(req);
    svc.login_password_step(string_field(body, "email"), string_field(body, "password"),
                            req.remote_addr);
    write_json(res, 200, {{"message", "Verification code sent"}});
  }));
  srv.Post("/auth/login/verify", guard([&svc](const auto& req, auto& res) {
    auto body = parse_body(req);
    auto token = svc.login_code_step(string_field(body, "email"), string_field(body, "code"));
    write_json(res, 200, {{"token", token.compact}});
  }));

  // OAuth
  srv.Get("/auth/oauth/google", guard([&svc](const auto&, auto& res) {
    auto url = svc.oauth_start();
    res.set_header("Location", url);
    write_json(res, 302, {{"authorize_url", url}});
  }));
  srv.Get(options_.oauth_callback_path, guard([&svc](const auto& req, auto& res) {
    if (req.has_param("error")) {
      throw Error(Errc::CodeExchangeFailed, "Provider denied the authorization request");
    }
    auto login = svc.oauth_callback(req.get_param_value("code"), req.get_param_value("state"));
    write_json(res, 200, {{"token", login.token.compact}, {"user_id", login.user_id},
                          {"created", login.created}});
  }));
  if (mock_ != nullptr) {
    auto* mock = mock_;
    srv.Get("/auth/oauth/mock/authorize", guard([mock](const auto& req, auto& res) {
      if (req.get_param_value("redirect_uri") != mock->redirect_uri()) {
        throw Error(Errc::BadRequest, "redirect_uri is not registered");
      }
      auto state = req.get_param_value("state");
      if (state.empty()) throw Error(Errc::BadRequest, "missing state");
      auto code = mock->authorize(req.get_param_value("login_hint"));
      auto location = mock->redirect_uri() + "?code=" + flows::url_encode(code) +
                      "&state=" + flows::url_encode(state);
      res.set_header("Location", location);
      write_json(res, 302, {{"location", location}});
    }));
  }

  // passkeys
  srv.Post("/auth/passkey/register-options",
           guard([&svc, ceremony_ttl, tls](const auto& req, auto& res) {
             auto claims = svc.authenticate(bearer_token(req));
             auto ceremony = svc.passkey_register_options(claims.subject);
             res.set_header("Set-Cookie", ceremony_cookie(ceremony.session_id, ceremony_ttl, tls));
             write_json(res, 200, {{"session_id", ceremony.session_id},
                                   {"options", webauthn::to_json(ceremony.options)}});
           }));
  srv.Post("/auth/passkey/register-verify", guard([&svc, tls](const auto& req, auto& res) {
    auto claims = svc.authenticate(bearer_token(req));
    auto body = parse_body(req);
    auto session_id = ceremony_session(req, body);
    auto response = webauthn::registration_response_from_json(object_field(body, "response"));
    auto record = svc.passkey_register_verify(claims.subject, session_id, response,
                                              optional_string(body, "device_name").value_or(""),
                                              req.remote_addr);
    res.set_header("Set-Cookie", clear_ceremony_cookie(tls));
    write_json(res, 201, {{"credential", passkey_json(record.credential_id, record.device_name,
                                                      record.created_at, record.counter)}});
  }));
  srv.Post("/auth/passkey/auth-options",
           guard([&svc, ceremony_ttl, tls](const auto& req, auto& res) {
             auto body = parse_body(req, true);
             auto email = optional_string(body, "email");
             auto ceremony = email ? svc.passkey_auth_options(std::string_view(*email))
                                   : svc.passkey_auth_options();
             res.set_header("Set-Cookie", ceremony_cookie(ceremony.session_id, ceremony_ttl, tls));
             write_json(res, 200, {{"session_id", ceremony.session_id},
                                   {"options", webauthn::to_json(ceremony.options)}});
           }));
  srv.Post("/auth/passkey/auth-verify", guard([&svc, tls](const auto& req, auto& res) {
    auto body = parse_body(req);
    auto session_id = ceremony_session(req, body);
    auto response = webauthn::authentication_response_from_json(object_field(body, "response"));
    auto login = svc.passkey_auth_verify(session_id, response, req.remote_addr);
    res.set_header("Set-Cookie", clear_ceremony_cookie(tls));
    write_json(res, 200, {{"token", login.token.compact}, {"user_id", login.user_id},
                          {"counter", login.new_counter}});
  }));
  srv.Get("/auth/passkey/list", guard([&svc](const auto& req, auto& res) {
    auto claims = svc.authenticate(bearer_token(req));
    json list = json::array();
    for (const auto& p : svc.list_passkeys(claims.subject)) {
      list.push_back(passkey_json(p.credential_id, p.device_name, p.created_at, p.counter));
    }
    write_json(res, 200, {{"passkeys", list}});
  }));
  srv.Delete("/auth/passkey/:id", guard([&svc](const auto& req, auto& res) {
    auto claims = svc.authenticate(bearer_token(req));
    Bytes id;
    try {
      id = base64url_decode(req.path_params.at("id"));
    } catch (const Error&) {
      throw Error(Errc::NotFound, "Passkey not found");
    }
    svc.delete_passkey(claims.subject, id);
    write_json(res, 200, {{"deleted", true}});
  }));

  // tokens
  srv.Post("/auth/logout", guard([&svc](const auto& req, auto& res) {
    svc.logout(bearer_token(req));
    write_json(res, 200, {{"revoked", true}});
  }));
  srv.Get("/me", guard([&svc](const auto& req, auto& res) {
    auto claims = svc.authenticate(bearer_token(req));
    write_json(res, 200, {{"user_id", claims.subject},
                          {"email", claims.email},
                          {"issued_at", claims.issued_at},
                          {"expires_at", claims.expires_at},
                          {"token_id", claims.token_id}});
  }));
}

}  // namespace passgate::http

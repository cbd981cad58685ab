#include "passgate/client/client.hpp"

#include <httplib.h>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"
#include "passgate/flows/oauth.hpp"

namespace passgate::client {

using nlohmann::json;

std::string Reply::header(std::string_view name) const {
  auto it = headers.find(name);
  return it == headers.end() ? std::string() : it->second;
}

std::string Reply::error_code() const {
  if (body.is_object() && body.contains("code") && body["code"].is_string()) {
    return body["code"].get<std::string>();
  }
  return "http_" + std::to_string(status);
}

std::string Reply::error_message() const {
  if (body.is_object() && body.contains("message") && body["message"].is_string()) {
    return body["message"].get<std::string>();
  }
  return {};
}

ApiClient::ApiClient(std::string base_url)
    : base_(std::move(base_url)), http_(std::make_unique<httplib::Client>(base_)) {
  if (!http_->is_valid()) throw Error(Errc::InvalidArgument, "unsupported server URL: " + base_);
  http_->set_connection_timeout(5);
  http_->set_read_timeout(30);
  http_->set_follow_location(false);
}

ApiClient::~ApiClient() = default;
ApiClient::ApiClient(ApiClient&&) noexcept = default;
ApiClient& ApiClient::operator=(ApiClient&&) noexcept = default;

namespace {

httplib::Headers make_headers(const std::string& bearer, const ApiClient::Headers& extra) {
  httplib::Headers h;
  if (!bearer.empty()) h.emplace("Authorization", "Bearer " + bearer);
  for (const auto& [k, v] : extra) h.emplace(k, v);
  return h;
}

Reply to_reply(const httplib::Result& res, const std::string& base) {
  if (!res) {
    throw Error(Errc::InvalidArgument,
                "request to " + base + " failed: " + httplib::to_string(res.error()));
  }
  Reply r;
  r.status = res->status;
  r.body = json::parse(res->body, nullptr, false);
  if (r.body.is_discarded()) r.body = nullptr;
  for (const auto& [k, v] : res->headers) r.headers.emplace(k, v);
  return r;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      auto hex = std::string(s.substr(i + 1, 2));
      char* end = nullptr;
      long v = std::strtol(hex.c_str(), &end, 16);
      if (end == hex.c_str() + 2) {
        out += static_cast<char>(v);
        i += 2;
        continue;
      }
    }
    out += s[i] == '+' ? ' ' : s[i];
  }
  return out;
}

}  // namespace

Reply ApiClient::get(const std::string& path, const std::string& bearer, const Headers& extra) {
  return to_reply(http_->Get(path, make_headers(bearer, extra)), base_);
}

Reply ApiClient::post(const std::string& path, const json& body, const std::string& bearer,
                      const Headers& extra) {
  return to_reply(http_->Post(path, make_headers(bearer, extra), body.dump(), "application/json"),
                  base_);
}

Reply ApiClient::del(const std::string& path, const std::string& bearer) {
  return to_reply(http_->Delete(path, make_headers(bearer, {})), base_);
}

std::string path_and_query(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos) return std::string(url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string_view::npos) return "/";
  return std::string(url.substr(slash));
}

std::optional<std::string> query_param(std::string_view url, std::string_view name) {
  auto q = url.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  auto query = url.substr(q + 1);
  while (!query.empty()) {
    auto amp = query.find('&');
    auto part = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    auto eq = part.find('=');
    if (eq != std::string_view::npos && part.substr(0, eq) == name) {
      return percent_decode(part.substr(eq + 1));
    }
  }
  return std::nullopt;
}

std::string oauth_login(ApiClient& api, std::string_view email) {
  auto fail = [](const std::string& hop, const Reply& r) {
    return Error(Errc::CodeExchangeFailed,
                 hop + " returned " + std::to_string(r.status) + " " + r.error_code());
  };
  auto start = api.get("/auth/oauth/google");
  if (start.status != 302 || start.header("Location").empty()) throw fail("oauth start", start);
  auto authorize = api.get(path_and_query(start.header("Location")) +
                           "&login_hint=" + flows::url_encode(email));
  if (authorize.status != 302 || authorize.header("Location").empty()) {
    throw fail("oauth authorize", authorize);
  }
  auto callback = api.get(path_and_query(authorize.header("Location")));
  if (!callback.ok() || !callback.body.contains("token")) throw fail("oauth callback", callback);
  return callback.body["token"].get<std::string>();
}

json DemoReport::to_json() const {
  json steps_json = json::array();
  for (const auto& s : steps) {
    steps_json.push_back({{"step", s.name}, {"ok", s.ok}, {"status", s.status}, {"detail", s.detail}});
  }
  json j = {{"ok", ok}, {"steps", steps_json}};
  if (!ok) j["failed_step"] = failed_step;
  return j;
}

DemoReport run_demo(const DemoOptions& options, emulator::EmulatedAuthenticator& authenticator,
                    const std::function<void(const DemoStep&)>& on_step) {
  DemoReport report;
  ApiClient api(options.server);
  const std::string origin = options.origin.empty() ? options.server : options.origin;
  const std::string email = options.email.empty()
                                ? "demo-" + hex_encode(crypto::random_bytes(4)) + "@example.com"
                                : options.email;

  auto run = [&](const std::string& name, const std::function<void(DemoStep&)>& fn) {
    DemoStep s{name, false, 0, {}};
    try {
      fn(s);
    } catch (const std::exception& e) {
      s.ok = false;
      s.detail = e.what();
    }
    report.steps.push_back(s);
    if (on_step) on_step(s);
    if (!s.ok) report.failed_step = name;
    return s.ok;
  };
  auto from_reply = [](DemoStep& s, const Reply& r) {
    s.status = r.status;
    s.ok = r.ok();
    if (!s.ok) s.detail = r.error_code() + ": " + r.error_message();
  };

  authenticator.set_attestation_format(options.attestation);
  std::string token;
  std::string session_id;
  webauthn::RegistrationOptions reg_options;
  webauthn::RegistrationResponse reg_response;
  webauthn::AuthenticationOptions auth_options;
  webauthn::AuthenticationResponse auth_response;

  auto tamper_for = [&](bool registration) {
    return options.tamper && options.tamper_registration == registration ? options.tamper
                                                                        : std::nullopt;
  };

  auto login = [&](const std::string& prefix, std::optional<emulator::Tamper> tamper) {
    return run(prefix + "auth-options", [&](DemoStep& s) {
             auto r = api.post("/auth/passkey/auth-options", json::object());
             from_reply(s, r);
             if (!s.ok) return;
             session_id = r.body.at("session_id").get<std::string>();
             auth_options = webauthn::authentication_options_from_json(r.body.at("options"));
           }) &&
           run(prefix + "emulate-get", [&](DemoStep& s) {
             authenticator.with_tamper(tamper);
             auth_response = authenticator.get(auth_options, origin);
             authenticator.with_tamper(std::nullopt);
             s.ok = true;
             s.detail = "counter " + std::to_string(authenticator.counter(auth_response.raw_id));
           }) &&
           run(prefix + "auth-verify", [&](DemoStep& s) {
             auto r = api.post("/auth/passkey/auth-verify",
                               {{"session_id", session_id},
                                {"response", webauthn::to_json(auth_response)}});
             from_reply(s, r);
             if (s.ok) token = r.body.at("token").get<std::string>();
           });
  };

  bool ok =
      run("oauth-login",
          [&](DemoStep& s) {
            token = oauth_login(api, email);
            s.ok = true;
            s.status = 200;
            s.detail = email;
          }) &&
      run("register-options",
          [&](DemoStep& s) {
            auto r = api.post("/auth/passkey/register-options", json::object(), token);
            from_reply(s, r);
            if (!s.ok) return;
            session_id = r.body.at("session_id").get<std::string>();
            reg_options = webauthn::registration_options_from_json(r.body.at("options"));
          }) &&
      run("emulate-create",
          [&](DemoStep& s) {
            authenticator.with_tamper(tamper_for(true));
            reg_response = authenticator.create(reg_options, origin);
            authenticator.with_tamper(std::nullopt);
            s.ok = true;
            s.detail = "credential " + base64url_encode(reg_response.raw_id);
          }) &&
      run("register-verify",
          [&](DemoStep& s) {
            auto r = api.post("/auth/passkey/register-verify",
                              {{"session_id", session_id},
                               {"device_name", options.device_name},
                               {"response", webauthn::to_json(reg_response)}},
                              token);
            from_reply(s, r);
          }) &&
      (!tamper_for(false) || login("warmup-", std::nullopt)) &&
      login("", tamper_for(false)) &&
      run("me", [&](DemoStep& s) {
        auto r = api.get("/me", token);
        from_reply(s, r);
        if (s.ok && r.body.value("email", "") != email) {
          s.ok = false;
          s.detail = "unexpected email in /me";
        }
      });
  authenticator.with_tamper(std::nullopt);
  report.ok = ok;
  return report;
}

}  // namespace passgate::client

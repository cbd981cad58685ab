// passgate: run the service, drive a passkey ceremony against it, and a few
// operator utilities.

#include <signal.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "passgate/client/client.hpp"
#include "passgate/http/app.hpp"
#include "passgate/otp/otp.hpp"
#include "passgate/tokens/tokens.hpp"

namespace {

using namespace passgate;

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kConfig = 3 };

struct ServeArgs {
  std::string host;
  int port = -1;
  std::string snapshot;
  std::string rp_id;
  std::string origin;
  std::string public_url;
  std::string mailer;
};

int serve(const ServeArgs& args) {
  http::AppConfig config;
  try {
    config = http::config_from_env();
    if (!args.host.empty()) config.host = args.host;
    if (args.port >= 0) config.port = args.port;
    if (!args.snapshot.empty()) config.snapshot_path = args.snapshot;
    if (!args.rp_id.empty()) config.flows.rp_id = args.rp_id;
    if (!args.origin.empty()) config.flows.origin = args.origin;
    if (!args.public_url.empty()) config.public_url = args.public_url;
    if (!args.mailer.empty()) config.mailer = args.mailer;
    config.validate();
  } catch (const Error& e) {
    spdlog::error("configuration: {}", e.what());
    return kConfig;
  }
  if (config.jwt_secret.empty()) {
    spdlog::warn("JWT_SECRET not set; using a random key, tokens will not survive a restart");
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<http::App> app;
  try {
    app = std::make_unique<http::App>(config);
  } catch (const Error& e) {
    spdlog::error("startup: {}", e.what());
    return e.code() == Errc::ConfigError ? kConfig : kRuntime;
  }

  app->server().raw().set_logger([](const auto& req, const auto& res) {
    spdlog::info("{} {} {} {}", req.remote_addr, req.method, req.path, res.status);
  });

  std::atomic<bool> finished{false};
  std::thread([&app, &finished, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("received signal {}, shutting down", sig);
    while (!finished.load()) {
      if (app->server().is_running()) {
        app->server().stop();
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }).detach();

  try {
    app->run([&](int port) {
      std::cout << "listening on http://" << config.host << ":" << port << std::endl;
      spdlog::info("rp_id={} origin={} snapshot={}", config.flows.rp_id, config.flows.origin,
                   config.snapshot_path ? config.snapshot_path->string() : "(memory)");
    });
  } catch (const Error& e) {
    finished = true;
    spdlog::error("{}", e.what());
    return kRuntime;
  }
  finished = true;
  try {
    app->persist();
  } catch (const Error& e) {
    spdlog::error("persisting snapshot: {}", e.what());
    return kRuntime;
  }
  if (config.snapshot_path) spdlog::info("snapshot written to {}", config.snapshot_path->string());
  return kOk;
}

struct DemoArgs {
  client::DemoOptions options;
  std::string tamper;
  std::string tamper_stage = "login";
  std::string attestation = "none";
  bool json = false;
};

int demo(DemoArgs args) {
  try {
    if (!args.tamper.empty()) args.options.tamper = emulator::tamper_from(args.tamper);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  args.options.tamper_registration = args.tamper_stage == "register";
  args.options.attestation = args.attestation == "packed" ? emulator::AttestationFormat::Packed
                                                          : emulator::AttestationFormat::None;
  emulator::EmulatedAuthenticator authenticator;
  client::DemoReport report;
  try {
    report = client::run_demo(args.options, authenticator, [&](const client::DemoStep& s) {
      if (args.json) return;
      std::cout << (s.ok ? "[ ok ] " : "[FAIL] ") << std::left << std::setw(24) << s.name;
      if (s.status != 0) std::cout << " http " << s.status;
      if (!s.detail.empty()) std::cout << "  " << s.detail;
      std::cout << std::endl;
    });
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kRuntime;
  }
  if (args.json) {
    std::cout << report.to_json().dump(2) << std::endl;
  } else if (!report.ok) {
    std::cout << "failed at step: " << report.failed_step << std::endl;
  } else {
    std::cout << "passkey roundtrip complete" << std::endl;
  }
  return report.ok ? kOk : kRuntime;
}

int token_revoke(const std::string& token, const std::string& server, const std::string& snapshot) {
  if (server.empty() == snapshot.empty()) {
    std::cerr << "give exactly one of --server or --snapshot\n";
    return kUsage;
  }
  if (!server.empty()) {
    client::ApiClient api(server);
    auto r = api.post("/auth/logout", nlohmann::json::object(), token);
    if (!r.ok()) {
      std::cerr << "revoke failed: " << r.error_code() << ": " << r.error_message() << '\n';
      return kRuntime;
    }
    std::cout << "revoked" << std::endl;
    return kOk;
  }
  tokens::decode_unverified(token);
  storage::JsonFileStore store(snapshot, std::make_shared<SystemClock>());
  store.blacklist_add(token);
  std::cout << "revoked (snapshot " << snapshot << ")" << std::endl;
  return kOk;
}

int user_list(const std::string& snapshot, bool json) {
  auto store = storage::load_snapshot(snapshot, std::make_shared<SystemClock>());
  auto users = store->list_users();
  if (json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& u : users) {
      out.push_back({{"user_id", u.user_id},
                     {"email", u.email},
                     {"password", u.password_hash.has_value()},
                     {"oauth_subject", u.oauth_subject.value_or("")},
                     {"passkeys", store->list_credentials(u.user_id).size()}});
    }
    std::cout << out.dump(2) << std::endl;
    return kOk;
  }
  std::cout << std::left << std::setw(24) << "USER_ID" << std::setw(32) << "EMAIL" << std::setw(10)
            << "PASSWORD" << std::setw(10) << "OAUTH" << "PASSKEYS" << '\n';
  for (const auto& u : users) {
    std::cout << std::setw(24) << u.user_id << std::setw(32) << u.email << std::setw(10)
              << (u.password_hash ? "yes" : "no") << std::setw(10)
              << (u.oauth_subject ? "yes" : "no") << store->list_credentials(u.user_id).size()
              << '\n';
  }
  std::cout << users.size() << (users.size() == 1 ? " user" : " users") << std::endl;
  return kOk;
}

int totp_gen(const std::string& secret, bool hex, std::optional<std::int64_t> at, int digits, int step) {
  auto key = hex ? otp::OtpSecret::from_raw(hex_decode(secret)) : otp::OtpSecret::from_base32(secret);
  auto t = at.value_or(to_unix_seconds(SystemClock{}.now()));
  std::cout << otp::totp_at(key, t, step, digits) << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
  CLI::App app{"passgate: passkey, TOTP and email-code authentication service"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--host", serve_args.host, "Bind address (HOST)");
  serve_cmd->add_option("--port", serve_args.port, "Port, 0 for any (PORT)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--snapshot", serve_args.snapshot, "JSON snapshot file (SNAPSHOT_PATH)");
  serve_cmd->add_option("--rp-id", serve_args.rp_id, "WebAuthn relying party ID (RP_ID)");
  serve_cmd->add_option("--origin", serve_args.origin, "Expected browser origin (EXPECTED_ORIGIN)");
  serve_cmd->add_option("--public-url", serve_args.public_url, "Externally visible base URL (PUBLIC_URL)");
  serve_cmd->add_option("--mailer", serve_args.mailer, "log or capture (MAILER)");

  DemoArgs demo_args;
  auto* demo_cmd = app.add_subcommand("demo-passkey", "Register and log in with an emulated authenticator");
  demo_cmd->add_option("--server", demo_args.options.server, "Server base URL")->capture_default_str();
  demo_cmd->add_option("--email", demo_args.options.email, "Account email (random when omitted)");
  demo_cmd->add_option("--origin", demo_args.options.origin, "Origin the emulated browser reports");
  demo_cmd->add_option("--tamper", demo_args.tamper,
                       "wrong_origin, wrong_type, stale_challenge, frozen_counter, bad_signature, wrong_rp_hash");
  demo_cmd->add_option("--tamper-stage", demo_args.tamper_stage, "login or register")
      ->check(CLI::IsMember({"login", "register"}))
      ->capture_default_str();
  demo_cmd->add_option("--attestation", demo_args.attestation, "none or packed")
      ->check(CLI::IsMember({"none", "packed"}))
      ->capture_default_str();
  demo_cmd->add_option("--device-name", demo_args.options.device_name, "Passkey label");
  demo_cmd->add_flag("--json", demo_args.json, "Machine-readable per-step report");

  auto* token_cmd = app.add_subcommand("token", "Token administration");
  token_cmd->require_subcommand(1);
  std::string revoke_token, revoke_server, revoke_snapshot;
  auto* revoke_cmd = token_cmd->add_subcommand("revoke", "Blacklist a token");
  revoke_cmd->add_option("--token", revoke_token, "Compact JWT")->required();
  revoke_cmd->add_option("--server", revoke_server, "Revoke through a running server");
  revoke_cmd->add_option("--snapshot", revoke_snapshot, "Revoke in a snapshot file (server stopped)");

  auto* user_cmd = app.add_subcommand("user", "User administration");
  user_cmd->require_subcommand(1);
  std::string list_snapshot;
  bool list_json = false;
  auto* list_cmd = user_cmd->add_subcommand("list", "List users in a snapshot");
  list_cmd->add_option("--snapshot", list_snapshot, "Snapshot file")->required();
  list_cmd->add_flag("--json", list_json, "JSON output");

  auto* totp_cmd = app.add_subcommand("totp", "TOTP utilities");
  totp_cmd->require_subcommand(1);
  std::string totp_secret;
  bool totp_hex = false;
  std::optional<std::int64_t> totp_at;
  int totp_digits = 6;
  int totp_step = 30;
  auto* gen_cmd = totp_cmd->add_subcommand("gen", "Print the code for a secret");
  gen_cmd->add_option("--secret", totp_secret, "Base32 secret")->required();
  gen_cmd->add_flag("--hex", totp_hex, "Secret is hex instead of base32");
  gen_cmd->add_option("--at", totp_at, "Unix time (default: now)");
  gen_cmd->add_option("--digits", totp_digits, "6 or 8")->check(CLI::IsMember({6, 8}));
  gen_cmd->add_option("--step", totp_step, "Seconds per step")->check(CLI::Range(1, 3600));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*demo_cmd) return demo(demo_args);
    if (*revoke_cmd) return token_revoke(revoke_token, revoke_server, revoke_snapshot);
    if (*list_cmd) return user_list(list_snapshot, list_json);
    if (*gen_cmd) return totp_gen(totp_secret, totp_hex, totp_at, totp_digits, totp_step);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << " (" << errc_name(e.code()) << ")\n";
    if (e.code() == Errc::ConfigError) return kConfig;
    if (e.code() == Errc::FormatError || e.code() == Errc::Malformed ||
        e.code() == Errc::InvalidArgument) {
      return kUsage;
    }
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

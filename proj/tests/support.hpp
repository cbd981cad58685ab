#pragma once

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <random>
#include <string>

#include "passgate/client/client.hpp"
#include "passgate/common/bytes.hpp"
#include "passgate/common/clock.hpp"
#include "passgate/http/app.hpp"

namespace passgate::test {

/// Seed for property tests. PASSGATE_TEST_SEED overrides the fixed default.
inline std::uint64_t test_seed() {
  if (const char* s = std::getenv("PASSGATE_TEST_SEED")) return std::strtoull(s, nullptr, 10);
  return 0x5eed'2026;
}

/// Small generator toolkit for hand-rolled property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed = test_seed()) : engine_(seed) {}

  std::uint64_t u64() { return engine_(); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(engine_());
    return out;
  }

  std::string text(std::size_t n, std::string_view alphabet) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += alphabet[range(0, alphabet.size() - 1)];
    return out;
  }

  /// Printable ASCII, no NUL.
  std::string printable(std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += static_cast<char>(range(0x20, 0x7e));
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline const std::string kTestSecret = "test-secret-0123456789abcdef-0123456789";

/// Config for an in-process service: capture mailer, cheap bcrypt, any port.
inline http::AppConfig test_config() {
  http::AppConfig c;
  c.host = "127.0.0.1";
  c.port = 0;
  c.mailer = "capture";
  c.jwt_secret = to_bytes(kTestSecret);
  c.flows.password_cost = 4;
  c.flows.rp_id = "localhost";
  c.flows.origin = "http://localhost:8080";
  return c;
}

/// A running App on an ephemeral port with a manual clock.
struct LiveService {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::unique_ptr<http::App> app;
  int port = -1;

  explicit LiveService(http::AppConfig config = test_config()) {
    app = std::make_unique<http::App>(std::move(config), clock);
    port = app->start();
  }
  ~LiveService() { app->stop(); }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  client::ApiClient client() const { return client::ApiClient(url()); }
  const std::string& origin() const { return app->config().flows.origin; }

  /// Code from the most recent mail to `email`.
  std::string last_code(const std::string& email) {
    auto mail = app->capture_mailer()->last_to(email);
    if (!mail) return {};
    return flows::extract_code(mail->body).value_or("");
  }
};

}  // namespace passgate::test

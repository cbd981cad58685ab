#include "passgate/http/app.hpp"

#include <iostream>

#include "passgate/common/crypto.hpp"

namespace passgate::http {

App::App(AppConfig config, std::shared_ptr<const Clock> clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()) {
  config_.validate();

  if (config_.snapshot_path) {
    store_ = std::make_unique<storage::JsonFileStore>(*config_.snapshot_path, clock_);
  } else {
    store_ = std::make_unique<storage::MemoryStore>(clock_);
  }

  Bytes secret = config_.jwt_secret.empty() ? crypto::random_bytes(32) : config_.jwt_secret;
  tokens_ = std::make_unique<tokens::TokenService>(std::move(secret), *store_, config_.token_ttl,
                                                   config_.blacklist_ttl);

  if (config_.mailer == "capture") {
    auto capture = std::make_unique<flows::CaptureMailer>();
    capture_ = capture.get();
    mailer_ = std::move(capture);
  } else {
    mailer_ = std::make_unique<flows::LogMailer>(std::cerr);
  }

  auto base = config_.effective_public_url();
  ServerOptions options;
  options.cors_origin = config_.effective_cors_origin();
  options.tls = config_.tls;
  options.max_body_bytes = config_.max_body_bytes;
  oauth_ = std::make_unique<flows::MockOAuthProvider>(
      clock_, base + "/auth/oauth/mock/authorize", base + options.oauth_callback_path);

  service_ = std::make_unique<flows::AuthService>(config_.flows, *store_, *tokens_, *mailer_, *oauth_);
  server_ = std::make_unique<ApiServer>(options, *service_, oauth_.get());
}

App::~App() { stop(); }

int App::start() {
  port_ = server_->bind(config_.host, config_.port);
  if (port_ < 0) throw Error(Errc::ConfigError, "could not bind " + config_.host + ":" + std::to_string(config_.port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  start_sweeper();
  server_->wait_until_ready();
  return port_;
}

int App::run(const std::function<void(int port)>& on_bound) {
  port_ = server_->bind(config_.host, config_.port);
  if (port_ < 0) throw Error(Errc::ConfigError, "could not bind " + config_.host + ":" + std::to_string(config_.port));
  if (on_bound) on_bound(port_);
  start_sweeper();
  server_->listen_after_bind();
  return port_;
}

void App::start_sweeper() {
  if (config_.sweep_interval <= Duration::zero() || sweeper_.joinable()) return;
  sweeper_ = std::thread([this] {
    std::unique_lock lock(sweep_mutex_);
    while (!sweep_cv_.wait_for(lock, config_.sweep_interval, [this] { return stopping_; })) {
      lock.unlock();
      try {
        store_->sweep();
      } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << "\n";
      }
      lock.lock();
    }
  });
}

void App::stop() {
  {
    std::lock_guard lock(sweep_mutex_);
    stopping_ = true;
  }
  sweep_cv_.notify_all();
  if (sweeper_.joinable()) sweeper_.join();
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void App::persist() {
  if (auto* file = dynamic_cast<storage::JsonFileStore*>(store_.get())) file->flush();
}

}  // namespace passgate::http

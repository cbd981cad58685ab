#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "passgate/common/clock.hpp"
#include "passgate/flows/auth_service.hpp"
#include "passgate/http/config.hpp"
#include "passgate/http/server.hpp"

namespace passgate::http {

/// Everything a running service needs, wired from one AppConfig.
class App {
 public:
  /// Store: a snapshot-backed JsonFileStore when config.snapshot_path is set,
  /// otherwise in-memory. Mailer: from config.mailer (log goes to stderr).
  /// Throws ConfigError.
  explicit App(AppConfig config, std::shared_ptr<const Clock> clock = nullptr);
  ~App();

  /// Binds and serves on a background thread. Returns the bound port.
  int start();
  /// Binds and serves on the calling thread until stop().
  int run(const std::function<void(int port)>& on_bound = {});
  /// Also stops the sweeper.
  void stop();
  /// Writes the snapshot, when there is one.
  void persist();

  const AppConfig& config() const { return config_; }
  const Clock& clock() const { return *clock_; }
  storage::Store& store() { return *store_; }
  tokens::TokenService& tokens() { return *tokens_; }
  flows::AuthService& service() { return *service_; }
  flows::MockOAuthProvider& oauth() { return *oauth_; }
  flows::Mailer& mailer() { return *mailer_; }
  /// Null unless config.mailer == "capture".
  flows::CaptureMailer* capture_mailer() { return capture_; }
  ApiServer& server() { return *server_; }
  int port() const { return port_; }

 private:
  AppConfig config_;
  std::shared_ptr<const Clock> clock_;
  std::unique_ptr<storage::Store> store_;
  std::unique_ptr<tokens::TokenService> tokens_;
  std::unique_ptr<flows::Mailer> mailer_;
  flows::CaptureMailer* capture_ = nullptr;
  std::unique_ptr<flows::MockOAuthProvider> oauth_;
  std::unique_ptr<flows::AuthService> service_;
  std::unique_ptr<ApiServer> server_;
  std::thread thread_;
  std::thread sweeper_;
  std::mutex sweep_mutex_;
  std::condition_variable sweep_cv_;
  bool stopping_ = false;
  int port_ = -1;

  void start_sweeper();
};

}  // namespace passgate::http

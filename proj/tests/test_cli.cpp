#include <gtest/gtest.h>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "passgate/client/client.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using passgate::client::ApiClient;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

RunResult run_cli(const std::vector<std::string>& args) {
  std::string cmd = quote(PASSGATE_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() /
             ("passgate-cli-" + std::to_string(getpid()) + "-" + std::to_string(passgate::test::Gen().u64() % 100000));
  fs::create_directories(dir);
  return dir;
}

/// `passgate serve` in a child process on an ephemeral port.
class Server {
 public:
  explicit Server(std::vector<std::string> args) {
    int fds[2];
    if (pipe(fds) != 0) return;
    pid_ = fork();
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      int devnull = open("/dev/null", O_WRONLY);
      dup2(devnull, STDERR_FILENO);
      close(fds[0]);
      std::vector<std::string> all = {PASSGATE_CLI, "serve", "--host", "127.0.0.1", "--port", "0"};
      all.insert(all.end(), args.begin(), args.end());
      std::vector<char*> argv;
      for (auto& a : all) argv.push_back(a.data());
      argv.push_back(nullptr);
      execv(PASSGATE_CLI, argv.data());
      _exit(127);
    }
    close(fds[1]);
    out_ = fdopen(fds[0], "r");
    std::array<char, 512> line{};
    while (out_ != nullptr && fgets(line.data(), line.size(), out_) != nullptr) {
      std::string s(line.data());
      auto at = s.find("listening on ");
      if (at != std::string::npos) {
        url_ = s.substr(at + 13);
        while (!url_.empty() && (url_.back() == '\n' || url_.back() == '\r')) url_.pop_back();
        break;
      }
    }
  }

  ~Server() {
    if (pid_ > 0 && exit_code_ < 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
    if (out_ != nullptr) fclose(out_);
  }

  const std::string& url() const { return url_; }

  int terminate() {
    kill(pid_, SIGTERM);
    int status = 0;
    waitpid(pid_, &status, 0);
    exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    return exit_code_;
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  std::string url_;
  int exit_code_ = -1;
};

const std::vector<std::string> kLocalRp = {"--rp-id", "localhost", "--origin", "http://localhost:8080"};

}  // namespace

TEST(Cli, TotpGenRfcVector) {
  // base32 of ASCII "12345678901234567890"
  auto r = run_cli({"totp", "gen", "--secret", "GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ", "--at", "59", "--digits", "8"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "94287082\n");
  r = run_cli({"totp", "gen", "--hex", "--secret", "3132333435363738393031323334353637383930", "--at", "59"});
  EXPECT_EQ(r.out, "287082\n");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).exit_code, 2);
  EXPECT_EQ(run_cli({"bogus"}).exit_code, 2);
  EXPECT_EQ(run_cli({"totp", "gen"}).exit_code, 2);
  EXPECT_EQ(run_cli({"totp", "gen", "--secret", "!!!notbase32", "--at", "0"}).exit_code, 2);
  EXPECT_EQ(run_cli({"totp", "gen", "--secret", "GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ", "--digits", "7"}).exit_code, 2);
  EXPECT_EQ(run_cli({"demo-passkey", "--tamper", "nope"}).exit_code, 2);
  EXPECT_EQ(run_cli({"token", "revoke", "--token", "x"}).exit_code, 2);
  EXPECT_EQ(run_cli({"--help"}).exit_code, 0);
}

TEST(Cli, ServeRejectsRpOriginMismatch) {
  EXPECT_EQ(run_cli({"serve", "--port", "0", "--rp-id", "example.com", "--origin", "https://evil.example"}).exit_code,
            3);
  EXPECT_EQ(run_cli({"serve", "--port", "0", "--mailer", "smtp"}).exit_code, 3);
}

TEST(Cli, ServeHealthAndSnapshotOnSigterm) {
  auto dir = temp_dir();
  auto snapshot = dir / "store.json";
  {
    Server server([&] {
      auto a = kLocalRp;
      a.insert(a.end(), {"--snapshot", snapshot.string()});
      return a;
    }());
    ASSERT_FALSE(server.url().empty());
    ApiClient api(server.url());
    EXPECT_EQ(api.get("/health").status, 200);
    passgate::client::oauth_login(api, "persisted@x.io");
    EXPECT_EQ(server.terminate(), 0);
  }
  ASSERT_TRUE(fs::exists(snapshot));
  auto list = run_cli({"user", "list", "--snapshot", snapshot.string(), "--json"});
  EXPECT_EQ(list.exit_code, 0);
  auto users = nlohmann::json::parse(list.out);
  ASSERT_EQ(users.size(), 1u);
  EXPECT_EQ(users[0]["email"], "persisted@x.io");

  // a restarted server still knows the user
  Server again([&] {
    auto a = kLocalRp;
    a.insert(a.end(), {"--snapshot", snapshot.string()});
    return a;
  }());
  ApiClient api(again.url());
  auto r = api.get("/auth/oauth/google");
  ASSERT_EQ(r.status, 302);
  EXPECT_EQ(again.terminate(), 0);
  fs::remove_all(dir);
}

TEST(Cli, UserListOnEmptyStore) {
  auto dir = temp_dir();
  auto snapshot = dir / "empty.json";
  {
    Server server([&] {
      auto a = kLocalRp;
      a.insert(a.end(), {"--snapshot", snapshot.string()});
      return a;
    }());
    ASSERT_FALSE(server.url().empty());
    EXPECT_EQ(server.terminate(), 0);
  }
  auto r = run_cli({"user", "list", "--snapshot", snapshot.string()});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("USER_ID"), std::string::npos);
  EXPECT_NE(r.out.find("0 users"), std::string::npos);
  EXPECT_EQ(run_cli({"user", "list", "--snapshot", (dir / "missing.json").string()}).exit_code, 1);
  fs::remove_all(dir);
}

TEST(Cli, DemoPasskeyAgainstLiveServer) {
  Server server(kLocalRp);
  ASSERT_FALSE(server.url().empty());
  auto r = run_cli({"demo-passkey", "--server", server.url(), "--origin", "http://localhost:8080", "--json"});
  EXPECT_EQ(r.exit_code, 0) << r.out;
  auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report["ok"].get<bool>());
  std::vector<std::string> names;
  for (const auto& s : report["steps"]) {
    EXPECT_TRUE(s["ok"].get<bool>()) << s.dump();
    names.push_back(s["step"].get<std::string>());
  }
  EXPECT_EQ(names, (std::vector<std::string>{"oauth-login", "register-options", "emulate-create", "register-verify",
                                             "auth-options", "emulate-get", "auth-verify", "me"}));

  auto text = run_cli({"demo-passkey", "--server", server.url(), "--origin", "http://localhost:8080",
                       "--attestation", "packed"});
  EXPECT_EQ(text.exit_code, 0) << text.out;
  EXPECT_NE(text.out.find("passkey roundtrip complete"), std::string::npos);
}

TEST(Cli, DemoFrozenCounterFailsAtAuthVerify) {
  Server server(kLocalRp);
  auto r = run_cli({"demo-passkey", "--server", server.url(), "--origin", "http://localhost:8080", "--tamper",
                    "frozen_counter", "--json"});
  EXPECT_EQ(r.exit_code, 1);
  auto report = nlohmann::json::parse(r.out);
  EXPECT_FALSE(report["ok"].get<bool>());
  EXPECT_EQ(report["failed_step"], "auth-verify");
  EXPECT_NE(report["steps"].back()["detail"].get<std::string>().find("counter_regression"), std::string::npos);
}

TEST(Cli, DemoAgainstWrongOriginServerFailsAtRegisterVerify) {
  Server server({"--rp-id", "localhost", "--origin", "http://localhost:9999"});
  auto r = run_cli({"demo-passkey", "--server", server.url(), "--origin", "http://localhost:8080"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("failed at step: register-verify"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("origin_mismatch"), std::string::npos) << r.out;
}

TEST(Cli, DemoUnreachableServer) {
  auto r = run_cli({"demo-passkey", "--server", "http://127.0.0.1:1", "--json"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, TokenRevokeThroughServer) {
  Server server(kLocalRp);
  ApiClient api(server.url());
  auto token = passgate::client::oauth_login(api, "rv@x.io");
  EXPECT_EQ(api.get("/me", token).status, 200);
  auto r = run_cli({"token", "revoke", "--token", token, "--server", server.url()});
  EXPECT_EQ(r.exit_code, 0);
  auto me = api.get("/me", token);
  EXPECT_EQ(me.status, 401);
  EXPECT_EQ(me.error_code(), "token_revoked");
  EXPECT_EQ(run_cli({"token", "revoke", "--token", token, "--server", server.url()}).exit_code, 1);
}

TEST(Cli, TokenRevokeInSnapshot) {
  auto dir = temp_dir();
  auto snapshot = dir / "store.json";
  std::string token;
  {
    Server server([&] {
      auto a = kLocalRp;
      a.insert(a.end(), {"--snapshot", snapshot.string()});
      return a;
    }());
    ApiClient api(server.url());
    token = passgate::client::oauth_login(api, "snap@x.io");
    EXPECT_EQ(server.terminate(), 0);
  }
  EXPECT_EQ(run_cli({"token", "revoke", "--token", token, "--snapshot", snapshot.string()}).exit_code, 0);
  EXPECT_EQ(run_cli({"token", "revoke", "--token", "not-a-jwt", "--snapshot", snapshot.string()}).exit_code, 2);
  auto store = passgate::storage::load_snapshot(snapshot, std::make_shared<passgate::SystemClock>());
  EXPECT_TRUE(store->blacklist_contains(token));
  fs::remove_all(dir);
}

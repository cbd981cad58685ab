#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "passgate/common/clock.hpp"
#include "passgate/common/error.hpp"

namespace passgate::flows {

struct RateLimit {
  std::uint32_t max = 10;
  Duration window = std::chrono::minutes{1};
};

struct RateDecision {
  bool allowed = true;
  Duration retry_after{0};  // zero when allowed
  std::uint32_t remaining = 0;
};

/// Thrown by flows when a limiter denies a request.
class RateLimitedError : public Error {
 public:
  explicit RateLimitedError(Duration retry_after)
      : Error(Errc::RateLimited, "Too many requests, try again later"), retry_after_(retry_after) {}
  Duration retry_after() const { return retry_after_; }

 private:
  Duration retry_after_;
};

/// Fixed-window counters keyed by (route, client key). A key's window opens
/// at its first request and admits `max` requests until it closes.
/// Routes without a configured limit are never throttled.
class RateLimiter {
 public:
  void configure(std::string route, RateLimit limit);
  bool configured(std::string_view route) const;

  RateDecision check(std::string_view route, std::string_view client_key, Timestamp now);

  /// check() that throws RateLimitedError on denial.
  void enforce(std::string_view route, std::string_view client_key, Timestamp now);

  void reset();

 private:
  struct Window {
    Timestamp start{};
    Duration length{0};
    std::uint32_t count = 0;
  };

  void prune_locked(Timestamp now);

  mutable std::mutex mutex_;
  std::map<std::string, RateLimit, std::less<>> limits_;
  std::map<std::pair<std::string, std::string>, Window> windows_;
  std::uint64_t checks_since_prune_ = 0;
};

}  // namespace passgate::flows

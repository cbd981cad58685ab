#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace passgate {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Duration = std::chrono::milliseconds;

/// Source of wall-clock time. Every TTL, expiry and rate-limit decision reads
/// time through this interface so tests can drive it explicitly.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now());
  }
};

/// Clock that only moves when told to.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = Timestamp{std::chrono::seconds{1'700'000'000}})
      : now_ms_(start.time_since_epoch().count()) {}

  Timestamp now() const override { return Timestamp{Duration{now_ms_.load()}}; }

  void advance(Duration d) { now_ms_ += d.count(); }
  void set(Timestamp t) { now_ms_ = t.time_since_epoch().count(); }

 private:
  std::atomic<std::int64_t> now_ms_;
};

inline std::int64_t to_unix_seconds(Timestamp t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
}

inline std::int64_t to_unix_millis(Timestamp t) { return t.time_since_epoch().count(); }

inline Timestamp from_unix_millis(std::int64_t ms) { return Timestamp{Duration{ms}}; }

}  // namespace passgate

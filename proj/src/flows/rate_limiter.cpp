#include "passgate/flows/rate_limiter.hpp"

namespace passgate::flows {

void RateLimiter::configure(std::string route, RateLimit limit) {
  if (limit.max == 0 || limit.window <= Duration::zero()) {
    throw Error(Errc::ConfigError, "rate limit needs max >= 1 and a positive window");
  }
  std::lock_guard lock(mutex_);
  limits_.insert_or_assign(std::move(route), limit);
}

bool RateLimiter::configured(std::string_view route) const {
  std::lock_guard lock(mutex_);
  return limits_.find(route) != limits_.end();
}

RateDecision RateLimiter::check(std::string_view route, std::string_view client_key,
                                Timestamp now) {
  std::lock_guard lock(mutex_);
  auto lit = limits_.find(route);
  if (lit == limits_.end()) return {true, Duration::zero(), UINT32_MAX};
  const RateLimit& limit = lit->second;

  if (++checks_since_prune_ >= 4096) prune_locked(now);

  auto& w = windows_[{std::string(route), std::string(client_key)}];
  if (w.count == 0 || now >= w.start + w.length || now < w.start) {
    w.start = now;
    w.length = limit.window;
    w.count = 0;
  }
  if (w.count < limit.max) {
    ++w.count;
    return {true, Duration::zero(), limit.max - w.count};
  }
  return {false, w.start + w.length - now, 0};
}

void RateLimiter::enforce(std::string_view route, std::string_view client_key, Timestamp now) {
  auto decision = check(route, client_key, now);
  if (!decision.allowed) throw RateLimitedError(decision.retry_after);
}

void RateLimiter::reset() {
  std::lock_guard lock(mutex_);
  windows_.clear();
}

void RateLimiter::prune_locked(Timestamp now) {
  checks_since_prune_ = 0;
  for (auto it = windows_.begin(); it != windows_.end();) {
    if (now >= it->second.start + it->second.length) {
      it = windows_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace passgate::flows

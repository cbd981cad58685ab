#include "passgate/common/error.hpp"
#include "passgate/storage/store.hpp"

namespace passgate::storage {
namespace {

std::string require_email(std::string_view email) {
  if (!is_well_formed_email(email)) throw Error(Errc::InvalidArgument, "malformed email");
  return normalize_email(email);
}

bool blacklist_live(const TokenBlacklistEntry& e, Timestamp now) { return now < e.expires_at(); }

}  // namespace

MemoryStore::MemoryStore(std::shared_ptr<const Clock> clock, StoreState initial)
    : clock_(std::move(clock)), state_(std::move(initial)) {
  if (!clock_) throw Error(Errc::ConfigError, "store needs a clock");
}

std::string MemoryStore::upsert_user_locked(UserRecord record) {
  record.email = require_email(record.email);
  for (const auto& [id, user] : state_.users) {
    if (user.email == record.email && id != record.user_id) {
      throw Error(Errc::UniquenessViolation, "email already belongs to another user");
    }
    if (record.oauth_subject && user.oauth_subject == record.oauth_subject &&
        id != record.user_id) {
      throw Error(Errc::UniquenessViolation, "oauth subject already linked to another user");
    }
  }
  if (record.user_id.empty()) record.user_id = new_opaque_id();
  if (record.created_at == Timestamp{}) record.created_at = clock_->now();
  auto id = record.user_id;
  state_.users.insert_or_assign(id, std::move(record));
  return id;
}

std::string MemoryStore::upsert_user(UserRecord record) {
  std::lock_guard lock(mutex_);
  return upsert_user_locked(std::move(record));
}

std::optional<UserRecord> MemoryStore::find_user_by_email(std::string_view email) const {
  auto normalized = normalize_email(email);
  std::lock_guard lock(mutex_);
  for (const auto& [id, user] : state_.users) {
    if (user.email == normalized) return user;
  }
  return std::nullopt;
}

std::optional<UserRecord> MemoryStore::find_user_by_id(std::string_view user_id) const {
  std::lock_guard lock(mutex_);
  auto it = state_.users.find(user_id);
  if (it == state_.users.end()) return std::nullopt;
  return it->second;
}

std::optional<UserRecord> MemoryStore::find_user_by_oauth_subject(std::string_view subject) const {
  std::lock_guard lock(mutex_);
  for (const auto& [id, user] : state_.users) {
    if (user.oauth_subject && *user.oauth_subject == subject) return user;
  }
  return std::nullopt;
}

std::vector<UserRecord> MemoryStore::list_users() const {
  std::lock_guard lock(mutex_);
  std::vector<UserRecord> out;
  out.reserve(state_.users.size());
  for (const auto& [id, user] : state_.users) out.push_back(user);
  return out;
}

void MemoryStore::put_temp_registration(TempRegistration record) {
  record.email = require_email(record.email);
  if (record.created_at == Timestamp{}) record.created_at = clock_->now();
  std::lock_guard lock(mutex_);
  auto key = record.email;
  state_.temp_registrations.insert_or_assign(std::move(key), std::move(record));
}

std::optional<TempRegistration> MemoryStore::find_temp_registration(std::string_view email) const {
  auto normalized = normalize_email(email);
  std::lock_guard lock(mutex_);
  auto it = state_.temp_registrations.find(normalized);
  if (it == state_.temp_registrations.end()) return std::nullopt;
  return it->second;
}

bool MemoryStore::mark_temp_verified(std::string_view email) {
  auto normalized = normalize_email(email);
  std::lock_guard lock(mutex_);
  auto it = state_.temp_registrations.find(normalized);
  if (it == state_.temp_registrations.end()) return false;
  it->second.otp_verified = true;
  return true;
}

std::string MemoryStore::promote_temp_registration(std::string_view email, UserRecord user) {
  auto normalized = normalize_email(email);
  std::lock_guard lock(mutex_);
  auto it = state_.temp_registrations.find(normalized);
  if (it == state_.temp_registrations.end()) {
    throw Error(Errc::NotFound, "no pending registration for this email");
  }
  if (!it->second.otp_verified) throw Error(Errc::NotVerified, "email code not verified");
  user.email = normalized;
  auto id = upsert_user_locked(std::move(user));
  state_.temp_registrations.erase(it);
  return id;
}

bool MemoryStore::delete_temp_registration(std::string_view email) {
  auto normalized = normalize_email(email);
  std::lock_guard lock(mutex_);
  return state_.temp_registrations.erase(normalized) > 0;
}

void MemoryStore::add_credential(PasskeyCredentialRecord record) {
  if (record.credential_id.empty()) throw Error(Errc::InvalidArgument, "empty credential id");
  if (record.created_at == Timestamp{}) record.created_at = clock_->now();
  std::lock_guard lock(mutex_);
  if (state_.credentials.contains(record.credential_id)) {
    throw Error(Errc::UniquenessViolation, "credential id already registered");
  }
  auto key = record.credential_id;
  state_.credentials.emplace(std::move(key), std::move(record));
}

std::optional<PasskeyCredentialRecord> MemoryStore::find_credential(ByteView credential_id) const {
  Bytes key(credential_id.begin(), credential_id.end());
  std::lock_guard lock(mutex_);
  auto it = state_.credentials.find(key);
  if (it == state_.credentials.end()) return std::nullopt;
  return it->second;
}

std::vector<PasskeyCredentialRecord> MemoryStore::list_credentials(std::string_view user_id) const {
  std::lock_guard lock(mutex_);
  std::vector<PasskeyCredentialRecord> out;
  for (const auto& [id, cred] : state_.credentials) {
    if (cred.user_id == user_id) out.push_back(cred);
  }
  return out;
}

bool MemoryStore::update_counter(ByteView credential_id, std::uint32_t expected,
                                 std::uint32_t updated) {
  Bytes key(credential_id.begin(), credential_id.end());
  std::lock_guard lock(mutex_);
  auto it = state_.credentials.find(key);
  if (it == state_.credentials.end()) return false;
  if (it->second.counter != expected || updated < expected) return false;
  it->second.counter = updated;
  return true;
}

bool MemoryStore::delete_credential(ByteView credential_id) {
  Bytes key(credential_id.begin(), credential_id.end());
  std::lock_guard lock(mutex_);
  return state_.credentials.erase(key) > 0;
}

void MemoryStore::put_session(PasskeySessionRecord record) {
  if (record.session_id.empty()) throw Error(Errc::InvalidArgument, "empty session id");
  std::lock_guard lock(mutex_);
  auto key = record.session_id;
  state_.sessions.insert_or_assign(std::move(key), std::move(record));
}

std::optional<PasskeySessionRecord> MemoryStore::find_session(std::string_view session_id) const {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) return std::nullopt;
  auto record = it->second;
  if (record.status == SessionStatus::Pending && now >= record.expires_at) {
    record.status = SessionStatus::Expired;
  }
  return record;
}

bool MemoryStore::finish_session(std::string_view session_id, SessionStatus to) {
  if (to == SessionStatus::Pending) throw Error(Errc::InvalidArgument, "cannot re-open a session");
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end() || it->second.status != SessionStatus::Pending) return false;
  if (now >= it->second.expires_at) {
    it->second.status = SessionStatus::Expired;
    return to == SessionStatus::Expired;
  }
  it->second.status = to;
  return true;
}

void MemoryStore::blacklist_add(std::string_view token, Duration ttl) {
  if (token.empty()) throw Error(Errc::InvalidArgument, "empty token");
  if (ttl <= Duration::zero()) throw Error(Errc::InvalidArgument, "blacklist ttl must be positive");
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = state_.blacklist.find(token);
  if (it != state_.blacklist.end() && blacklist_live(it->second, now)) return;
  state_.blacklist.insert_or_assign(std::string(token),
                                    TokenBlacklistEntry{std::string(token), now, ttl});
}

bool MemoryStore::blacklist_contains(std::string_view token) const {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = state_.blacklist.find(token);
  return it != state_.blacklist.end() && blacklist_live(it->second, now);
}

void MemoryStore::ttl_put(std::string_view key, Bytes value, Duration ttl) {
  if (ttl <= Duration::zero()) throw Error(Errc::InvalidArgument, "ttl must be positive");
  const auto deadline = clock_->now() + ttl;
  std::lock_guard lock(mutex_);
  ttl_.insert_or_assign(std::string(key), TtlEntry{std::move(value), deadline});
}

std::optional<Bytes> MemoryStore::ttl_get(std::string_view key) const {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = ttl_.find(key);
  if (it == ttl_.end() || now >= it->second.expires_at) return std::nullopt;
  return it->second.value;
}

bool MemoryStore::ttl_erase(std::string_view key) {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = ttl_.find(key);
  if (it == ttl_.end()) return false;
  const bool live = now < it->second.expires_at;
  ttl_.erase(it);
  return live;
}

void MemoryStore::ttl_modify(std::string_view key,
                             const std::function<TtlMutation(const Bytes* current)>& fn) {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  auto it = ttl_.find(key);
  if (it != ttl_.end() && now >= it->second.expires_at) {
    ttl_.erase(it);
    it = ttl_.end();
  }
  auto mutation = fn(it == ttl_.end() ? nullptr : &it->second.value);
  if (mutation.action == TtlMutation::Action::Put) {
    if (mutation.ttl <= Duration::zero()) throw Error(Errc::InvalidArgument, "ttl must be positive");
    ttl_.insert_or_assign(std::string(key), TtlEntry{std::move(mutation.value), now + mutation.ttl});
    return;
  }
  if (it == ttl_.end()) return;
  switch (mutation.action) {
    case TtlMutation::Action::Put:
    case TtlMutation::Action::Keep: break;
    case TtlMutation::Action::Replace: it->second.value = std::move(mutation.value); break;
    case TtlMutation::Action::Erase: ttl_.erase(it); break;
  }
}

std::size_t MemoryStore::sweep() {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  std::size_t changed = std::erase_if(ttl_, [&](const auto& kv) { return now >= kv.second.expires_at; });
  changed += std::erase_if(state_.blacklist,
                           [&](const auto& kv) { return !blacklist_live(kv.second, now); });
  changed += std::erase_if(state_.sessions, [&](const auto& kv) { return now >= kv.second.expires_at; });
  return changed;
}

StoreState MemoryStore::export_state() const {
  const auto now = clock_->now();
  std::lock_guard lock(mutex_);
  StoreState out = state_;
  std::erase_if(out.blacklist, [&](const auto& kv) { return !blacklist_live(kv.second, now); });
  std::erase_if(out.sessions, [&](const auto& kv) { return now >= kv.second.expires_at; });
  return out;
}

}  // namespace passgate::storage

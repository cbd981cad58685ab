#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "passgate/common/clock.hpp"
#include "passgate/storage/records.hpp"

namespace passgate::storage {

/// What a ttl_modify callback wants done with the entry it inspected.
struct TtlMutation {
  enum class Action { Keep, Replace, Erase, Put };
  Action action = Action::Keep;
  Bytes value;       // Replace and Put
  Duration ttl{0};   // Put only

  static TtlMutation keep() { return {}; }
  static TtlMutation erase() { return {Action::Erase, {}, {}}; }
  /// New value, existing deadline. No effect on an absent key.
  static TtlMutation replace(Bytes v) { return {Action::Replace, std::move(v), {}}; }
  /// New value and a fresh deadline; inserts when absent.
  static TtlMutation put(Bytes v, Duration ttl) { return {Action::Put, std::move(v), ttl}; }
};

/// Everything a snapshot contains. Ordered maps keep snapshots byte-stable.
struct StoreState {
  std::map<std::string, UserRecord, std::less<>> users;
  std::map<std::string, TempRegistration, std::less<>> temp_registrations;
  std::map<Bytes, PasskeyCredentialRecord> credentials;
  std::map<std::string, PasskeySessionRecord, std::less<>> sessions;
  std::map<std::string, TokenBlacklistEntry, std::less<>> blacklist;

  friend bool operator==(const StoreState&, const StoreState&) = default;
};

/// Persistence for every record type plus a TTL cache for short-lived codes.
/// Each call is atomic; expiry is enforced on read, so sweep() is optional.
class Store {
 public:
  virtual ~Store() = default;

  // Users. upsert assigns a user_id when the record has none and returns it.
  virtual std::string upsert_user(UserRecord record) = 0;
  virtual std::optional<UserRecord> find_user_by_email(std::string_view email) const = 0;
  virtual std::optional<UserRecord> find_user_by_id(std::string_view user_id) const = 0;
  virtual std::optional<UserRecord> find_user_by_oauth_subject(std::string_view subject) const = 0;
  virtual std::vector<UserRecord> list_users() const = 0;

  // Registration staging.
  virtual void put_temp_registration(TempRegistration record) = 0;
  virtual std::optional<TempRegistration> find_temp_registration(std::string_view email) const = 0;
  /// false when no staging row exists. Never resets a verified row.
  virtual bool mark_temp_verified(std::string_view email) = 0;
  /// Inserts `user` and deletes the staging row in one step. Throws NotFound
  /// when no row exists and NotVerified when its code was never confirmed.
  virtual std::string promote_temp_registration(std::string_view email, UserRecord user) = 0;
  virtual bool delete_temp_registration(std::string_view email) = 0;

  // Passkey credentials.
  virtual void add_credential(PasskeyCredentialRecord record) = 0;
  virtual std::optional<PasskeyCredentialRecord> find_credential(ByteView credential_id) const = 0;
  virtual std::vector<PasskeyCredentialRecord> list_credentials(std::string_view user_id) const = 0;
  /// Compare-and-set on the signature counter: succeeds only if the stored
  /// value still equals `expected` and `updated` is not lower.
  virtual bool update_counter(ByteView credential_id, std::uint32_t expected,
                              std::uint32_t updated) = 0;
  virtual bool delete_credential(ByteView credential_id) = 0;

  // Ceremony sessions.
  virtual void put_session(PasskeySessionRecord record) = 0;
  /// Pending sessions past their deadline are reported as Expired.
  virtual std::optional<PasskeySessionRecord> find_session(std::string_view session_id) const = 0;
  /// Atomic Pending -> {Completed, Expired}. Returns false if the session is
  /// missing or no longer pending. A deadline that has passed only allows
  /// the move to Expired.
  virtual bool finish_session(std::string_view session_id, SessionStatus to) = 0;

  // Token revocation list.
  virtual void blacklist_add(std::string_view token, Duration ttl = kDefaultBlacklistTtl) = 0;
  virtual bool blacklist_contains(std::string_view token) const = 0;

  // TTL cache. ttl must be positive.
  virtual void ttl_put(std::string_view key, Bytes value, Duration ttl) = 0;
  virtual std::optional<Bytes> ttl_get(std::string_view key) const = 0;
  virtual bool ttl_erase(std::string_view key) = 0;
  /// Read-modify-write under the store lock. `current` is null when the key
  /// is absent or expired.
  virtual void ttl_modify(std::string_view key,
                          const std::function<TtlMutation(const Bytes* current)>& fn) = 0;

  /// Drops expired cache entries, blacklist entries and ceremony sessions.
  /// Returns how many records changed.
  virtual std::size_t sweep() = 0;

  /// Copy of all unexpired persistent state.
  virtual StoreState export_state() const = 0;

  virtual const Clock& clock() const = 0;
};

class MemoryStore final : public Store {
 public:
  explicit MemoryStore(std::shared_ptr<const Clock> clock, StoreState initial = {});

  std::string upsert_user(UserRecord record) override;
  std::optional<UserRecord> find_user_by_email(std::string_view email) const override;
  std::optional<UserRecord> find_user_by_id(std::string_view user_id) const override;
  std::optional<UserRecord> find_user_by_oauth_subject(std::string_view subject) const override;
  std::vector<UserRecord> list_users() const override;

  void put_temp_registration(TempRegistration record) override;
  std::optional<TempRegistration> find_temp_registration(std::string_view email) const override;
  bool mark_temp_verified(std::string_view email) override;
  std::string promote_temp_registration(std::string_view email, UserRecord user) override;
  bool delete_temp_registration(std::string_view email) override;

  void add_credential(PasskeyCredentialRecord record) override;
  std::optional<PasskeyCredentialRecord> find_credential(ByteView credential_id) const override;
  std::vector<PasskeyCredentialRecord> list_credentials(std::string_view user_id) const override;
  bool update_counter(ByteView credential_id, std::uint32_t expected,
                      std::uint32_t updated) override;
  bool delete_credential(ByteView credential_id) override;

  void put_session(PasskeySessionRecord record) override;
  std::optional<PasskeySessionRecord> find_session(std::string_view session_id) const override;
  bool finish_session(std::string_view session_id, SessionStatus to) override;

  void blacklist_add(std::string_view token, Duration ttl = kDefaultBlacklistTtl) override;
  bool blacklist_contains(std::string_view token) const override;

  void ttl_put(std::string_view key, Bytes value, Duration ttl) override;
  std::optional<Bytes> ttl_get(std::string_view key) const override;
  bool ttl_erase(std::string_view key) override;
  void ttl_modify(std::string_view key,
                  const std::function<TtlMutation(const Bytes* current)>& fn) override;

  std::size_t sweep() override;
  StoreState export_state() const override;
  const Clock& clock() const override { return *clock_; }

 private:
  struct TtlEntry {
    Bytes value;
    Timestamp expires_at;
  };

  std::string upsert_user_locked(UserRecord record);

  std::shared_ptr<const Clock> clock_;
  mutable std::mutex mutex_;
  StoreState state_;
  std::map<std::string, TtlEntry, std::less<>> ttl_;
};

/// MemoryStore whose persistent state is mirrored to a JSON snapshot file,
/// rewritten atomically (temp file + rename) after every mutation.
class JsonFileStore final : public Store {
 public:
  /// Loads `path` if it exists, otherwise starts empty. Throws SnapshotError.
  JsonFileStore(std::filesystem::path path, std::shared_ptr<const Clock> clock);

  std::string upsert_user(UserRecord record) override;
  std::optional<UserRecord> find_user_by_email(std::string_view email) const override {
    return mem_.find_user_by_email(email);
  }
  std::optional<UserRecord> find_user_by_id(std::string_view user_id) const override {
    return mem_.find_user_by_id(user_id);
  }
  std::optional<UserRecord> find_user_by_oauth_subject(std::string_view subject) const override {
    return mem_.find_user_by_oauth_subject(subject);
  }
  std::vector<UserRecord> list_users() const override { return mem_.list_users(); }

  void put_temp_registration(TempRegistration record) override;
  std::optional<TempRegistration> find_temp_registration(std::string_view email) const override {
    return mem_.find_temp_registration(email);
  }
  bool mark_temp_verified(std::string_view email) override;
  std::string promote_temp_registration(std::string_view email, UserRecord user) override;
  bool delete_temp_registration(std::string_view email) override;

  void add_credential(PasskeyCredentialRecord record) override;
  std::optional<PasskeyCredentialRecord> find_credential(ByteView credential_id) const override {
    return mem_.find_credential(credential_id);
  }
  std::vector<PasskeyCredentialRecord> list_credentials(std::string_view user_id) const override {
    return mem_.list_credentials(user_id);
  }
  bool update_counter(ByteView credential_id, std::uint32_t expected,
                      std::uint32_t updated) override;
  bool delete_credential(ByteView credential_id) override;

  void put_session(PasskeySessionRecord record) override;
  std::optional<PasskeySessionRecord> find_session(std::string_view session_id) const override {
    return mem_.find_session(session_id);
  }
  bool finish_session(std::string_view session_id, SessionStatus to) override;

  void blacklist_add(std::string_view token, Duration ttl = kDefaultBlacklistTtl) override;
  bool blacklist_contains(std::string_view token) const override {
    return mem_.blacklist_contains(token);
  }

  // The cache is deliberately not persisted.
  void ttl_put(std::string_view key, Bytes value, Duration ttl) override {
    mem_.ttl_put(key, std::move(value), ttl);
  }
  std::optional<Bytes> ttl_get(std::string_view key) const override { return mem_.ttl_get(key); }
  bool ttl_erase(std::string_view key) override { return mem_.ttl_erase(key); }
  void ttl_modify(std::string_view key,
                  const std::function<TtlMutation(const Bytes* current)>& fn) override {
    mem_.ttl_modify(key, fn);
  }

  std::size_t sweep() override;
  StoreState export_state() const override { return mem_.export_state(); }
  const Clock& clock() const override { return mem_.clock(); }

  /// Writes the current state to the backing file.
  void flush();
  const std::filesystem::path& path() const { return path_; }

 private:
  template <typename F>
  auto mutate(F&& f);

  std::filesystem::path path_;
  MemoryStore mem_;
  std::mutex io_mutex_;
};

// Snapshot file: UTF-8 JSON with keys version (=1), users,
// temp_registrations, credentials, sessions, blacklist. Binary fields are
// base64url without padding; timestamps are unix milliseconds.
std::string serialize_snapshot(const StoreState& state);
/// Throws Error(SnapshotError) on malformed input.
StoreState deserialize_snapshot(std::string_view json);

/// Atomic write of the store's unexpired state. Throws Error(SnapshotError).
void persist_snapshot(const Store& store, const std::filesystem::path& path);
/// Throws Error(SnapshotError) for unreadable or corrupt files.
std::unique_ptr<MemoryStore> load_snapshot(const std::filesystem::path& path,
                                           std::shared_ptr<const Clock> clock);

}  // namespace passgate::storage

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "passgate/common/error.hpp"
#include "passgate/storage/store.hpp"

namespace passgate::storage {
namespace {

using nlohmann::json;

constexpr int kSnapshotVersion = 1;

std::array<std::uint8_t, 32> coordinate(const json& j) {
  auto raw = base64url_decode(j.get<std::string>());
  if (raw.size() != 32) throw Error(Errc::SnapshotError, "public key coordinate must be 32 bytes");
  std::array<std::uint8_t, 32> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

json key_to_json(const webauthn::CosePublicKey& key) {
  return {{"kty", key.key_type},
          {"alg", key.algorithm},
          {"crv", key.curve},
          {"x", base64url_encode(key.x)},
          {"y", base64url_encode(key.y)}};
}

webauthn::CosePublicKey key_from_json(const json& j) {
  webauthn::CosePublicKey key;
  key.key_type = j.at("kty").get<std::int64_t>();
  key.algorithm = j.at("alg").get<std::int64_t>();
  key.curve = j.at("crv").get<std::int64_t>();
  key.x = coordinate(j.at("x"));
  key.y = coordinate(j.at("y"));
  return key;
}

std::optional<password::PasswordHash> hash_from_json(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  return password::PasswordHash::parse(j.at(field).get<std::string>());
}

CeremonyPurpose purpose_from(const std::string& s) {
  if (s == "registration") return CeremonyPurpose::Registration;
  if (s == "authentication") return CeremonyPurpose::Authentication;
  throw Error(Errc::SnapshotError, "unknown session purpose: " + s);
}

SessionStatus status_from(const std::string& s) {
  if (s == "pending") return SessionStatus::Pending;
  if (s == "completed") return SessionStatus::Completed;
  if (s == "expired") return SessionStatus::Expired;
  throw Error(Errc::SnapshotError, "unknown session status: " + s);
}

}  // namespace

std::string serialize_snapshot(const StoreState& state) {
  json users = json::array();
  for (const auto& [id, u] : state.users) {
    json j = {{"user_id", u.user_id},
              {"email", u.email},
              {"created_at", to_unix_millis(u.created_at)}};
    if (u.password_hash) j["password_hash"] = u.password_hash->encoded();
    if (u.oauth_subject) j["oauth_subject"] = *u.oauth_subject;
    users.push_back(std::move(j));
  }
  json temps = json::array();
  for (const auto& [email, t] : state.temp_registrations) {
    json j = {{"email", t.email},
              {"otp_verified", t.otp_verified},
              {"created_at", to_unix_millis(t.created_at)}};
    if (t.password_hash) j["password_hash"] = t.password_hash->encoded();
    temps.push_back(std::move(j));
  }
  json creds = json::array();
  for (const auto& [id, c] : state.credentials) {
    creds.push_back({{"credential_id", base64url_encode(c.credential_id)},
                     {"public_key", key_to_json(c.public_key)},
                     {"counter", c.counter},
                     {"device_name", c.device_name},
                     {"user_id", c.user_id},
                     {"created_at", to_unix_millis(c.created_at)}});
  }
  json sessions = json::array();
  for (const auto& [id, s] : state.sessions) {
    json j = {{"session_id", s.session_id},
              {"challenge", base64url_encode(s.challenge)},
              {"purpose", to_string(s.purpose)},
              {"expires_at", to_unix_millis(s.expires_at)},
              {"status", to_string(s.status)}};
    if (s.user_id) j["user_id"] = *s.user_id;
    sessions.push_back(std::move(j));
  }
  json blacklist = json::array();
  for (const auto& [token, e] : state.blacklist) {
    blacklist.push_back({{"token", e.token},
                         {"created_at", to_unix_millis(e.created_at)},
                         {"ttl_ms", e.ttl.count()}});
  }
  json doc = {{"version", kSnapshotVersion},     {"users", users},
              {"temp_registrations", temps},     {"credentials", creds},
              {"sessions", sessions},            {"blacklist", blacklist}};
  return doc.dump(2);
}

StoreState deserialize_snapshot(std::string_view text) {
  try {
    auto doc = json::parse(text);
    if (!doc.is_object()) throw Error(Errc::SnapshotError, "snapshot is not a JSON object");
    if (doc.at("version").get<int>() != kSnapshotVersion) {
      throw Error(Errc::SnapshotError, "unsupported snapshot version");
    }
    StoreState state;
    for (const auto& j : doc.at("users")) {
      UserRecord u;
      u.user_id = j.at("user_id").get<std::string>();
      u.email = j.at("email").get<std::string>();
      u.password_hash = hash_from_json(j, "password_hash");
      if (j.contains("oauth_subject")) u.oauth_subject = j.at("oauth_subject").get<std::string>();
      u.created_at = from_unix_millis(j.at("created_at").get<std::int64_t>());
      if (!state.users.emplace(u.user_id, u).second) {
        throw Error(Errc::SnapshotError, "duplicate user id");
      }
    }
    for (const auto& j : doc.at("temp_registrations")) {
      TempRegistration t;
      t.email = j.at("email").get<std::string>();
      t.otp_verified = j.at("otp_verified").get<bool>();
      t.password_hash = hash_from_json(j, "password_hash");
      t.created_at = from_unix_millis(j.at("created_at").get<std::int64_t>());
      state.temp_registrations.insert_or_assign(t.email, t);
    }
    for (const auto& j : doc.at("credentials")) {
      PasskeyCredentialRecord c;
      c.credential_id = base64url_decode(j.at("credential_id").get<std::string>());
      c.public_key = key_from_json(j.at("public_key"));
      c.counter = j.at("counter").get<std::uint32_t>();
      c.device_name = j.at("device_name").get<std::string>();
      c.user_id = j.at("user_id").get<std::string>();
      c.created_at = from_unix_millis(j.at("created_at").get<std::int64_t>());
      if (!state.credentials.emplace(c.credential_id, c).second) {
        throw Error(Errc::SnapshotError, "duplicate credential id");
      }
    }
    for (const auto& j : doc.at("sessions")) {
      PasskeySessionRecord s;
      s.session_id = j.at("session_id").get<std::string>();
      s.challenge = base64url_decode(j.at("challenge").get<std::string>());
      s.purpose = purpose_from(j.at("purpose").get<std::string>());
      if (j.contains("user_id")) s.user_id = j.at("user_id").get<std::string>();
      s.expires_at = from_unix_millis(j.at("expires_at").get<std::int64_t>());
      s.status = status_from(j.at("status").get<std::string>());
      state.sessions.insert_or_assign(s.session_id, s);
    }
    for (const auto& j : doc.at("blacklist")) {
      TokenBlacklistEntry e;
      e.token = j.at("token").get<std::string>();
      e.created_at = from_unix_millis(j.at("created_at").get<std::int64_t>());
      e.ttl = Duration{j.at("ttl_ms").get<std::int64_t>()};
      state.blacklist.insert_or_assign(e.token, e);
    }
    return state;
  } catch (const Error& e) {
    if (e.code() == Errc::SnapshotError) throw;
    throw Error(Errc::SnapshotError, std::string("corrupt snapshot: ") + e.what());
  } catch (const json::exception& e) {
    throw Error(Errc::SnapshotError, std::string("corrupt snapshot: ") + e.what());
  }
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::SnapshotError, "cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(Errc::SnapshotError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::SnapshotError, "rename failed: " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SnapshotError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void persist_snapshot(const Store& store, const std::filesystem::path& path) {
  write_atomically(path, serialize_snapshot(store.export_state()));
}

std::unique_ptr<MemoryStore> load_snapshot(const std::filesystem::path& path,
                                           std::shared_ptr<const Clock> clock) {
  return std::make_unique<MemoryStore>(std::move(clock), deserialize_snapshot(read_file(path)));
}

JsonFileStore::JsonFileStore(std::filesystem::path path, std::shared_ptr<const Clock> clock)
    : path_(std::move(path)),
      mem_(clock, std::filesystem::exists(path_) ? deserialize_snapshot(read_file(path_))
                                                 : StoreState{}) {}

void JsonFileStore::flush() { write_atomically(path_, serialize_snapshot(mem_.export_state())); }

template <typename F>
auto JsonFileStore::mutate(F&& f) {
  std::lock_guard lock(io_mutex_);
  if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
    f();
    flush();
  } else {
    auto result = f();
    flush();
    return result;
  }
}

std::string JsonFileStore::upsert_user(UserRecord record) {
  return mutate([&] { return mem_.upsert_user(std::move(record)); });
}

void JsonFileStore::put_temp_registration(TempRegistration record) {
  mutate([&] { mem_.put_temp_registration(std::move(record)); });
}

bool JsonFileStore::mark_temp_verified(std::string_view email) {
  return mutate([&] { return mem_.mark_temp_verified(email); });
}

std::string JsonFileStore::promote_temp_registration(std::string_view email, UserRecord user) {
  return mutate([&] { return mem_.promote_temp_registration(email, std::move(user)); });
}

bool JsonFileStore::delete_temp_registration(std::string_view email) {
  return mutate([&] { return mem_.delete_temp_registration(email); });
}

void JsonFileStore::add_credential(PasskeyCredentialRecord record) {
  mutate([&] { mem_.add_credential(std::move(record)); });
}

bool JsonFileStore::update_counter(ByteView credential_id, std::uint32_t expected,
                                   std::uint32_t updated) {
  return mutate([&] { return mem_.update_counter(credential_id, expected, updated); });
}

bool JsonFileStore::delete_credential(ByteView credential_id) {
  return mutate([&] { return mem_.delete_credential(credential_id); });
}

void JsonFileStore::put_session(PasskeySessionRecord record) {
  mutate([&] { mem_.put_session(std::move(record)); });
}

bool JsonFileStore::finish_session(std::string_view session_id, SessionStatus to) {
  return mutate([&] { return mem_.finish_session(session_id, to); });
}

void JsonFileStore::blacklist_add(std::string_view token, Duration ttl) {
  mutate([&] { mem_.blacklist_add(token, ttl); });
}

std::size_t JsonFileStore::sweep() {
  return mutate([&] { return mem_.sweep(); });
}

}  // namespace passgate::storage

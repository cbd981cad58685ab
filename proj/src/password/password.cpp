#include "passgate/password/password.hpp"

#include <crypt.h>

#include <algorithm>
#include <cctype>
#include <memory>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

namespace passgate::password {
namespace {

constexpr std::string_view kBcryptAlphabet =
    "./ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::size_t kEncodedLength = 60;

bool in_alphabet(char c) { return kBcryptAlphabet.find(c) != std::string_view::npos; }

std::string run_crypt(std::string_view plain, const std::string& setting) {
  // crypt_rn needs a NUL-terminated key; embedded NULs would silently shorten it.
  if (plain.find('\0') != std::string_view::npos) {
    throw Error(Errc::PolicyViolation, "password contains NUL byte");
  }
  std::string key(plain);
  auto data = std::make_unique<crypt_data>();
  const char* out = crypt_rn(key.c_str(), setting.c_str(), data.get(), sizeof(crypt_data));
  std::fill(key.begin(), key.end(), '\0');
  if (out == nullptr || out[0] == '*') throw Error(Errc::FormatError, "bcrypt rejected setting");
  return std::string(out);
}

}  // namespace

PasswordHash PasswordHash::parse(std::string_view encoded) {
  auto fail = [] { return Error(Errc::FormatError, "malformed bcrypt hash"); };
  if (encoded.size() != kEncodedLength) throw fail();
  if (encoded[0] != '$' || encoded[1] != '2' || encoded[3] != '$' || encoded[6] != '$') {
    throw fail();
  }
  if (encoded[2] != 'b') throw fail();
  if (!std::isdigit(static_cast<unsigned char>(encoded[4])) ||
      !std::isdigit(static_cast<unsigned char>(encoded[5]))) {
    throw fail();
  }
  int cost = (encoded[4] - '0') * 10 + (encoded[5] - '0');
  if (cost < kMinCost || cost > kMaxCost) throw fail();
  auto body = encoded.substr(7);
  if (!std::all_of(body.begin(), body.end(), in_alphabet)) throw fail();
  // The last salt character and the last digest character only carry a few
  // meaningful bits; other values mean the string was altered.
  auto tail_ok = [](char c, std::string_view allowed) {
    return allowed.find(c) != std::string_view::npos;
  };
  if (!tail_ok(body[21], ".Oeu") || !tail_ok(body[52], ".CGKOSWaeimquy26")) throw fail();
  return PasswordHash(std::string(encoded), cost);
}

void check_policy(std::string_view plain) {
  if (plain.size() < kMinLength) throw Error(Errc::PolicyViolation, "password too short");
  if (plain.size() > kMaxLength) throw Error(Errc::PolicyViolation, "password too long");
}

PasswordHash hash_password(std::string_view plain, int cost) {
  if (cost < kMinCost || cost > kMaxCost) throw Error(Errc::ConfigError, "bcrypt cost out of range");
  check_policy(plain);
  auto salt = crypto::random_bytes(16);
  char setting[CRYPT_GENSALT_OUTPUT_SIZE];
  if (crypt_gensalt_rn("$2b$", static_cast<unsigned long>(cost),
                       reinterpret_cast<const char*>(salt.data()), static_cast<int>(salt.size()),
                       setting, sizeof(setting)) == nullptr) {
    throw Error(Errc::EntropyError, "bcrypt salt generation failed");
  }
  return PasswordHash::parse(run_crypt(plain, setting));
}

bool verify_password(std::string_view plain, const PasswordHash& stored) {
  if (plain.size() > kMaxLength || plain.find('\0') != std::string_view::npos) {
    // Never matches, but still spend one hash so timing does not reveal why.
    run_crypt("timing-equaliser", stored.setting());
    return false;
  }
  auto recomputed = run_crypt(plain, stored.setting());
  return crypto::constant_time_equal(std::string_view(recomputed), stored.encoded());
}

bool verify_password(std::string_view plain, std::string_view stored_encoded) {
  return verify_password(plain, PasswordHash::parse(stored_encoded));
}

}  // namespace passgate::password

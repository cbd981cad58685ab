#include "passgate/common/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <limits>

#include "passgate/common/error.hpp"

namespace passgate::crypto {

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw Error(Errc::EntropyError, "RAND_bytes failed");
  }
  return out;
}

std::uint64_t random_below(std::uint64_t bound) {
  if (bound == 0) throw Error(Errc::InvalidArgument, "random_below(0)");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    auto raw = random_bytes(8);
    std::uint64_t v = 0;
    for (auto b : raw) v = (v << 8) | b;
    if (v < limit) return v % bound;
  }
}

Sha256Digest sha256(ByteView data) {
  Sha256Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::ConfigError, "SHA-256 unavailable");
  }
  return out;
}

namespace {

Bytes hmac(const EVP_MD* md, ByteView key, ByteView data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  if (HMAC(md, key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(),
           &len) == nullptr) {
    throw Error(Errc::ConfigError, "HMAC failed");
  }
  out.resize(len);
  return out;
}

}  // namespace

Bytes hmac_sha1(ByteView key, ByteView data) { return hmac(EVP_sha1(), key, data); }

Bytes hmac_sha256(ByteView key, ByteView data) { return hmac(EVP_sha256(), key, data); }

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  return constant_time_equal(ByteView(reinterpret_cast<const std::uint8_t*>(a.data()), a.size()),
                             ByteView(reinterpret_cast<const std::uint8_t*>(b.data()), b.size()));
}

}  // namespace passgate::crypto

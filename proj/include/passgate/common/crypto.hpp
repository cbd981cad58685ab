#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "passgate/common/bytes.hpp"

namespace passgate::crypto {

using Sha256Digest = std::array<std::uint8_t, 32>;

/// CSPRNG output. Throws Error(EntropyError) if the generator fails.
Bytes random_bytes(std::size_t n);

/// Uniform integer in [0, bound) from the CSPRNG (rejection sampling).
std::uint64_t random_below(std::uint64_t bound);

Sha256Digest sha256(ByteView data);
Bytes hmac_sha1(ByteView key, ByteView data);
Bytes hmac_sha256(ByteView key, ByteView data);

/// Comparison whose running time depends only on the lengths.
bool constant_time_equal(ByteView a, ByteView b);
bool constant_time_equal(std::string_view a, std::string_view b);

/// Source of random bytes that can be swapped for a seeded generator in tests.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual Bytes bytes(std::size_t n) = 0;
};

class SystemRandom final : public RandomSource {
 public:
  Bytes bytes(std::size_t n) override { return random_bytes(n); }
};

/// Reproducible byte stream for tests. Not for production keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  Bytes bytes(std::size_t n) override {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(engine_() & 0xff);
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace passgate::crypto

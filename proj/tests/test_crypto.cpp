#include <gtest/gtest.h>

#include <set>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

using namespace passgate;

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(hex_encode(crypto::sha256(to_bytes(""))),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(hex_encode(crypto::sha256(to_bytes("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hmac, Rfc2202AndRfc4231) {
  auto key = to_bytes("Jefe");
  auto msg = to_bytes("what do ya want for nothing?");
  EXPECT_EQ(hex_encode(crypto::hmac_sha1(key, msg)), "effcdf6ae5eb2fa2d27416d5f184df9c259a7c79");
  EXPECT_EQ(hex_encode(crypto::hmac_sha256(key, msg)),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(ConstantTimeEqual, Semantics) {
  EXPECT_TRUE(crypto::constant_time_equal(std::string_view("abc"), std::string_view("abc")));
  EXPECT_FALSE(crypto::constant_time_equal(std::string_view("abc"), std::string_view("abd")));
  EXPECT_FALSE(crypto::constant_time_equal(std::string_view("abc"), std::string_view("abcd")));
  EXPECT_TRUE(crypto::constant_time_equal(std::string_view(""), std::string_view("")));
  EXPECT_TRUE(crypto::constant_time_equal(Bytes{1, 2}, Bytes{1, 2}));
  EXPECT_FALSE(crypto::constant_time_equal(Bytes{1, 2}, Bytes{2, 1}));
}

TEST(RandomBytes, LengthAndVariety) {
  EXPECT_TRUE(crypto::random_bytes(0).empty());
  std::set<Bytes> seen;
  for (int i = 0; i < 100; ++i) seen.insert(crypto::random_bytes(16));
  EXPECT_EQ(seen.size(), 100u);
}

TEST(RandomBelow, StaysInRange) {
  for (std::uint64_t bound : {1ULL, 2ULL, 7ULL, 10ULL, 1000000ULL}) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(crypto::random_below(bound), bound);
  }
  EXPECT_THROW(crypto::random_below(0), Error);
}

TEST(SeededRandom, Reproducible) {
  crypto::SeededRandom a(42), b(42), c(43);
  auto x = a.bytes(32);
  EXPECT_EQ(x, b.bytes(32));
  EXPECT_NE(x, c.bytes(32));
}

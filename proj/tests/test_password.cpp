#include <gtest/gtest.h>

#include <set>

#include "passgate/common/error.hpp"
#include "passgate/password/password.hpp"
#include "support.hpp"

using namespace passgate;
using namespace passgate::password;

namespace {

// Produced by the Python `bcrypt` package (independent implementation).
constexpr const char* kInteropCost4 = "$2b$04$jcFpJCR6B8VVNCp11oERxOq2GblCVUzAxvz9NRHY9b706lapsO8G.";
constexpr const char* kInteropCost10 = "$2b$10$abcdefghijklmnopqrstuuwkMV2PLpzsdDHYrMmwprw/HP4I5uIJa";

constexpr std::string_view kAlphabet =
    "./ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(PasswordHash, VerifiesIndependentVectors) {
  EXPECT_TRUE(verify_password("correct horse!", kInteropCost4));
  EXPECT_FALSE(verify_password("correct horse?", kInteropCost4));
  EXPECT_TRUE(verify_password("Tr0ub4dor&3xyz", kInteropCost10));
  EXPECT_FALSE(verify_password("Tr0ub4dor&3xy", kInteropCost10));
}

TEST(PasswordHash, FormatOfFreshHash) {
  auto h = hash_password("hunter2hunter2", 4);
  EXPECT_EQ(h.encoded().size(), 60u);
  EXPECT_EQ(h.encoded().substr(0, 7), "$2b$04$");
  EXPECT_EQ(h.cost(), 4);
  EXPECT_EQ(PasswordHash::parse(h.encoded()), h);
  EXPECT_EQ(h.setting(), h.encoded().substr(0, 29));
}

TEST(PasswordHash, UniqueSalts) {
  std::set<std::string> seen;
  for (int i = 0; i < 20; ++i) seen.insert(hash_password("same password", 4).encoded());
  EXPECT_EQ(seen.size(), 20u);
}

TEST(PasswordHash, RoundtripProperty) {
  test::Gen gen;
  for (int i = 0; i < 40; ++i) {
    auto pw = gen.printable(gen.range(8, 72));
    auto h = hash_password(pw, 4);
    EXPECT_TRUE(verify_password(pw, h)) << pw;
    auto other = pw;
    other[gen.range(0, other.size() - 1)] ^= 0x01;
    EXPECT_FALSE(verify_password(other, h)) << pw;
  }
}

TEST(PasswordHash, MutationNeverVerifies) {
  const std::string pw = "mutation target";
  auto encoded = hash_password(pw, 4).encoded();
  test::Gen gen;
  for (std::size_t pos = 0; pos < encoded.size(); ++pos) {
    for (int trial = 0; trial < 3; ++trial) {
      auto mutated = encoded;
      char replacement;
      do {
        replacement = pos >= 7 ? kAlphabet[gen.range(0, kAlphabet.size() - 1)]
                               : static_cast<char>(gen.range(0x21, 0x7e));
      } while (replacement == encoded[pos]);
      mutated[pos] = replacement;
      bool verified = false;
      try {
        verified = verify_password(pw, PasswordHash::parse(mutated));
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::FormatError);
      }
      EXPECT_FALSE(verified) << "position " << pos << " -> " << mutated;
    }
  }
}

TEST(PasswordHash, ParseRejects) {
  std::string good = kInteropCost4;
  EXPECT_EQ(error_of([&] { PasswordHash::parse(""); }), Errc::FormatError);
  EXPECT_EQ(error_of([&] { PasswordHash::parse(good.substr(0, 59)); }), Errc::FormatError);
  EXPECT_EQ(error_of([&] { PasswordHash::parse(good + "x"); }), Errc::FormatError);
  for (const char* prefix : {"$2a$", "$2y$", "$2x$", "$1$0", "$5$r"}) {
    auto altered = good;
    altered.replace(0, 4, prefix);
    EXPECT_EQ(error_of([&] { PasswordHash::parse(altered); }), Errc::FormatError) << prefix;
  }
  for (const char* cost : {"03", "17", "31", "99", "a4"}) {
    auto altered = good;
    altered.replace(4, 2, cost);
    EXPECT_EQ(error_of([&] { PasswordHash::parse(altered); }), Errc::FormatError) << cost;
  }
  auto bad_tail = good;
  bad_tail[28] = 'P';  // last salt character carries only two bits
  EXPECT_EQ(error_of([&] { PasswordHash::parse(bad_tail); }), Errc::FormatError);
}

TEST(PasswordPolicy, LengthBounds) {
  EXPECT_EQ(error_of([] { check_policy("short"); }), Errc::PolicyViolation);
  EXPECT_EQ(error_of([] { check_policy("1234567"); }), Errc::PolicyViolation);
  EXPECT_NO_THROW(check_policy("12345678"));
  EXPECT_NO_THROW(check_policy(std::string(72, 'a')));
  EXPECT_EQ(error_of([] { check_policy(std::string(73, 'a')); }), Errc::PolicyViolation);
}

TEST(PasswordHash, CostBounds) {
  EXPECT_EQ(error_of([] { hash_password("long enough", 3); }), Errc::ConfigError);
  EXPECT_EQ(error_of([] { hash_password("long enough", 17); }), Errc::ConfigError);
}

TEST(PasswordHash, OverlongOrNulInputNeverVerifies) {
  auto h = hash_password(std::string(72, 'a'), 4);
  EXPECT_TRUE(verify_password(std::string(72, 'a'), h));
  EXPECT_FALSE(verify_password(std::string(73, 'a'), h));
  auto with_nul = std::string("abcdefgh") + '\0' + "ijk";
  EXPECT_FALSE(verify_password(with_nul, hash_password("abcdefgh", 4)));
}

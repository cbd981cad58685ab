#include <gtest/gtest.h>

#include <array>

#include "passgate/common/error.hpp"
#include "passgate/otp/otp.hpp"
#include "support.hpp"

using namespace passgate;
using namespace passgate::otp;

namespace {

const OtpSecret& rfc_secret() {
  static const OtpSecret s = OtpSecret::from_raw(to_bytes("12345678901234567890"));
  return s;
}

// RFC 4226 Appendix D.
constexpr std::array<const char*, 10> kHotp = {"755224", "287082", "359152", "969429", "338314",
                                               "254676", "287922", "162583", "399871", "520489"};

// RFC 6238 Appendix B, SHA-1 rows.
struct TotpRow {
  std::int64_t time;
  const char* code;
};
constexpr TotpRow kTotp[] = {{59, "94287082"},         {1111111109, "07081804"},
                             {1111111111, "14050471"}, {1234567890, "89005924"},
                             {2000000000, "69279037"}, {20000000000, "65353130"}};

}  // namespace

TEST(Hotp, Rfc4226Vectors) {
  for (std::size_t i = 0; i < kHotp.size(); ++i) EXPECT_EQ(hotp(rfc_secret(), i), kHotp[i]) << i;
}

TEST(Totp, Rfc6238Vectors) {
  for (const auto& row : kTotp) {
    EXPECT_EQ(totp_at(rfc_secret(), row.time, 30, 8), row.code) << row.time;
    // 6 digits are the low-order digits of the same truncated value.
    EXPECT_EQ(totp_at(rfc_secret(), row.time, 30, 6), std::string(row.code).substr(2)) << row.time;
  }
}

TEST(Totp, SecretFromBase32MatchesRaw) {
  auto s = OtpSecret::from_base32("GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ");
  EXPECT_EQ(s, rfc_secret());
  EXPECT_EQ(s.base32(), "GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ");
  EXPECT_THROW(OtpSecret::from_base32("not base32!"), Error);
}

TEST(Totp, TimeStepFloors) {
  EXPECT_EQ(time_step(0), 0);
  EXPECT_EQ(time_step(29), 0);
  EXPECT_EQ(time_step(30), 1);
  EXPECT_EQ(time_step(-1), -1);
  EXPECT_EQ(time_step(-30), -1);
  EXPECT_EQ(time_step(-31), -2);
}

TEST(Totp, DigitsValidated) {
  EXPECT_THROW(hotp(rfc_secret(), 0, 7), Error);
  EXPECT_THROW(totp_at(rfc_secret(), 0, 0), Error);
}

TEST(Totp, WindowAcceptsExactlyNeighbouringSteps) {
  test::Gen gen;
  for (int i = 0; i < 200; ++i) {
    auto secret = OtpSecret::from_raw(gen.bytes(20));
    std::int64_t t = gen.range(1'000'000'000, 3'000'000'000);
    int window = static_cast<int>(gen.range(0, 2));
    int offset = static_cast<int>(gen.range(-4, 4));
    auto code = totp_at(secret, t + offset * 30);
    bool expected = std::abs(offset) <= window;
    auto matched = match_totp_step(secret, code, t, window);
    if (expected) {
      ASSERT_TRUE(matched.has_value());
      EXPECT_EQ(*matched, time_step(t) + offset);
    } else if (matched) {
      // a different step happened to produce the same code: must not be `offset`
      EXPECT_NE(*matched, time_step(t) + offset);
    }
    EXPECT_EQ(verify_totp(secret, code, t, window), matched.has_value());
  }
}

TEST(Totp, RejectsMalformedCodes) {
  auto code = totp_at(rfc_secret(), 59);
  EXPECT_TRUE(verify_totp(rfc_secret(), code, 59));
  EXPECT_FALSE(verify_totp(rfc_secret(), code + "0", 59));
  EXPECT_FALSE(verify_totp(rfc_secret(), code.substr(1), 59));
  EXPECT_FALSE(verify_totp(rfc_secret(), "", 59));
  EXPECT_FALSE(verify_totp(rfc_secret(), "abcdef", 59));
  EXPECT_THROW(verify_totp(rfc_secret(), code, 59, 3), Error);
  EXPECT_THROW(verify_totp(rfc_secret(), code, 59, -1), Error);
}

TEST(Secret, GenerationBounds) {
  EXPECT_EQ(generate_secret().raw().size(), kDefaultSecretBytes);
  EXPECT_EQ(generate_secret(32).raw().size(), 32u);
  EXPECT_THROW(generate_secret(15), Error);
  EXPECT_NE(generate_secret(), generate_secret());
}

TEST(ProvisioningUri, ShapeAndRoundtrip) {
  auto uri = provisioning_uri(rfc_secret(), "alice@example.com", "PassGate");
  EXPECT_EQ(uri,
            "otpauth://totp/PassGate:alice%40example.com?secret=GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ"
            "&issuer=PassGate&digits=6&period=30");
  auto info = parse_provisioning_uri(uri);
  EXPECT_EQ(info.issuer, "PassGate");
  EXPECT_EQ(info.account, "alice@example.com");
  EXPECT_EQ(info.secret, rfc_secret());
  EXPECT_EQ(info.digits, 6);
  EXPECT_EQ(info.period, 30);
}

TEST(ProvisioningUri, RoundtripProperty) {
  test::Gen gen;
  for (int i = 0; i < 100; ++i) {
    auto secret = OtpSecret::from_raw(gen.bytes(gen.range(16, 40)));
    auto account = gen.printable(gen.range(1, 30));
    auto issuer = gen.printable(gen.range(1, 20));
    auto info = parse_provisioning_uri(provisioning_uri(secret, account, issuer));
    EXPECT_EQ(info.secret, secret);
    EXPECT_EQ(info.account, account);
    EXPECT_EQ(info.issuer, issuer);
  }
}

TEST(ProvisioningUri, RejectsMalformed) {
  EXPECT_THROW(parse_provisioning_uri("https://example.com"), Error);
  EXPECT_THROW(parse_provisioning_uri("otpauth://totp/X:y"), Error);
  EXPECT_THROW(parse_provisioning_uri("otpauth://totp/X:y?issuer=X"), Error);
  EXPECT_THROW(provisioning_uri(rfc_secret(), "", "X"), Error);
}

TEST(NumericCode, ShapeAndUniformity) {
  for (int digits : {4, 6, 8}) {
    auto code = generate_numeric_code(digits);
    EXPECT_EQ(code.size(), static_cast<std::size_t>(digits));
    EXPECT_TRUE(std::all_of(code.begin(), code.end(), ::isdigit));
  }
  EXPECT_THROW(generate_numeric_code(3), Error);
  EXPECT_THROW(generate_numeric_code(9), Error);

  std::array<int, 10> counts{};
  constexpr int kCodes = 10000;
  for (int i = 0; i < kCodes; ++i) {
    for (char c : generate_numeric_code(6)) ++counts[c - '0'];
  }
  double expected = kCodes * 6 / 10.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 33.72);  // 9 degrees of freedom, p = 1e-4
}

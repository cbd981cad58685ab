#include <gtest/gtest.h>

#include <set>

#include "passgate/common/error.hpp"
#include "passgate/emulator/cbor_encoder.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "cbor_gen.hpp"
#include "support.hpp"

using namespace passgate;
using passgate::emulator::encode_cbor;
using passgate::webauthn::CborValue;
using passgate::webauthn::decode_cbor;

namespace {

// RFC 8949 Appendix A, restricted to the supported subset.
struct Vector {
  const char* hex;
  CborValue value;
};

CborValue::Map map(std::initializer_list<std::pair<CborValue, CborValue>> entries) {
  CborValue::Map m;
  for (const auto& [k, v] : entries) m.push_back({k, v});
  return m;
}

std::vector<Vector> rfc_vectors() {
  using A = CborValue::Array;
  A one_to_25;
  for (std::uint64_t i = 1; i <= 25; ++i) one_to_25.emplace_back(i);
  return {
      {"00", CborValue(std::uint64_t{0})},
      {"01", CborValue(std::uint64_t{1})},
      {"0a", CborValue(std::uint64_t{10})},
      {"17", CborValue(std::uint64_t{23})},
      {"1818", CborValue(std::uint64_t{24})},
      {"1819", CborValue(std::uint64_t{25})},
      {"1864", CborValue(std::uint64_t{100})},
      {"1903e8", CborValue(std::uint64_t{1000})},
      {"1a000f4240", CborValue(std::uint64_t{1000000})},
      {"1b000000e8d4a51000", CborValue(std::uint64_t{1000000000000})},
      {"1bffffffffffffffff", CborValue(std::uint64_t{18446744073709551615ULL})},
      {"1b0000000100000000", CborValue(std::uint64_t{1} << 32)},
      {"20", CborValue::integer(-1)},
      {"29", CborValue::integer(-10)},
      {"3863", CborValue::integer(-100)},
      {"3903e7", CborValue::integer(-1000)},
      {"26", CborValue::integer(-7)},
      {"3bffffffffffffffff", CborValue(CborValue::Negative{18446744073709551615ULL})},
      {"f4", CborValue(CborValue::Simple::False)},
      {"f5", CborValue(CborValue::Simple::True)},
      {"f6", CborValue(CborValue::Simple::Null)},
      {"40", CborValue(Bytes{})},
      {"4401020304", CborValue(Bytes{1, 2, 3, 4})},
      {"60", CborValue(std::string())},
      {"6161", CborValue("a")},
      {"6449455446", CborValue("IETF")},
      {"62225c", CborValue("\"\\")},
      {"62c3bc", CborValue("\xc3\xbc")},
      {"63e6b0b4", CborValue("\xe6\xb0\xb4")},
      {"64f0908591", CborValue("\xf0\x90\x85\x91")},
      {"80", CborValue(A{})},
      {"83010203", CborValue(A{std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3}})},
      {"8301820203820405",
       CborValue(A{std::uint64_t{1}, A{std::uint64_t{2}, std::uint64_t{3}},
                   A{std::uint64_t{4}, std::uint64_t{5}}})},
      {"98190102030405060708090a0b0c0d0e0f101112131415161718181819", CborValue(one_to_25)},
      {"a0", CborValue(CborValue::Map{})},
      {"a201020304", CborValue(map({{std::uint64_t{1}, std::uint64_t{2}},
                                    {std::uint64_t{3}, std::uint64_t{4}}}))},
      {"a1616101", CborValue(map({{"a", std::uint64_t{1}}}))},
      {"a26161016162820203",
       CborValue(map({{"a", std::uint64_t{1}}, {"b", A{std::uint64_t{2}, std::uint64_t{3}}}}))},
      {"826161a161626163", CborValue(A{"a", map({{"b", "c"}})})},
      {"a56161614161626142616361436164614461656145",
       CborValue(map({{"a", "A"}, {"b", "B"}, {"c", "C"}, {"d", "D"}, {"e", "E"}}))},
  };
}

Errc decode_error(const std::string& hex) {
  try {
    decode_cbor(hex_decode(hex));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << hex;
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Cbor, DecodesRfcVectors) {
  for (const auto& v : rfc_vectors()) {
    EXPECT_EQ(decode_cbor(hex_decode(v.hex)), v.value) << v.hex;
  }
}

TEST(Cbor, EncodesRfcVectorsByteExactly) {
  for (const auto& v : rfc_vectors()) EXPECT_EQ(hex_encode(encode_cbor(v.value)), v.hex);
}

TEST(Cbor, IntegerHelpers) {
  EXPECT_EQ(CborValue::integer(-7).as_int64(), -7);
  EXPECT_EQ(CborValue::integer(5).as_int64(), 5);
  EXPECT_EQ(CborValue(CborValue::Negative{(std::uint64_t{1} << 63) - 1}).as_int64(),
            std::numeric_limits<std::int64_t>::min());
  EXPECT_FALSE(CborValue(CborValue::Negative{std::uint64_t{1} << 63}).as_int64());
  EXPECT_FALSE(CborValue(std::uint64_t{1} << 63).as_int64());
  auto m = decode_cbor(hex_decode("a26161016162820203"));
  ASSERT_NE(m.find("b"), nullptr);
  EXPECT_EQ(m.find("b")->as_array().size(), 2u);
  EXPECT_EQ(m.find("z"), nullptr);
  EXPECT_EQ(m.find(1), nullptr);
}

TEST(Cbor, RejectsIndefiniteLengths) {
  for (const char* hex : {"5f42010243030405ff", "7f657374726561646d696e67ff", "9fff",
                          "9f018202039f0405ffff", "bf61610161629f0203ffff", "ff"}) {
    EXPECT_EQ(decode_error(hex), Errc::IndefiniteLengthUnsupported) << hex;
  }
}

TEST(Cbor, RejectsDuplicateKeys) {
  EXPECT_EQ(decode_error("a2616101616102"), Errc::DuplicateMapKey);
  EXPECT_EQ(decode_error("a201020103"), Errc::DuplicateMapKey);
  EXPECT_EQ(decode_error("a3200120022003"), Errc::DuplicateMapKey);
}

TEST(Cbor, RejectsTruncationOfEveryVector) {
  for (const auto& v : rfc_vectors()) {
    auto bytes = hex_decode(v.hex);
    for (std::size_t len = 0; len < bytes.size(); ++len) {
      Bytes prefix(bytes.begin(), bytes.begin() + len);
      try {
        decode_cbor(prefix);
        ADD_FAILURE() << v.hex << " truncated to " << len << " accepted";
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::Truncated) << v.hex << " @" << len;
      }
    }
  }
}

TEST(Cbor, RejectsOversizedLengths) {
  EXPECT_EQ(decode_error("5bffffffffffffffff"), Errc::Truncated);
  EXPECT_EQ(decode_error("9affffffff"), Errc::Truncated);
  EXPECT_EQ(decode_error("baffffffff00"), Errc::Truncated);
  EXPECT_EQ(decode_error("7a0000000261"), Errc::Truncated);
}

TEST(Cbor, RejectsTrailingBytes) {
  EXPECT_EQ(decode_error("0000"), Errc::TrailingBytes);
  EXPECT_EQ(decode_error("a0ff"), Errc::TrailingBytes);
  std::size_t consumed = 0;
  auto v = webauthn::decode_cbor_prefix(hex_decode("830102030405"), consumed);
  EXPECT_EQ(consumed, 4u);
  EXPECT_EQ(v.as_array().size(), 3u);
}

TEST(Cbor, RejectsUnsupportedTypes) {
  for (const char* hex : {"f90000", "fa47c35000", "fb3ff199999999999a", "c074323031332d30332d32315a",
                          "d82076687474703a2f2f7777772e6578616d706c652e636f6d", "f7", "f0", "f818",
                          "1c", "3d", "5e"}) {
    auto code = decode_error(hex);
    EXPECT_TRUE(code == Errc::UnsupportedCborType || code == Errc::FormatError) << hex;
  }
}

TEST(Cbor, RejectsInvalidUtf8) {
  for (const char* hex : {"61ff", "62c328", "63e28228", "62c0af", "63eda080", "64f4908080"}) {
    EXPECT_EQ(decode_error(hex), Errc::FormatError) << hex;
  }
}

TEST(Cbor, NestingLimit) {
  std::string deep;
  for (std::size_t i = 0; i < webauthn::kMaxCborDepth - 1; ++i) deep += "81";
  EXPECT_NO_THROW(decode_cbor(hex_decode(deep + "00")));
  std::string too_deep;
  for (std::size_t i = 0; i < webauthn::kMaxCborDepth + 1; ++i) too_deep += "81";
  EXPECT_EQ(decode_error(too_deep + "00"), Errc::NestingTooDeep);
}

TEST(Cbor, GeneratedRoundtrip) {
  test::Gen gen;
  for (int i = 0; i < 1000; ++i) {
    auto value = test::random_cbor(gen);
    auto bytes = encode_cbor(value);
    ASSERT_EQ(decode_cbor(bytes), value) << hex_encode(bytes);
    ASSERT_EQ(encode_cbor(decode_cbor(bytes)), bytes);
  }
}

TEST(Cbor, RandomBytesNeverCrash) {
  test::Gen gen;
  int accepted = 0;
  for (int i = 0; i < 5000; ++i) {
    auto bytes = gen.bytes(gen.range(0, 24));
    try {
      auto v = decode_cbor(bytes);
      // anything accepted must re-encode to a decodable value equal to itself
      EXPECT_EQ(decode_cbor(encode_cbor(v)), v);
      ++accepted;
    } catch (const Error&) {
    }
  }
  EXPECT_LT(accepted, 5000);
}

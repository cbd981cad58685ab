#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "passgate/common/bytes.hpp"

namespace passgate::webauthn {

/// Decoded CBOR data item restricted to what WebAuthn payloads use: unsigned
/// and negative integers, byte and text strings, arrays, maps, and the simple
/// values false/true/null (needed only to step over extension outputs).
/// Maps keep their encoded order.
class CborValue {
 public:
  /// The integer -1 - magnitude.
  struct Negative {
    std::uint64_t magnitude = 0;
    friend bool operator==(const Negative&, const Negative&) = default;
  };
  enum class Simple : std::uint8_t { False = 20, True = 21, Null = 22 };
  struct Entry;
  using Array = std::vector<CborValue>;
  using Map = std::vector<Entry>;

  CborValue() : value_(std::uint64_t{0}) {}
  CborValue(std::uint64_t v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  CborValue(Negative v) : value_(v) {}       // NOLINT(google-explicit-constructor)
  CborValue(Bytes v) : value_(std::move(v)) {}        // NOLINT(google-explicit-constructor)
  CborValue(std::string v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  CborValue(const char* v) : value_(std::string(v)) {}  // NOLINT(google-explicit-constructor)
  CborValue(Array v) : value_(std::move(v)) {}        // NOLINT(google-explicit-constructor)
  CborValue(Map v) : value_(std::move(v)) {}          // NOLINT(google-explicit-constructor)
  CborValue(Simple v) : value_(v) {}                  // NOLINT(google-explicit-constructor)

  /// Any signed integer, mapped onto the unsigned/negative major types.
  static CborValue integer(std::int64_t v);

  bool is_unsigned() const { return std::holds_alternative<std::uint64_t>(value_); }
  bool is_negative() const { return std::holds_alternative<Negative>(value_); }
  bool is_integer() const { return is_unsigned() || is_negative(); }
  bool is_bytes() const { return std::holds_alternative<Bytes>(value_); }
  bool is_text() const { return std::holds_alternative<std::string>(value_); }
  bool is_array() const { return std::holds_alternative<Array>(value_); }
  bool is_map() const { return std::holds_alternative<Map>(value_); }
  bool is_simple() const { return std::holds_alternative<Simple>(value_); }

  std::uint64_t as_unsigned() const { return std::get<std::uint64_t>(value_); }
  Negative as_negative() const { return std::get<Negative>(value_); }
  const Bytes& as_bytes() const { return std::get<Bytes>(value_); }
  const std::string& as_text() const { return std::get<std::string>(value_); }
  const Array& as_array() const { return std::get<Array>(value_); }
  const Map& as_map() const { return std::get<Map>(value_); }
  Simple as_simple() const { return std::get<Simple>(value_); }

  /// The value as int64 when it is an integer that fits.
  std::optional<std::int64_t> as_int64() const;

  /// Map lookup; nullptr when this is not a map or the key is absent.
  const CborValue* find(const CborValue& key) const;
  const CborValue* find(std::int64_t key) const { return find(integer(key)); }
  const CborValue* find(std::string_view key) const { return find(CborValue(std::string(key))); }
  const CborValue* find(const char* key) const { return find(std::string_view(key)); }

  using Storage = std::variant<std::uint64_t, Negative, Bytes, std::string, Array, Map, Simple>;
  const Storage& storage() const { return value_; }

  friend bool operator==(const CborValue& a, const CborValue& b);

 private:
  Storage value_;
};

struct CborValue::Entry {
  CborValue key;
  CborValue value;
  friend bool operator==(const Entry&, const Entry&) = default;
};

inline constexpr std::size_t kMaxCborDepth = 16;

/// Decodes exactly one item spanning all of `data`. Errors: Truncated,
/// IndefiniteLengthUnsupported, DuplicateMapKey, TrailingBytes,
/// UnsupportedCborType (tags, floats, reserved encodings), NestingTooDeep,
/// FormatError (invalid UTF-8 in a text string).
CborValue decode_cbor(ByteView data);

/// Decodes the first item and reports how many bytes it used.
CborValue decode_cbor_prefix(ByteView data, std::size_t& consumed);

}  // namespace passgate::webauthn

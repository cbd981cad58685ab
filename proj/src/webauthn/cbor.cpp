#include "passgate/webauthn/cbor.hpp"

#include "passgate/common/error.hpp"

namespace passgate::webauthn {

CborValue CborValue::integer(std::int64_t v) {
  if (v >= 0) return CborValue(static_cast<std::uint64_t>(v));
  return CborValue(Negative{static_cast<std::uint64_t>(-(v + 1))});
}

std::optional<std::int64_t> CborValue::as_int64() const {
  if (is_unsigned()) {
    auto u = as_unsigned();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return static_cast<std::int64_t>(u);
  }
  if (is_negative()) {
    auto m = as_negative().magnitude;
    if (m > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return -static_cast<std::int64_t>(m) - 1;
  }
  return std::nullopt;
}

const CborValue* CborValue::find(const CborValue& key) const {
  if (!is_map()) return nullptr;
  for (const auto& entry : as_map()) {
    if (entry.key == key) return &entry.value;
  }
  return nullptr;
}

bool operator==(const CborValue& a, const CborValue& b) { return a.value_ == b.value_; }

namespace {

enum MajorType : std::uint8_t {
  kUnsigned = 0,
  kNegative = 1,
  kByteString = 2,
  kTextString = 3,
  kArray = 4,
  kMap = 5,
  kTag = 6,
  kSimpleOrFloat = 7,
};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    static constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

class Decoder {
 public:
  explicit Decoder(ByteView data) : data_(data) {}

  CborValue item(std::size_t depth) {
    if (depth > kMaxCborDepth) throw Error(Errc::NestingTooDeep, "CBOR nesting too deep");
    const std::uint8_t initial = byte();
    const auto major = static_cast<MajorType>(initial >> 5);
    const std::uint8_t info = initial & 0x1f;

    if (major == kTag) throw Error(Errc::UnsupportedCborType, "CBOR tags are not supported");
    if (major == kSimpleOrFloat) return simple(info);
    if (info == 31) {
      if (major == kByteString || major == kTextString || major == kArray || major == kMap) {
        throw Error(Errc::IndefiniteLengthUnsupported, "indefinite-length CBOR item");
      }
      throw Error(Errc::UnsupportedCborType, "invalid additional information 31");
    }
    const std::uint64_t arg = argument(info);

    switch (major) {
      case kUnsigned: return CborValue(arg);
      case kNegative: return CborValue(CborValue::Negative{arg});
      case kByteString: {
        auto raw = take(arg);
        return CborValue(Bytes(raw.begin(), raw.end()));
      }
      case kTextString: {
        auto raw = take(arg);
        std::string text(raw.begin(), raw.end());
        if (!valid_utf8(text)) throw Error(Errc::FormatError, "CBOR text string is not UTF-8");
        return CborValue(std::move(text));
      }
      case kArray: {
        require_items(arg, 1);
        CborValue::Array items;
        items.reserve(static_cast<std::size_t>(arg));
        for (std::uint64_t i = 0; i < arg; ++i) items.push_back(item(depth + 1));
        return CborValue(std::move(items));
      }
      case kMap: {
        require_items(arg, 2);
        CborValue::Map entries;
        entries.reserve(static_cast<std::size_t>(arg));
        for (std::uint64_t i = 0; i < arg; ++i) {
          auto key = item(depth + 1);
          for (const auto& existing : entries) {
            if (existing.key == key) throw Error(Errc::DuplicateMapKey, "duplicate CBOR map key");
          }
          auto value = item(depth + 1);
          entries.push_back({std::move(key), std::move(value)});
        }
        return CborValue(std::move(entries));
      }
      default: break;
    }
    throw Error(Errc::UnsupportedCborType, "unsupported CBOR major type");
  }

  std::size_t position() const { return pos_; }

 private:
  std::uint8_t byte() {
    if (pos_ >= data_.size()) throw Error(Errc::Truncated, "CBOR input truncated");
    return data_[pos_++];
  }

  ByteView take(std::uint64_t n) {
    if (n > data_.size() - pos_) throw Error(Errc::Truncated, "CBOR string runs past end of input");
    auto out = data_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }

  // Every element needs at least one byte, so a count that cannot fit in the
  // remaining input is truncated; checking first bounds the reserve() above.
  void require_items(std::uint64_t count, std::uint64_t bytes_per_item) {
    const auto remaining = data_.size() - pos_;
    if (count > remaining / bytes_per_item) throw Error(Errc::Truncated, "CBOR container truncated");
  }

  std::uint64_t argument(std::uint8_t info) {
    if (info < 24) return info;
    int width;
    switch (info) {
      case 24: width = 1; break;
      case 25: width = 2; break;
      case 26: width = 4; break;
      case 27: width = 8; break;
      default: throw Error(Errc::UnsupportedCborType, "reserved CBOR additional information");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | byte();
    return v;
  }

  CborValue simple(std::uint8_t info) {
    switch (info) {
      case 20: return CborValue(CborValue::Simple::False);
      case 21: return CborValue(CborValue::Simple::True);
      case 22: return CborValue(CborValue::Simple::Null);
      case 31: throw Error(Errc::IndefiniteLengthUnsupported, "unexpected CBOR break");
      default: throw Error(Errc::UnsupportedCborType, "CBOR floats and simple values are not supported");
    }
  }

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace

CborValue decode_cbor_prefix(ByteView data, std::size_t& consumed) {
  Decoder decoder(data);
  auto value = decoder.item(0);
  consumed = decoder.position();
  return value;
}

CborValue decode_cbor(ByteView data) {
  std::size_t consumed = 0;
  auto value = decode_cbor_prefix(data, consumed);
  if (consumed != data.size()) throw Error(Errc::TrailingBytes, "trailing bytes after CBOR item");
  return value;
}

}  // namespace passgate::webauthn

#pragma once

#include <set>

#include "passgate/emulator/cbor_encoder.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "support.hpp"

namespace passgate::test {

using webauthn::CborValue;

inline std::string random_utf8(Gen& gen, std::size_t max_chars) {
  std::string out;
  auto n = gen.range(0, max_chars);
  for (std::int64_t i = 0; i < n; ++i) {
    std::uint32_t cp;
    switch (gen.range(0, 3)) {
      case 0: cp = static_cast<std::uint32_t>(gen.range(0x20, 0x7e)); break;
      case 1: cp = static_cast<std::uint32_t>(gen.range(0x80, 0x7ff)); break;
      case 2:
        do cp = static_cast<std::uint32_t>(gen.range(0x800, 0xffff));
        while (cp >= 0xd800 && cp <= 0xdfff);
        break;
      default: cp = static_cast<std::uint32_t>(gen.range(0x10000, 0x10ffff)); break;
    }
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xf0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }
  return out;
}

inline std::uint64_t random_magnitude(Gen& gen) {
  switch (gen.range(0, 4)) {
    case 0: return static_cast<std::uint64_t>(gen.range(0, 23));
    case 1: return static_cast<std::uint64_t>(gen.range(24, 0xff));
    case 2: return static_cast<std::uint64_t>(gen.range(0x100, 0xffff));
    case 3: return static_cast<std::uint64_t>(gen.range(0x10000, 0xffffffff));
    default: return gen.u64();
  }
}

inline CborValue random_cbor(Gen& gen, int depth = 0) {
  int kinds = depth >= 4 ? 5 : 7;
  switch (gen.range(0, kinds - 1)) {
    case 0: return CborValue(random_magnitude(gen));
    case 1: return CborValue(CborValue::Negative{random_magnitude(gen)});
    case 2: return CborValue(gen.bytes(gen.range(0, 40)));
    case 3: return CborValue(random_utf8(gen, 12));
    case 4: {
      static constexpr CborValue::Simple kSimple[] = {CborValue::Simple::False,
                                                      CborValue::Simple::True,
                                                      CborValue::Simple::Null};
      return CborValue(kSimple[gen.range(0, 2)]);
    }
    case 5: {
      CborValue::Array a;
      auto n = gen.range(0, 6);
      for (std::int64_t i = 0; i < n; ++i) a.push_back(random_cbor(gen, depth + 1));
      return CborValue(std::move(a));
    }
    default: {
      CborValue::Map m;
      std::set<Bytes> keys;
      auto n = gen.range(0, 6);
      for (std::int64_t i = 0; i < n; ++i) {
        CborValue key = gen.coin() ? CborValue::integer(gen.range(-50, 50))
                                   : CborValue(random_utf8(gen, 6));
        if (!keys.insert(emulator::encode_cbor(key)).second) continue;
        m.push_back({key, random_cbor(gen, depth + 1)});
      }
      return CborValue(std::move(m));
    }
  }
}

}  // namespace passgate::test

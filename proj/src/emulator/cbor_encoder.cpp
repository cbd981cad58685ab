#include "passgate/emulator/cbor_encoder.hpp"

namespace passgate::emulator {
namespace {

using webauthn::CborValue;

void head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
  const auto m = static_cast<std::uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(static_cast<std::uint8_t>(m | arg));
    return;
  }
  int width;
  if (arg <= 0xff) {
    out.push_back(m | 24);
    width = 1;
  } else if (arg <= 0xffff) {
    out.push_back(m | 25);
    width = 2;
  } else if (arg <= 0xffffffffULL) {
    out.push_back(m | 26);
    width = 4;
  } else {
    out.push_back(m | 27);
    width = 8;
  }
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(arg >> (8 * i)));
}

void encode_into(Bytes& out, const CborValue& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::uint64_t>) {
          head(out, 0, x);
        } else if constexpr (std::is_same_v<T, CborValue::Negative>) {
          head(out, 1, x.magnitude);
        } else if constexpr (std::is_same_v<T, Bytes>) {
          head(out, 2, x.size());
          out.insert(out.end(), x.begin(), x.end());
        } else if constexpr (std::is_same_v<T, std::string>) {
          head(out, 3, x.size());
          out.insert(out.end(), x.begin(), x.end());
        } else if constexpr (std::is_same_v<T, CborValue::Array>) {
          head(out, 4, x.size());
          for (const auto& item : x) encode_into(out, item);
        } else if constexpr (std::is_same_v<T, CborValue::Map>) {
          head(out, 5, x.size());
          for (const auto& entry : x) {
            encode_into(out, entry.key);
            encode_into(out, entry.value);
          }
        } else if constexpr (std::is_same_v<T, CborValue::Simple>) {
          out.push_back(static_cast<std::uint8_t>(0xe0 | static_cast<std::uint8_t>(x)));
        }
      },
      v.storage());
}

}  // namespace

Bytes encode_cbor(const CborValue& value) {
  Bytes out;
  encode_into(out, value);
  return out;
}

}  // namespace passgate::emulator

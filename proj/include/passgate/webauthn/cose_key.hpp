#pragma once

#include <array>
#include <cstdint>

namespace passgate::webauthn {

// COSE identifiers (RFC 9053 / IANA COSE registry).
inline constexpr std::int64_t kCoseKeyTypeEc2 = 2;
inline constexpr std::int64_t kCoseAlgEs256 = -7;
inline constexpr std::int64_t kCoseCurveP256 = 1;

/// EC2 / ES256 / P-256 public key as carried in a COSE_Key map.
struct CosePublicKey {
  std::int64_t key_type = kCoseKeyTypeEc2;
  std::int64_t algorithm = kCoseAlgEs256;
  std::int64_t curve = kCoseCurveP256;
  std::array<std::uint8_t, 32> x{};
  std::array<std::uint8_t, 32> y{};

  friend bool operator==(const CosePublicKey&, const CosePublicKey&) = default;
};

}  // namespace passgate::webauthn

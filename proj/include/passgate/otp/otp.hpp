#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "passgate/common/bytes.hpp"

namespace passgate::otp {

/// Shared TOTP/HOTP secret. The base32 form is what authenticator apps scan.
class OtpSecret {
 public:
  static OtpSecret from_raw(Bytes raw);
  /// Throws Error(FormatError) on characters outside the base32 alphabet.
  static OtpSecret from_base32(std::string_view text);

  const Bytes& raw() const { return raw_; }
  const std::string& base32() const { return base32_; }

  friend bool operator==(const OtpSecret&, const OtpSecret&) = default;

 private:
  explicit OtpSecret(Bytes raw);

  Bytes raw_;
  std::string base32_;
};

inline constexpr std::size_t kDefaultSecretBytes = 20;
inline constexpr int kDefaultStep = 30;
inline constexpr int kDefaultDigits = 6;
inline constexpr int kDefaultWindow = 1;

/// Fresh secret from the CSPRNG. num_bytes below 16 is rejected (InvalidArgument).
OtpSecret generate_secret(std::size_t num_bytes = kDefaultSecretBytes);

/// RFC 4226 HOTP with HMAC-SHA1. digits must be 6 or 8.
std::string hotp(const OtpSecret& secret, std::uint64_t counter, int digits = kDefaultDigits);

/// RFC 6238 TOTP: hotp(secret, floor(unix_time / step)).
std::string totp_at(const OtpSecret& secret, std::int64_t unix_time, int step = kDefaultStep,
                    int digits = kDefaultDigits);

/// Time step index for a unix time, floored (negative times map below zero).
std::int64_t time_step(std::int64_t unix_time, int step = kDefaultStep);

/// Accepts `code` if it matches any step in [T - window, T + window], T the step
/// containing unix_time. window must be in [0, 2]. Every candidate is compared,
/// each in constant time, so timing does not reveal which step matched.
bool verify_totp(const OtpSecret& secret, std::string_view code, std::int64_t unix_time,
                 int window = kDefaultWindow, int step = kDefaultStep, int digits = kDefaultDigits);

/// Like verify_totp but reports the matched step, for callers that keep a
/// used-step replay guard.
std::optional<std::int64_t> match_totp_step(const OtpSecret& secret, std::string_view code,
                                            std::int64_t unix_time, int window = kDefaultWindow,
                                            int step = kDefaultStep, int digits = kDefaultDigits);

/// otpauth://totp/{issuer}:{account}?secret=...&issuer=...&digits=6&period=30
std::string provisioning_uri(const OtpSecret& secret, std::string_view account,
                             std::string_view issuer);

struct ProvisioningInfo {
  std::string issuer;
  std::string account;
  OtpSecret secret;
  int digits = kDefaultDigits;
  int period = kDefaultStep;
};

/// Inverse of provisioning_uri. Throws Error(FormatError).
ProvisioningInfo parse_provisioning_uri(std::string_view uri);

/// Uniformly random decimal code, leading zeros kept. digits in [4, 8].
std::string generate_numeric_code(int digits = kDefaultDigits);

}  // namespace passgate::otp

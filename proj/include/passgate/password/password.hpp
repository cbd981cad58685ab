#pragma once

#include <string>
#include <string_view>

namespace passgate::password {

inline constexpr int kDefaultCost = 10;
inline constexpr int kMinCost = 4;
inline constexpr int kMaxCost = 16;
inline constexpr std::size_t kMinLength = 8;
inline constexpr std::size_t kMaxLength = 72;

/// A bcrypt hash in modular-crypt form: `$2b$<cost>$<22 salt chars><31 digest chars>`.
/// Self-describing, so verification needs nothing but the string itself.
class PasswordHash {
 public:
  /// Throws Error(FormatError) unless `encoded` is a well-formed `$2b$` hash
  /// with a cost in [4, 16]; larger costs are refused so a stored hash cannot
  /// stall verification.
  /// The legacy `$2a$`/`$2y$` prefixes compute the same digest as `$2b$` for
  /// inputs under 72 bytes, so accepting them would let an altered prefix verify.
  static PasswordHash parse(std::string_view encoded);

  const std::string& encoded() const { return encoded_; }
  int cost() const { return cost_; }
  /// The `$2b$10$<salt>` prefix.
  std::string setting() const { return encoded_.substr(0, 29); }

  friend bool operator==(const PasswordHash&, const PasswordHash&) = default;

 private:
  PasswordHash(std::string encoded, int cost) : encoded_(std::move(encoded)), cost_(cost) {}

  std::string encoded_;
  int cost_ = 0;
};

/// Throws Error(PolicyViolation) when the length falls outside [8, 72] bytes.
void check_policy(std::string_view plain);

/// Hashes with a fresh 16-byte random salt. Inputs over 72 bytes are rejected
/// rather than truncated.
PasswordHash hash_password(std::string_view plain, int cost = kDefaultCost);

/// Re-hashes `plain` with the stored salt and cost and compares in constant time.
bool verify_password(std::string_view plain, const PasswordHash& stored);
bool verify_password(std::string_view plain, std::string_view stored_encoded);

}  // namespace passgate::password

#include "passgate/otp/otp.hpp"

#include <array>
#include <charconv>
#include <optional>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

namespace passgate::otp {
namespace {

constexpr std::array<std::uint32_t, 9> kPow10 = {1,      10,      100,      1000,     10000,
                                                 100000, 1000000, 10000000, 100000000};

std::string zero_pad(std::uint64_t value, int digits) {
  std::string s = std::to_string(value);
  if (s.size() < static_cast<std::size_t>(digits)) s.insert(0, digits - s.size(), '0');
  return s;
}

bool is_unreserved(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '-' || c == '.' || c == '_' || c == '~';
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    if (is_unreserved(c)) {
      out.push_back(c);
    } else {
      auto u = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xf]);
    }
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) throw Error(Errc::FormatError, "truncated percent escape");
      auto hex = hex_decode(s.substr(i + 1, 2));
      out.push_back(static_cast<char>(hex[0]));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::FormatError, "bad integer in otpauth uri");
  }
  return v;
}

}  // namespace

OtpSecret::OtpSecret(Bytes raw) : raw_(std::move(raw)), base32_(base32_encode(raw_)) {}

OtpSecret OtpSecret::from_raw(Bytes raw) {
  if (raw.empty()) throw Error(Errc::InvalidArgument, "empty OTP secret");
  return OtpSecret(std::move(raw));
}

OtpSecret OtpSecret::from_base32(std::string_view text) {
  return from_raw(base32_decode(text));
}

OtpSecret generate_secret(std::size_t num_bytes) {
  if (num_bytes < 16) throw Error(Errc::InvalidArgument, "OTP secret must be at least 16 bytes");
  return OtpSecret::from_raw(crypto::random_bytes(num_bytes));
}

std::string hotp(const OtpSecret& secret, std::uint64_t counter, int digits) {
  if (digits != 6 && digits != 8) throw Error(Errc::InvalidArgument, "digits must be 6 or 8");
  std::array<std::uint8_t, 8> msg{};
  for (int i = 7; i >= 0; --i) {
    msg[i] = static_cast<std::uint8_t>(counter & 0xff);
    counter >>= 8;
  }
  auto mac = crypto::hmac_sha1(secret.raw(), msg);
  const std::size_t offset = mac[19] & 0x0f;
  const std::uint32_t bin = (static_cast<std::uint32_t>(mac[offset] & 0x7f) << 24) |
                            (static_cast<std::uint32_t>(mac[offset + 1]) << 16) |
                            (static_cast<std::uint32_t>(mac[offset + 2]) << 8) |
                            static_cast<std::uint32_t>(mac[offset + 3]);
  return zero_pad(bin % kPow10[digits], digits);
}

std::int64_t time_step(std::int64_t unix_time, int step) {
  if (step <= 0) throw Error(Errc::InvalidArgument, "step must be positive");
  auto q = unix_time / step;
  if (unix_time % step != 0 && unix_time < 0) --q;
  return q;
}

std::string totp_at(const OtpSecret& secret, std::int64_t unix_time, int step, int digits) {
  return hotp(secret, static_cast<std::uint64_t>(time_step(unix_time, step)), digits);
}

std::optional<std::int64_t> match_totp_step(const OtpSecret& secret, std::string_view code,
                                            std::int64_t unix_time, int window, int step,
                                            int digits) {
  if (window < 0 || window > 2) throw Error(Errc::InvalidArgument, "window must be in [0, 2]");
  const auto current = time_step(unix_time, step);
  std::optional<std::int64_t> matched;
  for (std::int64_t s = current - window; s <= current + window; ++s) {
    if (s < 0) continue;
    auto candidate = hotp(secret, static_cast<std::uint64_t>(s), digits);
    if (crypto::constant_time_equal(std::string_view(candidate), code) && !matched) matched = s;
  }
  return matched;
}

bool verify_totp(const OtpSecret& secret, std::string_view code, std::int64_t unix_time,
                 int window, int step, int digits) {
  return match_totp_step(secret, code, unix_time, window, step, digits).has_value();
}

std::string provisioning_uri(const OtpSecret& secret, std::string_view account,
                             std::string_view issuer) {
  if (account.empty() || issuer.empty()) {
    throw Error(Errc::InvalidArgument, "account and issuer must be nonempty");
  }
  const auto enc_issuer = percent_encode(issuer);
  return "otpauth://totp/" + enc_issuer + ":" + percent_encode(account) +
         "?secret=" + secret.base32() + "&issuer=" + enc_issuer + "&digits=" +
         std::to_string(kDefaultDigits) + "&period=" + std::to_string(kDefaultStep);
}

ProvisioningInfo parse_provisioning_uri(std::string_view uri) {
  constexpr std::string_view kPrefix = "otpauth://totp/";
  if (uri.substr(0, kPrefix.size()) != kPrefix) throw Error(Errc::FormatError, "not an otpauth uri");
  uri.remove_prefix(kPrefix.size());
  auto qpos = uri.find('?');
  if (qpos == std::string_view::npos) throw Error(Errc::FormatError, "otpauth uri has no query");
  auto label = uri.substr(0, qpos);
  auto query = uri.substr(qpos + 1);

  std::optional<OtpSecret> secret;
  ProvisioningInfo info{.issuer = {}, .account = {}, .secret = OtpSecret::from_raw(Bytes{0})};
  // Split before decoding: an escaped colon belongs to the issuer or account.
  std::size_t colon = label.find(':');
  std::size_t sep_len = 1;
  if (colon == std::string_view::npos) {
    for (std::size_t i = 0; i + 3 <= label.size(); ++i) {
      if (label[i] == '%' && label[i + 1] == '3' && (label[i + 2] == 'A' || label[i + 2] == 'a')) {
        colon = i;
        sep_len = 3;
        break;
      }
    }
  }
  if (colon == std::string_view::npos) {
    info.account = percent_decode(label);
  } else {
    info.issuer = percent_decode(label.substr(0, colon));
    info.account = percent_decode(label.substr(colon + sep_len));
  }
  while (!query.empty()) {
    auto amp = query.find('&');
    auto pair = query.substr(0, amp);
    query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) continue;
    auto key = pair.substr(0, eq);
    auto value = percent_decode(pair.substr(eq + 1));
    if (key == "secret") secret = OtpSecret::from_base32(value);
    else if (key == "issuer") info.issuer = value;
    else if (key == "digits") info.digits = parse_int(value);
    else if (key == "period") info.period = parse_int(value);
  }
  if (!secret) throw Error(Errc::FormatError, "otpauth uri has no secret");
  info.secret = *secret;
  return info;
}

std::string generate_numeric_code(int digits) {
  if (digits < 4 || digits > 8) throw Error(Errc::InvalidArgument, "digits must be in [4, 8]");
  return zero_pad(crypto::random_below(kPow10[digits]), digits);
}

}  // namespace passgate::otp

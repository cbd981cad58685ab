#include "passgate/flows/oauth.hpp"

#include <cctype>

#include "passgate/common/bytes.hpp"
#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"
#include "passgate/storage/records.hpp"

namespace passgate::flows {

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

MockOAuthProvider::MockOAuthProvider(std::shared_ptr<const Clock> clock,
                                     std::string authorize_endpoint, std::string redirect_uri,
                                     Duration code_ttl)
    : clock_(std::move(clock)),
      authorize_endpoint_(std::move(authorize_endpoint)),
      redirect_uri_(std::move(redirect_uri)),
      code_ttl_(code_ttl) {}

std::string MockOAuthProvider::authorize_url(std::string_view state) const {
  return authorize_endpoint_ + "?response_type=code&client_id=passgate-mock&scope=openid%20email" +
         "&redirect_uri=" + url_encode(redirect_uri_) + "&state=" + url_encode(state);
}

std::string MockOAuthProvider::subject_for(std::string_view email) {
  auto digest = crypto::sha256(to_bytes(storage::normalize_email(email)));
  return "mock-" + hex_encode(ByteView(digest).first(8));
}

std::string MockOAuthProvider::authorize(std::string_view email) {
  if (!storage::is_well_formed_email(email)) {
    throw Error(Errc::InvalidArgument, "login_hint must be an email address");
  }
  auto normalized = storage::normalize_email(email);
  auto code = base64url_encode(crypto::random_bytes(24));
  std::lock_guard lock(mutex_);
  auto now = clock_->now();
  std::erase_if(grants_, [&](const auto& kv) { return kv.second.expires_at <= now; });
  grants_.insert_or_assign(code, Grant{{subject_for(normalized), normalized}, now + code_ttl_});
  return code;
}

OAuthIdentity MockOAuthProvider::exchange_code(std::string_view code) {
  std::lock_guard lock(mutex_);
  auto it = grants_.find(code);
  if (it == grants_.end()) {
    throw Error(Errc::CodeExchangeFailed, "authorization code is invalid or already used");
  }
  Grant grant = std::move(it->second);
  grants_.erase(it);
  if (clock_->now() >= grant.expires_at) {
    throw Error(Errc::CodeExchangeFailed, "authorization code has expired");
  }
  return grant.identity;
}

}  // namespace passgate::flows

#include "passgate/storage/records.hpp"

#include <algorithm>
#include <cctype>

#include "passgate/common/crypto.hpp"

namespace passgate::storage {

std::string_view to_string(CeremonyPurpose p) {
  return p == CeremonyPurpose::Registration ? "registration" : "authentication";
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Pending: return "pending";
    case SessionStatus::Completed: return "completed";
    case SessionStatus::Expired: return "expired";
  }
  return "expired";
}

bool is_well_formed_email(std::string_view email) {
  if (email.empty() || email.size() > 254) return false;
  auto at = email.find('@');
  if (at == 0 || at == std::string_view::npos || email.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  auto domain = email.substr(at + 1);
  auto dot = domain.find('.');
  if (dot == 0 || dot == std::string_view::npos || domain.back() == '.') return false;
  return std::none_of(email.begin(), email.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isspace(u) || std::iscntrl(u);
  });
}

std::string normalize_email(std::string_view email) {
  std::string out(email);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string new_opaque_id() { return base64url_encode(crypto::random_bytes(16)); }

}  // namespace passgate::storage

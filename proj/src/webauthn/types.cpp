#include "passgate/webauthn/types.hpp"

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

namespace passgate::webauthn {
namespace {

using nlohmann::json;

json descriptor_list(const std::vector<Bytes>& ids) {
  json out = json::array();
  for (const auto& id : ids) out.push_back({{"type", "public-key"}, {"id", base64url_encode(id)}});
  return out;
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(Errc::MalformedResponse, what);
}

const json& member(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) malformed(std::string("missing field ") + name);
  return j.at(name);
}

std::string text(const json& j, const char* name) {
  const auto& v = member(j, name);
  if (!v.is_string()) malformed(std::string("field ") + name + " must be a string");
  return v.get<std::string>();
}

Bytes binary(const json& j, const char* name) {
  try {
    return base64url_decode(text(j, name));
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedResponse) throw;
    malformed(std::string("field ") + name + " is not base64url");
  }
}

std::vector<Bytes> descriptor_ids(const json& j, const char* name) {
  std::vector<Bytes> out;
  if (!j.contains(name)) return out;
  const auto& list = j.at(name);
  if (!list.is_array()) malformed(std::string(name) + " must be an array");
  for (const auto& d : list) out.push_back(binary(d, "id"));
  return out;
}

}  // namespace

Challenge generate_challenge() { return Challenge{crypto::random_bytes(kChallengeBytes)}; }

std::string_view to_string(UserVerification uv) {
  switch (uv) {
    case UserVerification::Required: return "required";
    case UserVerification::Preferred: return "preferred";
    case UserVerification::Discouraged: return "discouraged";
  }
  return "preferred";
}

UserVerification user_verification_from(std::string_view s) {
  if (s == "required") return UserVerification::Required;
  if (s == "preferred") return UserVerification::Preferred;
  if (s == "discouraged") return UserVerification::Discouraged;
  malformed("unknown userVerification value");
}

json to_json(const RegistrationOptions& o) {
  json params = json::array();
  for (auto alg : o.pub_key_cred_params) params.push_back({{"type", "public-key"}, {"alg", alg}});
  return {
      {"challenge", base64url_encode(o.challenge.bytes)},
      {"rp", {{"id", o.rp.id}, {"name", o.rp.name}}},
      {"user",
       {{"id", base64url_encode(o.user.id)},
        {"name", o.user.name},
        {"displayName", o.user.display_name}}},
      {"pubKeyCredParams", params},
      {"timeout", o.timeout_ms},
      {"excludeCredentials", descriptor_list(o.exclude_credentials)},
      {"authenticatorSelection",
       {{"residentKey", "preferred"},
        {"requireResidentKey", false},
        {"userVerification", to_string(o.user_verification)}}},
      {"attestation", o.attestation},
  };
}

json to_json(const AuthenticationOptions& o) {
  return {
      {"challenge", base64url_encode(o.challenge.bytes)},
      {"rpId", o.rp_id},
      {"allowCredentials", descriptor_list(o.allow_credentials)},
      {"timeout", o.timeout_ms},
      {"userVerification", to_string(o.user_verification)},
  };
}

json to_json(const RegistrationResponse& r) {
  const auto id = base64url_encode(r.raw_id);
  return {
      {"id", id},
      {"rawId", id},
      {"type", "public-key"},
      {"response",
       {{"clientDataJSON", base64url_encode(r.client_data_json)},
        {"attestationObject", base64url_encode(r.attestation_object)},
        {"transports", json::array({"internal"})}}},
      {"clientExtensionResults", json::object()},
      {"authenticatorAttachment", "platform"},
  };
}

json to_json(const AuthenticationResponse& r) {
  const auto id = base64url_encode(r.raw_id);
  json response = {{"clientDataJSON", base64url_encode(r.client_data_json)},
                   {"authenticatorData", base64url_encode(r.authenticator_data)},
                   {"signature", base64url_encode(r.signature)}};
  if (r.user_handle) response["userHandle"] = base64url_encode(*r.user_handle);
  return {
      {"id", id},
      {"rawId", id},
      {"type", "public-key"},
      {"response", response},
      {"clientExtensionResults", json::object()},
      {"authenticatorAttachment", "platform"},
  };
}

RegistrationOptions registration_options_from_json(const json& j) {
  RegistrationOptions o;
  o.challenge.bytes = binary(j, "challenge");
  const auto& rp = member(j, "rp");
  o.rp.id = text(rp, "id");
  o.rp.name = text(rp, "name");
  const auto& user = member(j, "user");
  o.user.id = binary(user, "id");
  o.user.name = text(user, "name");
  o.user.display_name = text(user, "displayName");
  o.pub_key_cred_params.clear();
  for (const auto& p : member(j, "pubKeyCredParams")) {
    const auto& alg = member(p, "alg");
    if (!alg.is_number_integer()) malformed("pubKeyCredParams.alg must be an integer");
    o.pub_key_cred_params.push_back(alg.get<std::int64_t>());
  }
  if (j.contains("timeout") && j["timeout"].is_number_unsigned()) o.timeout_ms = j["timeout"];
  o.exclude_credentials = descriptor_ids(j, "excludeCredentials");
  if (j.contains("authenticatorSelection") && j["authenticatorSelection"].contains("userVerification")) {
    o.user_verification = user_verification_from(text(j["authenticatorSelection"], "userVerification"));
  }
  if (j.contains("attestation")) o.attestation = text(j, "attestation");
  return o;
}

AuthenticationOptions authentication_options_from_json(const json& j) {
  AuthenticationOptions o;
  o.challenge.bytes = binary(j, "challenge");
  o.rp_id = text(j, "rpId");
  o.allow_credentials = descriptor_ids(j, "allowCredentials");
  if (j.contains("timeout") && j["timeout"].is_number_unsigned()) o.timeout_ms = j["timeout"];
  if (j.contains("userVerification")) o.user_verification = user_verification_from(text(j, "userVerification"));
  return o;
}

RegistrationResponse registration_response_from_json(const json& j) {
  RegistrationResponse r;
  r.raw_id = binary(j, "rawId");
  if (j.contains("id") && binary(j, "id") != r.raw_id) malformed("id and rawId differ");
  if (j.contains("type") && text(j, "type") != "public-key") malformed("type must be public-key");
  const auto& response = member(j, "response");
  r.client_data_json = binary(response, "clientDataJSON");
  r.attestation_object = binary(response, "attestationObject");
  return r;
}

AuthenticationResponse authentication_response_from_json(const json& j) {
  AuthenticationResponse r;
  r.raw_id = binary(j, "rawId");
  if (j.contains("id") && binary(j, "id") != r.raw_id) malformed("id and rawId differ");
  if (j.contains("type") && text(j, "type") != "public-key") malformed("type must be public-key");
  const auto& response = member(j, "response");
  r.client_data_json = binary(response, "clientDataJSON");
  r.authenticator_data = binary(response, "authenticatorData");
  r.signature = binary(response, "signature");
  if (response.contains("userHandle") && !response["userHandle"].is_null()) {
    r.user_handle = binary(response, "userHandle");
  }
  return r;
}

std::string origin_host(std::string_view origin) {
  auto scheme_end = origin.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return {};
  auto rest = origin.substr(scheme_end + 3);
  auto end = rest.find_first_of(":/?#");
  auto host = rest.substr(0, end);
  if (host.empty() || host.find('@') != std::string_view::npos) return {};
  return std::string(host);
}

bool rp_id_matches_origin(std::string_view rp_id, std::string_view origin) {
  if (rp_id.empty() || rp_id.front() == '.' || rp_id.back() == '.') return false;
  auto host = origin_host(origin);
  if (host.empty()) return false;
  if (host == rp_id) return true;
  return host.size() > rp_id.size() && host.ends_with(rp_id) &&
         host[host.size() - rp_id.size() - 1] == '.';
}

}  // namespace passgate::webauthn

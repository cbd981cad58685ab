#include "passgate/webauthn/client_data.hpp"

#include <json.hpp>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"

namespace passgate::webauthn {

ClientData parse_client_data(ByteView json_bytes, std::string_view expected_type,
                             ByteView expected_challenge, std::string_view expected_origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_bytes.begin(), json_bytes.end());
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::MalformedJson, "client data is not valid JSON");
  }
  auto field = [&](const char* name) -> std::string {
    if (!doc.is_object() || !doc.contains(name) || !doc[name].is_string()) {
      throw Error(Errc::MalformedJson, std::string("client data lacks string field ") + name);
    }
    return doc[name].get<std::string>();
  };
  ClientData out{field("type"), field("challenge"), field("origin"),
                 Bytes(json_bytes.begin(), json_bytes.end())};

  if (out.type != expected_type) throw Error(Errc::TypeMismatch, "unexpected ceremony type");
  if (!crypto::constant_time_equal(std::string_view(out.challenge),
                                   base64url_encode(expected_challenge))) {
    throw Error(Errc::ChallengeMismatch, "challenge does not match this session");
  }
  if (out.origin != expected_origin) {
    throw Error(Errc::OriginMismatch, "origin " + out.origin + " is not allowed");
  }
  return out;
}

}  // namespace passgate::webauthn

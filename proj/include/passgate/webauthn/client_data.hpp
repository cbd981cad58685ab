#pragma once

#include <string>
#include <string_view>

#include "passgate/common/bytes.hpp"

namespace passgate::webauthn {

inline constexpr std::string_view kTypeCreate = "webauthn.create";
inline constexpr std::string_view kTypeGet = "webauthn.get";

struct ClientData {
  std::string type;
  std::string challenge;  // base64url, as sent by the client
  std::string origin;
  Bytes raw;              // exact bytes, hashed into the signature base
};

/// Accepts the client data only if type, challenge and origin match exactly,
/// checked in that order. Errors: MalformedJson, TypeMismatch,
/// ChallengeMismatch, OriginMismatch.
ClientData parse_client_data(ByteView json_bytes, std::string_view expected_type,
                             ByteView expected_challenge, std::string_view expected_origin);

}  // namespace passgate::webauthn

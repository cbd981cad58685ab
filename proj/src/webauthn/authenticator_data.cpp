#include "passgate/webauthn/authenticator_data.hpp"

#include <algorithm>

#include "passgate/common/error.hpp"
#include "passgate/webauthn/cose.hpp"

namespace passgate::webauthn {

AuthenticatorData parse_authenticator_data(ByteView data) {
  if (data.size() < kAuthenticatorDataMinLength) {
    throw Error(Errc::TooShort, "authenticator data shorter than 37 bytes");
  }
  AuthenticatorData out;
  std::copy_n(data.begin(), 32, out.rp_id_hash.begin());
  out.flags = data[32];
  out.counter = (static_cast<std::uint32_t>(data[33]) << 24) |
                (static_cast<std::uint32_t>(data[34]) << 16) |
                (static_cast<std::uint32_t>(data[35]) << 8) | static_cast<std::uint32_t>(data[36]);

  auto rest = data.subspan(kAuthenticatorDataMinLength);
  auto malformed = [](const char* what) { return Error(Errc::MalformedCredentialData, what); };

  if (out.has_attested_credential()) {
    if (rest.size() < 18) throw malformed("attested credential data truncated");
    AttestedCredential cred;
    std::copy_n(rest.begin(), 16, cred.aaguid.begin());
    const std::size_t id_len = (static_cast<std::size_t>(rest[16]) << 8) | rest[17];
    rest = rest.subspan(18);
    if (id_len == 0 || id_len > kMaxCredentialIdLength) throw malformed("bad credential id length");
    if (rest.size() < id_len) throw malformed("credential id truncated");
    cred.credential_id.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(id_len));
    rest = rest.subspan(id_len);
    if (rest.empty()) throw malformed("credential public key missing");
    std::size_t used = 0;
    CborValue key_cbor;
    try {
      key_cbor = decode_cbor_prefix(rest, used);
    } catch (const Error& e) {
      throw Error(Errc::MalformedCredentialData, std::string("credential public key: ") + e.what());
    }
    cred.public_key = parse_cose_key(key_cbor);
    rest = rest.subspan(used);
    out.attested_credential = std::move(cred);
  }

  if (out.has_extensions()) {
    if (rest.empty()) throw malformed("extension data missing");
    std::size_t used = 0;
    try {
      out.extensions = decode_cbor_prefix(rest, used);
    } catch (const Error& e) {
      throw Error(Errc::MalformedCredentialData, std::string("extension data: ") + e.what());
    }
    if (!out.extensions->is_map()) throw malformed("extension data is not a map");
    rest = rest.subspan(used);
  }

  if (!rest.empty()) throw malformed("unexpected bytes after authenticator data");
  return out;
}

}  // namespace passgate::webauthn

#include "passgate/webauthn/relying_party.hpp"

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "passgate/webauthn/client_data.hpp"
#include "passgate/webauthn/cose.hpp"

namespace passgate::webauthn {
namespace {

using storage::CeremonyPurpose;
using storage::SessionStatus;

struct AttestationObject {
  std::string format;
  Bytes auth_data;
  CborValue statement;
};

AttestationObject parse_attestation_object(ByteView raw) {
  CborValue root;
  try {
    root = decode_cbor(raw);
  } catch (const Error& e) {
    throw Error(Errc::MalformedResponse, std::string("attestation object: ") + e.what());
  }
  const auto* fmt = root.find("fmt");
  const auto* auth_data = root.find("authData");
  const auto* stmt = root.find("attStmt");
  if (!fmt || !fmt->is_text() || !auth_data || !auth_data->is_bytes() || !stmt || !stmt->is_map()) {
    throw Error(Errc::MalformedResponse, "attestation object needs fmt, authData and attStmt");
  }
  return {fmt->as_text(), auth_data->as_bytes(), *stmt};
}

Bytes signature_base(ByteView auth_data, ByteView client_data_json) {
  auto hash = crypto::sha256(client_data_json);
  return concat(auth_data, hash);
}

void check_rp_and_flags(const AuthenticatorData& data, const CeremonyExpectations& expect) {
  const auto expected_hash = crypto::sha256(to_bytes(expect.rp_id));
  if (!crypto::constant_time_equal(data.rp_id_hash, expected_hash)) {
    throw Error(Errc::RpIdHashMismatch, "authenticator data is for a different RP ID");
  }
  if (!data.user_present()) throw Error(Errc::UserPresenceMissing, "user presence flag not set");
  if (expect.require_user_verification && !data.user_verified()) {
    throw Error(Errc::UserVerificationRequired, "user verification flag not set");
  }
}

void verify_packed(const CborValue& stmt, ByteView signed_data, const CosePublicKey& credential_key) {
  const auto* alg = stmt.find("alg");
  const auto* sig = stmt.find("sig");
  if (!alg || alg->as_int64() != kCoseAlgEs256 || !sig || !sig->is_bytes()) {
    throw Error(Errc::BadAttestationStatement, "packed statement needs alg -7 and sig");
  }
  const auto* x5c = stmt.find("x5c");
  bool ok;
  if (x5c == nullptr) {
    ok = verify_es256(credential_key, signed_data, sig->as_bytes());
  } else {
    if (!x5c->is_array() || x5c->as_array().empty() || !x5c->as_array().front().is_bytes()) {
      throw Error(Errc::BadAttestationStatement, "x5c must be a nonempty array of certificates");
    }
    ok = verify_es256_with_certificate(x5c->as_array().front().as_bytes(), signed_data,
                                       sig->as_bytes());
  }
  if (!ok) throw Error(Errc::BadSignature, "attestation signature does not verify");
}

}  // namespace

void check_session(const storage::PasskeySessionRecord& session, CeremonyPurpose purpose,
                   Timestamp now) {
  if (session.status == SessionStatus::Completed) {
    throw Error(Errc::SessionAlreadyUsed, "ceremony session already used");
  }
  if (session.status == SessionStatus::Expired || now >= session.expires_at) {
    throw Error(Errc::SessionExpired, "ceremony session expired");
  }
  if (session.purpose != purpose) throw Error(Errc::WrongCeremony, "session is for another ceremony");
}

VerifiedRegistration verify_registration(
    const RegistrationResponse& response, const storage::PasskeySessionRecord& session,
    const CeremonyExpectations& expect,
    const std::function<bool(ByteView credential_id)>& already_registered) {
  check_session(session, CeremonyPurpose::Registration, expect.now);
  parse_client_data(response.client_data_json, kTypeCreate, session.challenge, expect.origin);

  auto attestation = parse_attestation_object(response.attestation_object);
  auto data = parse_authenticator_data(attestation.auth_data);
  check_rp_and_flags(data, expect);
  if (!data.attested_credential) {
    throw Error(Errc::MalformedCredentialData, "registration lacks attested credential data");
  }
  const auto& cred = *data.attested_credential;

  if (attestation.format == "none") {
    if (!attestation.statement.as_map().empty()) {
      throw Error(Errc::BadAttestationStatement, "\"none\" attestation must have empty attStmt");
    }
  } else if (attestation.format == "packed") {
    verify_packed(attestation.statement,
                  signature_base(attestation.auth_data, response.client_data_json),
                  cred.public_key);
  } else {
    throw Error(Errc::UnsupportedAttestationFormat,
                "attestation format " + attestation.format + " is not accepted");
  }

  if (response.raw_id != cred.credential_id) {
    throw Error(Errc::MalformedResponse, "rawId differs from the attested credential id");
  }
  if (already_registered && already_registered(cred.credential_id)) {
    throw Error(Errc::CredentialAlreadyRegistered, "credential id is already registered");
  }
  return VerifiedRegistration{cred.credential_id, cred.public_key, data.counter, cred.aaguid,
                              data.user_verified(), attestation.format};
}

std::uint32_t next_counter(std::uint32_t stored, std::uint32_t received) {
  if (received > stored) return received;
  if (received == 0 && stored == 0) return 0;
  throw Error(Errc::CounterRegression,
              "signature counter did not increase (possible cloned authenticator)");
}

VerifiedAuthentication verify_assertion(const AuthenticationResponse& response,
                                        const storage::PasskeyCredentialRecord& stored,
                                        const storage::PasskeySessionRecord& session,
                                        const CeremonyExpectations& expect) {
  check_session(session, CeremonyPurpose::Authentication, expect.now);
  if (response.raw_id != stored.credential_id) {
    throw Error(Errc::UnknownCredential, "assertion is for a different credential");
  }
  if (response.user_handle && passgate::to_string(*response.user_handle) != stored.user_id) {
    throw Error(Errc::UserHandleMismatch, "user handle does not own this credential");
  }
  parse_client_data(response.client_data_json, kTypeGet, session.challenge, expect.origin);
  auto data = parse_authenticator_data(response.authenticator_data);
  check_rp_and_flags(data, expect);

  if (!verify_es256(stored.public_key,
                    signature_base(response.authenticator_data, response.client_data_json),
                    response.signature)) {
    throw Error(Errc::BadSignature, "assertion signature does not verify");
  }
  return VerifiedAuthentication{next_counter(stored.counter, data.counter), data.user_verified()};
}

}  // namespace passgate::webauthn

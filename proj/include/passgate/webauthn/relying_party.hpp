#pragma once

#include <array>
#include <functional>
#include <string>

#include "passgate/common/bytes.hpp"
#include "passgate/common/clock.hpp"
#include "passgate/storage/records.hpp"
#include "passgate/webauthn/authenticator_data.hpp"
#include "passgate/webauthn/types.hpp"

namespace passgate::webauthn {

struct VerifiedRegistration {
  Bytes credential_id;
  CosePublicKey public_key;
  std::uint32_t counter = 0;
  std::array<std::uint8_t, 16> aaguid{};
  bool user_verified = false;
  std::string format;
};

struct VerifiedAuthentication {
  std::uint32_t new_counter = 0;
  bool user_verified = false;
};

/// What the caller expects of this ceremony.
struct CeremonyExpectations {
  std::string origin;
  std::string rp_id;
  Timestamp now{};
  bool require_user_verification = false;
};

/// Throws unless `session` is pending, unexpired and for `purpose`:
/// SessionAlreadyUsed, SessionExpired, WrongCeremony.
void check_session(const storage::PasskeySessionRecord& session,
                   storage::CeremonyPurpose purpose, Timestamp now);

/// Registration ceremony checks, in order: session state, client data
/// (type/challenge/origin), attestation object shape, rp_id_hash, UP flag,
/// optional UV, attested credential present, attestation format ("none" or
/// "packed"), packed signature over authData || SHA-256(clientDataJSON),
/// rawId matches the attested id, credential not already registered.
/// Pure: the caller moves the session to Completed or Expired.
VerifiedRegistration verify_registration(
    const RegistrationResponse& response, const storage::PasskeySessionRecord& session,
    const CeremonyExpectations& expect,
    const std::function<bool(ByteView credential_id)>& already_registered = {});

/// Assertion checks, in order: session state, credential id, user handle,
/// client data, rp_id_hash, UP, optional UV, ES256 signature, counter rule
/// (strictly greater than stored, or both zero). Pure as above.
VerifiedAuthentication verify_assertion(const AuthenticationResponse& response,
                                        const storage::PasskeyCredentialRecord& stored,
                                        const storage::PasskeySessionRecord& session,
                                        const CeremonyExpectations& expect);

/// The counter rule alone. Throws CounterRegression.
std::uint32_t next_counter(std::uint32_t stored, std::uint32_t received);

}  // namespace passgate::webauthn

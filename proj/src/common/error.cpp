#include "passgate/common/error.hpp"

namespace passgate {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ConfigError: return "config_error";
    case Errc::EntropyError: return "entropy_error";
    case Errc::PolicyViolation: return "policy_violation";
    case Errc::FormatError: return "format_error";
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::BadRequest: return "bad_request";
    case Errc::UniquenessViolation: return "uniqueness_violation";
    case Errc::SnapshotError: return "snapshot_error";
    case Errc::NotFound: return "not_found";
    case Errc::Malformed: return "malformed_token";
    case Errc::BadSignature: return "bad_signature";
    case Errc::Expired: return "token_expired";
    case Errc::Revoked: return "token_revoked";
    case Errc::Unauthorized: return "unauthorized";
    case Errc::Truncated: return "cbor_truncated";
    case Errc::IndefiniteLengthUnsupported: return "cbor_indefinite_length";
    case Errc::DuplicateMapKey: return "cbor_duplicate_map_key";
    case Errc::TrailingBytes: return "cbor_trailing_bytes";
    case Errc::UnsupportedCborType: return "cbor_unsupported_type";
    case Errc::NestingTooDeep: return "cbor_nesting_too_deep";
    case Errc::TooShort: return "authenticator_data_too_short";
    case Errc::MalformedCredentialData: return "malformed_credential_data";
    case Errc::MalformedResponse: return "malformed_response";
    case Errc::MalformedJson: return "malformed_client_data";
    case Errc::TypeMismatch: return "type_mismatch";
    case Errc::ChallengeMismatch: return "challenge_mismatch";
    case Errc::OriginMismatch: return "origin_mismatch";
    case Errc::RpIdHashMismatch: return "rp_id_hash_mismatch";
    case Errc::UserPresenceMissing: return "user_presence_missing";
    case Errc::UserVerificationRequired: return "user_verification_required";
    case Errc::UnsupportedAttestationFormat: return "unsupported_attestation_format";
    case Errc::BadAttestationStatement: return "bad_attestation_statement";
    case Errc::UnsupportedAlgorithm: return "unsupported_algorithm";
    case Errc::InvalidPublicKey: return "invalid_public_key";
    case Errc::CounterRegression: return "counter_regression";
    case Errc::UnknownCredential: return "unknown_credential";
    case Errc::CredentialAlreadyRegistered: return "credential_already_registered";
    case Errc::UserHandleMismatch: return "user_handle_mismatch";
    case Errc::SessionNotFound: return "session_not_found";
    case Errc::SessionAlreadyUsed: return "session_already_used";
    case Errc::SessionExpired: return "session_expired";
    case Errc::WrongCeremony: return "wrong_ceremony";
    case Errc::SessionMismatch: return "session_mismatch";
    case Errc::AlreadyRegistered: return "already_registered";
    case Errc::RateLimited: return "rate_limited";
    case Errc::CodeMismatch: return "code_mismatch";
    case Errc::CodeExpired: return "code_expired";
    case Errc::NotVerified: return "not_verified";
    case Errc::InvalidCredentials: return "invalid_credentials";
    case Errc::StateMismatch: return "state_mismatch";
    case Errc::CodeExchangeFailed: return "code_exchange_failed";
    case Errc::Forbidden: return "forbidden";
  }
  return "unknown_error";
}

}  // namespace passgate

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace passgate {

/// Every failure the library reports. The names are stable: the HTTP layer
/// exposes them verbatim (snake_cased) as machine-readable error codes.
enum class Errc {
  // configuration, entropy, generic input
  ConfigError,
  EntropyError,
  PolicyViolation,
  FormatError,
  InvalidArgument,
  BadRequest,

  // storage
  UniquenessViolation,
  SnapshotError,
  NotFound,

  // tokens
  Malformed,
  BadSignature,
  Expired,
  Revoked,
  Unauthorized,

  // cbor
  Truncated,
  IndefiniteLengthUnsupported,
  DuplicateMapKey,
  TrailingBytes,
  UnsupportedCborType,
  NestingTooDeep,

  // webauthn
  TooShort,
  MalformedCredentialData,
  MalformedResponse,
  MalformedJson,
  TypeMismatch,
  ChallengeMismatch,
  OriginMismatch,
  RpIdHashMismatch,
  UserPresenceMissing,
  UserVerificationRequired,
  UnsupportedAttestationFormat,
  BadAttestationStatement,
  UnsupportedAlgorithm,
  InvalidPublicKey,
  CounterRegression,
  UnknownCredential,
  CredentialAlreadyRegistered,
  UserHandleMismatch,
  SessionNotFound,
  SessionAlreadyUsed,
  SessionExpired,
  WrongCeremony,
  SessionMismatch,

  // flows
  AlreadyRegistered,
  RateLimited,
  CodeMismatch,
  CodeExpired,
  NotVerified,
  InvalidCredentials,
  StateMismatch,
  CodeExchangeFailed,
  Forbidden,
};

/// "origin_mismatch" style identifier for an error code.
std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}
  explicit Error(Errc code) : Error(code, std::string(errc_name(code))) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace passgate

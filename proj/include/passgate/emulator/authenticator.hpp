#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "passgate/common/crypto.hpp"
#include "passgate/webauthn/types.hpp"

namespace passgate::emulator {

/// Negative-path knobs. Each one makes exactly one aspect of the next
/// responses deviate from what an honest authenticator would send.
enum class Tamper {
  WrongOrigin,     // client data origin is https://evil.example
  WrongType,       // client data type of the other ceremony
  StaleChallenge,  // client data challenge is not the one in the options
  FrozenCounter,   // get: counter not advanced; create: re-presents an existing credential
  BadSignature,    // get: one signature byte flipped; create: packed attestation, bad sig
  WrongRpHash,     // rp_id_hash computed over another RP ID
};

inline constexpr std::array<Tamper, 6> kAllTampers = {
    Tamper::WrongOrigin,   Tamper::WrongType,    Tamper::StaleChallenge,
    Tamper::FrozenCounter, Tamper::BadSignature, Tamper::WrongRpHash};

std::string_view to_string(Tamper t);
/// Accepts "wrong_origin", "frozen_counter", ... Throws InvalidArgument.
Tamper tamper_from(std::string_view name);

enum class AttestationFormat { None, Packed };

/// Software FIDO2 authenticator. Keys are ES256 (P-256); private keys never
/// leave the object. The signature counter advances by exactly one per
/// assertion. Not thread-safe; use one instance per test.
class EmulatedAuthenticator {
 public:
  EmulatedAuthenticator();
  /// Every key, credential id and challenge substitute comes from `rng`.
  /// ECDSA nonces still come from OpenSSL, so signatures differ run to run.
  explicit EmulatedAuthenticator(std::unique_ptr<crypto::RandomSource> rng);
  ~EmulatedAuthenticator();
  EmulatedAuthenticator(EmulatedAuthenticator&&) noexcept;
  EmulatedAuthenticator& operator=(EmulatedAuthenticator&&) noexcept;

  static EmulatedAuthenticator deterministic(std::uint64_t seed);

  /// navigator.credentials.create(): new key pair, attestation "none"
  /// (or "packed" self-attestation), AT set, counter 0.
  webauthn::RegistrationResponse create(const webauthn::RegistrationOptions& options,
                                        std::string_view origin);

  /// navigator.credentials.get(). Without an explicit id it picks the first
  /// allowed credential, or the newest one for the RP when the allow list is
  /// empty. Throws Error(UnknownCredential) when nothing matches options.rp_id.
  webauthn::AuthenticationResponse get(const webauthn::AuthenticationOptions& options,
                                       std::string_view origin,
                                       std::optional<ByteView> credential_id = std::nullopt);

  /// Applies `t` to every following response until cleared.
  EmulatedAuthenticator& with_tamper(std::optional<Tamper> t);
  EmulatedAuthenticator& set_attestation_format(AttestationFormat f);
  EmulatedAuthenticator& set_user_verified(bool uv);

  std::vector<Bytes> credential_ids(std::string_view rp_id) const;
  /// Current counter for a credential; throws UnknownCredential.
  std::uint32_t counter(ByteView credential_id) const;
  const std::array<std::uint8_t, 16>& aaguid() const { return aaguid_; }

 private:
  struct Credential;

  Credential* lookup(ByteView id, std::string_view rp_id);

  std::unique_ptr<crypto::RandomSource> rng_;
  std::array<std::uint8_t, 16> aaguid_{};
  std::vector<std::unique_ptr<Credential>> credentials_;
  std::optional<Tamper> tamper_;
  AttestationFormat format_ = AttestationFormat::None;
  bool user_verified_ = true;
};

}  // namespace passgate::emulator

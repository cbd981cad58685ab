#include "passgate/emulator/authenticator.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>

#include <algorithm>

#include <json.hpp>

#include "passgate/common/error.hpp"
#include "passgate/emulator/cbor_encoder.hpp"
#include "passgate/webauthn/authenticator_data.hpp"
#include "passgate/webauthn/client_data.hpp"
#include "passgate/webauthn/cose_key.hpp"

namespace passgate::emulator {
namespace {

using webauthn::CborValue;

constexpr std::string_view kEvilOrigin = "https://evil.example";
constexpr std::string_view kOtherRpId = "other.example";
constexpr std::size_t kCredentialIdBytes = 32;

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, Deleter<EVP_PKEY, EVP_PKEY_free>>;
using GroupPtr = std::unique_ptr<EC_GROUP, Deleter<EC_GROUP, EC_GROUP_free>>;
using PointPtr = std::unique_ptr<EC_POINT, Deleter<EC_POINT, EC_POINT_free>>;
using BnPtr = std::unique_ptr<BIGNUM, Deleter<BIGNUM, BN_clear_free>>;
using BnCtxPtr = std::unique_ptr<BN_CTX, Deleter<BN_CTX, BN_CTX_free>>;
using ParamBldPtr = std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD, OSSL_PARAM_BLD_free>>;
using ParamPtr = std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM, OSSL_PARAM_free>>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX, EVP_PKEY_CTX_free>>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, Deleter<EVP_MD_CTX, EVP_MD_CTX_free>>;

[[noreturn]] void openssl_failure(const char* what) {
  throw Error(Errc::ConfigError, std::string("emulator: OpenSSL failure in ") + what);
}

struct KeyPair {
  PkeyPtr pkey;
  webauthn::CosePublicKey public_key;
};

// Private scalar drawn from `rng`, so a seeded source gives reproducible keys.
KeyPair generate_key(crypto::RandomSource& rng) {
  GroupPtr group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  BnCtxPtr bn_ctx(BN_CTX_new());
  if (!group || !bn_ctx) openssl_failure("group");
  const BIGNUM* order = EC_GROUP_get0_order(group.get());

  BnPtr scalar(BN_new());
  while (true) {
    auto raw = rng.bytes(32);
    if (!BN_bin2bn(raw.data(), static_cast<int>(raw.size()), scalar.get())) openssl_failure("bn");
    if (!BN_is_zero(scalar.get()) && BN_cmp(scalar.get(), order) < 0) break;
  }
  PointPtr point(EC_POINT_new(group.get()));
  if (!point || EC_POINT_mul(group.get(), point.get(), scalar.get(), nullptr, nullptr, bn_ctx.get()) != 1) {
    openssl_failure("point multiply");
  }
  Bytes encoded(65);
  if (EC_POINT_point2oct(group.get(), point.get(), POINT_CONVERSION_UNCOMPRESSED, encoded.data(),
                         encoded.size(), bn_ctx.get()) != encoded.size()) {
    openssl_failure("point encode");
  }

  ParamBldPtr bld(OSSL_PARAM_BLD_new());
  if (!bld ||
      !OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) ||
      !OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, scalar.get()) ||
      !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, encoded.data(),
                                        encoded.size())) {
    openssl_failure("param build");
  }
  ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw_key = nullptr;
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) <= 0 ||
      EVP_PKEY_fromdata(ctx.get(), &raw_key, EVP_PKEY_KEYPAIR, params.get()) <= 0) {
    openssl_failure("key import");
  }

  KeyPair out{PkeyPtr(raw_key), {}};
  std::copy(encoded.begin() + 1, encoded.begin() + 33, out.public_key.x.begin());
  std::copy(encoded.begin() + 33, encoded.end(), out.public_key.y.begin());
  return out;
}

Bytes sign(EVP_PKEY* key, ByteView message) {
  MdCtxPtr md(EVP_MD_CTX_new());
  std::size_t len = 0;
  if (!md || EVP_DigestSignInit(md.get(), nullptr, EVP_sha256(), nullptr, key) != 1 ||
      EVP_DigestSign(md.get(), nullptr, &len, message.data(), message.size()) != 1) {
    openssl_failure("sign init");
  }
  Bytes sig(len);
  if (EVP_DigestSign(md.get(), sig.data(), &len, message.data(), message.size()) != 1) {
    openssl_failure("sign");
  }
  sig.resize(len);
  return sig;
}

CborValue cose_key_cbor(const webauthn::CosePublicKey& key) {
  // CTAP2 canonical order: 1, 3, -1, -2, -3.
  return CborValue(CborValue::Map{
      {CborValue::integer(1), CborValue::integer(key.key_type)},
      {CborValue::integer(3), CborValue::integer(key.algorithm)},
      {CborValue::integer(-1), CborValue::integer(key.curve)},
      {CborValue::integer(-2), CborValue(Bytes(key.x.begin(), key.x.end()))},
      {CborValue::integer(-3), CborValue(Bytes(key.y.begin(), key.y.end()))},
  });
}

void put_be32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

struct EmulatedAuthenticator::Credential {
  Bytes id;
  std::string rp_id;
  Bytes user_handle;
  PkeyPtr key;
  webauthn::CosePublicKey public_key;
  std::uint32_t counter = 0;
};

std::string_view to_string(Tamper t) {
  switch (t) {
    case Tamper::WrongOrigin: return "wrong_origin";
    case Tamper::WrongType: return "wrong_type";
    case Tamper::StaleChallenge: return "stale_challenge";
    case Tamper::FrozenCounter: return "frozen_counter";
    case Tamper::BadSignature: return "bad_signature";
    case Tamper::WrongRpHash: return "wrong_rp_hash";
  }
  return "unknown";
}

Tamper tamper_from(std::string_view name) {
  for (auto t : kAllTampers) {
    if (to_string(t) == name) return t;
  }
  throw Error(Errc::InvalidArgument, "unknown tamper knob: " + std::string(name));
}

EmulatedAuthenticator::EmulatedAuthenticator()
    : EmulatedAuthenticator(std::make_unique<crypto::SystemRandom>()) {}

EmulatedAuthenticator::EmulatedAuthenticator(std::unique_ptr<crypto::RandomSource> rng)
    : rng_(std::move(rng)) {
  auto raw = rng_->bytes(aaguid_.size());
  std::copy(raw.begin(), raw.end(), aaguid_.begin());
}

EmulatedAuthenticator::~EmulatedAuthenticator() = default;
EmulatedAuthenticator::EmulatedAuthenticator(EmulatedAuthenticator&&) noexcept = default;
EmulatedAuthenticator& EmulatedAuthenticator::operator=(EmulatedAuthenticator&&) noexcept = default;

EmulatedAuthenticator EmulatedAuthenticator::deterministic(std::uint64_t seed) {
  return EmulatedAuthenticator(std::make_unique<crypto::SeededRandom>(seed));
}

EmulatedAuthenticator& EmulatedAuthenticator::with_tamper(std::optional<Tamper> t) {
  tamper_ = t;
  return *this;
}

EmulatedAuthenticator& EmulatedAuthenticator::set_attestation_format(AttestationFormat f) {
  format_ = f;
  return *this;
}

EmulatedAuthenticator& EmulatedAuthenticator::set_user_verified(bool uv) {
  user_verified_ = uv;
  return *this;
}

EmulatedAuthenticator::Credential* EmulatedAuthenticator::lookup(ByteView id, std::string_view rp_id) {
  for (auto& c : credentials_) {
    if (c->rp_id == rp_id && std::equal(c->id.begin(), c->id.end(), id.begin(), id.end())) {
      return c.get();
    }
  }
  return nullptr;
}

std::vector<Bytes> EmulatedAuthenticator::credential_ids(std::string_view rp_id) const {
  std::vector<Bytes> out;
  for (const auto& c : credentials_) {
    if (c->rp_id == rp_id) out.push_back(c->id);
  }
  return out;
}

std::uint32_t EmulatedAuthenticator::counter(ByteView credential_id) const {
  for (const auto& c : credentials_) {
    if (std::equal(c->id.begin(), c->id.end(), credential_id.begin(), credential_id.end())) {
      return c->counter;
    }
  }
  throw Error(Errc::UnknownCredential, "emulator has no such credential");
}

namespace {

Bytes client_data_json(std::string_view type, ByteView challenge, std::string_view origin) {
  nlohmann::ordered_json doc = {{"type", type},
                                {"challenge", base64url_encode(challenge)},
                                {"origin", origin},
                                {"crossOrigin", false}};
  return to_bytes(doc.dump());
}

}  // namespace

webauthn::RegistrationResponse EmulatedAuthenticator::create(
    const webauthn::RegistrationOptions& options, std::string_view origin) {
  if (std::find(options.pub_key_cred_params.begin(), options.pub_key_cred_params.end(),
                webauthn::kCoseAlgEs256) == options.pub_key_cred_params.end()) {
    throw Error(Errc::UnsupportedAlgorithm, "emulator only supports ES256");
  }

  Credential* cred = nullptr;
  if (tamper_ == Tamper::FrozenCounter) {
    // A cloned authenticator: same credential, same key, counter frozen.
    // Prefer one the RP already lists, else the newest for this RP.
    for (const auto& excluded : options.exclude_credentials) {
      if ((cred = lookup(excluded, options.rp.id)) != nullptr) break;
    }
    for (auto it = credentials_.rbegin(); cred == nullptr && it != credentials_.rend(); ++it) {
      if ((*it)->rp_id == options.rp.id) cred = it->get();
    }
    if (cred == nullptr) {
      throw Error(Errc::InvalidArgument, "frozen_counter on create needs an existing credential");
    }
  } else {
    for (const auto& excluded : options.exclude_credentials) {
      if (lookup(excluded, options.rp.id) != nullptr) {
        throw Error(Errc::CredentialAlreadyRegistered, "authenticator already holds an excluded credential");
      }
    }
    auto key = generate_key(*rng_);
    auto fresh = std::make_unique<Credential>();
    fresh->id = rng_->bytes(kCredentialIdBytes);
    fresh->rp_id = options.rp.id;
    fresh->user_handle = options.user.id;
    fresh->key = std::move(key.pkey);
    fresh->public_key = key.public_key;
    cred = fresh.get();
    credentials_.push_back(std::move(fresh));
  }

  const auto type = tamper_ == Tamper::WrongType ? webauthn::kTypeGet : webauthn::kTypeCreate;
  const auto challenge =
      tamper_ == Tamper::StaleChallenge ? rng_->bytes(webauthn::kChallengeBytes) : options.challenge.bytes;
  const auto cd_origin = tamper_ == Tamper::WrongOrigin ? kEvilOrigin : origin;
  auto cdj = client_data_json(type, challenge, cd_origin);

  Bytes auth_data;
  const auto rp_hash =
      crypto::sha256(to_bytes(tamper_ == Tamper::WrongRpHash ? kOtherRpId : std::string_view(options.rp.id)));
  auth_data.insert(auth_data.end(), rp_hash.begin(), rp_hash.end());
  std::uint8_t fl = webauthn::flags::kUserPresent | webauthn::flags::kAttestedCredential;
  if (user_verified_) fl |= webauthn::flags::kUserVerified;
  auth_data.push_back(fl);
  put_be32(auth_data, cred->counter);
  auth_data.insert(auth_data.end(), aaguid_.begin(), aaguid_.end());
  auth_data.push_back(static_cast<std::uint8_t>(cred->id.size() >> 8));
  auth_data.push_back(static_cast<std::uint8_t>(cred->id.size() & 0xff));
  auth_data.insert(auth_data.end(), cred->id.begin(), cred->id.end());
  auto cose = encode_cbor(cose_key_cbor(cred->public_key));
  auth_data.insert(auth_data.end(), cose.begin(), cose.end());

  const bool packed = format_ == AttestationFormat::Packed || tamper_ == Tamper::BadSignature;
  CborValue statement{CborValue::Map{}};
  if (packed) {
    auto hash = crypto::sha256(cdj);
    auto sig = sign(cred->key.get(), concat(auth_data, hash));
    if (tamper_ == Tamper::BadSignature) sig.back() ^= 0x01;
    statement = CborValue(CborValue::Map{{CborValue("alg"), CborValue::integer(webauthn::kCoseAlgEs256)},
                                         {CborValue("sig"), CborValue(std::move(sig))}});
  }
  // CTAP2 canonical key order: "fmt", "attStmt", "authData".
  CborValue attestation(CborValue::Map{
      {CborValue("fmt"), CborValue(packed ? "packed" : "none")},
      {CborValue("attStmt"), statement},
      {CborValue("authData"), CborValue(auth_data)},
  });
  return webauthn::RegistrationResponse{cred->id, std::move(cdj), encode_cbor(attestation)};
}

webauthn::AuthenticationResponse EmulatedAuthenticator::get(
    const webauthn::AuthenticationOptions& options, std::string_view origin,
    std::optional<ByteView> credential_id) {
  Credential* cred = nullptr;
  const auto& allow = options.allow_credentials;
  auto allowed = [&](ByteView id) {
    return allow.empty() || std::any_of(allow.begin(), allow.end(), [&](const Bytes& a) {
             return std::equal(a.begin(), a.end(), id.begin(), id.end());
           });
  };
  if (credential_id) {
    cred = lookup(*credential_id, options.rp_id);
    if (cred && !allowed(cred->id)) cred = nullptr;
  } else if (!allow.empty()) {
    for (const auto& a : allow) {
      if ((cred = lookup(a, options.rp_id)) != nullptr) break;
    }
  } else {
    for (auto it = credentials_.rbegin(); it != credentials_.rend(); ++it) {
      if ((*it)->rp_id == options.rp_id) {
        cred = it->get();
        break;
      }
    }
  }
  if (cred == nullptr) throw Error(Errc::UnknownCredential, "no credential for this RP ID");

  if (tamper_ == Tamper::FrozenCounter) {
    // With both counters at zero the RP must accept (counterless
    // authenticators exist), so a frozen counter is only observable later.
    if (cred->counter == 0) {
      throw Error(Errc::InvalidArgument, "frozen_counter needs at least one prior assertion");
    }
  } else {
    ++cred->counter;
  }

  const auto type = tamper_ == Tamper::WrongType ? webauthn::kTypeCreate : webauthn::kTypeGet;
  const auto challenge =
      tamper_ == Tamper::StaleChallenge ? rng_->bytes(webauthn::kChallengeBytes) : options.challenge.bytes;
  const auto cd_origin = tamper_ == Tamper::WrongOrigin ? kEvilOrigin : origin;
  auto cdj = client_data_json(type, challenge, cd_origin);

  Bytes auth_data;
  const auto rp_hash =
      crypto::sha256(to_bytes(tamper_ == Tamper::WrongRpHash ? kOtherRpId : std::string_view(options.rp_id)));
  auth_data.insert(auth_data.end(), rp_hash.begin(), rp_hash.end());
  std::uint8_t fl = webauthn::flags::kUserPresent;
  if (user_verified_) fl |= webauthn::flags::kUserVerified;
  auth_data.push_back(fl);
  put_be32(auth_data, cred->counter);

  auto hash = crypto::sha256(cdj);
  auto sig = sign(cred->key.get(), concat(auth_data, hash));
  if (tamper_ == Tamper::BadSignature) sig.back() ^= 0x01;

  return webauthn::AuthenticationResponse{cred->id, std::move(cdj), std::move(auth_data),
                                          std::move(sig), cred->user_handle};
}

}  // namespace passgate::emulator

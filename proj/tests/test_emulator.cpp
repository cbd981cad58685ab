#include <gtest/gtest.h>

#include <json.hpp>

#include "passgate/common/crypto.hpp"
#include "passgate/common/error.hpp"
#include "passgate/emulator/authenticator.hpp"
#include "passgate/webauthn/authenticator_data.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "passgate/webauthn/cose.hpp"
#include "support.hpp"

using namespace passgate;
using emulator::EmulatedAuthenticator;
using emulator::Tamper;

namespace {

constexpr std::string_view kOrigin = "http://localhost:8080";

webauthn::RegistrationOptions reg_options(std::string rp = "localhost") {
  webauthn::RegistrationOptions o;
  o.challenge = webauthn::generate_challenge();
  o.rp = {std::move(rp), "PassGate"};
  o.user = {to_bytes("user-42"), "a@b.co", "a@b.co"};
  return o;
}

webauthn::AuthenticationOptions auth_options(std::string rp = "localhost") {
  webauthn::AuthenticationOptions o;
  o.challenge = webauthn::generate_challenge();
  o.rp_id = std::move(rp);
  return o;
}

nlohmann::json client_data(const Bytes& raw) { return nlohmann::json::parse(to_string(raw)); }

struct Parsed {
  std::string fmt;
  webauthn::CborValue statement;
  webauthn::AuthenticatorData data;
};

Parsed parse_attestation(const webauthn::RegistrationResponse& r) {
  auto att = webauthn::decode_cbor(r.attestation_object);
  return {att.find("fmt")->as_text(), *att.find("attStmt"),
          webauthn::parse_authenticator_data(att.find("authData")->as_bytes())};
}

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Emulator, CreateProducesNoneAttestation) {
  auto a = EmulatedAuthenticator::deterministic(1);
  auto opts = reg_options();
  auto r = a.create(opts, kOrigin);
  auto p = parse_attestation(r);
  EXPECT_EQ(p.fmt, "none");
  EXPECT_TRUE(p.statement.as_map().empty());
  EXPECT_EQ(p.data.flags, webauthn::flags::kUserPresent | webauthn::flags::kUserVerified |
                              webauthn::flags::kAttestedCredential);
  EXPECT_EQ(p.data.counter, 0u);
  EXPECT_EQ(hex_encode(p.data.rp_id_hash), hex_encode(crypto::sha256(to_bytes("localhost"))));
  ASSERT_TRUE(p.data.attested_credential);
  EXPECT_EQ(p.data.attested_credential->credential_id, r.raw_id);
  EXPECT_EQ(p.data.attested_credential->aaguid, a.aaguid());
  EXPECT_TRUE(webauthn::is_on_p256(p.data.attested_credential->public_key));

  auto cd = client_data(r.client_data_json);
  EXPECT_EQ(cd["type"], "webauthn.create");
  EXPECT_EQ(cd["origin"], kOrigin);
  EXPECT_EQ(cd["challenge"], base64url_encode(opts.challenge.bytes));
  EXPECT_EQ(a.credential_ids("localhost"), std::vector<Bytes>{r.raw_id});
}

TEST(Emulator, PackedSelfAttestationSignsAuthDataAndClientHash) {
  auto a = EmulatedAuthenticator::deterministic(2);
  a.set_attestation_format(emulator::AttestationFormat::Packed);
  auto r = a.create(reg_options(), kOrigin);
  auto att = webauthn::decode_cbor(r.attestation_object);
  auto p = parse_attestation(r);
  EXPECT_EQ(p.fmt, "packed");
  EXPECT_EQ(p.statement.find("alg")->as_int64(), -7);
  auto signed_data = concat(att.find("authData")->as_bytes(), crypto::sha256(r.client_data_json));
  EXPECT_TRUE(webauthn::verify_es256(p.data.attested_credential->public_key, signed_data,
                                     p.statement.find("sig")->as_bytes()));
}

TEST(Emulator, CounterAdvancesByExactlyOne) {
  auto a = EmulatedAuthenticator::deterministic(3);
  auto r = a.create(reg_options(), kOrigin);
  EXPECT_EQ(a.counter(r.raw_id), 0u);
  for (std::uint32_t i = 1; i <= 50; ++i) {
    auto g = a.get(auth_options(), kOrigin);
    EXPECT_EQ(webauthn::parse_authenticator_data(g.authenticator_data).counter, i);
    EXPECT_EQ(a.counter(r.raw_id), i);
  }
}

TEST(Emulator, AssertionSignatureVerifies) {
  auto a = EmulatedAuthenticator::deterministic(4);
  auto r = a.create(reg_options(), kOrigin);
  auto key = parse_attestation(r).data.attested_credential->public_key;
  auto opts = auth_options();
  auto g = a.get(opts, kOrigin);
  EXPECT_EQ(g.raw_id, r.raw_id);
  ASSERT_TRUE(g.user_handle);
  EXPECT_EQ(to_string(*g.user_handle), "user-42");
  EXPECT_TRUE(webauthn::verify_es256(key, concat(g.authenticator_data, crypto::sha256(g.client_data_json)),
                                     g.signature));
  auto cd = client_data(g.client_data_json);
  EXPECT_EQ(cd["type"], "webauthn.get");
  EXPECT_EQ(cd["challenge"], base64url_encode(opts.challenge.bytes));
}

TEST(Emulator, DeterministicSeedsReproduceKeys) {
  auto a = EmulatedAuthenticator::deterministic(99);
  auto b = EmulatedAuthenticator::deterministic(99);
  auto c = EmulatedAuthenticator::deterministic(100);
  auto opts = reg_options();
  auto ra = a.create(opts, kOrigin);
  auto rb = b.create(opts, kOrigin);
  auto rc = c.create(opts, kOrigin);
  EXPECT_EQ(ra.raw_id, rb.raw_id);
  EXPECT_EQ(parse_attestation(ra).data.attested_credential->public_key,
            parse_attestation(rb).data.attested_credential->public_key);
  EXPECT_EQ(a.aaguid(), b.aaguid());
  EXPECT_NE(ra.raw_id, rc.raw_id);
}

TEST(Emulator, CredentialSelection) {
  auto a = EmulatedAuthenticator::deterministic(5);
  auto first = a.create(reg_options(), kOrigin).raw_id;
  auto second = a.create(reg_options(), kOrigin).raw_id;
  a.create(reg_options("example.com"), "https://example.com");

  EXPECT_EQ(a.get(auth_options(), kOrigin).raw_id, second);
  auto allow_first = auth_options();
  allow_first.allow_credentials = {Bytes{1, 2, 3}, first};
  EXPECT_EQ(a.get(allow_first, kOrigin).raw_id, first);
  EXPECT_EQ(a.get(auth_options(), kOrigin, ByteView(first)).raw_id, first);
  EXPECT_EQ(error_of([&] { a.get(allow_first, kOrigin, ByteView(second)); }), Errc::UnknownCredential);
  EXPECT_EQ(error_of([&] { a.get(auth_options("other.org"), kOrigin); }), Errc::UnknownCredential);
  EXPECT_EQ(a.credential_ids("localhost").size(), 2u);
  EXPECT_EQ(error_of([&] { a.counter(Bytes{7}); }), Errc::UnknownCredential);
}

TEST(Emulator, HonorsExcludeListAndAlgorithms) {
  auto a = EmulatedAuthenticator::deterministic(6);
  auto id = a.create(reg_options(), kOrigin).raw_id;
  auto opts = reg_options();
  opts.exclude_credentials = {id};
  EXPECT_EQ(error_of([&] { a.create(opts, kOrigin); }), Errc::CredentialAlreadyRegistered);
  auto rsa_only = reg_options();
  rsa_only.pub_key_cred_params = {-257};
  EXPECT_EQ(error_of([&] { a.create(rsa_only, kOrigin); }), Errc::UnsupportedAlgorithm);
}

TEST(Emulator, UserVerifiedFlagToggle) {
  auto a = EmulatedAuthenticator::deterministic(7);
  a.set_user_verified(false);
  auto r = a.create(reg_options(), kOrigin);
  EXPECT_FALSE(parse_attestation(r).data.user_verified());
  EXPECT_TRUE(parse_attestation(r).data.user_present());
  auto g = a.get(auth_options(), kOrigin);
  EXPECT_FALSE(webauthn::parse_authenticator_data(g.authenticator_data).user_verified());
}

TEST(Emulator, TamperNames) {
  for (auto t : emulator::kAllTampers) EXPECT_EQ(emulator::tamper_from(emulator::to_string(t)), t);
  EXPECT_EQ(emulator::to_string(Tamper::WrongRpHash), "wrong_rp_hash");
  EXPECT_EQ(error_of([] { emulator::tamper_from("nope"); }), Errc::InvalidArgument);
}

TEST(Emulator, EachGetTamperChangesOneAspect) {
  for (auto t : emulator::kAllTampers) {
    auto a = EmulatedAuthenticator::deterministic(8);
    auto id = a.create(reg_options(), kOrigin).raw_id;
    a.get(auth_options(), kOrigin);
    auto key_data = a.counter(id);
    auto opts = auth_options();
    a.with_tamper(t);
    auto g = a.get(opts, kOrigin);
    auto cd = client_data(g.client_data_json);
    auto data = webauthn::parse_authenticator_data(g.authenticator_data);
    const bool origin_ok = cd["origin"] == kOrigin;
    const bool type_ok = cd["type"] == "webauthn.get";
    const bool challenge_ok = cd["challenge"] == base64url_encode(opts.challenge.bytes);
    const bool counter_ok = data.counter == key_data + 1;
    const bool rp_ok = hex_encode(data.rp_id_hash) == hex_encode(crypto::sha256(to_bytes("localhost")));
    EXPECT_EQ(origin_ok, t != Tamper::WrongOrigin) << emulator::to_string(t);
    EXPECT_EQ(type_ok, t != Tamper::WrongType) << emulator::to_string(t);
    EXPECT_EQ(challenge_ok, t != Tamper::StaleChallenge) << emulator::to_string(t);
    EXPECT_EQ(counter_ok, t != Tamper::FrozenCounter) << emulator::to_string(t);
    EXPECT_EQ(rp_ok, t != Tamper::WrongRpHash) << emulator::to_string(t);
    if (t == Tamper::WrongOrigin) EXPECT_EQ(cd["origin"], "https://evil.example");
  }
}

TEST(Emulator, TamperIsStickyUntilCleared) {
  auto a = EmulatedAuthenticator::deterministic(9);
  a.create(reg_options(), kOrigin);
  a.with_tamper(Tamper::WrongOrigin);
  EXPECT_NE(client_data(a.get(auth_options(), kOrigin).client_data_json)["origin"], kOrigin);
  EXPECT_NE(client_data(a.get(auth_options(), kOrigin).client_data_json)["origin"], kOrigin);
  a.with_tamper(std::nullopt);
  EXPECT_EQ(client_data(a.get(auth_options(), kOrigin).client_data_json)["origin"], kOrigin);
}

TEST(Emulator, FrozenCounterPreconditions) {
  auto a = EmulatedAuthenticator::deterministic(10);
  a.with_tamper(Tamper::FrozenCounter);
  EXPECT_EQ(error_of([&] { a.create(reg_options(), kOrigin); }), Errc::InvalidArgument);
  a.with_tamper(std::nullopt);
  auto id = a.create(reg_options(), kOrigin).raw_id;
  a.with_tamper(Tamper::FrozenCounter);
  EXPECT_EQ(error_of([&] { a.get(auth_options(), kOrigin); }), Errc::InvalidArgument);
  auto clone = a.create(reg_options(), kOrigin);
  EXPECT_EQ(clone.raw_id, id);
}

TEST(Emulator, CreateTampers) {
  auto a = EmulatedAuthenticator::deterministic(11);
  a.create(reg_options(), kOrigin);
  a.with_tamper(Tamper::BadSignature);
  auto r = a.create(reg_options(), kOrigin);
  auto p = parse_attestation(r);
  auto att = webauthn::decode_cbor(r.attestation_object);
  EXPECT_EQ(p.fmt, "packed");
  EXPECT_FALSE(webauthn::verify_es256(p.data.attested_credential->public_key,
                                      concat(att.find("authData")->as_bytes(), crypto::sha256(r.client_data_json)),
                                      p.statement.find("sig")->as_bytes()));
  a.with_tamper(Tamper::WrongType);
  EXPECT_EQ(client_data(a.create(reg_options(), kOrigin).client_data_json)["type"], "webauthn.get");
  a.with_tamper(Tamper::WrongRpHash);
  EXPECT_NE(hex_encode(parse_attestation(a.create(reg_options(), kOrigin)).data.rp_id_hash),
            hex_encode(crypto::sha256(to_bytes("localhost"))));
}

#include "passgate/webauthn/cose.hpp"

#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>
#include <openssl/x509.h>

#include <memory>

#include "passgate/common/error.hpp"

namespace passgate::webauthn {
namespace {

// COSE_Key labels.
constexpr std::int64_t kLabelKty = 1;
constexpr std::int64_t kLabelAlg = 3;
constexpr std::int64_t kLabelCrv = -1;
constexpr std::int64_t kLabelX = -2;
constexpr std::int64_t kLabelY = -3;

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct GroupDeleter {
  void operator()(EC_GROUP* p) const { EC_GROUP_free(p); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct ParamBldDeleter {
  void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); }
};
struct ParamDeleter {
  void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};
struct X509Deleter {
  void operator()(X509* p) const { X509_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

Bytes uncompressed_point(const CosePublicKey& key) {
  Bytes out;
  out.reserve(65);
  out.push_back(0x04);
  out.insert(out.end(), key.x.begin(), key.x.end());
  out.insert(out.end(), key.y.begin(), key.y.end());
  return out;
}

PkeyPtr to_pkey(const CosePublicKey& key) {
  auto point = uncompressed_point(key);
  std::unique_ptr<OSSL_PARAM_BLD, ParamBldDeleter> bld(OSSL_PARAM_BLD_new());
  if (!bld ||
      !OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) ||
      !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, point.data(),
                                        point.size())) {
    return nullptr;
  }
  std::unique_ptr<OSSL_PARAM, ParamDeleter> params(OSSL_PARAM_BLD_to_param(bld.get()));
  std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter> ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) <= 0 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, EVP_PKEY_PUBLIC_KEY, params.get()) <= 0) {
    return nullptr;
  }
  return PkeyPtr(raw);
}

bool verify_with(EVP_PKEY* pkey, ByteView message, ByteView der_signature) {
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> md(EVP_MD_CTX_new());
  if (!md || EVP_DigestVerifyInit(md.get(), nullptr, EVP_sha256(), nullptr, pkey) != 1) {
    return false;
  }
  return EVP_DigestVerify(md.get(), der_signature.data(), der_signature.size(), message.data(),
                          message.size()) == 1;
}

std::array<std::uint8_t, 32> coordinate(const CborValue& map, std::int64_t label) {
  const auto* v = map.find(label);
  if (v == nullptr || !v->is_bytes() || v->as_bytes().size() != 32) {
    throw Error(Errc::InvalidPublicKey, "COSE key coordinate must be a 32-byte string");
  }
  std::array<std::uint8_t, 32> out{};
  std::copy(v->as_bytes().begin(), v->as_bytes().end(), out.begin());
  return out;
}

std::int64_t required_int(const CborValue& map, std::int64_t label) {
  const auto* v = map.find(label);
  auto i = v ? v->as_int64() : std::nullopt;
  if (!i) throw Error(Errc::UnsupportedAlgorithm, "COSE key is missing kty/alg/crv");
  return *i;
}

}  // namespace

CosePublicKey parse_cose_key(const CborValue& value) {
  if (!value.is_map()) throw Error(Errc::InvalidPublicKey, "COSE key is not a map");
  CosePublicKey key;
  key.key_type = required_int(value, kLabelKty);
  key.algorithm = required_int(value, kLabelAlg);
  if (key.key_type != kCoseKeyTypeEc2 || key.algorithm != kCoseAlgEs256) {
    throw Error(Errc::UnsupportedAlgorithm, "only EC2/ES256 credentials are supported");
  }
  key.curve = required_int(value, kLabelCrv);
  if (key.curve != kCoseCurveP256) throw Error(Errc::UnsupportedAlgorithm, "only P-256 is supported");
  key.x = coordinate(value, kLabelX);
  key.y = coordinate(value, kLabelY);
  if (!is_on_p256(key)) throw Error(Errc::InvalidPublicKey, "public key is not a point on P-256");
  return key;
}

bool is_on_p256(const CosePublicKey& key) {
  std::unique_ptr<EC_GROUP, GroupDeleter> group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  std::unique_ptr<EC_POINT, PointDeleter> point(group ? EC_POINT_new(group.get()) : nullptr);
  if (!point) return false;
  auto encoded = uncompressed_point(key);
  if (EC_POINT_oct2point(group.get(), point.get(), encoded.data(), encoded.size(), nullptr) != 1) {
    return false;
  }
  return EC_POINT_is_on_curve(group.get(), point.get(), nullptr) == 1 &&
         EC_POINT_is_at_infinity(group.get(), point.get()) == 0;
}

bool verify_es256(const CosePublicKey& key, ByteView message, ByteView der_signature) {
  if (key.key_type != kCoseKeyTypeEc2 || key.algorithm != kCoseAlgEs256 ||
      key.curve != kCoseCurveP256) {
    return false;
  }
  auto pkey = to_pkey(key);
  return pkey && verify_with(pkey.get(), message, der_signature);
}

bool verify_es256_with_certificate(ByteView der_certificate, ByteView message,
                                   ByteView der_signature) {
  const unsigned char* p = der_certificate.data();
  std::unique_ptr<X509, X509Deleter> cert(
      d2i_X509(nullptr, &p, static_cast<long>(der_certificate.size())));
  if (!cert) return false;
  EVP_PKEY* pkey = X509_get0_pubkey(cert.get());
  if (pkey == nullptr || EVP_PKEY_get_base_id(pkey) != EVP_PKEY_EC) return false;
  return verify_with(pkey, message, der_signature);
}

}  // namespace passgate::webauthn

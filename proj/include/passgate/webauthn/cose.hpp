#pragma once

#include "passgate/common/bytes.hpp"
#include "passgate/webauthn/cbor.hpp"
#include "passgate/webauthn/cose_key.hpp"

namespace passgate::webauthn {

/// Reads a COSE_Key map. Only EC2 / ES256 / P-256 is accepted.
/// Errors: UnsupportedAlgorithm (other kty/alg/crv), InvalidPublicKey
/// (missing or wrong-sized coordinates, point not on the curve).
CosePublicKey parse_cose_key(const CborValue& value);

bool is_on_p256(const CosePublicKey& key);

/// ECDSA P-256 / SHA-256 over `message`, DER-encoded signature. Returns false
/// for a signature that does not verify or does not parse.
bool verify_es256(const CosePublicKey& key, ByteView message, ByteView der_signature);

/// Same check with the key taken from a DER X.509 certificate (packed
/// attestation with x5c). No chain or trust validation is done.
bool verify_es256_with_certificate(ByteView der_certificate, ByteView message,
                                   ByteView der_signature);

}  // namespace passgate::webauthn

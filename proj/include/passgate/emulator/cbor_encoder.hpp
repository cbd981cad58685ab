#pragma once

#include "passgate/common/bytes.hpp"
#include "passgate/webauthn/cbor.hpp"

namespace passgate::emulator {

/// Definite-length encoding with the shortest argument form. Map entries are
/// written in the order given, so callers that want CTAP2 canonical form
/// must build maps in canonical key order.
Bytes encode_cbor(const webauthn::CborValue& value);

}  // namespace passgate::emulator

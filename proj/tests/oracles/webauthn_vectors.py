"""Frozen WebAuthn vectors built with pyca/cryptography, independent of the C++ code."""
import base64, hashlib, json, struct, datetime
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives import hashes, serialization
from cryptography import x509
from cryptography.x509.oid import NameOID

def b64u(b): return base64.urlsafe_b64encode(b).rstrip(b"=").decode()
def head(major, n):
    if n < 24: return bytes([major << 5 | n])
    if n < 256: return bytes([major << 5 | 24, n])
    if n < 65536: return bytes([major << 5 | 25]) + struct.pack(">H", n)
    return bytes([major << 5 | 26]) + struct.pack(">I", n)
def tstr(s): b = s.encode(); return head(3, len(b)) + b
def bstr(b): return head(2, len(b)) + b

key = ec.derive_private_key(0x1d2c3b4a59687786a5b4c3d2e1f00f1e2d3c4b5a69788796a5b4c3d2e1f0a1b2, ec.SECP256R1())
nums = key.public_key().public_numbers()
x, y = nums.x.to_bytes(32, "big"), nums.y.to_bytes(32, "big")
cose = bytes.fromhex("a5010203262001") + bytes([0x21]) + bstr(x) + bytes([0x22]) + bstr(y)

rp_id, origin = "localhost", "http://localhost:8080"
challenge = bytes(range(32))
cred_id = bytes.fromhex("0f1e2d3c4b5a69788796a5b4c3d2e1f0")
aaguid = bytes(16)
rp_hash = hashlib.sha256(rp_id.encode()).digest()

cdj_create = json.dumps({"type": "webauthn.create", "challenge": b64u(challenge), "origin": origin}, separators=(",", ":")).encode()
auth_reg = rp_hash + bytes([0x45]) + struct.pack(">I", 0) + aaguid + struct.pack(">H", len(cred_id)) + cred_id + cose
sig_reg = key.sign(auth_reg + hashlib.sha256(cdj_create).digest(), ec.ECDSA(hashes.SHA256()))
att_packed = (bytes([0xa3]) + tstr("fmt") + tstr("packed") + tstr("attStmt") + bytes([0xa2]) + tstr("alg") + bytes([0x26])
              + tstr("sig") + bstr(sig_reg) + tstr("authData") + bstr(auth_reg))

# packed with a self-signed x5c certificate from a separate attestation key
att_key = ec.derive_private_key(0x7a6b5c4d3e2f10011223344556677889aabbccddeeff00112233445566778899, ec.SECP256R1())
name = x509.Name([x509.NameAttribute(NameOID.COMMON_NAME, "Oracle Attestation")])
cert = (x509.CertificateBuilder().subject_name(name).issuer_name(name).public_key(att_key.public_key())
        .serial_number(1).not_valid_before(datetime.datetime(2024, 1, 1)).not_valid_after(datetime.datetime(2034, 1, 1))
        .sign(att_key, hashes.SHA256()))
der = cert.public_bytes(serialization.Encoding.DER)
sig_x5c = att_key.sign(auth_reg + hashlib.sha256(cdj_create).digest(), ec.ECDSA(hashes.SHA256()))
att_x5c = (bytes([0xa3]) + tstr("fmt") + tstr("packed") + tstr("attStmt") + bytes([0xa3]) + tstr("alg") + bytes([0x26])
           + tstr("sig") + bstr(sig_x5c) + tstr("x5c") + bytes([0x81]) + bstr(der) + tstr("authData") + bstr(auth_reg))

cdj_get = json.dumps({"type": "webauthn.get", "challenge": b64u(challenge), "origin": origin}, separators=(",", ":")).encode()
auth_get = rp_hash + bytes([0x05]) + struct.pack(">I", 7)
sig_get = key.sign(auth_get + hashlib.sha256(cdj_get).digest(), ec.ECDSA(hashes.SHA256()))

for k, v in [("x", x), ("y", y), ("cred_id", cred_id), ("cdj_create", cdj_create), ("auth_reg", auth_reg),
             ("att_packed", att_packed), ("att_x5c", att_x5c), ("cdj_get", cdj_get), ("auth_get", auth_get),
             ("sig_get", sig_get)]:
    print(f'inline const char* k_{k} = "{v.hex()}";')

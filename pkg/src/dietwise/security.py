"""Field-level encryption at rest (AES-256-GCM) and TLS configuration.

A single 256-bit master key encrypts sensitive profile fields. The key
comes from the DIETWISE_MASTER_KEY environment variable (64 hex chars)
or a key file; it is never logged or serialized.
"""

from __future__ import annotations

import json
import os
import secrets
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .errors import ConfigurationError, ValidationError

ALGORITHM = "AES-256-GCM"
NONCE_BYTES = 12
MASTER_KEY_ENV = "DIETWISE_MASTER_KEY"


class AuthenticationFailure(ValidationError):
    """Ciphertext or tag was tampered with."""

    code = "ciphertext_tampered"


class WrongKeyError(ValidationError):
    code = "wrong_key"


@dataclass(frozen=True)
class EncryptedBlob:
    key_id: str
    nonce: bytes
    ciphertext_and_tag: bytes
    algorithm: str = ALGORITHM

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "key_id": self.key_id,
            "nonce": self.nonce.hex(),
            "ciphertext_and_tag": self.ciphertext_and_tag.hex(),
        }

    @classmethod
    def from_dict(cls, record: dict) -> "EncryptedBlob":
        return cls(
            key_id=record["key_id"],
            nonce=bytes.fromhex(record["nonce"]),
            ciphertext_and_tag=bytes.fromhex(record["ciphertext_and_tag"]),
            algorithm=record.get("algorithm", ALGORITHM),
        )


@dataclass(frozen=True)
class MasterKeyConfig:
    key_id: str
    key_material: bytes = field(repr=False)
    rotation_note: str = ""

    def __post_init__(self):
        if len(self.key_material) != 32:
            raise ConfigurationError(
                f"master key must be 256 bits (32 bytes), got {len(self.key_material)}")

    def __repr__(self) -> str:  # key material never leaks through repr/logs
        return f"MasterKeyConfig(key_id={self.key_id!r})"


def load_master_key(key_file: str | None = None, key_id: str = "master-v1") -> MasterKeyConfig:
    """Read the master key from a key file or DIETWISE_MASTER_KEY (hex)."""
    if key_file:
        with open(key_file, encoding="utf-8") as fh:
            hex_key = fh.read().strip()
    else:
        hex_key = os.environ.get(MASTER_KEY_ENV, "")
    if not hex_key:
        raise ConfigurationError(
            f"no master key: set {MASTER_KEY_ENV} (64 hex chars) or pass --key-file")
    try:
        material = bytes.fromhex(hex_key)
    except ValueError as exc:
        raise ConfigurationError("master key is not valid hex") from exc
    return MasterKeyConfig(key_id=key_id, key_material=material)


def generate_master_key(key_id: str = "master-v1") -> MasterKeyConfig:
    return MasterKeyConfig(key_id=key_id, key_material=secrets.token_bytes(32))


def encrypt_field(plaintext: bytes, key: MasterKeyConfig) -> EncryptedBlob:
    nonce = secrets.token_bytes(NONCE_BYTES)
    ciphertext = AESGCM(key.key_material).encrypt(nonce, plaintext, None)
    return EncryptedBlob(key_id=key.key_id, nonce=nonce, ciphertext_and_tag=ciphertext)


def decrypt_field(blob: EncryptedBlob, key: MasterKeyConfig) -> bytes:
    if blob.key_id != key.key_id:
        raise WrongKeyError(
            f"blob encrypted under key {blob.key_id!r}, have {key.key_id!r}")
    try:
        return AESGCM(key.key_material).decrypt(blob.nonce, blob.ciphertext_and_tag, None)
    except InvalidTag as exc:
        raise AuthenticationFailure("ciphertext failed authentication") from exc


def encrypt_json(value, key: MasterKeyConfig) -> EncryptedBlob:
    return encrypt_field(json.dumps(value, sort_keys=True).encode("utf-8"), key)


def decrypt_json(blob: EncryptedBlob, key: MasterKeyConfig):
    return json.loads(decrypt_field(blob, key).decode("utf-8"))


@dataclass(frozen=True)
class TlsConfig:
    cert_path: str
    key_path: str
    min_version: str = "1.2"

    def validate(self) -> None:
        if not os.path.exists(self.cert_path):
            raise ConfigurationError(f"tls.cert_path not found: {self.cert_path}")
        if not os.path.exists(self.key_path):
            raise ConfigurationError(f"tls.key_path not found: {self.key_path}")
        if self.min_version not in ("1.2", "1.3"):
            raise ConfigurationError("tls.min_version must be 1.2 or 1.3")

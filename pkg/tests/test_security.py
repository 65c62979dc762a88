import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dietwise import security
from dietwise.errors import ConfigurationError


def test_round_trip(master_key):
    blob = security.encrypt_field(b"hello", master_key)
    assert security.decrypt_field(blob, master_key) == b"hello"


def test_fresh_nonce_and_ciphertext(master_key):
    first = security.encrypt_field(b"same plaintext", master_key)
    second = security.encrypt_field(b"same plaintext", master_key)
    assert first.nonce != second.nonce
    assert first.ciphertext_and_tag != second.ciphertext_and_tag


def test_empty_plaintext(master_key):
    blob = security.encrypt_field(b"", master_key)
    assert security.decrypt_field(blob, master_key) == b""


def test_tamper_detection(master_key):
    blob = security.encrypt_field(b"sensitive", master_key)
    flipped = bytearray(blob.ciphertext_and_tag)
    flipped[0] ^= 0x01
    tampered = security.EncryptedBlob(
        key_id=blob.key_id, nonce=blob.nonce, ciphertext_and_tag=bytes(flipped))
    with pytest.raises(security.AuthenticationFailure):
        security.decrypt_field(tampered, master_key)


def test_wrong_key_id(master_key):
    blob = security.encrypt_field(b"data", master_key)
    other = security.generate_master_key(key_id="master-v2")
    with pytest.raises(security.WrongKeyError):
        security.decrypt_field(blob, other)


def test_short_key_rejected():
    with pytest.raises(ConfigurationError, match="256 bits"):
        security.MasterKeyConfig(key_id="k", key_material=b"short")


def test_key_material_not_in_repr(master_key):
    assert master_key.key_material.hex() not in repr(master_key)


def test_blob_serialization_round_trip(master_key):
    blob = security.encrypt_field(b"payload", master_key)
    restored = security.EncryptedBlob.from_dict(blob.to_dict())
    assert security.decrypt_field(restored, master_key) == b"payload"


def test_load_master_key_from_env(monkeypatch):
    material = "ab" * 32
    monkeypatch.setenv(security.MASTER_KEY_ENV, material)
    key = security.load_master_key()
    assert key.key_material == bytes.fromhex(material)


def test_load_master_key_missing(monkeypatch):
    monkeypatch.delenv(security.MASTER_KEY_ENV, raising=False)
    with pytest.raises(ConfigurationError, match="no master key"):
        security.load_master_key()


def test_load_master_key_from_file(tmp_path):
    path = tmp_path / "key.hex"
    path.write_text("cd" * 32)
    key = security.load_master_key(key_file=str(path))
    assert key.key_material == bytes.fromhex("cd" * 32)


@settings(max_examples=30, deadline=None)
@given(st.binary(min_size=0, max_size=4096))
def test_round_trip_property(master_key, message):
    blob = security.encrypt_field(message, master_key)
    assert security.decrypt_field(blob, master_key) == message


def test_round_trip_large_message(master_key):
    message = bytes(range(256)) * 4096  # 1 MiB
    blob = security.encrypt_field(message, master_key)
    assert security.decrypt_field(blob, master_key) == message


def test_nonce_uniqueness_100k(master_key):
    nonces = {security.encrypt_field(b"x", master_key).nonce for _ in range(100_000)}
    assert len(nonces) == 100_000

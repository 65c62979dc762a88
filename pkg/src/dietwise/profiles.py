"""User accounts, health profiles, and sessions.

Credentials are salted scrypt hashes; health fields (conditions,
restrictions, goals) are encrypted at rest with the master key so the
persisted bytes never contain the plaintext enum names.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
import secrets
import threading
import time
import uuid
from dataclasses import dataclass, replace

from . import security
from .errors import AuthenticationError, ConflictError, ValidationError

CONDITIONS = frozenset({"diabetes-type-1", "diabetes-type-2", "hypertension", "none"})
RESTRICTIONS = frozenset(
    {"nut-allergy", "gluten-free", "vegetarian", "vegan", "lactose-free"})
GOALS = frozenset({"weight-loss", "muscle-gain", "maintenance"})

MIN_SECRET_LEN = 8
DEFAULT_SESSION_TTL_S = 24 * 3600

# scrypt work factor; default tuned for ~100 ms per verification on desk
# hardware. Tests pass a lower cost to keep the suite fast.
DEFAULT_SCRYPT_N = 2 ** 15
SCRYPT_R = 8
SCRYPT_P = 1


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    credential_hash: bytes
    display_name: str
    conditions: frozenset[str] = frozenset()
    restrictions: frozenset[str] = frozenset()
    goals: frozenset[str] = frozenset()
    is_admin: bool = False


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str
    expires_at: float  # unix seconds, UTC


def _check_enums(conditions, restrictions, goals):
    for value in conditions:
        if value not in CONDITIONS:
            raise ValidationError(f"unknown condition {value!r}")
    for value in restrictions:
        if value not in RESTRICTIONS:
            raise ValidationError(f"unknown restriction {value!r}")
    for value in goals:
        if value not in GOALS:
            raise ValidationError(f"unknown goal {value!r}")


def new_session_token() -> str:
    """128-bit cryptographically random opaque token."""
    return secrets.token_hex(16)


class ProfileStore:
    """Accounts + sessions over an optional persistence file.

    When ``path`` is given, profile records are appended to a JSONL
    write-ahead log (last record per user wins on replay). Health fields
    are stored only as AES-GCM blobs.
    """

    def __init__(self, master_key: security.MasterKeyConfig,
                 path: str | None = None,
                 session_ttl_s: float = DEFAULT_SESSION_TTL_S,
                 scrypt_n: int = DEFAULT_SCRYPT_N,
                 clock=time.time):
        self.master_key = master_key
        self.session_ttl_s = session_ttl_s
        self.scrypt_n = scrypt_n
        self.clock = clock
        self.path = path
        self._lock = threading.Lock()
        self._users: dict[str, UserProfile] = {}
        self._names: dict[str, str] = {}  # casefolded name -> user_id
        self._salts: dict[str, bytes] = {}
        self._sessions: dict[str, Session] = {}
        self._fh = None
        if path:
            if os.path.exists(path):
                self._replay(path)
            self._fh = open(path, "a", encoding="utf-8")

    # -- persistence ------------------------------------------------------

    def _replay(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                profile, salt = self._record_to_profile(record)
                self._users[profile.user_id] = profile
                self._names[profile.display_name.casefold()] = profile.user_id
                self._salts[profile.user_id] = salt

    def _profile_to_record(self, profile: UserProfile) -> dict:
        health = {
            "conditions": sorted(profile.conditions),
            "restrictions": sorted(profile.restrictions),
            "goals": sorted(profile.goals),
        }
        blob = security.encrypt_json(health, self.master_key)
        return {
            "user_id": profile.user_id,
            "display_name": profile.display_name,
            "credential_hash": profile.credential_hash.hex(),
            "salt": self._salts[profile.user_id].hex(),
            "is_admin": profile.is_admin,
            "health": blob.to_dict(),
        }

    def _record_to_profile(self, record: dict) -> tuple[UserProfile, bytes]:
        health = security.decrypt_json(
            security.EncryptedBlob.from_dict(record["health"]), self.master_key)
        profile = UserProfile(
            user_id=record["user_id"],
            credential_hash=bytes.fromhex(record["credential_hash"]),
            display_name=record["display_name"],
            conditions=frozenset(health["conditions"]),
            restrictions=frozenset(health["restrictions"]),
            goals=frozenset(health["goals"]),
            is_admin=record.get("is_admin", False),
        )
        return profile, bytes.fromhex(record["salt"])

    def _persist(self, profile: UserProfile) -> None:
        if self._fh is None:
            return
        self._fh.write(json.dumps(self._profile_to_record(profile), sort_keys=True) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def serialized_profile_bytes(self, user_id: str) -> bytes:
        """At-rest representation of one profile (for no-plaintext checks)."""
        with self._lock:
            profile = self._users[user_id]
            return json.dumps(self._profile_to_record(profile), sort_keys=True).encode()

    # -- credentials ------------------------------------------------------

    def _hash_secret(self, secret: str, salt: bytes) -> bytes:
        return hashlib.scrypt(secret.encode("utf-8"), salt=salt,
                              n=self.scrypt_n, r=SCRYPT_R, p=SCRYPT_P, dklen=32)

    def register(self, name: str, secret: str,
                 conditions=(), restrictions=(), goals=(),
                 is_admin: bool = False) -> str:
        if not name.strip():
            raise ValidationError("name must be nonempty")
        if len(secret) < MIN_SECRET_LEN:
            raise ValidationError(f"secret must be at least {MIN_SECRET_LEN} characters")
        _check_enums(conditions, restrictions, goals)
        with self._lock:
            if name.casefold() in self._names:
                raise ConflictError(f"name {name!r} already registered")
            user_id = uuid.uuid4().hex
            salt = secrets.token_bytes(16)
            self._salts[user_id] = salt
            profile = UserProfile(
                user_id=user_id,
                credential_hash=self._hash_secret(secret, salt),
                display_name=name,
                conditions=frozenset(conditions),
                restrictions=frozenset(restrictions),
                goals=frozenset(goals),
                is_admin=is_admin,
            )
            self._users[user_id] = profile
            self._names[name.casefold()] = user_id
            self._persist(profile)
        return user_id

    def login(self, name: str, secret: str) -> Session:
        # uniform failure: same message whether the name or secret is wrong
        user_id = self._names.get(name.casefold())
        if user_id is not None:
            expected = self._users[user_id].credential_hash
            candidate = self._hash_secret(secret, self._salts[user_id])
            if hmac.compare_digest(expected, candidate):
                session = Session(
                    token=new_session_token(),
                    user_id=user_id,
                    expires_at=self.clock() + self.session_ttl_s,
                )
                with self._lock:
                    self._sessions[session.token] = session
                return session
        raise AuthenticationError("invalid credentials")

    def authenticate(self, token: str) -> UserProfile:
        session = self._sessions.get(token)
        if session is None or session.expires_at <= self.clock():
            raise AuthenticationError("invalid or expired session")
        return self._users[session.user_id]

    def logout(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)

    # -- profile updates --------------------------------------------------

    def update_profile(self, token: str, conditions=None, restrictions=None,
                       goals=None, display_name=None) -> UserProfile:
        profile = self.authenticate(token)
        _check_enums(conditions or (), restrictions or (), goals or ())
        with self._lock:
            current = self._users[profile.user_id]
            updated = replace(
                current,
                conditions=frozenset(conditions) if conditions is not None else current.conditions,
                restrictions=frozenset(restrictions) if restrictions is not None else current.restrictions,
                goals=frozenset(goals) if goals is not None else current.goals,
                display_name=display_name if display_name is not None else current.display_name,
            )
            if updated.display_name.casefold() != current.display_name.casefold():
                if updated.display_name.casefold() in self._names:
                    raise ConflictError(f"name {updated.display_name!r} already registered")
                del self._names[current.display_name.casefold()]
                self._names[updated.display_name.casefold()] = profile.user_id
            self._users[profile.user_id] = updated
            self._persist(updated)
        return updated

    def get_profile(self, token: str) -> UserProfile:
        return self.authenticate(token)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()

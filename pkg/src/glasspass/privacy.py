"""Encryption management: CID anonymization, the local mapping database,
requester-identity hashing, and payload sealing at rest.

Anonymization is a keyed SHA-256 over the deployment secret and the
canonical cid bytes. The resulting handle is safe to publish on the
ledger and DHT; only a holder of the local CidMap can reverse it.
Erasure clears the plaintext cid from the mapping and leaves a
tombstone carrying the erasure time, so later audits can prove deletion
without retaining personal data.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from glasspass.cas import Cid
from glasspass.errors import (
    ConfigurationError,
    Erased,
    IntegrityViolation,
    InvalidArgument,
    NotFound,
)

KEY_BYTES = 32
NONCE_BYTES = 12
SEAL_OVERHEAD = NONCE_BYTES + 16  # nonce prefix + GCM tag


@dataclass(frozen=True)
class AnonCid:
    """One-way public handle for a stored cid."""

    value: bytes

    def __post_init__(self):
        if len(self.value) != 32:
            raise InvalidArgument(f"anon cid must be 32 bytes, got {len(self.value)}")

    @property
    def text(self) -> str:
        return self.value.hex()

    @classmethod
    def from_text(cls, text: str) -> "AnonCid":
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidArgument(f"malformed anon cid text: {text!r}") from exc
        return cls(raw)


def anonymize_cid(cid: Cid, deployment_secret: bytes) -> AnonCid:
    """Keyed hash of the canonical cid bytes (pure; no mapping side effect)."""
    if len(deployment_secret) != KEY_BYTES:
        raise InvalidArgument("deployment secret must be 32 bytes")
    return AnonCid(hashlib.sha256(deployment_secret + cid.to_bytes()).digest())


def hash_requester(account_id: str) -> bytes:
    """Unkeyed SHA-256 of the account id; shared vocabulary for audit logs."""
    return hashlib.sha256(account_id.encode("utf-8")).digest()


def seal(plaintext: bytes, key: bytes) -> bytes:
    """AES-256-GCM with a fresh random nonce prepended to the ciphertext."""
    if len(key) != KEY_BYTES:
        raise InvalidArgument("payload key must be 32 bytes")
    nonce = secrets.token_bytes(NONCE_BYTES)
    return nonce + AESGCM(key).encrypt(nonce, plaintext, None)


def open_sealed(sealed: bytes, key: bytes) -> bytes:
    if len(key) != KEY_BYTES:
        raise InvalidArgument("payload key must be 32 bytes")
    if len(sealed) < SEAL_OVERHEAD:
        raise IntegrityViolation("sealed payload too short")
    nonce, body = sealed[:NONCE_BYTES], sealed[NONCE_BYTES:]
    try:
        return AESGCM(key).decrypt(nonce, body, None)
    except InvalidTag as exc:
        raise IntegrityViolation("sealed payload failed authentication") from exc


@dataclass(frozen=True)
class KeyRing:
    deployment_secret: bytes
    payload_key: bytes

    def __post_init__(self):
        for name in ("deployment_secret", "payload_key"):
            if len(getattr(self, name)) != KEY_BYTES:
                raise InvalidArgument(f"{name} must be {KEY_BYTES} bytes")

    @classmethod
    def generate(cls) -> "KeyRing":
        return cls(secrets.token_bytes(KEY_BYTES), secrets.token_bytes(KEY_BYTES))

    @classmethod
    def load(cls, path: str | Path) -> "KeyRing":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"keyfile not found: {path}")
        data = json.loads(path.read_text("utf-8"))
        try:
            return cls(
                bytes.fromhex(data["deployment_secret"]),
                bytes.fromhex(data["payload_key"]),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"malformed keyfile {path}: {exc}") from exc

    def save(self, path: str | Path):
        path = Path(path)
        payload = json.dumps(
            {
                "deployment_secret": self.deployment_secret.hex(),
                "payload_key": self.payload_key.hex(),
            },
            indent=2,
        )
        path.write_text(payload + "\n", "utf-8")
        os.chmod(path, 0o600)


@dataclass
class MapEntry:
    cid: Cid | None
    tombstone: bool
    erased_at: float | None


class CidMap:
    """Local anon-cid to cid database, persisted encrypted.

    Tombstoned entries keep only the anon handle and the erasure time.
    """

    def __init__(self, path: str | Path, payload_key: bytes):
        self._path = Path(path)
        self._key = payload_key
        self._lock = threading.Lock()
        self._entries: dict[str, MapEntry] = {}
        if self._path.exists():
            self._load()

    def _load(self):
        raw = open_sealed(self._path.read_bytes(), self._key)
        for item in json.loads(raw.decode("utf-8")):
            cid = Cid.from_text(item["cid"]) if item["cid"] else None
            self._entries[item["anon"]] = MapEntry(
                cid=cid, tombstone=item["tombstone"], erased_at=item["erased_at"]
            )

    def _save_locked(self):
        items = [
            {
                "anon": anon,
                "cid": entry.cid.text if entry.cid else None,
                "tombstone": entry.tombstone,
                "erased_at": entry.erased_at,
            }
            for anon, entry in sorted(self._entries.items())
        ]
        sealed = seal(json.dumps(items, sort_keys=True).encode("utf-8"), self._key)
        tmp = self._path.with_suffix(".tmp")
        tmp.write_bytes(sealed)
        os.replace(tmp, self._path)

    def add(self, anon: AnonCid, cid: Cid):
        with self._lock:
            existing = self._entries.get(anon.text)
            if existing is not None:
                if existing.tombstone:
                    raise Erased(
                        f"mapping for {anon.text} was erased", erased_at=existing.erased_at
                    )
                if existing.cid != cid:
                    raise InvalidArgument(f"anon cid {anon.text} already maps elsewhere")
                return
            self._entries[anon.text] = MapEntry(cid=cid, tombstone=False, erased_at=None)
            self._save_locked()

    def resolve(self, anon: AnonCid) -> Cid:
        entry = self._entries.get(anon.text)
        if entry is None:
            raise NotFound(f"unknown anon cid {anon.text}")
        if entry.tombstone:
            raise Erased(f"mapping for {anon.text} was erased", erased_at=entry.erased_at)
        assert entry.cid is not None
        return entry.cid

    def erase_mapping(self, anon: AnonCid, at: float) -> float:
        """Clear the plaintext cid; idempotent. Returns the erasure time."""
        with self._lock:
            entry = self._entries.get(anon.text)
            if entry is None:
                raise NotFound(f"unknown anon cid {anon.text}")
            if entry.tombstone:
                assert entry.erased_at is not None
                return entry.erased_at
            entry.cid = None
            entry.tombstone = True
            entry.erased_at = at
            self._save_locked()
            return at

    def entries(self) -> dict[str, MapEntry]:
        return dict(self._entries)

    def __contains__(self, anon: AnonCid) -> bool:
        return anon.text in self._entries

    def __len__(self) -> int:
        return len(self._entries)


class PrivacyManager:
    """Keyring plus mapping database; the one component that may see both
    sides of an anonymization."""

    def __init__(self, keyring: KeyRing, cidmap_path: str | Path):
        if keyring is None:
            raise ConfigurationError("keyring required")
        self.keyring = keyring
        self.cidmap = CidMap(cidmap_path, keyring.payload_key)

    def anonymize(self, cid: Cid) -> AnonCid:
        anon = anonymize_cid(cid, self.keyring.deployment_secret)
        self.cidmap.add(anon, cid)
        return anon

    def resolve(self, anon: AnonCid) -> Cid:
        return self.cidmap.resolve(anon)

    def erase_mapping(self, anon: AnonCid, at: float) -> float:
        return self.cidmap.erase_mapping(anon, at)

    def seal(self, plaintext: bytes) -> bytes:
        return seal(plaintext, self.keyring.payload_key)

    def open(self, sealed: bytes) -> bytes:
        return open_sealed(sealed, self.keyring.payload_key)

"""Content identifiers.

A Cid is derived purely from block content: SHA-256 over a two-byte
(version, codec) header followed by the payload. The header makes the
identifier self-describing without any external codec table, and means
the same bytes stored as a raw block and as a DAG node get distinct
identifiers.

Text form: "b" + unpadded lowercase base32 of header||digest. Lowercase
base32 survives case-insensitive transports (URLs, filenames).
"""

from __future__ import annotations

import base64
import hashlib
import re
from dataclasses import dataclass

from glasspass.errors import InvalidArgument

CID_VERSION = 1
CODEC_RAW = 0
CODEC_DAG_NODE = 1

_KNOWN_CODECS = (CODEC_RAW, CODEC_DAG_NODE)
_TEXT_RE = re.compile(r"^b[a-z2-7]{55}$")


@dataclass(frozen=True)
class Cid:
    """Self-describing content identifier: (version, codec, SHA-256 digest)."""

    version: int
    codec: int
    digest: bytes

    def __post_init__(self):
        if self.version != CID_VERSION:
            raise InvalidArgument(f"unsupported cid version {self.version}")
        if self.codec not in _KNOWN_CODECS:
            raise InvalidArgument(f"unknown cid codec {self.codec}")
        if len(self.digest) != 32:
            raise InvalidArgument("cid digest must be 32 bytes")

    @property
    def text(self) -> str:
        raw = bytes((self.version, self.codec)) + self.digest
        b32 = base64.b32encode(raw).decode("ascii").rstrip("=").lower()
        return "b" + b32

    def to_bytes(self) -> bytes:
        """Canonical 34-byte form: header followed by digest."""
        return bytes((self.version, self.codec)) + self.digest

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Cid":
        if len(raw) != 34:
            raise InvalidArgument(f"canonical cid must be 34 bytes, got {len(raw)}")
        return cls(version=raw[0], codec=raw[1], digest=raw[2:])

    @classmethod
    def from_text(cls, text: str) -> "Cid":
        if not _TEXT_RE.match(text):
            raise InvalidArgument(f"malformed cid text {text!r}")
        b32 = text[1:].upper()
        pad = "=" * (-len(b32) % 8)
        raw = base64.b32decode(b32 + pad)
        if len(raw) != 34:
            raise InvalidArgument(f"cid text decodes to {len(raw)} bytes, expected 34")
        return cls(version=raw[0], codec=raw[1], digest=raw[2:])

    def __str__(self) -> str:
        return self.text


def compute_cid(payload: bytes, codec: int = CODEC_RAW) -> Cid:
    """Derive the Cid for a payload. Pure function of (codec, payload)."""
    if codec not in _KNOWN_CODECS:
        raise InvalidArgument(f"unknown cid codec {codec}")
    header = bytes((CID_VERSION, codec))
    digest = hashlib.sha256(header + payload).digest()
    return Cid(version=CID_VERSION, codec=codec, digest=digest)

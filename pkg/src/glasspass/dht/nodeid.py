"""Node identities and the XOR metric."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from glasspass.errors import InvalidArgument

ID_BITS = 256
_MAX_ID = (1 << ID_BITS) - 1


@dataclass(frozen=True, order=True)
class NodeId:
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= _MAX_ID:
            raise InvalidArgument(f"node id out of range: {self.bits}")

    @property
    def hex(self) -> str:
        return format(self.bits, "064x")

    @classmethod
    def from_hex(cls, text: str) -> "NodeId":
        try:
            return cls(int(text, 16))
        except ValueError as exc:
            raise InvalidArgument(f"malformed node id: {text!r}") from exc


def node_id_from_nonce(nonce: bytes) -> NodeId:
    """Uniform identity from an arbitrary nonce, no key pairs involved."""
    return NodeId(int.from_bytes(hashlib.sha256(nonce).digest(), "big"))


def xor_distance(a: NodeId, b: NodeId) -> int:
    return a.bits ^ b.bits


def bucket_index(owner: NodeId, other: NodeId) -> int:
    """Index of the most significant differing bit, in [0, 255]."""
    d = xor_distance(owner, other)
    if d == 0:
        raise InvalidArgument("bucket index undefined for identical node ids")
    return d.bit_length() - 1

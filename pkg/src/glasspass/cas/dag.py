"""Merkle DAG nodes.

A DagNode lists its children as (cid, name, cumulative_size) links. The
node is itself stored as a block whose payload is the canonical JSON
encoding below, so the node's Cid covers its links and the structure is
tamper-evident all the way to the leaves. Children are hashed before
parents, which makes cycles impossible by construction.

Layout here is single-level: a root links directly to every leaf chunk,
so the root's total size is just the sum of its link sizes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from glasspass.cas.cid import Cid
from glasspass.errors import InvalidArgument


@dataclass(frozen=True)
class DagLink:
    cid: Cid
    name: str
    cumulative_size: int


@dataclass(frozen=True)
class DagNode:
    links: tuple[DagLink, ...]
    metadata: bytes | None = None

    @property
    def total_size(self) -> int:
        """Total payload bytes of all leaf blocks reachable from this node."""
        return sum(link.cumulative_size for link in self.links)

    def encode(self) -> bytes:
        """Canonical byte encoding used for storage and hashing."""
        doc = {
            "links": [
                {"cid": l.cid.text, "name": l.name, "size": l.cumulative_size}
                for l in self.links
            ],
            "metadata": self.metadata.hex() if self.metadata is not None else None,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def decode(cls, payload: bytes) -> "DagNode":
        try:
            doc = json.loads(payload.decode("utf-8"))
            links = tuple(
                DagLink(cid=Cid.from_text(l["cid"]), name=l["name"], cumulative_size=l["size"])
                for l in doc["links"]
            )
            meta = doc.get("metadata")
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidArgument(f"not a dag node payload: {exc}") from exc
        return cls(links=links, metadata=bytes.fromhex(meta) if meta is not None else None)


def dag_node_for_chunks(chunk_cids: list[Cid], chunk_sizes: list[int]) -> DagNode:
    """Build the single-level root node over ordered leaf chunks."""
    links = tuple(
        DagLink(cid=c, name=str(i), cumulative_size=n)
        for i, (c, n) in enumerate(zip(chunk_cids, chunk_sizes))
    )
    return DagNode(links=links)

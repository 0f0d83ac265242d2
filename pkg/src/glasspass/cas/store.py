"""On-disk block store.

Layout under the data directory:

    blocks/<cid-text>     one file per block, raw payload bytes
    refcounts.tsv         "cidtext<TAB>count" per live block

The refcount index is the source of truth for which blocks are live; a
block file without an index entry is garbage from an interrupted write
and is silently re-adopted on the next put of the same content. Every
read re-verifies the payload digest against the requested Cid, so any
on-disk corruption is detected at get time.

Reference counts track how many puts reach each block, so a chunk shared
by two stored resources survives the deletion of either one.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path

from glasspass.cas.chunking import DEFAULT_BLOCK_SIZE, chunk
from glasspass.cas.cid import CODEC_DAG_NODE, CODEC_RAW, Cid, compute_cid
from glasspass.cas.dag import DagNode, dag_node_for_chunks
from glasspass.errors import IntegrityViolation, InvalidArgument, NotFound, StorageError


@dataclass(frozen=True)
class Block:
    """A stored unit: payload plus the Cid derived from it."""

    cid: Cid
    payload: bytes

    @property
    def size(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class StoreStats:
    block_count: int
    total_bytes: int
    dedup_hits: int


def root_cid_for(resource: bytes, block_size: int = DEFAULT_BLOCK_SIZE) -> Cid:
    """Derive the root Cid a put of this resource would produce, without IO."""
    chunks = chunk(resource, block_size)
    leaf_cids = [compute_cid(c, CODEC_RAW) for c in chunks]
    node = dag_node_for_chunks(leaf_cids, [len(c) for c in chunks])
    return compute_cid(node.encode(), CODEC_DAG_NODE)


class BlockStore:
    """Content-addressed store with refcounted erasure.

    Writes (put/delete) serialize through one lock; readers go straight
    to the index and block files.
    """

    def __init__(self, data_dir: str | Path, block_size: int = DEFAULT_BLOCK_SIZE):
        if block_size <= 0:
            raise InvalidArgument(f"block_size must be positive, got {block_size}")
        self.block_size = block_size
        self._dir = Path(data_dir)
        self._blocks_dir = self._dir / "blocks"
        self._index_path = self._dir / "refcounts.tsv"
        self._blocks_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._refcounts: dict[str, int] = {}
        self._dedup_hits = 0
        self._total_bytes = 0
        self._load_index()

    # -- index persistence ---------------------------------------------------

    def _load_index(self):
        if not self._index_path.exists():
            return
        for line in self._index_path.read_text("utf-8").splitlines():
            if not line:
                continue
            text, count = line.split("\t")
            self._refcounts[text] = int(count)
        for text in self._refcounts:
            path = self._blocks_dir / text
            try:
                self._total_bytes += path.stat().st_size
            except FileNotFoundError as exc:
                raise StorageError(f"indexed block missing on disk: {text}") from exc

    def _save_index(self):
        lines = [f"{text}\t{count}\n" for text, count in sorted(self._refcounts.items())]
        tmp = self._index_path.with_suffix(".tmp")
        tmp.write_text("".join(lines), "utf-8")
        os.replace(tmp, self._index_path)

    # -- block helpers -------------------------------------------------------

    def _write_block(self, cid: Cid, payload: bytes) -> bool:
        """Add one block under the lock. Returns True if bytes were written."""
        text = cid.text
        if text in self._refcounts:
            self._refcounts[text] += 1
            self._dedup_hits += 1
            return False
        path = self._blocks_dir / text
        tmp = path.with_suffix(".tmp")
        try:
            tmp.write_bytes(payload)
            os.replace(tmp, path)
        except OSError as exc:
            raise StorageError(f"cannot write block {text}: {exc}") from exc
        self._refcounts[text] = 1
        self._total_bytes += len(payload)
        return True

    def _read_block(self, cid: Cid) -> bytes:
        text = cid.text
        if text not in self._refcounts:
            raise NotFound(f"unknown cid {text}")
        try:
            payload = (self._blocks_dir / text).read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read block {text}: {exc}") from exc
        if compute_cid(payload, cid.codec) != cid:
            raise IntegrityViolation(f"digest mismatch for block {text}", cid=text)
        return payload

    # -- public API ----------------------------------------------------------

    def has(self, cid: Cid) -> bool:
        return cid.text in self._refcounts

    def put(self, resource: bytes) -> Cid:
        """Chunk, store and link a resource; returns the root Cid.

        Re-putting identical content writes no bytes and only bumps
        refcounts and the dedup counter.
        """
        chunks = chunk(resource, self.block_size)
        leaf_cids = [compute_cid(c, CODEC_RAW) for c in chunks]
        node = dag_node_for_chunks(leaf_cids, [len(c) for c in chunks])
        node_payload = node.encode()
        root = compute_cid(node_payload, CODEC_DAG_NODE)
        with self._lock:
            for cid, payload in zip(leaf_cids, chunks):
                self._write_block(cid, payload)
            self._write_block(root, node_payload)
            self._save_index()
        return root

    def get(self, root: Cid) -> bytes:
        """Reassemble the resource under a root Cid, verifying every block."""
        payload = self._read_block(root)
        if root.codec == CODEC_RAW:
            return payload
        node = DagNode.decode(payload)
        parts = []
        for link in node.links:
            parts.append(self._read_block(link.cid))
        return b"".join(parts)

    def get_node(self, root: Cid) -> DagNode:
        if root.codec != CODEC_DAG_NODE:
            raise InvalidArgument(f"{root.text} is not a dag node cid")
        return DagNode.decode(self._read_block(root))

    def delete(self, root: Cid) -> int:
        """Drop one reference to root and its children; erase blocks at zero.

        Returns the number of block files removed from disk.
        """
        with self._lock:
            text = root.text
            if text not in self._refcounts:
                raise NotFound(f"unknown cid {text}")
            reachable = [root]
            if root.codec == CODEC_DAG_NODE:
                node = DagNode.decode(self._read_block(root))
                reachable.extend(link.cid for link in node.links)
            doomed = []
            for cid in reachable:
                ctext = cid.text
                count = self._refcounts.get(ctext, 0)
                if count <= 1:
                    self._refcounts.pop(ctext, None)
                    doomed.append(ctext)
                else:
                    self._refcounts[ctext] = count - 1
            # Index first: a crash here leaves orphan files, never dangling
            # index entries.
            self._save_index()
            erased = 0
            for ctext in doomed:
                path = self._blocks_dir / ctext
                try:
                    size = path.stat().st_size
                    path.unlink()
                except FileNotFoundError:
                    continue
                self._total_bytes -= size
                erased += 1
            return erased

    @property
    def stats(self) -> StoreStats:
        return StoreStats(
            block_count=len(self._refcounts),
            total_bytes=self._total_bytes,
            dedup_hits=self._dedup_hits,
        )

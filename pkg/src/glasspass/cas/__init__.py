"""Content-addressed block store with deduplication and erasure."""

from glasspass.cas.chunking import DEFAULT_BLOCK_SIZE, chunk
from glasspass.cas.cid import CODEC_DAG_NODE, CODEC_RAW, Cid, compute_cid
from glasspass.cas.dag import DagLink, DagNode
from glasspass.cas.store import Block, BlockStore, StoreStats, root_cid_for

__all__ = [
    "Block",
    "BlockStore",
    "Cid",
    "CODEC_DAG_NODE",
    "CODEC_RAW",
    "DEFAULT_BLOCK_SIZE",
    "DagLink",
    "DagNode",
    "StoreStats",
    "chunk",
    "compute_cid",
    "root_cid_for",
]

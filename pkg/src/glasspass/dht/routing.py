"""Per-node routing state: 256 k-buckets ordered by liveness recency."""

from __future__ import annotations

from dataclasses import dataclass, field

from glasspass.dht.nodeid import ID_BITS, NodeId, bucket_index, xor_distance

BUCKET_COUNT = ID_BITS


@dataclass(frozen=True)
class Contact:
    node_id: NodeId
    sim_address: int


@dataclass
class RoutingTable:
    owner: NodeId
    k: int
    buckets: list[list[Contact]] = field(default_factory=lambda: [[] for _ in range(BUCKET_COUNT)])

    def insert(self, contact: Contact) -> bool:
        """Record a seen contact; most recently seen sits at the tail.

        A full bucket keeps its existing members (all simulated nodes
        stay live, so there is nothing to evict). Returns True if the
        contact is in the table afterwards.
        """
        if contact.node_id == self.owner:
            return False
        bucket = self.buckets[bucket_index(self.owner, contact.node_id)]
        if contact in bucket:
            bucket.remove(contact)
            bucket.append(contact)
            return True
        if len(bucket) < self.k:
            bucket.append(contact)
            return True
        return False

    def remove(self, node_id: NodeId):
        if node_id == self.owner:
            return
        bucket = self.buckets[bucket_index(self.owner, node_id)]
        for contact in bucket:
            if contact.node_id == node_id:
                bucket.remove(contact)
                return

    def contacts(self) -> list[Contact]:
        return [c for bucket in self.buckets for c in bucket]

    def closest(self, target: NodeId, count: int) -> list[Contact]:
        """The `count` known contacts nearest to target, nearest first."""
        pool = self.contacts()
        pool.sort(key=lambda c: (xor_distance(c.node_id, target), c.node_id.bits))
        return pool[:count]

    def __len__(self) -> int:
        return sum(len(b) for b in self.buckets)

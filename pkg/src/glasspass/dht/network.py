"""Deterministic in-process Kademlia simulator.

All traffic flows through one discrete-event loop with seeded
pseudo-randomness, so a given (scenario, seed) pair always yields the
same message trace. Lookup cost is counted in query rounds: one round
sends up to alpha concurrent requests and waits for their replies, and
a lookup finishes when a round brings no node closer to the target.

Provider records live on the k nodes closest to a cid's digest and stay
there until explicitly removed; block transfer is a want-list exchange
where every received payload is digest-checked before acceptance.
"""

from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from glasspass.cas import Cid, compute_cid
from glasspass.cas.store import Block
from glasspass.dht.nodeid import NodeId, node_id_from_nonce, xor_distance
from glasspass.dht.routing import Contact, RoutingTable
from glasspass.errors import InvalidArgument, NotFound

DEFAULT_K = 20
DEFAULT_ALPHA = 3
MAX_ROUNDS = 256


@dataclass(frozen=True)
class SimConfig:
    seed: int
    node_count: int
    k: int = DEFAULT_K
    alpha: int = DEFAULT_ALPHA
    latency_ms: tuple[float, float] = (5.0, 50.0)
    churn_enabled: bool = False
    churn_rate: float = 0.0

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidArgument("node_count must be >= 1")
        if self.k < 1 or self.alpha < 1:
            raise InvalidArgument("k and alpha must be >= 1")
        lo, hi = self.latency_ms
        if lo < 0 or hi < lo:
            raise InvalidArgument(f"bad latency range: {self.latency_ms}")

    @classmethod
    def from_json(cls, payload: str | bytes) -> "SimConfig":
        try:
            data = json.loads(payload)
            latency = data.get("latency_ms", {"min": 5.0, "max": 50.0})
            churn = data.get("churn", {})
            return cls(
                seed=int(data["seed"]),
                node_count=int(data["node_count"]),
                k=int(data.get("k", DEFAULT_K)),
                alpha=int(data.get("alpha", DEFAULT_ALPHA)),
                latency_ms=(float(latency["min"]), float(latency["max"])),
                churn_enabled=bool(churn.get("enabled", False)),
                churn_rate=float(churn.get("rate", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed scenario: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "node_count": self.node_count,
                "k": self.k,
                "alpha": self.alpha,
                "latency_ms": {"min": self.latency_ms[0], "max": self.latency_ms[1]},
                "churn": {"enabled": self.churn_enabled, "rate": self.churn_rate},
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class LookupResult:
    contacts: tuple[Contact, ...]
    rounds: int
    messages: int
    elapsed_ms: float


@dataclass
class _Node:
    contact: Contact
    table: RoutingTable
    providers: dict[str, set[NodeId]] = field(default_factory=dict)
    blocks: dict[str, bytes] = field(default_factory=dict)
    wants: set[str] = field(default_factory=set)


class _EventLoop:
    def __init__(self):
        self._queue: list[tuple[float, int, Callable[[], None]]] = []
        self._seq = 0
        self.now = 0.0

    def schedule(self, delay: float, fn: Callable[[], None]):
        heapq.heappush(self._queue, (self.now + delay, self._seq, fn))
        self._seq += 1

    def run(self):
        while self._queue:
            t, _, fn = heapq.heappop(self._queue)
            self.now = t
            fn()


class Network:
    """One simulated deployment; single-threaded by contract."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.loop = _EventLoop()
        self.trace: list[dict] = []
        self.message_count = 0
        self._next_address = 0
        self.nodes: dict[NodeId, _Node] = {}
        ids = [self._new_node() for _ in range(config.node_count)]
        # Every node gets the full membership offered in a rotated order,
        # so identical bucket-overflow rules still leave each table with
        # its own sample of the far buckets.
        for i, nid in enumerate(ids):
            table = self.nodes[nid].table
            for other in ids[i + 1 :] + ids[:i]:
                table.insert(self.nodes[other].contact)

    # -- membership ----------------------------------------------------------

    def _new_node(self) -> NodeId:
        while True:
            nonce = self.rng.getrandbits(256).to_bytes(32, "big")
            nid = node_id_from_nonce(nonce)
            if nid not in self.nodes:
                break
        contact = Contact(node_id=nid, sim_address=self._next_address)
        self._next_address += 1
        self.nodes[nid] = _Node(contact=contact, table=RoutingTable(nid, self.config.k))
        return nid

    def join(self, bootstrap: NodeId | None = None) -> NodeId:
        """Add one node mid-run, learning peers through a self-lookup."""
        nid = self._new_node()
        if bootstrap is None:
            others = [n for n in self.nodes if n != nid]
            if not others:
                return nid
            bootstrap = self.rng.choice(sorted(others, key=lambda n: n.bits))
        self.nodes[nid].table.insert(self.nodes[bootstrap].contact)
        self.nodes[bootstrap].table.insert(self.nodes[nid].contact)
        result = self.find_node(nid, nid)
        for contact in result.contacts:
            self.nodes[nid].table.insert(contact)
        return nid

    def leave(self, nid: NodeId):
        self.nodes.pop(nid, None)

    def node_ids(self) -> list[NodeId]:
        return list(self.nodes)

    def _random_live(self) -> NodeId:
        if not self.nodes:
            raise NotFound("network is empty")
        return self.rng.choice(list(self.nodes))

    # -- messaging -----------------------------------------------------------

    def _latency(self) -> float:
        lo, hi = self.config.latency_ms
        return self.rng.uniform(lo, hi)

    def _record(self, kind: str, src: NodeId, dst: NodeId, key: str | None):
        self.message_count += 1
        self.trace.append(
            {
                "t": round(self.loop.now, 6),
                "seq": self.message_count,
                "kind": kind,
                "src": src.hex,
                "dst": dst.hex,
                "key": key,
            }
        )

    def _send(
        self,
        kind: str,
        src: NodeId,
        dst: NodeId,
        key: str | None,
        on_reply: Callable[[object], None],
        handler: Callable[[_Node], object],
    ):
        """One request/reply RPC. Dead destinations never answer; the
        caller's reply callback then fires with None after a timeout."""
        self._record(kind, src, dst, key)
        timeout = 4 * self.config.latency_ms[1] + 1

        def deliver():
            node = self.nodes.get(dst)
            if node is None:
                self.loop.schedule(timeout, lambda: on_reply(None))
                return
            result = handler(node)
            self._record(kind + "_reply", dst, src, key)
            self.loop.schedule(self._latency(), lambda: on_reply(result))

        self.loop.schedule(self._latency(), deliver)

    # -- iterative lookup ----------------------------------------------------

    def find_node(self, start: NodeId, target: NodeId) -> LookupResult:
        if start not in self.nodes:
            raise NotFound(f"node {start.hex} is not live")
        cfg = self.config

        def dist(c: Contact) -> tuple[int, int]:
            return (xor_distance(c.node_id, target), c.node_id.bits)

        start_node = self.nodes[start]
        seen: dict[NodeId, Contact] = {start: start_node.contact}
        for c in start_node.table.closest(target, cfg.k):
            seen[c.node_id] = c
        queried: set[NodeId] = {start}
        state = {"rounds": 0, "best": None, "messages0": self.message_count, "t0": self.loop.now}

        def best_distance() -> int:
            return min(xor_distance(n, target) for n in seen)

        def handle_reply(result):
            if result is None:
                return
            for contact in result:
                seen.setdefault(contact.node_id, contact)

        def answer(node: _Node) -> list[Contact]:
            node.table.insert(start_node.contact)
            found = node.table.closest(target, cfg.k)
            return [node.contact] + found

        def run_round():
            frontier = sorted(
                (c for n, c in seen.items() if n not in queried), key=dist
            )[: cfg.alpha]
            if not frontier or state["rounds"] >= MAX_ROUNDS:
                return
            state["rounds"] += 1
            pending = {"n": len(frontier)}
            before = best_distance()

            def on_reply(result):
                handle_reply(result)
                pending["n"] -= 1
                if pending["n"] == 0:
                    if best_distance() < before:
                        run_round()

            for contact in frontier:
                queried.add(contact.node_id)
                self._send("find_node", start, contact.node_id, target.hex, on_reply, answer)

        run_round()
        self.loop.run()
        ranked = sorted(seen.values(), key=dist)
        return LookupResult(
            contacts=tuple(ranked[: cfg.k]),
            rounds=state["rounds"],
            messages=self.message_count - state["messages0"],
            elapsed_ms=self.loop.now - state["t0"],
        )

    # -- provider records ----------------------------------------------------

    @staticmethod
    def key_for(cid: Cid) -> NodeId:
        # A cid digest is already 256 bits; use it as the key directly.
        return NodeId(int.from_bytes(cid.digest, "big"))

    def provide(self, node: NodeId, cid: Cid) -> set[NodeId]:
        if node not in self.nodes:
            raise NotFound(f"node {node.hex} is not live")
        key = self.key_for(cid)
        holders = [c.node_id for c in self.find_node(node, key).contacts]
        stored: set[NodeId] = set()

        def on_reply(result):
            if result is not None:
                stored.add(result)

        for holder in holders:
            self._send(
                "store_provider",
                node,
                holder,
                cid.digest.hex(),
                on_reply,
                lambda n: n.providers.setdefault(cid.digest.hex(), set()).add(node)
                or n.contact.node_id,
            )
        self.loop.run()
        return stored

    def find_providers(self, start: NodeId, cid: Cid) -> set[Contact]:
        if start not in self.nodes:
            raise NotFound(f"node {start.hex} is not live")
        key = self.key_for(cid)
        near = self.find_node(start, key).contacts
        providers: set[NodeId] = set()

        def on_reply(result):
            if result:
                providers.update(result)

        for contact in near:
            self._send(
                "get_providers",
                start,
                contact.node_id,
                cid.digest.hex(),
                on_reply,
                lambda n: set(n.providers.get(cid.digest.hex(), set())),
            )
        self.loop.run()
        out = set()
        for nid in providers:
            node = self.nodes.get(nid)
            out.add(node.contact if node else Contact(node_id=nid, sim_address=-1))
        return out

    def remove_provider(self, cid: Cid) -> int:
        """Erasure support: drop every record for cid across the network."""
        removed = 0
        for node in self.nodes.values():
            if node.providers.pop(cid.digest.hex(), None) is not None:
                removed += 1
        return removed

    # -- block exchange ------------------------------------------------------

    def seed_block(self, node: NodeId, block: Block):
        if node not in self.nodes:
            raise NotFound(f"node {node.hex} is not live")
        self.nodes[node].blocks[block.cid.text] = block.payload

    def corrupt_block(self, node: NodeId, cid: Cid):
        """Fault injection: make one peer serve a flipped payload."""
        payload = self.nodes[node].blocks[cid.text]
        self.nodes[node].blocks[cid.text] = bytes([payload[0] ^ 0x01]) + payload[1:]

    def exchange(self, node: NodeId, want: set[Cid]) -> set[Block]:
        if node not in self.nodes:
            raise NotFound(f"node {node.hex} is not live")
        me = self.nodes[node]
        me.wants.update(c.text for c in want)
        by_text = {c.text: c for c in want}
        received: set[Block] = set()

        def on_reply(result):
            if not result:
                return
            for text, payload in result:
                cid = by_text.get(text)
                if cid is None or text not in me.wants:
                    continue
                if compute_cid(payload, cid.codec) != cid:
                    continue  # corrupted transfer; keep wanting it
                me.blocks[text] = payload
                me.wants.discard(text)
                received.add(Block(cid=cid, payload=payload))

        def serve(peer: _Node) -> list[tuple[str, bytes]]:
            return [(t, peer.blocks[t]) for t in sorted(me.wants) if t in peer.blocks]

        for contact in me.table.contacts():
            self._send("want_list", node, contact.node_id, None, on_reply, serve)
        self.loop.run()
        return received

    # -- measurement ---------------------------------------------------------

    def run_lookups(self, count: int) -> list[LookupResult]:
        results = []
        for _ in range(count):
            if self.config.churn_enabled and self.rng.random() < self.config.churn_rate:
                victims = self.node_ids()
                if len(victims) > 2:
                    self.leave(self.rng.choice(victims))
                    self.join()
            start = self._random_live()
            target = NodeId(self.rng.getrandbits(256))
            results.append(self.find_node(start, target))
        return results

    def export_trace(self, path: str | Path):
        with open(path, "w", encoding="utf-8") as fh:
            for event in self.trace:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

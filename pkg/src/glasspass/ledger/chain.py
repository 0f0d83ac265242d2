"""Hash-chained transaction log with deterministic replay.

Each persisted line is one block: {height, prev_hash, tx_list,
block_hash} in canonical encoding. The block hash covers height,
prev_hash and the full transaction list, and the link rule ties every
block to its predecessor, so flipping any persisted byte is detected
when the chain is re-verified. Simulated mining times are observations
about a block, not part of its identity, and are kept in memory only.

Transactions execute at mine time, in block order (descending gas
price, first-in wins ties), so replaying the chain reproduces contract
state bit for bit even when submission order differed from block order.
"""

from __future__ import annotations

import hashlib
import random
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from glasspass.errors import IntegrityViolation, InvalidArgument, NotFound
from glasspass.ledger.contracts import CONTRACT_CLASSES, Contract
from glasspass.ledger.encoding import canonical_json
from glasspass.ledger.gas import GasSchedule

GENESIS_PREV_HASH = bytes(32)
DEFAULT_GAS_PRICE = 20  # gwei
DEFAULT_MINING_MEAN_SCALE = 30.0  # seconds of simulated mining at price 1


@dataclass(frozen=True)
class Transaction:
    sender: str
    contract: str
    function: str
    args: dict
    gas_price: int
    gas_used: int
    timestamp: float

    def __post_init__(self):
        if self.gas_price < 1:
            raise InvalidArgument("gas_price must be >= 1 gwei")

    def to_wire(self) -> dict:
        return {
            "sender": self.sender,
            "contract": self.contract,
            "function": self.function,
            "args": self.args,
            "gas_price": self.gas_price,
            "gas_used": self.gas_used,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_wire(cls, data: dict) -> "Transaction":
        return cls(
            sender=data["sender"],
            contract=data["contract"],
            function=data["function"],
            args=data["args"],
            gas_price=int(data["gas_price"]),
            gas_used=int(data["gas_used"]),
            timestamp=float(data["timestamp"]),
        )


@dataclass(frozen=True)
class LedgerBlock:
    height: int
    prev_hash: bytes
    tx_list: tuple[Transaction, ...]
    block_hash: bytes
    mined_at: float  # simulated seconds; observational, never persisted

    def to_wire(self) -> dict:
        return {
            "height": self.height,
            "prev_hash": self.prev_hash.hex(),
            "tx_list": [tx.to_wire() for tx in self.tx_list],
            "block_hash": self.block_hash.hex(),
        }


def block_hash_of(height: int, prev_hash: bytes, tx_list: Iterable[Transaction]) -> bytes:
    body = canonical_json(
        {
            "height": height,
            "prev_hash": prev_hash.hex(),
            "tx_list": [tx.to_wire() for tx in tx_list],
        }
    )
    return hashlib.sha256(body).digest()


class _Context:
    def __init__(self, ledger: "Ledger"):
        self._ledger = ledger

    def get_contract(self, address: str) -> Contract:
        return self._ledger.contract(address)


class Ledger:
    """Single-writer ledger; every mutation funnels through one lock."""

    def __init__(
        self,
        path: str | Path | None = None,
        schedule: GasSchedule | None = None,
        mining_seed: int = 0,
        mining_mean_scale: float = DEFAULT_MINING_MEAN_SCALE,
    ):
        self.schedule = schedule or GasSchedule()
        self.mining_mean_scale = mining_mean_scale
        self._path = Path(path) if path else None
        self._lock = threading.RLock()
        self._rng = random.Random(mining_seed)
        self._blocks: list[LedgerBlock] = []
        self._contracts: dict[str, Contract] = {}
        self._deploy_counts: dict[str, int] = {}
        self._pending: list[Transaction] = []
        self._sim_time = 0.0
        self._ctx = _Context(self)
        if self._path and self._path.exists():
            self._load(self._path)

    # -- state access --------------------------------------------------------

    @property
    def height(self) -> int:
        return len(self._blocks)

    @property
    def blocks(self) -> tuple[LedgerBlock, ...]:
        return tuple(self._blocks)

    def contract(self, address: str) -> Contract:
        try:
            return self._contracts[address]
        except KeyError:
            raise NotFound(f"no contract at {address}") from None

    def contracts_by_kind(self, kind: str) -> list[Contract]:
        return [c for c in self._contracts.values() if c.kind == kind]

    def export_state(self) -> bytes:
        """Canonical snapshot of all contract storage, for replay checks."""
        state = {
            addr: {"kind": c.kind, "deployer": c.deployer, "links": c.links, "storage": c.state_wire()}
            for addr, c in self._contracts.items()
        }
        return canonical_json(state)

    # -- transaction intake --------------------------------------------------

    def deploy_address(self, deployer: str, kind: str) -> str:
        count = self._deploy_counts.get(deployer, 0)
        material = b"|".join((b"contract", deployer.encode(), kind.encode(), str(count).encode()))
        return hashlib.sha256(material).hexdigest()

    def submit(
        self,
        sender: str,
        contract: str,
        function: str,
        args: dict,
        gas_price: int = DEFAULT_GAS_PRICE,
        timestamp: float = 0.0,
    ) -> Transaction:
        """Queue a call; gas_used stays 0 until the block executes it."""
        tx = Transaction(
            sender=sender,
            contract=contract,
            function=function,
            args=args,
            gas_price=gas_price,
            gas_used=0,
            timestamp=float(timestamp),
        )
        with self._lock:
            self._pending.append(tx)
        return tx

    def submit_deploy(
        self,
        deployer: str,
        kind: str,
        links: dict[str, str] | None = None,
        gas_price: int = DEFAULT_GAS_PRICE,
        timestamp: float = 0.0,
    ) -> tuple[str, Transaction]:
        if kind not in CONTRACT_CLASSES:
            raise InvalidArgument(f"unknown contract kind {kind!r}")
        with self._lock:
            pending_same = sum(
                1
                for tx in self._pending
                if tx.function == "__deploy__" and tx.sender == deployer
            )
            count = self._deploy_counts.get(deployer, 0) + pending_same
            material = b"|".join(
                (b"contract", deployer.encode(), kind.encode(), str(count).encode())
            )
            address = hashlib.sha256(material).hexdigest()
            tx = Transaction(
                sender=deployer,
                contract=address,
                function="__deploy__",
                args={"kind": kind, "links": links or {}},
                gas_price=gas_price,
                gas_used=0,
                timestamp=float(timestamp),
            )
            self._pending.append(tx)
        return address, tx

    # -- execution -----------------------------------------------------------

    def _execute(self, tx: Transaction) -> Transaction:
        """Run one transaction against live state; returns it with gas filled."""
        if tx.function == "__deploy__":
            kind = tx.args["kind"]
            cls = CONTRACT_CLASSES.get(kind)
            if cls is None:
                raise InvalidArgument(f"unknown contract kind {kind!r}")
            expected = self.deploy_address(tx.sender, kind)
            if tx.contract != expected:
                raise IntegrityViolation(
                    f"deploy address mismatch: {tx.contract} != {expected}"
                )
            self._contracts[tx.contract] = cls(
                tx.contract, tx.sender, tx.args.get("links") or {}
            )
            self._deploy_counts[tx.sender] = self._deploy_counts.get(tx.sender, 0) + 1
            gas = self.schedule.deploy_cost[kind]
        else:
            target = self.contract(tx.contract)
            reads, writes = target.execute(
                tx.function, tx.args, sender=tx.sender, timestamp=tx.timestamp, ctx=self._ctx
            )
            gas = self.schedule.call_cost(reads, writes)
        return Transaction(
            sender=tx.sender,
            contract=tx.contract,
            function=tx.function,
            args=tx.args,
            gas_price=tx.gas_price,
            gas_used=gas,
            timestamp=tx.timestamp,
        )

    def mine(self, seed: int | None = None) -> tuple[LedgerBlock, list[float]]:
        """Execute all pending transactions as one block.

        Block order is descending gas price with first-in tie-break.
        Per-transaction mining time is exponential with mean
        mining_mean_scale / gas_price, independent of payload size.

        A failing transaction aborts the whole block, so callers that
        batch several transactions must pre-validate them; the protocol
        path (call/deploy) mines one per block and is atomic because
        every contract function validates before it mutates.
        """
        with self._lock:
            if not self._pending:
                raise InvalidArgument("nothing to mine")
            rng = random.Random(seed) if seed is not None else self._rng
            ordered = sorted(self._pending, key=lambda tx: -tx.gas_price)
            self._pending = []
            executed = [self._execute(tx) for tx in ordered]
            times = [rng.expovariate(tx.gas_price / self.mining_mean_scale) for tx in executed]
            self._sim_time += sum(times)
            prev = self._blocks[-1].block_hash if self._blocks else GENESIS_PREV_HASH
            height = len(self._blocks)
            digest = block_hash_of(height, prev, executed)
            block = LedgerBlock(
                height=height,
                prev_hash=prev,
                tx_list=tuple(executed),
                block_hash=digest,
                mined_at=self._sim_time,
            )
            self._blocks.append(block)
            self._append_to_disk(block)
            return block, times

    def call(
        self,
        sender: str,
        contract: str,
        function: str,
        args: dict,
        gas_price: int = DEFAULT_GAS_PRICE,
        timestamp: float = 0.0,
    ) -> Transaction:
        """Submit and mine a single-transaction block; the protocol path."""
        with self._lock:
            if self._pending:
                raise InvalidArgument("call() requires an empty pending queue")
            self.submit(sender, contract, function, args, gas_price, timestamp)
            try:
                block, _ = self.mine()
            except Exception:
                self._pending = []
                raise
            return block.tx_list[0]

    def deploy(
        self,
        kind: str,
        deployer: str,
        links: dict[str, str] | None = None,
        gas_price: int = DEFAULT_GAS_PRICE,
        timestamp: float = 0.0,
    ) -> tuple[str, Transaction]:
        with self._lock:
            if self._pending:
                raise InvalidArgument("deploy() requires an empty pending queue")
            address, _ = self.submit_deploy(deployer, kind, links, gas_price, timestamp)
            try:
                block, _ = self.mine()
            except Exception:
                self._pending = []
                raise
            return address, block.tx_list[0]

    # -- persistence and replay ----------------------------------------------

    def _append_to_disk(self, block: LedgerBlock):
        if self._path is None:
            return
        with open(self._path, "ab") as fh:
            fh.write(canonical_json(block.to_wire()) + b"\n")

    def _load(self, path: Path):
        for height, line in enumerate(path.read_bytes().splitlines()):
            self._adopt_line(height, line)

    def _adopt_line(self, height: int, line: bytes):
        import json

        try:
            data = json.loads(line)
            claimed_height = int(data["height"])
            prev_hash = bytes.fromhex(data["prev_hash"])
            stored_hash = bytes.fromhex(data["block_hash"])
            tx_list = [Transaction.from_wire(t) for t in data["tx_list"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise IntegrityViolation(
                f"unreadable block at height {height}", height=height
            ) from exc
        if claimed_height != height:
            raise IntegrityViolation(
                f"height mismatch at {height}: block claims {claimed_height}", height=height
            )
        expected_prev = self._blocks[-1].block_hash if self._blocks else GENESIS_PREV_HASH
        if prev_hash != expected_prev:
            raise IntegrityViolation(f"broken hash link at height {height}", height=height)
        recomputed = block_hash_of(height, prev_hash, tx_list)
        if recomputed != stored_hash:
            raise IntegrityViolation(f"block hash mismatch at height {height}", height=height)
        executed = []
        for tx in tx_list:
            rerun = self._execute(
                Transaction(
                    sender=tx.sender,
                    contract=tx.contract,
                    function=tx.function,
                    args=tx.args,
                    gas_price=tx.gas_price,
                    gas_used=0,
                    timestamp=tx.timestamp,
                )
            )
            if rerun.gas_used != tx.gas_used:
                raise IntegrityViolation(
                    f"gas mismatch at height {height}: {tx.gas_used} != {rerun.gas_used}",
                    height=height,
                )
            executed.append(rerun)
        self._blocks.append(
            LedgerBlock(
                height=height,
                prev_hash=prev_hash,
                tx_list=tuple(executed),
                block_hash=stored_hash,
                mined_at=0.0,
            )
        )

    @classmethod
    def replay_file(cls, path: str | Path, schedule: GasSchedule | None = None) -> "Ledger":
        """Rebuild state from a persisted chain, verifying every link."""
        fresh = cls(path=None, schedule=schedule)
        chain_path = Path(path)
        if chain_path.exists():
            for height, line in enumerate(chain_path.read_bytes().splitlines()):
                fresh._adopt_line(height, line)
        return fresh

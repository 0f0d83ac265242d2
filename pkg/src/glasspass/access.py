"""Role-based authorization and the access/erasure protocol pipelines.

Authorization is a static matrix over (role, action) plus an ownership
rule: citizens may only touch their own passport. An admitted access
writes its audit entry to the Access contract before the payload is
released; a denied one is never logged, so the trail holds exactly the
admitted requests.

Erasure runs a five-step pipeline (request record, block deletion,
provider removal, mapping tombstone, confirmation record). A step
cursor persisted before the first step makes the pipeline resumable:
if the process dies mid-way, recover_pending() finishes the remaining
steps on startup, so the confirmation always reaches the ledger.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable

from glasspass.cas import BlockStore, Cid
from glasspass.dht.network import Network
from glasspass.dht.nodeid import NodeId
from glasspass.errors import Erased, NotFound, Unauthenticated, Unauthorized
from glasspass.ledger.chain import Ledger
from glasspass.privacy import AnonCid, PrivacyManager, hash_requester


class Role(str, Enum):
    ADMINISTRATOR = "Administrator"
    CITIZEN = "Citizen"
    ARBITER = "Arbiter"
    ACTOR = "Actor"


class Action(str, Enum):
    PUBLISH_PURPOSES = "publish-purposes"
    CREATE_PASSPORT = "create-passport"
    READ_PASSPORT = "read-passport"
    UPDATE_PASSPORT = "update-passport"
    REQUEST_ERASURE = "request-erasure"
    CONFIRM_ERASURE = "confirm-erasure"
    RUN_VERIFICATION = "run-verification"


@dataclass(frozen=True)
class Principal:
    account_id: str
    role: Role
    display_name: str = ""


# Arbiter gets exactly one capability; citizens act on themselves only
# (enforced by the ownership rule in authorize).
PERMISSION_MATRIX: dict[Role, frozenset[Action]] = {
    Role.ADMINISTRATOR: frozenset(
        {
            Action.PUBLISH_PURPOSES,
            Action.CREATE_PASSPORT,
            Action.READ_PASSPORT,
            Action.UPDATE_PASSPORT,
            Action.CONFIRM_ERASURE,
        }
    ),
    Role.CITIZEN: frozenset({Action.READ_PASSPORT, Action.REQUEST_ERASURE}),
    Role.ARBITER: frozenset({Action.RUN_VERIFICATION}),
    Role.ACTOR: frozenset({Action.READ_PASSPORT, Action.UPDATE_PASSPORT}),
}

OWNERSHIP_ACTIONS = frozenset({Action.READ_PASSPORT, Action.REQUEST_ERASURE})


class PrincipalRegistry:
    def __init__(self):
        self._by_id: dict[str, Principal] = {}

    def register(self, principal: Principal):
        self._by_id[principal.account_id] = principal

    def get(self, account_id: str) -> Principal:
        principal = self._by_id.get(account_id)
        if principal is None:
            raise Unauthenticated(f"unknown principal {account_id}")
        return principal

    def known(self) -> list[Principal]:
        return list(self._by_id.values())

    def __contains__(self, account_id: str) -> bool:
        return account_id in self._by_id


def authorize(
    registry: PrincipalRegistry,
    principal: Principal,
    action: Action,
    subject: str | None = None,
) -> bool:
    """Matrix lookup plus the citizens-own-data rule; True means allow."""
    if principal.account_id not in registry:
        raise Unauthenticated(f"unregistered principal {principal.account_id}")
    if action not in PERMISSION_MATRIX[principal.role]:
        return False
    if principal.role is Role.CITIZEN and action in OWNERSHIP_ACTIONS:
        return subject == principal.account_id
    return True


ERASURE_STEPS = (
    "request-recorded",
    "blocks-deleted",
    "providers-removed",
    "mapping-erased",
    "confirmation-recorded",
)


class AccessController:
    """Wires authorization to the ledger, store, DHT and privacy layers."""

    def __init__(
        self,
        registry: PrincipalRegistry,
        ledger: Ledger,
        store: BlockStore,
        network: Network,
        privacy: PrivacyManager,
        access_addr: str,
        admin_id: str,
        home_node: NodeId,
        cursor_dir: str | Path,
        clock: Callable[[], float] = time.time,
        fail_after: str | None = None,
    ):
        self.registry = registry
        self.ledger = ledger
        self.store = store
        self.network = network
        self.privacy = privacy
        self.access_addr = access_addr
        self.admin_id = admin_id
        self.home_node = home_node
        self.clock = clock
        self._cursor_dir = Path(cursor_dir)
        self._cursor_dir.mkdir(parents=True, exist_ok=True)
        # Test hook: simulate a crash right after the named pipeline step.
        self.fail_after = fail_after
        self._erasure_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- access protocol -----------------------------------------------------

    def handle_access(
        self,
        principal: Principal,
        anon: AnonCid,
        operations: set[str],
        subject: str,
        now: float,
    ) -> bytes:
        action = (
            Action.UPDATE_PASSPORT
            if operations & {"write", "update", "delete"}
            else Action.READ_PASSPORT
        )
        if not authorize(self.registry, principal, action, subject):
            raise Unauthorized(
                f"{principal.role.value} {principal.account_id} may not {action.value}"
            )
        # Audit before release: the ledger entry commits even when the
        # resolve or fetch below fails.
        self.ledger.call(
            principal.account_id,
            self.access_addr,
            "log_access",
            {
                "requester_hash": hash_requester(principal.account_id).hex(),
                "access_time": now,
                "operations": sorted(operations),
                "subject": subject,
            },
            timestamp=now,
        )
        cid = self.privacy.resolve(anon)
        sealed = self.store.get(cid)
        return self.privacy.open(sealed)

    # -- erasure protocol ----------------------------------------------------

    def _lock_for(self, anon: AnonCid) -> threading.Lock:
        with self._locks_guard:
            return self._erasure_locks.setdefault(anon.text, threading.Lock())

    def _cursor_path(self, anon: AnonCid) -> Path:
        return self._cursor_dir / f"{anon.text}.json"

    def _write_cursor(self, anon: AnonCid, state: dict):
        path = self._cursor_path(anon)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(state, sort_keys=True), "utf-8")
        os.replace(tmp, path)

    def _step_done(self, anon: AnonCid, state: dict, step: str):
        state["done"] = step
        self._write_cursor(anon, state)
        if self.fail_after == step:
            raise RuntimeError(f"injected crash after {step}")

    def handle_erasure(
        self, principal: Principal, anon: AnonCid, now: float, subject: str | None
    ) -> dict:
        if not authorize(self.registry, principal, Action.REQUEST_ERASURE, subject):
            raise Unauthorized(
                f"{principal.role.value} {principal.account_id} may not erase this passport"
            )
        with self._lock_for(anon):
            try:
                cid = self.privacy.resolve(anon)
            except Erased as prior:
                # Idempotent acknowledgement for repeat requests.
                return {
                    "status": "erased",
                    "already": True,
                    "anon_cid": anon.text,
                    "erased_at": prior.erased_at,
                }
            # The cursor carries the sealed cid so recovery can delete
            # blocks without keeping plaintext cids around.
            state = {
                "anon": anon.text,
                "citizen": principal.account_id,
                "sealed_cid": self.privacy.seal(cid.to_bytes()).hex(),
                "requested_at": now,
                "done": None,
            }
            self._write_cursor(anon, state)
            return self._run_erasure(anon, state)

    def _run_erasure(self, anon: AnonCid, state: dict) -> dict:
        citizen = state["citizen"]
        requested_at = float(state["requested_at"])
        done = state["done"]
        steps_after = (
            ERASURE_STEPS
            if done is None
            else ERASURE_STEPS[ERASURE_STEPS.index(done) + 1 :]
        )
        cid = Cid.from_bytes(self.privacy.open(bytes.fromhex(state["sealed_cid"])))
        erased_at = requested_at
        for step in steps_after:
            if step == "request-recorded":
                self.ledger.call(
                    citizen,
                    self.access_addr,
                    "log_erasure",
                    {
                        "kind": "request",
                        "citizen": citizen,
                        "anon_cid": anon.text,
                        "time": requested_at,
                        "confirmed_by": None,
                    },
                    timestamp=requested_at,
                )
            elif step == "blocks-deleted":
                try:
                    self.store.delete(cid)
                except NotFound:
                    pass  # already gone; recovery re-runs this step
            elif step == "providers-removed":
                self.network.remove_provider(cid)
            elif step == "mapping-erased":
                erased_at = self.clock()
                self.privacy.erase_mapping(anon, erased_at)
            elif step == "confirmation-recorded":
                # Timestamped when it actually lands; after a crash this
                # can be well past the request, which is exactly what
                # the deadline audit must see.
                confirmed_at = self.clock()
                erased_at = confirmed_at
                self.ledger.call(
                    self.admin_id,
                    self.access_addr,
                    "log_erasure",
                    {
                        "kind": "confirmation",
                        "citizen": citizen,
                        "anon_cid": anon.text,
                        "time": confirmed_at,
                        "confirmed_by": self.admin_id,
                    },
                    timestamp=confirmed_at,
                )
            self._step_done(anon, state, step)
        self._cursor_path(anon).unlink(missing_ok=True)
        return {"status": "erased", "anon_cid": anon.text, "erased_at": erased_at}

    def recover_pending(self) -> list[dict]:
        """Finish erasures interrupted by a crash; called on startup."""
        results = []
        for path in sorted(self._cursor_dir.glob("*.json")):
            state = json.loads(path.read_text("utf-8"))
            anon = AnonCid.from_text(state["anon"])
            with self._lock_for(anon):
                results.append(self._run_erasure(anon, state))
        return results

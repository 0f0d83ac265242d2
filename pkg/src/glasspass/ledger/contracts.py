"""The four contract state machines.

Policy holds processing purposes and citizen consent votes. Log holds
one entry per anonymized passport handle. Access holds the audit trail
of data accesses and erasure requests/confirmations. Verification
cross-reads Policy and Access storage, writes a per-check audit trail,
and records a verdict per actor.

Every mutation goes through execute(), which returns the records read
and written so the ledger can price the transaction. State is append
only; nothing here ever rewrites or deletes a stored record.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

from glasspass.errors import DuplicateEntry, InvalidArgument, Unauthorized

OPERATIONS = frozenset({"read", "write", "delete", "update", "view"})
CONTRACT_KINDS = ("Policy", "Log", "Access", "Verification")


def _check_operation(op: str) -> str:
    if op not in OPERATIONS:
        raise InvalidArgument(f"unknown operation {op!r}")
    return op


@dataclass(frozen=True)
class PurposeRecord:
    actor: str
    operation: str
    purpose: str
    index: int

    def to_wire(self) -> dict:
        return {
            "actor": self.actor,
            "operation": self.operation,
            "purpose": self.purpose,
            "index": self.index,
        }


@dataclass(frozen=True)
class ConsentVote:
    citizen: str
    purpose_index: int
    consent: bool
    timestamp: float

    def to_wire(self) -> dict:
        return {
            "citizen": self.citizen,
            "purpose_index": self.purpose_index,
            "consent": self.consent,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class LogEntry:
    anon_cid: str
    created_at: float

    def to_wire(self) -> dict:
        return {"anon_cid": self.anon_cid, "created_at": self.created_at}


@dataclass(frozen=True)
class AccessLogEntry:
    requester_hash: str
    access_time: float
    operations: tuple[str, ...]
    subject: str

    def to_wire(self) -> dict:
        return {
            "requester_hash": self.requester_hash,
            "access_time": self.access_time,
            "operations": list(self.operations),
            "subject": self.subject,
        }


@dataclass(frozen=True)
class ErasureRecord:
    kind: str  # "request" | "confirmation"
    citizen: str
    anon_cid: str
    time: float
    confirmed_by: str | None = None

    def to_wire(self) -> dict:
        return {
            "kind": self.kind,
            "citizen": self.citizen,
            "anon_cid": self.anon_cid,
            "time": self.time,
            "confirmed_by": self.confirmed_by,
        }


@dataclass(frozen=True)
class AuditEntry:
    """One row of the verification trail: a single check or a verdict."""

    check: str  # "consented-op" | "executed-op" | "verdict"
    actor: str
    operation: str | None
    ok: bool
    run_at: float

    def to_wire(self) -> dict:
        return {
            "check": self.check,
            "actor": self.actor,
            "operation": self.operation,
            "ok": self.ok,
            "run_at": self.run_at,
        }


class ContractContext(Protocol):
    def get_contract(self, address: str) -> "Contract": ...


class Contract:
    kind = "?"

    def __init__(self, address: str, deployer: str, links: dict[str, str] | None = None):
        self.address = address
        self.deployer = deployer
        self.links = dict(links or {})

    def execute(
        self, function: str, args: dict, *, sender: str, timestamp: float, ctx: ContractContext
    ) -> tuple[int, int]:
        """Run one function; returns (records_read, records_written)."""
        method = getattr(self, "fn_" + function, None)
        if method is None:
            raise InvalidArgument(f"{self.kind} has no function {function!r}")
        return method(args, sender=sender, timestamp=timestamp, ctx=ctx)

    def state_wire(self) -> dict:
        raise NotImplementedError


class PolicyContract(Contract):
    kind = "Policy"

    def __init__(self, address: str, deployer: str, links=None):
        super().__init__(address, deployer, links)
        self.purposes: list[PurposeRecord] = []
        self.votes: list[ConsentVote] = []

    def fn_add_purposes(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        if sender != self.deployer:
            raise Unauthorized("only the deployer may publish purposes")
        records = args.get("records", [])
        base = len(self.purposes)
        staged = [
            PurposeRecord(
                actor=str(r["actor"]),
                operation=_check_operation(str(r["operation"])),
                purpose=str(r["purpose"]),
                index=base + i,
            )
            for i, r in enumerate(records)
        ]
        self.purposes.extend(staged)
        return (0, len(staged))

    def fn_add_votes(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        votes = args.get("votes", [])
        staged = []
        for idx, consent in votes:
            # One read per vote: the referenced purpose must exist.
            if not 0 <= int(idx) < len(self.purposes):
                raise InvalidArgument(f"no purpose with index {idx}")
            staged.append(
                ConsentVote(
                    citizen=sender,
                    purpose_index=int(idx),
                    consent=bool(consent),
                    timestamp=timestamp,
                )
            )
        self.votes.extend(staged)
        return (len(staged), len(staged))

    def effective_consent(self) -> dict[tuple[str, int], bool]:
        """Latest vote wins per (citizen, purpose index)."""
        out: dict[tuple[str, int], bool] = {}
        for vote in self.votes:
            out[(vote.citizen, vote.purpose_index)] = vote.consent
        return out

    def state_wire(self) -> dict:
        return {
            "purposes": [p.to_wire() for p in self.purposes],
            "votes": [v.to_wire() for v in self.votes],
        }


class LogContract(Contract):
    kind = "Log"

    def __init__(self, address: str, deployer: str, links=None):
        super().__init__(address, deployer, links)
        self.entries: list[LogEntry] = []
        self._seen: set[str] = set()

    def fn_append(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        anon_cid = str(args["anon_cid"])
        if anon_cid in self._seen:
            raise DuplicateEntry(f"anon cid already logged: {anon_cid}")
        self.entries.append(LogEntry(anon_cid=anon_cid, created_at=float(args["created_at"])))
        self._seen.add(anon_cid)
        return (0, 1)

    def state_wire(self) -> dict:
        return {"entries": [e.to_wire() for e in self.entries]}


class AccessContract(Contract):
    kind = "Access"

    def __init__(self, address: str, deployer: str, links=None):
        super().__init__(address, deployer, links)
        self.accesses: list[AccessLogEntry] = []
        self.erasures: list[ErasureRecord] = []

    def fn_log_access(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        operations = tuple(sorted({_check_operation(str(op)) for op in args["operations"]}))
        if not operations:
            raise InvalidArgument("operations set must be non-empty")
        self.accesses.append(
            AccessLogEntry(
                requester_hash=str(args["requester_hash"]),
                access_time=float(args["access_time"]),
                operations=operations,
                subject=str(args["subject"]),
            )
        )
        return (0, len(operations))

    def fn_log_erasure(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        kind = str(args["kind"])
        if kind not in ("request", "confirmation"):
            raise InvalidArgument(f"unknown erasure record kind {kind!r}")
        citizen = str(args["citizen"])
        anon_cid = str(args["anon_cid"])
        reads = 0
        if kind == "confirmation":
            reads = len(self.erasures)
            prior = any(
                r.kind == "request" and r.citizen == citizen and r.anon_cid == anon_cid
                for r in self.erasures
            )
            if not prior:
                raise InvalidArgument("confirmation without a matching erasure request")
        self.erasures.append(
            ErasureRecord(
                kind=kind,
                citizen=citizen,
                anon_cid=anon_cid,
                time=float(args["time"]),
                confirmed_by=args.get("confirmed_by"),
            )
        )
        return (reads, 1)

    def state_wire(self) -> dict:
        return {
            "accesses": [a.to_wire() for a in self.accesses],
            "erasures": [e.to_wire() for e in self.erasures],
        }


class VerificationContract(Contract):
    """Checks executed operations against consented ones, on chain.

    For each named actor it reads that actor's purpose records, the
    votes on them, and the actor's executed operations from the Access
    trail; it then writes one audit row per consented operation, one
    per executed operation, and one verdict row.
    """

    kind = "Verification"

    def __init__(self, address: str, deployer: str, links=None):
        super().__init__(address, deployer, links)
        self.audits: list[AuditEntry] = []

    def fn_run(self, args, *, sender, timestamp, ctx) -> tuple[int, int]:
        policy = ctx.get_contract(self.links["policy"])
        access = ctx.get_contract(self.links["access"])
        if not isinstance(policy, PolicyContract) or not isinstance(access, AccessContract):
            raise InvalidArgument("verification links must name Policy and Access instances")
        actors = [str(a) for a in args["actors"]]
        actor_hashes = args.get("actor_hashes", {})
        subject = args.get("subject")
        consent = policy.effective_consent()
        reads = 0
        writes = 0
        for actor in actors:
            purposes = [p for p in policy.purposes if p.actor == actor]
            reads += len(purposes)  # purpose rows
            consented: set[str] = set()
            for p in purposes:
                reads += 1  # vote row for that purpose
                if subject is None:
                    agreed = any(
                        consent.get((cit, p.index), False)
                        for cit in {v.citizen for v in policy.votes}
                    )
                else:
                    agreed = consent.get((str(subject), p.index), False)
                if agreed:
                    consented.add(p.operation)
            executed: set[str] = set()
            for entry in access.accesses:
                if entry.requester_hash == str(actor_hashes.get(actor, actor)):
                    if subject is None or entry.subject == str(subject):
                        reads += len(entry.operations)
                        executed.update(entry.operations)
            for op in sorted(consented):
                self.audits.append(
                    AuditEntry("consented-op", actor, op, True, float(timestamp))
                )
                writes += 1
            ok = True
            for op in sorted(executed):
                permitted = op in consented
                ok = ok and permitted
                self.audits.append(
                    AuditEntry("executed-op", actor, op, permitted, float(timestamp))
                )
                writes += 1
            self.audits.append(AuditEntry("verdict", actor, None, ok, float(timestamp)))
            writes += 1
        return (reads, writes)

    def verdicts(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for row in self.audits:
            if row.check == "verdict":
                out[row.actor] = row.ok
        return out

    def state_wire(self) -> dict:
        return {"audits": [a.to_wire() for a in self.audits]}


CONTRACT_CLASSES: dict[str, type[Contract]] = {
    cls.kind: cls
    for cls in (PolicyContract, LogContract, AccessContract, VerificationContract)
}

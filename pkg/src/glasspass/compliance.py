"""Consent verification engine and erasure-deadline auditor.

verify() follows the arbiter's two-clause rule exactly: any actor that
executed operations without being a consented actor is a violator, and
any consented actor whose executed operations are not a subset of its
consented operations is a violator. The guard before the first union is
redundant (uniting an empty difference changes nothing), so the union
runs unconditionally; the output is identical either way.

erase_verify() audits the erasure trail: a request with no confirmation
past the deadline is a missing-confirmation violation; a confirmation
that arrived later than the deadline is a deadline-exceeded violation.
In-window unconfirmed requests are pending, not violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from glasspass.ledger.contracts import AccessContract, PolicyContract

DEFAULT_ERASURE_DEADLINE = 72 * 3600.0  # seconds


@dataclass(frozen=True)
class ComplianceSets:
    consented_actors: frozenset[str]
    executing_actors: frozenset[str]
    consented_ops: dict[str, frozenset[str]]
    executed_ops: dict[str, frozenset[str]]

    def __post_init__(self):
        if not set(self.consented_ops) <= set(self.consented_actors):
            raise ValueError("consented_ops keys must be consented actors")
        if not set(self.executed_ops) <= set(self.executing_actors):
            raise ValueError("executed_ops keys must be executing actors")


@dataclass(frozen=True)
class ViolationReport:
    violators: frozenset[str]
    reasons: dict[str, tuple[str, ...]]
    generated_at: float
    inputs: tuple[str, str]  # (policy address, access address)

    def to_wire(self) -> dict:
        return {
            "violators": sorted(self.violators),
            "reasons": {a: list(r) for a, r in sorted(self.reasons.items())},
            "generated_at": self.generated_at,
            "inputs": list(self.inputs),
        }


@dataclass(frozen=True)
class ErasureViolation:
    citizen: str
    anon_cid: str
    kind: str  # "missing-confirmation" | "deadline-exceeded"
    request_time: float
    confirmation_time: float | None
    deadline: float

    def to_wire(self) -> dict:
        return {
            "citizen": self.citizen,
            "anon_cid": self.anon_cid,
            "kind": self.kind,
            "request_time": self.request_time,
            "confirmation_time": self.confirmation_time,
            "deadline": self.deadline,
        }


@dataclass(frozen=True)
class PendingErasure:
    citizen: str
    anon_cid: str
    request_time: float

    def to_wire(self) -> dict:
        return {
            "citizen": self.citizen,
            "anon_cid": self.anon_cid,
            "request_time": self.request_time,
        }


def build_sets(
    policy: PolicyContract,
    access: AccessContract,
    citizen: str,
    requester_ids: dict[str, str] | None = None,
) -> ComplianceSets:
    """Assemble the four verification sets for one citizen.

    Access entries carry hashed requester ids; requester_ids maps those
    hashes back to actor account ids. Hashes with no known preimage are
    kept verbatim so rogue requesters still show up as violators. The
    citizen's own reads are data-subject access, not processing by an
    actor, and are excluded from the execution sets.
    """
    requester_ids = requester_ids or {}
    consent = policy.effective_consent()
    consented_ops: dict[str, set[str]] = {}
    for record in policy.purposes:
        if consent.get((citizen, record.index), False):
            consented_ops.setdefault(record.actor, set()).add(record.operation)

    executed_ops: dict[str, set[str]] = {}
    for entry in access.accesses:
        if entry.subject != citizen:
            continue
        actor = requester_ids.get(entry.requester_hash, entry.requester_hash)
        if actor == citizen:
            continue
        executed_ops.setdefault(actor, set()).update(entry.operations)

    return ComplianceSets(
        consented_actors=frozenset(consented_ops),
        executing_actors=frozenset(executed_ops),
        consented_ops={a: frozenset(ops) for a, ops in consented_ops.items()},
        executed_ops={a: frozenset(ops) for a, ops in executed_ops.items()},
    )


def verify(
    sets: ComplianceSets,
    generated_at: float = 0.0,
    inputs: tuple[str, str] = ("", ""),
) -> ViolationReport:
    violators: set[str] = set()
    reasons: dict[str, list[str]] = {}

    for actor in sets.executing_actors - sets.consented_actors:
        violators.add(actor)
        reasons.setdefault(actor, []).append("unconsented-actor")

    for actor in sorted(sets.consented_actors):
        executed = sets.executed_ops.get(actor, frozenset())
        allowed = sets.consented_ops.get(actor, frozenset())
        if not executed <= allowed:
            violators.add(actor)
            for op in sorted(executed - allowed):
                reasons.setdefault(actor, []).append(f"unconsented-operation({op})")

    return ViolationReport(
        violators=frozenset(violators),
        reasons={a: tuple(r) for a, r in reasons.items()},
        generated_at=generated_at,
        inputs=inputs,
    )


def erase_verify(
    access: AccessContract,
    deadline: float = DEFAULT_ERASURE_DEADLINE,
    now: float = 0.0,
) -> tuple[list[ErasureViolation], list[PendingErasure]]:
    """Audit every erasure request against its confirmation, if any."""
    confirmations: dict[tuple[str, str], float] = {}
    for record in access.erasures:
        if record.kind == "confirmation":
            key = (record.citizen, record.anon_cid)
            if key not in confirmations:
                confirmations[key] = record.time

    violations: list[ErasureViolation] = []
    pending: list[PendingErasure] = []
    seen: set[tuple[str, str]] = set()
    for record in access.erasures:
        if record.kind != "request":
            continue
        key = (record.citizen, record.anon_cid)
        if key in seen:
            continue
        seen.add(key)
        confirmed_at = confirmations.get(key)
        if confirmed_at is None:
            if now - record.time > deadline:
                violations.append(
                    ErasureViolation(
                        citizen=record.citizen,
                        anon_cid=record.anon_cid,
                        kind="missing-confirmation",
                        request_time=record.time,
                        confirmation_time=None,
                        deadline=deadline,
                    )
                )
            else:
                pending.append(
                    PendingErasure(
                        citizen=record.citizen,
                        anon_cid=record.anon_cid,
                        request_time=record.time,
                    )
                )
        elif confirmed_at - record.time > deadline:
            violations.append(
                ErasureViolation(
                    citizen=record.citizen,
                    anon_cid=record.anon_cid,
                    kind="deadline-exceeded",
                    request_time=record.time,
                    confirmation_time=confirmed_at,
                    deadline=deadline,
                )
            )
    return violations, pending

"""The deployment object: one data directory, all layers wired.

A Platform owns the block store, the DHT simulation, the ledger with
its four contracts, the privacy manager and the access controller, and
exposes the protocol operations the HTTP service and CLI call. State
lives under a single data directory; constructing a Platform over an
existing directory replays the chain and resumes any interrupted
erasure pipelines, so a crash never leaves the deployment wedged.

Bearer identities are simulated: the token IS the account id of a
registered principal. A bootstrap administrator (account id "admin") is
created the first time a directory is initialized.
"""

from __future__ import annotations

import json
import os
import time
from pathlib import Path
from typing import Callable

from glasspass.access import (
    AccessController,
    Action,
    Principal,
    PrincipalRegistry,
    Role,
    authorize,
)
from glasspass.cas import BlockStore, Cid
from glasspass.compliance import (
    DEFAULT_ERASURE_DEADLINE,
    build_sets,
    erase_verify,
    verify,
)
from glasspass.dht import Network, SimConfig
from glasspass.errors import (
    Conflict,
    InvalidArgument,
    NotFound,
    Unauthorized,
)
from glasspass.ledger import GasSchedule, Ledger
from glasspass.passport import PassportRecord, parse
from glasspass.privacy import AnonCid, KeyRing, PrivacyManager, hash_requester

BOOTSTRAP_ADMIN_ID = "admin"


class Platform:
    def __init__(
        self,
        data_dir: str | Path,
        block_size: int | None = None,
        gas_schedule: GasSchedule | None = None,
        erasure_deadline: float = DEFAULT_ERASURE_DEADLINE,
        dht_config: SimConfig | None = None,
        mining_seed: int = 0,
        clock: Callable[[], float] | None = None,
        fail_after: str | None = None,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock or time.time
        self.erasure_deadline = erasure_deadline

        keyfile = self.data_dir / "keys.json"
        if keyfile.exists():
            self.keyring = KeyRing.load(keyfile)
        else:
            self.keyring = KeyRing.generate()
            self.keyring.save(keyfile)

        store_kwargs = {} if block_size is None else {"block_size": block_size}
        self.store = BlockStore(self.data_dir / "cas", **store_kwargs)
        self.privacy = PrivacyManager(self.keyring, self.data_dir / "cidmap.enc")
        self.network = Network(dht_config or SimConfig(seed=1, node_count=16))
        self.home_node = self.network.node_ids()[0]
        self.ledger = Ledger(
            path=self.data_dir / "chain.jsonl",
            schedule=gas_schedule,
            mining_seed=mining_seed,
        )

        self.registry = PrincipalRegistry()
        self._principals_path = self.data_dir / "principals.json"
        self._load_principals()
        if BOOTSTRAP_ADMIN_ID not in self.registry:
            self.registry.register(
                Principal(BOOTSTRAP_ADMIN_ID, Role.ADMINISTRATOR, "bootstrap administrator")
            )
            self._save_principals()

        self._ensure_contracts()

        # chi -> anon text, live passports only; sealed because CHIs are
        # personal data. owners maps anon -> citizen forever (pseudonyms
        # only) so audits can name a subject after erasure.
        self._chi_path = self.data_dir / "chi_index.enc"
        self._owners_path = self.data_dir / "owners.json"
        self._chi_index: dict[str, str] = self._load_chi_index()
        self._owners: dict[str, str] = self._load_owners()

        self.reports_dir = self.data_dir / "reports"
        self.reports_dir.mkdir(exist_ok=True)

        self.controller = AccessController(
            registry=self.registry,
            ledger=self.ledger,
            store=self.store,
            network=self.network,
            privacy=self.privacy,
            access_addr=self.access_addr,
            admin_id=BOOTSTRAP_ADMIN_ID,
            home_node=self.home_node,
            cursor_dir=self.data_dir / "cursors",
            clock=self.clock,
            fail_after=fail_after,
        )
        self.controller.recover_pending()

    # -- bootstrap -----------------------------------------------------------

    def _ensure_contracts(self):
        def addr_of(kind: str) -> str | None:
            found = self.ledger.contracts_by_kind(kind)
            return found[0].address if found else None

        now = self.clock()
        policy = addr_of("Policy")
        log = addr_of("Log")
        access = addr_of("Access")
        verification = addr_of("Verification")
        if policy is None:
            policy, _ = self.ledger.deploy("Policy", BOOTSTRAP_ADMIN_ID, timestamp=now)
        if log is None:
            log, _ = self.ledger.deploy("Log", BOOTSTRAP_ADMIN_ID, timestamp=now)
        if access is None:
            access, _ = self.ledger.deploy("Access", BOOTSTRAP_ADMIN_ID, timestamp=now)
        if verification is None:
            verification, _ = self.ledger.deploy(
                "Verification",
                BOOTSTRAP_ADMIN_ID,
                links={"policy": policy, "access": access},
                timestamp=now,
            )
        self.policy_addr = policy
        self.log_addr = log
        self.access_addr = access
        self.verification_addr = verification

    def _load_principals(self):
        if not self._principals_path.exists():
            return
        for item in json.loads(self._principals_path.read_text("utf-8")):
            self.registry.register(
                Principal(item["account_id"], Role(item["role"]), item.get("display_name", ""))
            )

    def _save_principals(self):
        items = [
            {"account_id": p.account_id, "role": p.role.value, "display_name": p.display_name}
            for p in sorted(self.registry.known(), key=lambda p: p.account_id)
        ]
        tmp = self._principals_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(items, indent=2, sort_keys=True), "utf-8")
        os.replace(tmp, self._principals_path)

    def _load_chi_index(self) -> dict[str, str]:
        if not self._chi_path.exists():
            return {}
        return json.loads(self.privacy.open(self._chi_path.read_bytes()).decode("utf-8"))

    def _save_chi_index(self):
        sealed = self.privacy.seal(json.dumps(self._chi_index, sort_keys=True).encode("utf-8"))
        tmp = self._chi_path.with_suffix(".tmp")
        tmp.write_bytes(sealed)
        os.replace(tmp, self._chi_path)

    def _load_owners(self) -> dict[str, str]:
        if not self._owners_path.exists():
            return {}
        return json.loads(self._owners_path.read_text("utf-8"))

    def _save_owners(self):
        tmp = self._owners_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._owners, indent=2, sort_keys=True), "utf-8")
        os.replace(tmp, self._owners_path)

    # -- principals ----------------------------------------------------------

    def principal(self, account_id: str) -> Principal:
        return self.registry.get(account_id)

    def register_principal(
        self, admin_id: str, account_id: str, role: str, display_name: str = ""
    ) -> Principal:
        admin = self.principal(admin_id)
        if admin.role is not Role.ADMINISTRATOR:
            raise Unauthorized("only administrators may register principals")
        try:
            parsed_role = Role(role)
        except ValueError:
            raise InvalidArgument(f"unknown role {role!r}") from None
        if not account_id or account_id != account_id.strip():
            raise InvalidArgument("account_id must be a non-empty trimmed string")
        if account_id in self.registry:
            raise Conflict(f"principal {account_id} already registered")
        principal = Principal(account_id, parsed_role, display_name)
        self.registry.register(principal)
        self._save_principals()
        return principal

    def principals(self) -> list[dict]:
        return [
            {"account_id": p.account_id, "role": p.role.value, "display_name": p.display_name}
            for p in sorted(self.registry.known(), key=lambda p: p.account_id)
        ]

    # -- agreement phase -----------------------------------------------------

    def publish_purposes(self, admin_id: str, records: list[dict]) -> dict:
        admin = self.principal(admin_id)
        if not authorize(self.registry, admin, Action.PUBLISH_PURPOSES):
            raise Unauthorized(f"{admin.role.value} may not publish purposes")
        if not records:
            raise InvalidArgument("at least one purpose record required")
        for r in records:
            missing = {"actor", "operation", "purpose"} - set(r)
            if missing:
                raise InvalidArgument(f"purpose record missing fields: {sorted(missing)}")
        now = self.clock()
        tx = self.ledger.call(
            admin_id, self.policy_addr, "add_purposes", {"records": records}, timestamp=now
        )
        return {"count": len(records), "gas_used": tx.gas_used, "height": self.ledger.height - 1}

    def purposes(self, account_id: str) -> list[dict]:
        self.principal(account_id)  # authentication only; purposes are shared
        policy = self.ledger.contract(self.policy_addr)
        return [p.to_wire() for p in policy.purposes]

    def vote(self, citizen_id: str, votes: list[tuple[int, bool]]) -> dict:
        citizen = self.principal(citizen_id)
        if citizen.role is not Role.CITIZEN:
            raise Unauthorized("only citizens vote on purposes")
        if not votes:
            raise InvalidArgument("at least one vote required")
        now = self.clock()
        tx = self.ledger.call(
            citizen_id,
            self.policy_addr,
            "add_votes",
            {"votes": [[int(i), bool(c)] for i, c in votes]},
            timestamp=now,
        )
        return {"count": len(votes), "gas_used": tx.gas_used, "height": self.ledger.height - 1}

    def consent_of(self, citizen_id: str) -> dict[int, bool]:
        policy = self.ledger.contract(self.policy_addr)
        return {
            idx: consent
            for (cit, idx), consent in policy.effective_consent().items()
            if cit == citizen_id
        }

    # -- passport creation phase ---------------------------------------------

    def create_passport(self, admin_id: str, record_data: dict, citizen_id: str) -> dict:
        admin = self.principal(admin_id)
        if not authorize(self.registry, admin, Action.CREATE_PASSPORT):
            raise Unauthorized(f"{admin.role.value} may not create passports")
        citizen = self.principal(citizen_id)
        if citizen.role is not Role.CITIZEN:
            raise InvalidArgument(f"{citizen_id} is not a citizen")
        record = self._record_from_data(record_data)
        if record.chi in self._chi_index:
            raise Conflict(f"a passport for CHI {record.chi} already exists")
        now = self.clock()
        payload = record.canonical()
        sealed = self.privacy.seal(payload)
        root = self.store.put(sealed)
        self.network.provide(self.home_node, root)
        anon = self.privacy.anonymize(root)
        self.ledger.call(
            admin_id,
            self.log_addr,
            "append",
            {"anon_cid": anon.text, "created_at": now},
            timestamp=now,
        )
        self._chi_index[record.chi] = anon.text
        self._owners[anon.text] = citizen_id
        self._save_chi_index()
        self._save_owners()
        return {"anon_cid": anon.text, "bytes": len(payload), "citizen": citizen_id}

    @staticmethod
    def _record_from_data(data: dict) -> PassportRecord:
        if not isinstance(data, dict):
            raise InvalidArgument("passport record must be an object")
        if set(data) == {"COVID-19 Vaccination Status"}:
            # Already in wire layout.
            return parse(json.dumps(data).encode("utf-8"))
        try:
            return PassportRecord(
                chi=str(data["chi"]),
                surname=str(data["surname"]),
                forename=str(data["forename"]),
                dob=str(data["dob"]),
                dose_dates=tuple(str(d) for d in data["dose_dates"]),
                manufacturer=str(data["manufacturer"]),
                vaccine_product=str(data["vaccine_product"]),
                prophylaxis=str(data["prophylaxis"]),
                disease_targeted=str(data.get("disease_targeted", "COVID-19")),
                country_of_vaccination=str(data.get("country_of_vaccination", "Scotland")),
                issued_by=str(data.get("issued_by", "NHS Scotland")),
            )
        except KeyError as exc:
            raise InvalidArgument(f"missing passport field {exc.args[0]!r}") from None

    # -- access phase --------------------------------------------------------

    def access(self, requester_id: str, anon_text: str, operations: list[str]) -> dict:
        principal = self.principal(requester_id)
        anon = AnonCid.from_text(anon_text)
        ops = {str(o) for o in operations}
        if not ops:
            raise InvalidArgument("operations must be non-empty")
        subject = self._owners.get(anon.text, "")
        payload = self.controller.handle_access(principal, anon, ops, subject, self.clock())
        record = parse(payload)
        return {
            "anon_cid": anon.text,
            "subject": subject,
            "passport": json.loads(payload.decode("utf-8")),
            "chi": record.chi,
        }

    # -- right to be forgotten -----------------------------------------------

    def request_erasure(self, citizen_id: str, anon_text: str) -> dict:
        principal = self.principal(citizen_id)
        anon = AnonCid.from_text(anon_text)
        subject = self._owners.get(anon.text)
        ack = self.controller.handle_erasure(principal, anon, self.clock(), subject)
        chi = next((c for c, a in self._chi_index.items() if a == anon.text), None)
        if chi is not None:
            del self._chi_index[chi]
            self._save_chi_index()
        return ack

    # -- verification phase --------------------------------------------------

    def _known_citizens(self) -> list[str]:
        policy = self.ledger.contract(self.policy_addr)
        access = self.ledger.contract(self.access_addr)
        citizens = set(self._owners.values())
        citizens.update(v.citizen for v in policy.votes)
        citizens.update(e.subject for e in access.accesses if e.subject)
        return sorted(citizens)

    def _requester_ids(self) -> dict[str, str]:
        return {
            hash_requester(p.account_id).hex(): p.account_id for p in self.registry.known()
        }

    def run_verification(self, arbiter_id: str, citizen: str | None = None) -> dict:
        arbiter = self.principal(arbiter_id)
        if not authorize(self.registry, arbiter, Action.RUN_VERIFICATION):
            raise Unauthorized(f"{arbiter.role.value} may not run verification")
        policy = self.ledger.contract(self.policy_addr)
        access = self.ledger.contract(self.access_addr)
        citizens = [citizen] if citizen else self._known_citizens()
        requester_ids = self._requester_ids()
        now = self.clock()

        violators: set[str] = set()
        reasons: dict[str, list[str]] = {}
        per_citizen = []
        for cit in citizens:
            sets = build_sets(policy, access, cit, requester_ids)
            report = verify(sets, now, (self.policy_addr, self.access_addr))
            per_citizen.append({"citizen": cit, "report": report.to_wire()})
            violators.update(report.violators)
            for actor, actor_reasons in report.reasons.items():
                merged = reasons.setdefault(actor, [])
                for reason in actor_reasons:
                    if reason not in merged:
                        merged.append(reason)

        erasure_violations, pending = erase_verify(
            access, self.erasure_deadline, now
        )

        actors = sorted(
            {p.actor for p in policy.purposes}
            | {requester_ids.get(e.requester_hash, e.requester_hash) for e in access.accesses}
        )
        actor_hashes = {
            a: hash_requester(a).hex() for a in actors if a in self.registry
        }
        if actors:
            self.ledger.call(
                arbiter_id,
                self.verification_addr,
                "run",
                {
                    "actors": actors,
                    "actor_hashes": actor_hashes,
                    "subject": citizen,
                },
                timestamp=now,
            )

        document = {
            "id": len(self._report_files()) + 1,
            "generated_at": now,
            "citizens": citizens,
            "violators": sorted(violators),
            "reasons": {a: r for a, r in sorted(reasons.items())},
            "inputs": [self.policy_addr, self.access_addr],
            "per_citizen": per_citizen,
            "erasure_violations": [v.to_wire() for v in erasure_violations],
            "pending_erasures": [p.to_wire() for p in pending],
        }
        path = self.reports_dir / f"report-{document['id']:04d}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(document, indent=2, sort_keys=True), "utf-8")
        os.replace(tmp, path)
        return document

    def run_erase_verify(self, arbiter_id: str) -> dict:
        arbiter = self.principal(arbiter_id)
        if not authorize(self.registry, arbiter, Action.RUN_VERIFICATION):
            raise Unauthorized(f"{arbiter.role.value} may not run verification")
        access = self.ledger.contract(self.access_addr)
        now = self.clock()
        violations, pending = erase_verify(access, self.erasure_deadline, now)
        return {
            "generated_at": now,
            "deadline_seconds": self.erasure_deadline,
            "violations": [v.to_wire() for v in violations],
            "pending": [p.to_wire() for p in pending],
        }

    def _report_files(self) -> list[Path]:
        return sorted(self.reports_dir.glob("report-*.json"))

    def reports(self) -> list[dict]:
        return [json.loads(p.read_text("utf-8")) for p in self._report_files()]

    def latest_report(self) -> dict:
        files = self._report_files()
        if not files:
            raise NotFound("no verification report yet")
        return json.loads(files[-1].read_text("utf-8"))

    # -- introspection -------------------------------------------------------

    def ledger_blocks(self) -> list[dict]:
        return [b.to_wire() for b in self.ledger.blocks]

    def owner_of(self, anon_text: str) -> str | None:
        return self._owners.get(anon_text)

    def passports_of(self, citizen_id: str) -> list[str]:
        return sorted(a for a, c in self._owners.items() if c == citizen_id)

    def live_passports_of(self, citizen_id: str) -> list[str]:
        live = set(self._chi_index.values())
        return sorted(
            a for a, c in self._owners.items() if c == citizen_id and a in live
        )

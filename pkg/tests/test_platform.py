import json

import pytest
from conftest import record_data

from glasspass.errors import (
    Conflict,
    Erased,
    InvalidArgument,
    NotFound,
    Unauthenticated,
    Unauthorized,
)


class TestBootstrap:
    def test_fresh_directory_gets_admin_and_contracts(self, platform_factory):
        platform = platform_factory()
        admin = platform.principal("admin")
        assert admin.role.value == "Administrator"
        kinds = [b["tx_list"][0]["args"]["kind"] for b in platform.ledger_blocks()[:4]]
        assert kinds == ["Policy", "Log", "Access", "Verification"]

    def test_reopen_does_not_redeploy(self, platform_factory):
        first = platform_factory()
        height = first.ledger.height
        addrs = (first.policy_addr, first.log_addr, first.access_addr, first.verification_addr)
        second = platform_factory()
        assert second.ledger.height == height
        assert (
            second.policy_addr,
            second.log_addr,
            second.access_addr,
            second.verification_addr,
        ) == addrs

    def test_verification_contract_linked(self, platform_factory):
        platform = platform_factory()
        links = platform.ledger.contract(platform.verification_addr).links
        assert links == {"policy": platform.policy_addr, "access": platform.access_addr}


class TestPrincipals:
    def test_admin_registers_and_persists(self, platform_factory):
        platform = platform_factory()
        platform.register_principal("admin", "citizen-9", "Citizen", "Ann Example")
        reopened = platform_factory()
        principal = reopened.principal("citizen-9")
        assert principal.role.value == "Citizen"
        assert principal.display_name == "Ann Example"

    def test_non_admin_cannot_register(self, seeded_platform):
        with pytest.raises(Unauthorized):
            seeded_platform.register_principal("citizen-1", "x", "Citizen")
        with pytest.raises(Unauthorized):
            seeded_platform.register_principal("arbiter-1", "x", "Citizen")

    def test_duplicate_and_invalid_registrations(self, seeded_platform):
        with pytest.raises(Conflict):
            seeded_platform.register_principal("admin", "citizen-1", "Citizen")
        with pytest.raises(InvalidArgument):
            seeded_platform.register_principal("admin", "new-id", "Overlord")
        with pytest.raises(InvalidArgument):
            seeded_platform.register_principal("admin", "  padded  ", "Citizen")

    def test_unknown_account_is_unauthenticated(self, seeded_platform):
        with pytest.raises(Unauthenticated):
            seeded_platform.principal("nobody")

    def test_listing(self, seeded_platform):
        ids = [p["account_id"] for p in seeded_platform.principals()]
        assert ids == sorted(ids)
        assert "admin" in ids and "citizen-1" in ids


PURPOSES = [
    {"actor": "actor-1", "operation": "read", "purpose": "medical care"},
    {"actor": "actor-1", "operation": "update", "purpose": "medical care"},
    {"actor": "actor-2", "operation": "view", "purpose": "travel checks"},
]


class TestAgreementPhase:
    def test_publish_vote_consent_round_trip(self, seeded_platform):
        out = seeded_platform.publish_purposes("admin", PURPOSES)
        assert out["count"] == 3
        listed = seeded_platform.purposes("citizen-1")
        assert [p["index"] for p in listed] == [0, 1, 2]
        seeded_platform.vote("citizen-1", [(0, True), (1, False), (2, True)])
        assert seeded_platform.consent_of("citizen-1") == {0: True, 1: False, 2: True}
        # a fresh vote overrides
        seeded_platform.vote("citizen-1", [(1, True)])
        assert seeded_platform.consent_of("citizen-1")[1] is True

    def test_only_admin_publishes(self, seeded_platform):
        with pytest.raises(Unauthorized):
            seeded_platform.publish_purposes("actor-1", PURPOSES)

    def test_only_citizens_vote(self, seeded_platform):
        seeded_platform.publish_purposes("admin", PURPOSES)
        for account in ("admin", "actor-1", "arbiter-1"):
            with pytest.raises(Unauthorized):
                seeded_platform.vote(account, [(0, True)])

    def test_malformed_purposes_rejected(self, seeded_platform):
        with pytest.raises(InvalidArgument):
            seeded_platform.publish_purposes("admin", [])
        with pytest.raises(InvalidArgument):
            seeded_platform.publish_purposes("admin", [{"actor": "a"}])


class TestPassportCreation:
    def test_create_returns_anon_handle(self, seeded_platform):
        out = seeded_platform.create_passport("admin", record_data(), "citizen-1")
        assert len(out["anon_cid"]) == 64
        int(out["anon_cid"], 16)
        assert out["bytes"] == 452
        assert out["citizen"] == "citizen-1"
        assert seeded_platform.owner_of(out["anon_cid"]) == "citizen-1"
        assert seeded_platform.passports_of("citizen-1") == [out["anon_cid"]]

    def test_wire_layout_record_accepted(self, seeded_platform):
        from glasspass.passport import example_passport

        wire = json.loads(example_passport().canonical())
        out = seeded_platform.create_passport("admin", wire, "citizen-1")
        assert out["bytes"] == 452

    def test_duplicate_chi_conflicts(self, seeded_platform):
        seeded_platform.create_passport("admin", record_data(), "citizen-1")
        with pytest.raises(Conflict):
            seeded_platform.create_passport("admin", record_data(), "citizen-2")

    def test_owner_must_be_citizen(self, seeded_platform):
        with pytest.raises(InvalidArgument):
            seeded_platform.create_passport("admin", record_data(), "actor-1")

    def test_only_admin_creates(self, seeded_platform):
        with pytest.raises(Unauthorized):
            seeded_platform.create_passport("actor-1", record_data(), "citizen-1")

    def test_creation_is_logged_on_chain(self, seeded_platform):
        out = seeded_platform.create_passport("admin", record_data(), "citizen-1")
        log = seeded_platform.ledger.contract(seeded_platform.log_addr)
        assert [e.anon_cid for e in log.entries] == [out["anon_cid"]]


class TestAccessPhase:
    @pytest.fixture
    def with_passport(self, seeded_platform):
        out = seeded_platform.create_passport("admin", record_data(), "citizen-1")
        return seeded_platform, out["anon_cid"]

    def test_actor_reads_passport(self, with_passport):
        platform, anon = with_passport
        got = platform.access("actor-1", anon, ["read"])
        assert got["chi"] == "0000000001"
        assert got["subject"] == "citizen-1"
        assert got["passport"]["COVID-19 Vaccination Status"]["Surname(s)"] == "Doe"

    def test_citizen_reads_own_but_not_others(self, with_passport):
        platform, anon = with_passport
        assert platform.access("citizen-1", anon, ["read"])["chi"] == "0000000001"
        with pytest.raises(Unauthorized):
            platform.access("citizen-2", anon, ["read"])

    def test_unknown_anon_is_not_found(self, seeded_platform):
        with pytest.raises(NotFound):
            seeded_platform.access("actor-1", "ab" * 32, ["read"])

    def test_empty_operations_rejected(self, with_passport):
        platform, anon = with_passport
        with pytest.raises(InvalidArgument):
            platform.access("actor-1", anon, [])


class TestErasure:
    @pytest.fixture
    def with_passport(self, seeded_platform):
        out = seeded_platform.create_passport("admin", record_data(), "citizen-1")
        return seeded_platform, out["anon_cid"]

    def test_postconditions(self, with_passport, clock):
        platform, anon = with_passport
        blocks_before = platform.store.stats.block_count
        assert blocks_before > 0
        ack = platform.request_erasure("citizen-1", anon)
        assert ack["status"] == "erased"
        assert ack["erased_at"] == clock.now
        assert platform.store.stats.block_count == 0
        with pytest.raises(Erased):
            platform.access("citizen-1", anon, ["read"])
        # the pseudonym ownership survives for audit purposes
        assert platform.owner_of(anon) == "citizen-1"
        assert platform.passports_of("citizen-1") == [anon]
        assert platform.live_passports_of("citizen-1") == []

    def test_repeat_erasure_acknowledged(self, with_passport, clock):
        platform, anon = with_passport
        first = platform.request_erasure("citizen-1", anon)
        clock.advance(50.0)
        again = platform.request_erasure("citizen-1", anon)
        assert again["already"] is True
        assert again["erased_at"] == first["erased_at"]

    def test_chi_reusable_after_erasure(self, with_passport):
        platform, anon = with_passport
        platform.request_erasure("citizen-1", anon)
        out = platform.create_passport("admin", record_data(), "citizen-1")
        assert out["anon_cid"] != anon
        assert platform.live_passports_of("citizen-1") == [out["anon_cid"]]

    def test_only_the_owner_erases(self, with_passport):
        platform, anon = with_passport
        with pytest.raises(Unauthorized):
            platform.request_erasure("citizen-2", anon)
        with pytest.raises(Unauthorized):
            platform.request_erasure("actor-1", anon)

    def test_erasure_survives_restart(self, with_passport, platform_factory):
        platform, anon = with_passport
        platform.request_erasure("citizen-1", anon)
        reopened = platform_factory()
        with pytest.raises(Erased):
            reopened.access("citizen-1", anon, ["read"])
        assert reopened.store.stats.block_count == 0


class TestVerification:
    def _agree(self, platform):
        platform.publish_purposes("admin", PURPOSES)
        platform.vote("citizen-1", [(0, True), (1, True), (2, False)])
        out = platform.create_passport("admin", record_data(), "citizen-1")
        return out["anon_cid"]

    def test_compliant_world_has_no_violators(self, seeded_platform):
        anon = self._agree(seeded_platform)
        seeded_platform.access("actor-1", anon, ["read"])
        report = seeded_platform.run_verification("arbiter-1")
        assert report["violators"] == []
        assert report["reasons"] == {}

    def test_unconsented_operation_flagged(self, seeded_platform):
        anon = self._agree(seeded_platform)
        # actor-2 only has "view" published, and citizen-1 declined it
        seeded_platform.access("actor-2", anon, ["view"])
        report = seeded_platform.run_verification("arbiter-1")
        assert report["violators"] == ["actor-2"]
        assert report["reasons"]["actor-2"] == ["unconsented-actor"]

    def test_excess_operation_flagged_per_op(self, seeded_platform):
        anon = self._agree(seeded_platform)
        seeded_platform.access("actor-1", anon, ["read", "update", "delete"])
        report = seeded_platform.run_verification("arbiter-1")
        assert report["violators"] == ["actor-1"]
        assert report["reasons"]["actor-1"] == ["unconsented-operation(delete)"]

    def test_data_subject_self_access_not_flagged(self, seeded_platform):
        anon = self._agree(seeded_platform)
        seeded_platform.access("citizen-1", anon, ["read"])
        report = seeded_platform.run_verification("arbiter-1")
        assert report["violators"] == []

    def test_citizen_scoped_run(self, seeded_platform):
        anon = self._agree(seeded_platform)
        seeded_platform.access("actor-1", anon, ["read"])
        report = seeded_platform.run_verification("arbiter-1", citizen="citizen-1")
        assert report["citizens"] == ["citizen-1"]
        assert report["violators"] == []

    def test_only_arbiter_runs(self, seeded_platform):
        for account in ("admin", "citizen-1", "actor-1"):
            with pytest.raises(Unauthorized):
                seeded_platform.run_verification(account)

    def test_report_persisted_and_listed(self, seeded_platform):
        self._agree(seeded_platform)
        first = seeded_platform.run_verification("arbiter-1")
        second = seeded_platform.run_verification("arbiter-1")
        assert [r["id"] for r in seeded_platform.reports()] == [1, 2]
        assert seeded_platform.latest_report() == second
        path = seeded_platform.reports_dir / "report-0001.json"
        assert json.loads(path.read_text()) == first

    def test_no_reports_yet(self, seeded_platform):
        with pytest.raises(NotFound):
            seeded_platform.latest_report()

    def test_verification_writes_audit_on_chain(self, seeded_platform):
        anon = self._agree(seeded_platform)
        seeded_platform.access("actor-1", anon, ["read"])
        seeded_platform.run_verification("arbiter-1")
        contract = seeded_platform.ledger.contract(seeded_platform.verification_addr)
        assert contract.verdicts() != {}


class TestEraseVerifyEndpoint:
    def test_triad_with_simulated_clock(self, seeded_platform, clock):
        platform = seeded_platform
        deadline = platform.erasure_deadline
        out1 = platform.create_passport("admin", record_data("1111111111"), "citizen-1")
        out2 = platform.create_passport("admin", record_data("2222222222"), "citizen-2")
        # citizen-1 erases now; confirmation lands immediately: clean
        platform.request_erasure("citizen-1", out1["anon_cid"])
        audit = platform.run_erase_verify("arbiter-1")
        assert audit["violations"] == []
        assert audit["pending"] == []
        # citizen-2 erases and the clock jumps past the deadline before the
        # audit runs; the confirmation was in time, still clean
        clock.advance(deadline * 2)
        platform.request_erasure("citizen-2", out2["anon_cid"])
        audit = platform.run_erase_verify("arbiter-1")
        assert audit["violations"] == []

    def test_only_arbiter(self, seeded_platform):
        with pytest.raises(Unauthorized):
            seeded_platform.run_erase_verify("citizen-1")


class TestRestartPersistence:
    def test_full_state_survives(self, seeded_platform, platform_factory):
        platform = seeded_platform
        platform.publish_purposes("admin", PURPOSES)
        platform.vote("citizen-1", [(0, True)])
        out = platform.create_passport("admin", record_data(), "citizen-1")
        platform.access("actor-1", out["anon_cid"], ["read"])
        platform.run_verification("arbiter-1")

        reopened = platform_factory()
        assert reopened.consent_of("citizen-1") == {0: True}
        got = reopened.access("actor-1", out["anon_cid"], ["read"])
        assert got["chi"] == "0000000001"
        assert [r["id"] for r in reopened.reports()] == [1]
        assert reopened.principal("actor-1").display_name == "GP practice"


class TestUnlinkability:
    def test_chain_and_trace_cannot_be_linked(self, seeded_platform, tmp_path):
        """The ledger sees only the anonymized handle; the DHT sees only
        the content id of the sealed bytes. Neither side carries the
        other's identifier or any personal field, so joining the two
        artifacts requires the deployment secret."""
        from glasspass.privacy import AnonCid

        platform = seeded_platform
        platform.publish_purposes("admin", PURPOSES)
        platform.vote("citizen-1", [(0, True)])
        out = platform.create_passport("admin", record_data(), "citizen-1")
        platform.access("actor-1", out["anon_cid"], ["read"])
        platform.run_verification("arbiter-1")

        anon = out["anon_cid"]
        cid = platform.privacy.resolve(AnonCid.from_text(anon))
        personal = [b"0000000001", b"Doe", b"John", b"02/01/1965"]

        chain = (platform.data_dir / "chain.jsonl").read_bytes()
        trace_path = tmp_path / "trace.jsonl"
        platform.network.export_trace(trace_path)
        trace = trace_path.read_bytes()
        owners = (platform.data_dir / "owners.json").read_bytes()

        # the chain never names the content id, in either encoding
        assert cid.text.encode() not in chain
        assert cid.digest.hex().encode() not in chain
        # the network trace never names the anonymized handle
        assert anon.encode() not in trace
        # personal fields appear in no public artifact
        for secret in personal:
            assert secret not in chain, secret
            assert secret not in trace, secret
            assert secret not in owners, secret
        # the handle IS on chain and the content key IS in the trace:
        # each side works, they just cannot be joined
        assert anon.encode() in chain
        assert cid.digest.hex().encode() in trace

    def test_sealed_files_hide_plaintext(self, seeded_platform):
        platform = seeded_platform
        out = platform.create_passport("admin", record_data(), "citizen-1")
        sealed_map = (platform.data_dir / "cidmap.enc").read_bytes()
        sealed_chi = (platform.data_dir / "chi_index.enc").read_bytes()
        for blob in (sealed_map, sealed_chi):
            assert b"0000000001" not in blob
            assert out["anon_cid"].encode() not in blob

"""HTTP adapter: thin routes over the Platform operations.

Authentication is a bearer token equal to a registered account id.
Every handler delegates to one Platform call; errors map uniformly:
401 unauthenticated, 403 unauthorized, 404 not found, 409 conflict,
410 erased, 422 invalid argument, 500 integrity or storage failure.
A repeat erasure request returns 410 with the same acknowledgement
body a fresh one gets, so clients can treat both as success.
"""

from __future__ import annotations

from fastapi import Depends, FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from glasspass.errors import (
    Conflict,
    Erased,
    GlasspassError,
    IntegrityViolation,
    InvalidArgument,
    NotFound,
    StorageError,
    Unauthenticated,
    Unauthorized,
)
from glasspass.platform import Platform
from glasspass.service import bench

STATUS_BY_ERROR = (
    (Unauthenticated, 401),
    (Unauthorized, 403),
    (NotFound, 404),
    (Conflict, 409),
    (Erased, 410),
    (InvalidArgument, 422),
    (IntegrityViolation, 500),
    (StorageError, 500),
)


def _status_for(exc: GlasspassError) -> int:
    for kind, code in STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return code
    return 500


class PrincipalBody(BaseModel):
    account_id: str
    role: str
    display_name: str = ""


class PurposesBody(BaseModel):
    records: list[dict]


class VotesBody(BaseModel):
    votes: list[tuple[int, bool]]


class PassportBody(BaseModel):
    record: dict
    citizen: str


class AccessBody(BaseModel):
    anon_cid: str
    operations: list[str]


class ErasureBody(BaseModel):
    anon_cid: str


class VerifyBody(BaseModel):
    citizen: str | None = None


class BenchCidsBody(BaseModel):
    count: int = Field(default=100, ge=1)
    population: int = Field(default=bench.DEFAULT_POPULATION, ge=1)


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="glasspass", version="0.1.0")
    app.state.platform = platform

    @app.exception_handler(GlasspassError)
    async def glasspass_error_handler(request: Request, exc: GlasspassError):
        body = {"detail": str(exc)}
        if isinstance(exc, Erased) and exc.erased_at is not None:
            body["erased_at"] = exc.erased_at
        return JSONResponse(status_code=_status_for(exc), content=body)

    def caller(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise Unauthenticated("missing bearer token")
        token = header[7:].strip()
        if not token:
            raise Unauthenticated("empty bearer token")
        platform.principal(token)  # 401 on unknown ids
        return token

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "height": platform.ledger.height}

    # -- principals ----------------------------------------------------------

    @app.post("/principals", status_code=201)
    def register_principal(body: PrincipalBody, account_id: str = Depends(caller)):
        principal = platform.register_principal(
            account_id, body.account_id, body.role, body.display_name
        )
        return {
            "account_id": principal.account_id,
            "role": principal.role.value,
            "display_name": principal.display_name,
        }

    @app.get("/principals")
    def list_principals(account_id: str = Depends(caller)):
        return {"principals": platform.principals()}

    @app.get("/whoami")
    def whoami(account_id: str = Depends(caller)):
        principal = platform.principal(account_id)
        return {
            "account_id": principal.account_id,
            "role": principal.role.value,
            "display_name": principal.display_name,
        }

    # -- agreement phase -----------------------------------------------------

    @app.post("/purposes", status_code=201)
    def publish_purposes(body: PurposesBody, account_id: str = Depends(caller)):
        return platform.publish_purposes(account_id, body.records)

    @app.get("/purposes")
    def get_purposes(account_id: str = Depends(caller)):
        out = {"purposes": platform.purposes(account_id)}
        principal = platform.principal(account_id)
        if principal.role.value == "Citizen":
            out["consent"] = {
                str(idx): consent
                for idx, consent in platform.consent_of(account_id).items()
            }
        return out

    @app.post("/votes", status_code=201)
    def cast_votes(body: VotesBody, account_id: str = Depends(caller)):
        return platform.vote(account_id, body.votes)

    # -- passport lifecycle --------------------------------------------------

    @app.post("/passports", status_code=201)
    def create_passport(body: PassportBody, account_id: str = Depends(caller)):
        return platform.create_passport(account_id, body.record, body.citizen)

    @app.get("/passports")
    def list_passports(account_id: str = Depends(caller)):
        return {"anon_cids": platform.live_passports_of(account_id)}

    @app.post("/access-requests")
    def access_passport(body: AccessBody, account_id: str = Depends(caller)):
        return platform.access(account_id, body.anon_cid, body.operations)

    @app.post("/erasure-requests")
    def request_erasure(body: ErasureBody, account_id: str = Depends(caller)):
        ack = platform.request_erasure(account_id, body.anon_cid)
        status = 410 if ack.get("already") else 200
        return JSONResponse(status_code=status, content=ack)

    # -- verification --------------------------------------------------------

    @app.post("/verify")
    def run_verification(body: VerifyBody, account_id: str = Depends(caller)):
        return platform.run_verification(account_id, body.citizen)

    @app.post("/erase-verify")
    def run_erase_verify(account_id: str = Depends(caller)):
        return platform.run_erase_verify(account_id)

    @app.get("/reports")
    def reports(account_id: str = Depends(caller)):
        return {"reports": platform.reports()}

    @app.get("/reports/latest")
    def latest_report(account_id: str = Depends(caller)):
        return platform.latest_report()

    # -- introspection and benchmarks ----------------------------------------

    @app.get("/ledger/blocks")
    def ledger_blocks(account_id: str = Depends(caller)):
        return {"blocks": platform.ledger_blocks()}

    @app.post("/bench/cids")
    def bench_cids(body: BenchCidsBody, account_id: str = Depends(caller)):
        return bench.bench_cids(body.count, body.population)

    return app

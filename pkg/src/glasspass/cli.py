"""Command-line client and experiment driver.

Protocol commands talk to a running service (--server) or to an
in-process deployment over the same HTTP app (--embedded --data-dir).
The bearer identity comes from --token or GLASS_TOKEN. Bench commands
run locally, write CSV plus a rendered PNG into --out, and exit 0 only
if their postcondition held (monotone gas curves, ordered mining
means, bounded lookup hops).
"""

from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click

from glasspass import reportfig
from glasspass.service import bench


class ApiError(click.ClickException):
    def __init__(self, status: int, detail: str):
        super().__init__(f"HTTP {status}: {detail}")
        self.status = status


class Client:
    """Uniform JSON transport for remote and embedded modes."""

    def __init__(self, server: str | None, embedded_dir: str | None, token: str | None):
        self.token = token
        if embedded_dir:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from glasspass.platform import Platform
            from glasspass.service.app import create_app

            self._http = TestClient(create_app(Platform(embedded_dir)))
            self._base = ""
        elif server:
            import httpx

            self._http = httpx.Client(base_url=server, timeout=30.0)
            self._base = ""
        else:
            raise click.UsageError("need --server URL or --embedded with --data-dir")

    def call(self, method: str, path: str, body: dict | None = None) -> tuple[int, dict]:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = self._http.request(method, path, json=body, headers=headers)
        except Exception as exc:  # connection-level failure
            raise click.ClickException(f"cannot reach service: {exc}") from exc
        try:
            data = response.json()
        except ValueError:
            data = {"detail": response.text}
        return response.status_code, data

    def expect(self, method: str, path: str, body: dict | None = None, ok=(200, 201)) -> dict:
        status, data = self.call(method, path, body)
        if status not in ok:
            raise ApiError(status, str(data.get("detail", data)))
        return data


def _emit(ctx: click.Context, data: dict, human: str):
    if ctx.obj.get("json"):
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        click.echo(human)


def _client(ctx: click.Context) -> Client:
    obj = ctx.obj
    return Client(obj.get("server"), obj.get("data_dir") if obj.get("embedded") else None, obj.get("token"))


def _parse_int_list(text: str) -> list[int]:
    """Accept "1,6,12" and "1..10" range syntax."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _write_csv(path: Path, rows: list[dict], columns: list[str]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


@click.group()
@click.option("--server", envvar="GLASS_SERVER", default=None, help="Service base URL.")
@click.option("--embedded", is_flag=True, help="Run the service in-process.")
@click.option(
    "--data-dir",
    envvar="GLASS_DATA_DIR",
    default="./glasspass-data",
    show_default=True,
    help="Data directory for --embedded and serve.",
)
@click.option("--token", "-t", envvar="GLASS_TOKEN", default=None, help="Bearer identity.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, server, embedded, data_dir, token, as_json):
    """Privacy-preserving vaccine passport platform client."""
    ctx.obj = {
        "server": server,
        "embedded": embedded,
        "data_dir": data_dir,
        "token": token,
        "json": as_json,
    }


# -- serve --------------------------------------------------------------------


@main.command()
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_context
def serve(ctx, config_path, host, port):
    """Run the HTTP service."""
    import uvicorn

    from glasspass.service.app import create_app
    from glasspass.service.config import ServiceConfig

    config = ServiceConfig.load(config_path)
    if ctx.obj.get("data_dir") and not os.environ.get("GLASS_DATA_DIR"):
        config = ServiceConfig.load(config_path, env={"GLASS_DATA_DIR": ctx.obj["data_dir"]})
    app = create_app(config.build_platform())
    uvicorn.run(app, host=host or config.host, port=port or config.port, log_level="warning")


# -- protocol commands --------------------------------------------------------


@main.group()
def admin():
    """Administrator operations."""


@admin.command("publish-purposes")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def publish_purposes(ctx, file):
    """Publish purpose records from a JSON file (a list of records)."""
    records = json.loads(Path(file).read_text("utf-8"))
    if isinstance(records, dict):
        records = records.get("records", [])
    data = _client(ctx).expect("POST", "/purposes", {"records": records})
    _emit(ctx, data, f"published {data['count']} purposes (gas {data['gas_used']})")


@admin.command("create-passport")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--citizen", default=None, help="Owning citizen account id.")
@click.pass_context
def create_passport(ctx, file, citizen):
    """Create a passport from a JSON file: {record: {...}, citizen: id}."""
    payload = json.loads(Path(file).read_text("utf-8"))
    if "record" not in payload:
        payload = {"record": payload}
    if citizen:
        payload["citizen"] = citizen
    if "citizen" not in payload:
        raise click.UsageError("citizen id required (in file or via --citizen)")
    data = _client(ctx).expect("POST", "/passports", payload)
    _emit(ctx, data, f"created passport {data['anon_cid']} ({data['bytes']} bytes)")


@main.group()
def citizen():
    """Citizen operations."""


@citizen.command()
@click.argument("purpose_idx", type=int)
@click.argument("choice", type=click.Choice(["yes", "no"]))
@click.pass_context
def vote(ctx, purpose_idx, choice):
    """Consent (yes) or object (no) to one purpose."""
    data = _client(ctx).expect(
        "POST", "/votes", {"votes": [[purpose_idx, choice == "yes"]]}
    )
    _emit(ctx, data, f"vote recorded for purpose {purpose_idx}: {choice}")


@citizen.command()
@click.argument("anon_cid")
@click.pass_context
def erase(ctx, anon_cid):
    """Exercise the right to be forgotten for one passport."""
    status, data = _client(ctx).call("POST", "/erasure-requests", {"anon_cid": anon_cid})
    if status not in (200, 410):
        raise ApiError(status, str(data.get("detail", data)))
    note = " (already erased)" if status == 410 else ""
    _emit(ctx, data, f"erased {anon_cid}{note}")


@main.group()
def actor():
    """Actor operations."""


@actor.command()
@click.argument("anon_cid")
@click.option("--ops", default="read", show_default=True, help="Comma-separated operations.")
@click.pass_context
def access(ctx, anon_cid, ops):
    """Request passport data; the access is logged on the ledger."""
    operations = [op for op in ops.split(",") if op]
    data = _client(ctx).expect(
        "POST", "/access-requests", {"anon_cid": anon_cid, "operations": operations}
    )
    if ctx.obj.get("json"):
        _emit(ctx, data, "")
    else:
        click.echo(json.dumps(data["passport"], indent=2))


@main.group()
def arbiter():
    """Arbiter operations."""


@arbiter.command()
@click.option("--citizen", default=None, help="Limit the check to one citizen.")
@click.pass_context
def verify(ctx, citizen):
    """Run consent verification and store the report."""
    data = _client(ctx).expect("POST", "/verify", {"citizen": citizen})
    violators = data["violators"]
    _emit(
        ctx,
        data,
        f"report {data['id']}: {len(violators)} violator(s)"
        + (f" -> {', '.join(violators)}" if violators else ""),
    )


@arbiter.command("erase-verify")
@click.pass_context
def erase_verify_cmd(ctx):
    """Audit erasure requests against the confirmation deadline."""
    data = _client(ctx).expect("POST", "/erase-verify")
    _emit(
        ctx,
        data,
        f"{len(data['violations'])} erasure violation(s), {len(data['pending'])} pending",
    )


# -- benches ------------------------------------------------------------------


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@main.group("bench")
def bench_group():
    """Experiment drivers; write CSV and PNG into --out."""


@bench_group.command("cids")
@click.option("--count", default=100, show_default=True, type=int)
@click.option("--population", default=bench.DEFAULT_POPULATION, show_default=True, type=int)
@click.option("--out", default="./reports", show_default=True)
@click.pass_context
def bench_cids_cmd(ctx, count, population, out):
    """Time cid derivation over growing synthetic passport corpora."""
    report = bench.bench_cids(count, population)
    out_path = _out_dir(out)
    _write_csv(out_path / "cids.csv", report["rows"], ["count", "elapsed_s"])
    reportfig.fig_cids(report, out_path / "cids.png")
    extra = report["extrapolation"]
    _emit(
        ctx,
        report,
        f"{report['count']} cids in {report['elapsed_s']:.4f}s "
        f"(per 100: {report['per_100_s']:.4f}s); "
        f"population {extra['population']}: {extra['minutes']:.1f} min",
    )
    if not (report["elapsed_s"] > 0 and extra["seconds"] > 0):
        sys.exit(1)


@bench_group.command("gas")
@click.option("--actors", default="1..10", show_default=True)
@click.option("--ops", default=3, show_default=True, type=int)
@click.option("--gas-price", default=20, show_default=True, type=int)
@click.option("--out", default="./reports", show_default=True)
@click.pass_context
def bench_gas_cmd(ctx, actors, ops, gas_price, out):
    """Gas cost per contract flow as the actor count grows."""
    actor_counts = _parse_int_list(actors)
    report = bench.bench_gas(actor_counts, ops, gas_price)
    out_path = _out_dir(out)
    _write_csv(
        out_path / "gas.csv", report["rows"], ["actors", "contract", "gas", "ether"]
    )
    reportfig.fig_gas(report, out_path / "gas.png")
    # Postcondition: cost strictly increasing in actors for every contract.
    monotone = True
    for contract in ("Policy", "Log", "Access", "Verification"):
        series = [r["ether"] for r in sorted(
            (r for r in report["rows"] if r["contract"] == contract),
            key=lambda r: r["actors"],
        )]
        monotone = monotone and all(a < b for a, b in zip(series, series[1:]))
    _emit(ctx, report, f"gas bench over actors {actor_counts}: monotone={monotone}")
    if not monotone:
        sys.exit(1)


@bench_group.command("mining")
@click.option("--actors", default="1..5", show_default=True)
@click.option("--gas-prices", default="1,6,12", show_default=True)
@click.option("--samples", default=100, show_default=True, type=int)
@click.option("--seed", default=7, show_default=True, type=int)
@click.option("--out", default="./reports", show_default=True)
@click.pass_context
def bench_mining_cmd(ctx, actors, gas_prices, samples, seed, out):
    """Seeded mining-time distribution per gas price and actor count."""
    actor_counts = _parse_int_list(actors)
    prices = _parse_int_list(gas_prices)
    report = bench.bench_mining(actor_counts, prices, samples, seed)
    out_path = _out_dir(out)
    _write_csv(
        out_path / "mining.csv",
        report["rows"],
        ["gas_price_gwei", "actors", "samples", "mean_time_s"],
    )
    reportfig.fig_mining(report, out_path / "mining.png")
    by_price = {
        price: sum(r["mean_time_s"] for r in report["rows"] if r["gas_price_gwei"] == price)
        / len([r for r in report["rows"] if r["gas_price_gwei"] == price])
        for price in prices
    }
    ordered = all(
        by_price[a] > by_price[b]
        for a, b in zip(sorted(prices), sorted(prices)[1:])
    )
    _emit(
        ctx,
        {"rows": report["rows"], "mean_by_price": by_price},
        "mean mining time by price: "
        + ", ".join(f"{p} gwei -> {by_price[p]:.2f}s" for p in sorted(prices))
        + f" (ordered={ordered})",
    )
    if not ordered:
        sys.exit(1)


@main.group()
def sim():
    """Network simulations."""


@sim.command("dht")
@click.option("--nodes", default="64,256,1024", show_default=True)
@click.option("--lookups", default=300, show_default=True, type=int)
@click.option("--seed", default=11, show_default=True, type=int)
@click.option("--out", default="./reports", show_default=True)
@click.pass_context
def sim_dht_cmd(ctx, nodes, lookups, seed, out):
    """Measure lookup cost against network size."""
    node_counts = _parse_int_list(nodes)
    report = bench.sim_dht(node_counts, lookups, seed)
    out_path = _out_dir(out)
    _write_csv(
        out_path / "dht.csv",
        report["rows"],
        [
            "nodes",
            "lookups",
            "mean_hops",
            "max_hops",
            "mean_messages",
            "mean_elapsed_ms",
            "hop_bound",
        ],
    )
    reportfig.fig_dht(report, out_path / "dht.png")
    bounded = all(r["mean_hops"] <= r["hop_bound"] for r in report["rows"])
    _emit(
        ctx,
        report,
        "; ".join(
            f"N={r['nodes']}: {r['mean_hops']:.2f} hops (bound {r['hop_bound']:.0f})"
            for r in report["rows"]
        )
        + f" (bounded={bounded})",
    )
    if not bounded:
        sys.exit(1)


if __name__ == "__main__":
    main()

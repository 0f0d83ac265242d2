"""The three experiment drivers plus the DHT scaling measurement.

Each function is standalone: gas and mining benches run on scratch
in-memory ledgers, the cid bench touches no storage at all, and the
DHT bench builds throwaway simulated networks. Results come back as
plain dicts with a "rows" list shaped like the CSV the CLI writes.
"""

from __future__ import annotations

import math
import time

from glasspass.cas import root_cid_for
from glasspass.dht import Network, SimConfig
from glasspass.errors import InvalidArgument
from glasspass.ledger import Ledger, ether_cost
from glasspass.passport import synthetic_passport

DEFAULT_POPULATION = 387_286  # mid-2020 population of Edinburgh
OPS_ORDER = ("read", "write", "update", "delete", "view")


def bench_cids(count: int, population: int = DEFAULT_POPULATION) -> dict:
    """Time content-identifier derivation for synthetic passports.

    Measures pure cid computation (serialize, chunk, hash, link): no
    sealing, no storage, no network. Reports a row per corpus size in
    tenths of `count` and extrapolates the per-100 rate to an entire
    population.
    """
    if count < 1:
        raise InvalidArgument("count must be >= 1")
    if population < 1:
        raise InvalidArgument("population must be >= 1")
    sizes = sorted({max(1, (count * i) // 10) for i in range(1, 11)})
    rows = []
    for size in sizes:
        payloads = [synthetic_passport(i).canonical() for i in range(1, size + 1)]
        start = time.perf_counter()
        for payload in payloads:
            root_cid_for(payload)
        elapsed = time.perf_counter() - start
        rows.append({"count": size, "elapsed_s": elapsed})
    full = rows[-1]
    per_100 = full["elapsed_s"] / full["count"] * 100
    seconds = population / 100 * per_100
    return {
        "count": full["count"],
        "elapsed_s": full["elapsed_s"],
        "per_100_s": per_100,
        "rows": rows,
        "extrapolation": {
            "population": population,
            "seconds": seconds,
            "minutes": seconds / 60,
        },
    }


def extrapolate(population: int, per_100_s: float) -> float:
    """Seconds to derive cids for a population at a measured per-100 rate."""
    return population / 100 * per_100_s


def _scenario_ops(ops_per_actor: int) -> list[str]:
    if not 1 <= ops_per_actor <= len(OPS_ORDER):
        raise InvalidArgument(f"ops_per_actor must be in 1..{len(OPS_ORDER)}")
    return list(OPS_ORDER[:ops_per_actor])


def _run_gas_scenario(actors: int, ops_per_actor: int) -> dict[str, int]:
    """One deployment's worth of protocol traffic; returns gas per flow.

    The canonical shape: one citizen, `actors` actors, each with
    `ops_per_actor` purposes. Purposes and votes land in one
    transaction each; logging and access each take one transaction per
    actor; verification is a single run over all actors.
    """
    ops = _scenario_ops(ops_per_actor)
    led = Ledger()
    admin, citizen = "admin", "citizen-1"
    actor_ids = [f"actor-{i}" for i in range(1, actors + 1)]
    policy, _ = led.deploy("Policy", admin)
    log, _ = led.deploy("Log", admin)
    access, _ = led.deploy("Access", admin)
    verification, _ = led.deploy(
        "Verification", admin, links={"policy": policy, "access": access}
    )

    records = [
        {"actor": a, "operation": op, "purpose": f"{op} vaccination passports"}
        for a in actor_ids
        for op in ops
    ]
    purposes_tx = led.call(admin, policy, "add_purposes", {"records": records})
    votes = [[i, True] for i in range(len(records))]
    votes_tx = led.call(citizen, policy, "add_votes", {"votes": votes}, timestamp=1.0)

    log_gas = 0
    for i in range(actors):
        tx = led.call(
            admin, log, "append", {"anon_cid": f"{i:064x}", "created_at": 2.0}
        )
        log_gas += tx.gas_used

    access_gas = 0
    for a in actor_ids:
        tx = led.call(
            a,
            access,
            "log_access",
            {
                "requester_hash": a,
                "access_time": 3.0,
                "operations": ops,
                "subject": citizen,
            },
        )
        access_gas += tx.gas_used

    verify_tx = led.call(
        "arbiter-1",
        verification,
        "run",
        {"actors": actor_ids, "subject": citizen},
        timestamp=4.0,
    )
    return {
        "Policy": purposes_tx.gas_used + votes_tx.gas_used,
        "Log": log_gas,
        "Access": access_gas,
        "Verification": verify_tx.gas_used,
    }


def bench_gas(
    actor_counts: list[int], ops_per_actor: int = 3, gas_price: int = 20
) -> dict:
    """Total gas and ether per contract flow as the actor count grows."""
    rows = []
    for actors in actor_counts:
        if actors < 1:
            raise InvalidArgument("actor counts must be >= 1")
        totals = _run_gas_scenario(actors, ops_per_actor)
        for contract in ("Policy", "Log", "Access", "Verification"):
            gas = totals[contract]
            rows.append(
                {
                    "actors": actors,
                    "contract": contract,
                    "gas": gas,
                    "ether": ether_cost(gas, gas_price),
                }
            )
    return {
        "ops_per_actor": ops_per_actor,
        "gas_price_gwei": gas_price,
        "rows": rows,
    }


def bench_mining(
    actor_counts: list[int],
    gas_prices: list[int],
    samples: int = 100,
    seed: int = 7,
) -> dict:
    """Seeded mining-time samples per (gas price, actor count) cell.

    Every cell mines one block of `samples` identical-priced access
    transactions on a scratch ledger, so the per-transaction times are
    draws whose mean depends on price alone. Raw pairs are kept for
    rank-correlation checks.
    """
    if samples < 1:
        raise InvalidArgument("samples must be >= 1")
    rows = []
    pairs: list[tuple[int, int, float]] = []  # (gas_price, actors, time)
    for price in gas_prices:
        for actors in actor_counts:
            led = Ledger()
            access, _ = led.deploy("Access", "admin")
            actor_ids = [f"actor-{i}" for i in range(1, actors + 1)]
            for s in range(samples):
                led.submit(
                    actor_ids[s % actors],
                    access,
                    "log_access",
                    {
                        "requester_hash": actor_ids[s % actors],
                        "access_time": float(s),
                        "operations": ["read", "write"],
                        "subject": "citizen-1",
                    },
                    gas_price=price,
                )
            cell_seed = (seed * 1_000_003 + price * 1_009 + actors) & 0x7FFFFFFF
            _, times = led.mine(seed=cell_seed)
            mean = sum(times) / len(times)
            rows.append(
                {
                    "gas_price_gwei": price,
                    "actors": actors,
                    "samples": samples,
                    "mean_time_s": mean,
                }
            )
            pairs.extend((price, actors, t) for t in times)
    return {"seed": seed, "rows": rows, "pairs": pairs}


def sim_dht(node_counts: list[int], lookups: int = 300, seed: int = 11) -> dict:
    """Mean lookup rounds per network size, with the log-growth bound."""
    if lookups < 1:
        raise InvalidArgument("lookups must be >= 1")
    rows = []
    for n in node_counts:
        net = Network(SimConfig(seed=seed, node_count=n))
        results = net.run_lookups(lookups)
        hops = [r.rounds for r in results]
        rows.append(
            {
                "nodes": n,
                "lookups": lookups,
                "mean_hops": sum(hops) / len(hops),
                "max_hops": max(hops),
                "mean_messages": sum(r.messages for r in results) / len(results),
                "mean_elapsed_ms": sum(r.elapsed_ms for r in results) / len(results),
                "hop_bound": 2 * math.log2(n) if n > 1 else 1.0,
            }
        )
    return {"seed": seed, "rows": rows}

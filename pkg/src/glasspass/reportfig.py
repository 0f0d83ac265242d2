"""Figure renderers for the benchmark reports.

Each function takes the dict a bench function returned and writes one
PNG next to the CSV the CLI emits. Rendering is headless (Agg).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def fig_cids(report: dict, path: str | Path):
    rows = report["rows"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r["count"] for r in rows], [r["elapsed_s"] for r in rows], marker="o")
    ax.set_xlabel("passports")
    ax.set_ylabel("cid derivation time (s)")
    ax.set_title("Content-identifier generation time")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_gas(report: dict, path: str | Path):
    rows = report["rows"]
    contracts = sorted({r["contract"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for contract in contracts:
        sub = [r for r in rows if r["contract"] == contract]
        sub.sort(key=lambda r: r["actors"])
        ax.plot(
            [r["actors"] for r in sub],
            [r["ether"] for r in sub],
            marker="o",
            label=contract,
        )
    ax.set_xlabel("actors")
    ax.set_ylabel(f"cost (ether, {report['gas_price_gwei']} gwei)")
    ax.set_title("Contract cost versus number of actors")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_mining(report: dict, path: str | Path):
    rows = report["rows"]
    prices = sorted({r["gas_price_gwei"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for price in prices:
        sub = [r for r in rows if r["gas_price_gwei"] == price]
        sub.sort(key=lambda r: r["actors"])
        ax.plot(
            [r["actors"] for r in sub],
            [r["mean_time_s"] for r in sub],
            marker="o",
            label=f"{price} gwei",
        )
    ax.set_xlabel("actors")
    ax.set_ylabel("mean mining time (s)")
    ax.set_title("Mining time versus actors, by gas price")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def fig_dht(report: dict, path: str | Path):
    rows = sorted(report["rows"], key=lambda r: r["nodes"])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r["nodes"] for r in rows], [r["mean_hops"] for r in rows], marker="o", label="mean hops")
    ax.plot(
        [r["nodes"] for r in rows],
        [r["hop_bound"] for r in rows],
        linestyle="--",
        label="2*log2(N) bound",
    )
    ax.set_xscale("log", base=2)
    ax.set_xlabel("nodes")
    ax.set_ylabel("lookup rounds")
    ax.set_title("Lookup cost versus network size")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)

"""Gas schedule and cost arithmetic.

Deployment costs default to the four measured constants; call costs are
a linear model over records touched, which reproduces the qualitative
cost-versus-actors curves without an opcode-level virtual machine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from glasspass.errors import ConfigurationError, InvalidArgument

DEFAULT_DEPLOY_COST = MappingProxyType(
    {
        "Policy": 792_065,
        "Log": 157_339,
        "Access": 796_253,
        "Verification": 1_223_998,
    }
)


@dataclass(frozen=True)
class GasSchedule:
    deploy_cost: Mapping[str, int] = field(default_factory=lambda: DEFAULT_DEPLOY_COST)
    base_tx_cost: int = 21_000
    per_record_read: int = 800
    per_record_write: int = 20_000

    def __post_init__(self):
        for kind, cost in self.deploy_cost.items():
            if cost <= 0:
                raise InvalidArgument(f"deploy cost for {kind} must be positive")
        for name in ("base_tx_cost", "per_record_read", "per_record_write"):
            if getattr(self, name) <= 0:
                raise InvalidArgument(f"{name} must be positive")

    def call_cost(self, reads: int, writes: int) -> int:
        return self.base_tx_cost + reads * self.per_record_read + writes * self.per_record_write

    @classmethod
    def from_file(cls, path: str | Path) -> "GasSchedule":
        try:
            data = json.loads(Path(path).read_text("utf-8"))
            deploy = dict(DEFAULT_DEPLOY_COST)
            deploy.update({k: int(v) for k, v in data.get("deploy_cost", {}).items()})
            return cls(
                deploy_cost=MappingProxyType(deploy),
                base_tx_cost=int(data.get("base_tx_cost", 21_000)),
                per_record_read=int(data.get("per_record_read", 800)),
                per_record_write=int(data.get("per_record_write", 20_000)),
            )
        except (OSError, ValueError, TypeError) as exc:
            raise ConfigurationError(f"bad gas schedule file {path}: {exc}") from exc


def ether_cost(gas_used: int, gas_price_gwei: int) -> float:
    """Transaction cost in ether at the given gwei price."""
    return gas_used * gas_price_gwei * 1e-9

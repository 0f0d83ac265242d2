"""Service configuration: JSON file plus environment overrides.

GLASS_DATA_DIR and GLASS_LISTEN override the file; a missing file means
defaults. The config object knows how to build the Platform it
describes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from glasspass.compliance import DEFAULT_ERASURE_DEADLINE
from glasspass.dht import SimConfig
from glasspass.errors import ConfigurationError
from glasspass.ledger import GasSchedule
from glasspass.platform import Platform


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path = Path("./glasspass-data")
    listen: str = "127.0.0.1:8000"
    block_size: int | None = None
    gas_schedule_path: Path | None = None
    erasure_deadline: float = DEFAULT_ERASURE_DEADLINE
    dht_nodes: int = 16
    dht_seed: int = 1
    mining_seed: int = 0

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        data: dict = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text("utf-8"))
            except OSError as exc:
                raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"malformed config {path}: {exc}") from exc
        data_dir = env.get("GLASS_DATA_DIR") or data.get("data_dir") or "./glasspass-data"
        listen = env.get("GLASS_LISTEN") or data.get("listen") or "127.0.0.1:8000"
        gas_path = data.get("gas_schedule_path")
        return cls(
            data_dir=Path(data_dir),
            listen=str(listen),
            block_size=data.get("block_size"),
            gas_schedule_path=Path(gas_path) if gas_path else None,
            erasure_deadline=float(data.get("erasure_deadline", DEFAULT_ERASURE_DEADLINE)),
            dht_nodes=int(data.get("dht_nodes", 16)),
            dht_seed=int(data.get("dht_seed", 1)),
            mining_seed=int(data.get("mining_seed", 0)),
        )

    @property
    def host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.listen.rsplit(":", 1)[1])
        except (IndexError, ValueError):
            raise ConfigurationError(f"listen address needs host:port, got {self.listen!r}")

    def build_platform(
        self, clock: Callable[[], float] | None = None, fail_after: str | None = None
    ) -> Platform:
        schedule = (
            GasSchedule.from_file(self.gas_schedule_path) if self.gas_schedule_path else None
        )
        return Platform(
            data_dir=self.data_dir,
            block_size=self.block_size,
            gas_schedule=schedule,
            erasure_deadline=self.erasure_deadline,
            dht_config=SimConfig(seed=self.dht_seed, node_count=self.dht_nodes),
            mining_seed=self.mining_seed,
            clock=clock,
            fail_after=fail_after,
        )

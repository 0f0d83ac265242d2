import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient  # noqa: F401  (quiet the import-time warning)

from glasspass.platform import Platform


class FakeClock:
    """Deterministic time source; tests advance it explicitly."""

    def __init__(self, start: float = 1_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float):
        self.now += seconds


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def platform_factory(tmp_path, clock):
    """Builds platforms over subdirectories of one tmp dir; reusing a
    name reopens the same deployment."""

    def build(name: str = "main", **kwargs) -> Platform:
        kwargs.setdefault("clock", clock)
        return Platform(tmp_path / name, **kwargs)

    return build


@pytest.fixture
def seeded_platform(platform_factory):
    platform = platform_factory()
    platform.register_principal("admin", "citizen-1", "Citizen", "Jane Doe")
    platform.register_principal("admin", "citizen-2", "Citizen", "Joe Bloggs")
    platform.register_principal("admin", "actor-1", "Actor", "GP practice")
    platform.register_principal("admin", "actor-2", "Actor", "Travel authority")
    platform.register_principal("admin", "arbiter-1", "Arbiter", "Data authority")
    return platform


def record_data(chi: str = "0000000001", **overrides) -> dict:
    data = {
        "chi": chi,
        "surname": "Doe",
        "forename": "John",
        "dob": "02/01/1965",
        "dose_dates": ["01/06/2021", "30/06/2021"],
        "manufacturer": "Moderna Biotech Spain S.L.",
        "vaccine_product": "COVID-19 Vaccine Moderna",
        "prophylaxis": "SARS-CoV-2 mRNA vaccine",
    }
    data.update(overrides)
    return data

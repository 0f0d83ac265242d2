"""Vaccination passport records and their canonical wire form.

The wire form is UTF-8 JSON with one top-level key holding the record
fields in a fixed order: patient identity first (CHI, names, date of
birth), then disease and issuer fields, then the dose count, the first
dose date, the vaccine product fields, and any further dose dates last.
Serialization is byte-stable: equal records always produce identical
bytes, which is what makes content addressing of passports meaningful.

CHI is a 10-digit patient identifier; it is the only field the
synthetic generator varies, so benchmark corpora get distinct content
hashes from distinct CHIs alone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime

from glasspass.errors import InvalidArgument

TOP_KEY = "COVID-19 Vaccination Status"
CHI_RE = re.compile(r"^\d{10}$")


def _check_date(name: str, value: str) -> str:
    try:
        datetime.strptime(value, "%d/%m/%Y")
    except ValueError as exc:
        raise InvalidArgument(f"{name} must be DD/MM/YYYY, got {value!r}") from exc
    return value


@dataclass(frozen=True)
class PassportRecord:
    chi: str
    surname: str
    forename: str
    dob: str
    dose_dates: tuple[str, ...]
    manufacturer: str
    vaccine_product: str
    prophylaxis: str
    disease_targeted: str = "COVID-19"
    country_of_vaccination: str = "Scotland"
    issued_by: str = "NHS Scotland"

    def __post_init__(self):
        if not CHI_RE.match(self.chi):
            raise InvalidArgument(f"CHI must be exactly 10 digits, got {self.chi!r}")
        if not self.dose_dates:
            raise InvalidArgument("at least one dose date required")
        _check_date("DOB", self.dob)
        for i, date in enumerate(self.dose_dates, start=1):
            _check_date(f"dose {i} date", date)

    @property
    def doses(self) -> int:
        return len(self.dose_dates)

    def canonical(self) -> bytes:
        """Byte-stable wire form; field order is part of the contract."""
        n = self.doses
        body = {
            "CHI": self.chi,
            "Surname(s)": self.surname,
            "Forename(s)": self.forename,
            "DOB": self.dob,
            "Disease targeted": self.disease_targeted,
            "Country of vaccination": self.country_of_vaccination,
            "Issued by": self.issued_by,
            "Doses received": str(n),
            f"Dose 1 of {n}": self.dose_dates[0],
            "Manufacturer": self.manufacturer,
            "Vaccine medicinal product": self.vaccine_product,
            "Vaccine/Prophylaxis": self.prophylaxis,
        }
        for i in range(2, n + 1):
            body[f"Dose {i} of {n}"] = self.dose_dates[i - 1]
        return json.dumps({TOP_KEY: body}).encode("utf-8")


def parse(payload: bytes) -> PassportRecord:
    """Inverse of canonical(); rejects anything structurally off."""
    try:
        outer = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidArgument(f"not a passport payload: {exc}") from exc
    if not isinstance(outer, dict) or set(outer) != {TOP_KEY}:
        raise InvalidArgument(f"expected single top-level key {TOP_KEY!r}")
    body = outer[TOP_KEY]
    if not isinstance(body, dict):
        raise InvalidArgument("passport body must be an object")
    try:
        n = int(body["Doses received"])
        if n < 1:
            raise InvalidArgument("Doses received must be >= 1")
        dose_dates = tuple(body[f"Dose {i} of {n}"] for i in range(1, n + 1))
        record = PassportRecord(
            chi=body["CHI"],
            surname=body["Surname(s)"],
            forename=body["Forename(s)"],
            dob=body["DOB"],
            dose_dates=dose_dates,
            manufacturer=body["Manufacturer"],
            vaccine_product=body["Vaccine medicinal product"],
            prophylaxis=body["Vaccine/Prophylaxis"],
            disease_targeted=body["Disease targeted"],
            country_of_vaccination=body["Country of vaccination"],
            issued_by=body["Issued by"],
        )
    except KeyError as exc:
        raise InvalidArgument(f"missing passport field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise InvalidArgument(f"bad passport field: {exc}") from exc
    expected_keys = 12 + (n - 1)
    if len(body) != expected_keys:
        raise InvalidArgument("unexpected extra passport fields")
    return record


def example_passport() -> PassportRecord:
    """The fixed two-dose reference record used across tests and docs."""
    return PassportRecord(
        chi="0000000001",
        surname="Doe",
        forename="John",
        dob="02/01/1965",
        dose_dates=("01/06/2021", "30/06/2021"),
        manufacturer="Moderna Biotech Spain S.L.",
        vaccine_product="COVID-19 Vaccine Moderna",
        prophylaxis="SARS-CoV-2 mRNA vaccine",
    )


def synthetic_passport(seq: int) -> PassportRecord:
    """Benchmark record number `seq`; only the CHI varies."""
    if not 1 <= seq <= 9_999_999_999:
        raise InvalidArgument(f"seq out of CHI range: {seq}")
    base = example_passport()
    return PassportRecord(
        chi=str(seq).zfill(10),
        surname=base.surname,
        forename=base.forename,
        dob=base.dob,
        dose_dates=base.dose_dates,
        manufacturer=base.manufacturer,
        vaccine_product=base.vaccine_product,
        prophylaxis=base.prophylaxis,
    )

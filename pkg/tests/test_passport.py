import dataclasses
import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from glasspass.errors import InvalidArgument
from glasspass.passport import PassportRecord, example_passport, parse, synthetic_passport

GOLDEN = Path(__file__).parent / "data" / "golden_passport.json"


def test_example_matches_golden_bytes_exactly():
    assert example_passport().canonical() == GOLDEN.read_bytes()


def test_golden_is_452_bytes():
    assert len(GOLDEN.read_bytes()) == 452


def test_field_order_in_wire_form():
    body = json.loads(example_passport().canonical().decode())
    keys = list(body["COVID-19 Vaccination Status"])
    assert keys == [
        "CHI",
        "Surname(s)",
        "Forename(s)",
        "DOB",
        "Disease targeted",
        "Country of vaccination",
        "Issued by",
        "Doses received",
        "Dose 1 of 2",
        "Manufacturer",
        "Vaccine medicinal product",
        "Vaccine/Prophylaxis",
        "Dose 2 of 2",
    ]


def test_parse_inverts_canonical():
    record = example_passport()
    assert parse(record.canonical()) == record


@pytest.mark.parametrize("doses", [1, 2, 3, 5])
def test_round_trip_any_dose_count(doses):
    base = example_passport()
    record = dataclasses.replace(base, dose_dates=("01/06/2021",) * doses)
    again = parse(record.canonical())
    assert again == record
    assert again.doses == doses


def test_defaults():
    record = example_passport()
    assert record.disease_targeted == "COVID-19"
    assert record.country_of_vaccination == "Scotland"
    assert record.issued_by == "NHS Scotland"


class TestValidation:
    def test_chi_must_be_ten_digits(self):
        for bad in ("123", "12345678901", "123456789a", ""):
            with pytest.raises(InvalidArgument):
                dataclasses.replace(example_passport(), chi=bad)

    def test_dates_must_be_day_month_year(self):
        with pytest.raises(InvalidArgument):
            dataclasses.replace(example_passport(), dob="1965-01-02")
        with pytest.raises(InvalidArgument):
            dataclasses.replace(example_passport(), dose_dates=("31/02/2021",))

    def test_at_least_one_dose(self):
        with pytest.raises(InvalidArgument):
            dataclasses.replace(example_passport(), dose_dates=())


class TestParseRejects:
    def test_not_json(self):
        with pytest.raises(InvalidArgument):
            parse(b"\xff\xfe")
        with pytest.raises(InvalidArgument):
            parse(b"plain text")

    def test_wrong_top_key(self):
        with pytest.raises(InvalidArgument):
            parse(b'{"Passport": {}}')

    def test_missing_field(self):
        body = json.loads(example_passport().canonical())
        del body["COVID-19 Vaccination Status"]["CHI"]
        with pytest.raises(InvalidArgument):
            parse(json.dumps(body).encode())

    def test_extra_field(self):
        body = json.loads(example_passport().canonical())
        body["COVID-19 Vaccination Status"]["Smuggled"] = "x"
        with pytest.raises(InvalidArgument):
            parse(json.dumps(body).encode())

    def test_dose_count_mismatch(self):
        body = json.loads(example_passport().canonical())
        body["COVID-19 Vaccination Status"]["Doses received"] = "3"
        with pytest.raises(InvalidArgument):
            parse(json.dumps(body).encode())

    def test_zero_doses(self):
        body = json.loads(example_passport().canonical())
        inner = body["COVID-19 Vaccination Status"]
        inner["Doses received"] = "0"
        del inner["Dose 1 of 2"]
        del inner["Dose 2 of 2"]
        with pytest.raises(InvalidArgument):
            parse(json.dumps(body).encode())


class TestSynthetic:
    def test_chi_is_zero_padded_sequence(self):
        assert synthetic_passport(1).chi == "0000000001"
        assert synthetic_passport(387_286).chi == "0000387286"

    def test_only_chi_varies(self):
        a = synthetic_passport(1)
        b = synthetic_passport(2)
        assert dataclasses.replace(a, chi=b.chi) == b

    def test_distinct_sequences_distinct_bytes(self):
        seen = {synthetic_passport(i).canonical() for i in range(1, 101)}
        assert len(seen) == 100

    def test_all_same_length_as_golden(self):
        for i in (1, 99, 12345, 9_999_999_999):
            assert len(synthetic_passport(i).canonical()) == 452

    def test_range_enforced(self):
        with pytest.raises(InvalidArgument):
            synthetic_passport(0)
        with pytest.raises(InvalidArgument):
            synthetic_passport(10_000_000_000)


@given(st.integers(min_value=1, max_value=9_999_999_999))
def test_synthetic_round_trips(seq):
    record = synthetic_passport(seq)
    assert parse(record.canonical()) == record


@given(
    st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=30),
    st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=30),
)
def test_names_round_trip_through_wire_form(surname, forename):
    record = dataclasses.replace(example_passport(), surname=surname, forename=forename)
    assert parse(record.canonical()) == record

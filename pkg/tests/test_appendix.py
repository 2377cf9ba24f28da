from __future__ import annotations

import io
from fractions import Fraction

import pytest

from towerdensity.appendix import (
    DEFAULT_ROWS,
    AppendixRow,
    load_rows,
    matching_digits,
    reproduce_row,
    significant_digits,
)
from towerdensity.rigor import DOWN, dd_from_rational


@pytest.fixture(scope="module")
def table():
    return {r.q: reproduce_row(r) for r in DEFAULT_ROWS}


def test_default_rows_shape():
    qs = [r.q for r in DEFAULT_ROWS]
    assert qs == sorted(qs) and len(qs) == 26
    assert all(r.printed for r in DEFAULT_ROWS)
    assert (DEFAULT_ROWS[0].p, DEFAULT_ROWS[0].a, DEFAULT_ROWS[0].s) == (25000, 20, 20)


def test_table_statuses(table):
    status = {q: r.status for q, r in table.items()}
    assert status[41] == "ERRATUM" and status[43] == "ERRATUM"
    assert status[5] == "partial" and status[7] == "partial"
    assert all(s == "ok" for q, s in status.items() if q not in (5, 7, 41, 43))


def test_q7_probe_finds_doubled_prime_count(table):
    assert "p=5000 reproduces every printed digit" in table[7].note


def test_q5_upper_off_in_last_digit_only(table):
    r = table[5]
    assert r.match_lower == 40 and r.match_upper == 39


def test_errata_diagnoses(table):
    assert table[41].note == "printed digits duplicate the q=19 row"
    assert table[43].note == "printed digits are consistent with d(41), not d(43)"


def test_every_row_is_a_valid_interval(table):
    for r in table.values():
        iv = r.interval
        assert 0 <= iv.lower.value <= iv.upper.value <= 1
        assert iv.contains(iv.lower.as_fraction())
        # d(q) lies above 1/q for every q
        assert iv.upper.as_fraction() > Fraction(1, r.row.q)


def test_row_dict_keys(table):
    d = table[2].to_dict()
    assert {"q", "p", "a", "s", "lower", "upper", "lower_S", "digits_agreed", "winner_lower",
            "winner_upper", "match_lower", "match_upper", "status", "note"} == set(d)
    assert d["lower_S"] == "0.57735037605680781300117122274909902"
    assert d["upper"] == "0.57735048504767858495274723350063755"


def test_unprinted_row_is_computed():
    r = reproduce_row(AppendixRow(3, 30, 20, 20), precision=40)
    assert r.status == "computed" and r.match_lower is None


def test_load_rows():
    text = "q,p,a,s\n# comment\n2,100,20,20\n\n5,10,8,9\n"
    rows = load_rows(io.StringIO(text))
    assert rows == [AppendixRow(2, 100, 20, 20), AppendixRow(5, 10, 8, 9)]
    with pytest.raises(ValueError):
        load_rows(io.StringIO("2,100,20\n"))


def test_matching_digits():
    v = dd_from_rational(1, 3, 30, DOWN)
    assert matching_digits(v, "0.3333") == 4
    assert matching_digits(v, "0.3334") == 4        # one unit in the last place
    assert matching_digits(v, "0.3335") == 3
    assert matching_digits(v, "0.033") == 0         # different magnitude
    assert significant_digits("0.0099009900") == 8

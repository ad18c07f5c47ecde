import logging
import math

import pytest
import sympy
from _pytest.logging import LogCaptureFixture
from hypothesis import given
from hypothesis import strategies as st
from sympy.functions.combinatorial.numbers import stirling

from limtower_cli import delta
from limtower_cli.exceptions import NotPrimeError, OracleMismatchError, StageOutOfRangeError

# delta


def test_delta_values():
    """delta_2(2) = 2, delta_3(2) = 0, delta_3(5) = 150."""
    assert delta.delta(2, 2) == 2
    assert delta.delta(3, 2) == 0
    assert delta.delta(3, 5) == 150


def test_delta_of_one_is_one():
    """A single target: every map is onto."""
    assert all(delta.delta(1, k) == 1 for k in range(1, 20))


def test_delta_indices_start_at_one():
    with pytest.raises(StageOutOfRangeError):
        delta.delta(0, 3)
    with pytest.raises(StageOutOfRangeError):
        delta.stirling_oracle(2, 0)


def test_pascal_row():
    assert delta.pascal_row(4) == (1, 4, 6, 4, 1)
    assert delta.pascal_row(0) == (1,)


@given(st.integers(min_value=1, max_value=30), st.integers(min_value=1, max_value=30))
def test_delta_matches_sympy_stirling(n, k):
    """delta_n(k) = n! S(k, n) with sympy's Stirling numbers."""
    assert delta.delta(n, k) == math.factorial(n) * int(stirling(k, n))
    assert delta.stirling_oracle(n, k) == delta.delta(n, k)


def test_factorial_quotient():
    """delta_3(5) / 3! = S(5, 3) = 25."""
    assert delta.factorial_quotient(3, 5) == 25


# DeltaTable


def test_delta_table_properties(caplog: LogCaptureFixture):
    """Every property holds on a 12 x 12 table."""
    with caplog.at_level(logging.DEBUG):
        table = delta.DeltaTable.build(12, 12)
    assert table.value(3, 5) == 150
    assert all(check.holds for check in table.properties())
    assert ("limtower_cli.delta", logging.DEBUG, "Built delta table 12x12") in caplog.record_tuples


def test_delta_table_parallel_matches_sequential():
    assert delta.DeltaTable.build(10, 8, workers=4) == delta.DeltaTable.build(10, 8)


def test_delta_table_rejects_wrong_formula():
    """A formula that drifts from the oracle is caught while building."""

    def faulty(n, k):
        return delta.delta(n, k) + (1 if (n, k) == (3, 5) else 0)

    with pytest.raises(OracleMismatchError, match="delta_3\\(5\\) = 151"):
        delta.DeltaTable.build(5, 5, formula=faulty)


def test_delta_table_out_of_range():
    with pytest.raises(StageOutOfRangeError):
        delta.DeltaTable.build(3, 3).value(4, 1)


# Primes


def test_prime_divisibility():
    """p divides delta_n(p) for 2 <= n <= 25 and every prime p <= 97."""
    for p in sympy.primerange(2, 98):
        report = delta.check_prime_divisibility(p, 25)
        assert report.passed
        assert report.rows[0].exempt
        assert report.rows[0].value == 1


def test_prime_divisibility_rejects_composites():
    with pytest.raises(NotPrimeError):
        delta.check_prime_divisibility(9, 5)


def test_torsion_action():
    """Sigma f_n kills order-p classes for n > 1 and fixes them for n = 1."""
    assert delta.torsion_action(4, 7) == 0
    assert delta.torsion_action(1, 7) == 1
    assert all(delta.torsion_action(n, p) == 0 for n in range(2, 26) for p in (2, 3, 5, 97))

"""Alternating binomial sums ``delta_n(k) = sum_i (-1)^(n-i) C(n, i) i^k``.

``delta_n(k)`` counts surjections from a k-set onto an n-set, so it equals
``n! S(k, n)`` with ``S`` the Stirling numbers of the second kind. Both routes are
computed here and a table is only built when they agree.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import concurrent.futures
import dataclasses
import functools
import logging
import math
import typing

# Installed
import sympy

# Own modules
from limtower_cli import exceptions

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

DeltaFormula = typing.Callable[[int, int], int]

###############################################################################
# FORMULAS ######################################################### FORMULAS #
###############################################################################


def _check_indices(n: int, k: int):
    if n < 1 or k < 1:
        raise exceptions.StageOutOfRangeError(f"delta needs n >= 1 and k >= 1, got n={n}, k={k}")


@functools.lru_cache(maxsize=None)
def pascal_row(n: int) -> typing.Tuple[int, ...]:
    """``(C(n, 0), ..., C(n, n))`` by Pascal's rule."""
    row = (1,)
    for _ in range(n):
        row = tuple(a + b for a, b in zip((0,) + row, row + (0,)))
    return row


def delta(n: int, k: int) -> int:
    """Exact ``delta_n(k)``."""
    _check_indices(n, k)
    binomials = pascal_row(n)
    return sum((-1) ** (n - i) * binomials[i] * i**k for i in range(1, n + 1))


@functools.lru_cache(maxsize=None)
def stirling_column(n: int, max_k: int) -> typing.Tuple[int, ...]:
    """``(S(0, n), ..., S(max_k, n))`` from ``S(k, n) = n S(k-1, n) + S(k-1, n-1)``."""
    previous = (1,) + (0,) * max_k
    for j in range(1, n + 1):
        current = [0] * (max_k + 1)
        for k in range(1, max_k + 1):
            current[k] = j * current[k - 1] + previous[k - 1]
        previous = tuple(current)
    return previous


def stirling_oracle(n: int, k: int) -> int:
    """``n! S(k, n)``, an independent route to ``delta_n(k)``."""
    _check_indices(n, k)
    return math.factorial(n) * stirling_column(n, k)[k]


def factorial_quotient(n: int, k: int) -> int:
    """``delta_n(k) / n!``, checked to be exact."""
    quotient, remainder = divmod(delta(n, k), math.factorial(n))
    if remainder:
        raise exceptions.ConsistencyError(f"{n}! does not divide delta_{n}({k})")
    return quotient


###############################################################################
# TABLE ############################################################### TABLE #
###############################################################################


@dataclasses.dataclass(frozen=True)
class PropertyCheck:
    name: str
    holds: bool
    detail: str = ""


@dataclasses.dataclass(frozen=True)
class DeltaTable:
    """``delta_n(k)`` for ``1 <= n <= max_n`` and ``1 <= k <= max_k``."""

    max_n: int
    max_k: int
    values: typing.Tuple[typing.Tuple[int, ...], ...]

    def value(self, n: int, k: int) -> int:
        if not (1 <= n <= self.max_n and 1 <= k <= self.max_k):
            raise exceptions.StageOutOfRangeError(f"({n}, {k}) is outside the table")
        return self.values[n - 1][k - 1]

    @classmethod
    def build(
        cls, max_n: int, max_k: int, workers: int = 1, formula: DeltaFormula = delta
    ) -> "DeltaTable":
        """Compute every row twice; raises OracleMismatchError when the routes disagree."""
        _check_indices(max_n, max_k)

        def row(n: int) -> typing.Tuple[int, ...]:
            values = tuple(formula(n, k) for k in range(1, max_k + 1))
            for k, value in enumerate(values, start=1):
                expected = stirling_oracle(n, k)
                if value != expected:
                    raise exceptions.OracleMismatchError(
                        f"delta_{n}({k}) = {value} but n! S(k, n) = {expected}"
                    )
            return values

        rows = range(1, max_n + 1)
        if workers > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
                values = tuple(executor.map(row, rows))
        else:
            values = tuple(row(n) for n in rows)
        LOG.debug(f"Built delta table {max_n}x{max_k}")
        return cls(max_n=max_n, max_k=max_k, values=values)

    def properties(self) -> typing.List[PropertyCheck]:
        """Vanishing below the diagonal, ``n!`` on it and ``n!`` dividing every entry."""
        below = [
            (n, k)
            for n in range(1, self.max_n + 1)
            for k in range(1, min(n, self.max_k + 1))
            if self.value(n, k)
        ]
        diagonal = [
            n
            for n in range(1, min(self.max_n, self.max_k) + 1)
            if self.value(n, n) != math.factorial(n)
        ]
        divisibility = [
            (n, k)
            for n in range(1, self.max_n + 1)
            for k in range(1, self.max_k + 1)
            if self.value(n, k) % math.factorial(n)
        ]
        return [
            PropertyCheck("vanishes for k < n", not below, f"violations: {below}" if below else ""),
            PropertyCheck(
                "delta_n(n) = n!", not diagonal, f"violations: {diagonal}" if diagonal else ""
            ),
            PropertyCheck(
                "n! divides delta_n(k)",
                not divisibility,
                f"violations: {divisibility}" if divisibility else "",
            ),
            PropertyCheck("agrees with n! S(k, n)", True, "checked while building"),
        ]


###############################################################################
# PRIMES ############################################################# PRIMES #
###############################################################################


def _check_prime(p: int):
    if not sympy.isprime(p):
        raise exceptions.NotPrimeError(f"{p} is not prime")


@dataclasses.dataclass(frozen=True)
class PrimeDivisibilityRow:
    n: int
    value: int
    residue: int
    exempt: bool


@dataclasses.dataclass(frozen=True)
class PrimeDivisibilityReport:
    """``p | delta_n(p)`` for ``2 <= n <= n_max``; ``n = 1`` is listed but exempt."""

    prime: int
    rows: typing.Tuple[PrimeDivisibilityRow, ...]
    congruence_holds: bool

    @property
    def passed(self) -> bool:
        return self.congruence_holds and all(row.exempt or not row.residue for row in self.rows)


def check_prime_divisibility(p: int, n_max: int) -> PrimeDivisibilityReport:
    """Check ``p | delta_n(p)`` and the chain ``delta_n(p) = delta_n(1) = 0 (mod p)``.

    The chain is checked term by term: ``i^p = i (mod p)`` for every ``i <= n``
    and ``delta_n(1) = 0`` for ``n > 1``.
    """
    _check_prime(p)
    rows, congruence = [], True
    for n in range(1, n_max + 1):
        value = delta(n, p)
        termwise = all(pow(i, p, p) == i % p for i in range(1, n + 1))
        chain = (value - delta(n, 1)) % p == 0 and (n == 1 or delta(n, 1) == 0)
        congruence = congruence and termwise and chain
        rows.append(PrimeDivisibilityRow(n=n, value=value, residue=value % p, exempt=n == 1))
    return PrimeDivisibilityReport(prime=p, rows=tuple(rows), congruence_holds=congruence)


def torsion_action(n: int, p: int) -> int:
    """``delta_n(p) mod p``: how ``Sigma f_n`` acts on a class of order ``p``."""
    _check_prime(p)
    return delta(n, p) % p

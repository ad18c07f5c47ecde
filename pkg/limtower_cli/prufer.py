"""Products of Prüfer groups over a finite window of primes.

``A = Z/2^inf x Z/3^inf x ... x Z/p_N^inf`` with coordinates kept as exact
fractions ``m/p^e`` in ``[0, 1)``. The integers embed diagonally via
``k -> k (1/2, 1/3, ..., 1/p_N)`` and classes live in ``A_0 = A/Z``.
``A_0^(n)`` is the image of the classes supported beyond the first ``n`` primes.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import dataclasses
import fractions
import logging
import math
import typing

# Installed
import numpy as np
import sympy
from sympy.ntheory.modular import crt

# Own modules
from limtower_cli import exceptions
from limtower_cli.abelian import (
    FgAbGroup,
    Homomorphism,
    Presentation,
    Subgroup,
    diagonal_relations,
    hstack,
    matmul,
    present,
    quotient_data,
)
from limtower_cli.towers import (
    ResidueTower,
    Tower,
    TowerMap,
    TowerSES,
    image_filtration,
    restrict,
)

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

Fraction = fractions.Fraction

###############################################################################
# PRIMES ############################################################# PRIMES #
###############################################################################


def primorial(n: int) -> int:
    """``k(n)``: product of the first ``n`` primes, ``k(0) = 1``."""
    return int(sympy.primorial(n)) if n > 0 else 1


def least_prime_at_least(m: int) -> int:
    """``l(m)``: the smallest prime that is ``>= m``."""
    return int(sympy.nextprime(m - 1))


def kernel_generator(n: int) -> int:
    """Generator ``k(n)`` of ``Ker(A_n -> A_0) = k(n) Z`` on the diagonal."""
    return primorial(n)


@dataclasses.dataclass(frozen=True)
class PrimeWindow:
    """The first ``N`` primes, consecutively."""

    primes: typing.Tuple[int, ...]

    def __post_init__(self):
        primes = tuple(int(p) for p in self.primes)
        if not primes:
            raise exceptions.WindowError("A prime window needs at least one prime")
        expected = tuple(sympy.prime(i) for i in range(1, len(primes) + 1))
        if primes != expected:
            raise exceptions.WindowError(
                f"Window {primes} is not the first {len(primes)} primes {expected}"
            )
        object.__setattr__(self, "primes", primes)

    def __str__(self):
        return "{" + ", ".join(str(p) for p in self.primes) + "}"

    @classmethod
    def first(cls, size: int) -> "PrimeWindow":
        if size < 1:
            raise exceptions.WindowError(f"Window size must be positive, got {size}")
        return cls(tuple(sympy.prime(i) for i in range(1, size + 1)))

    @property
    def size(self) -> int:
        return len(self.primes)

    @property
    def largest(self) -> int:
        return self.primes[-1]

    def index_of(self, prime: int) -> int:
        """0-based position of ``prime``."""
        try:
            return self.primes.index(prime)
        except ValueError as err:
            raise exceptions.WindowError(f"{prime} is not in the window {self}") from err

    def primorial(self, n: int) -> int:
        if not 0 <= n <= self.size:
            raise exceptions.StageOutOfRangeError(f"Stage {n} is outside 0..{self.size}")
        return primorial(n)

    def count_below(self, bound: int) -> int:
        return sum(1 for p in self.primes if p < bound)


###############################################################################
# ELEMENTS ######################################################### ELEMENTS #
###############################################################################


def _p_exponent(denominator: int, prime: int) -> typing.Optional[int]:
    """``e`` with ``denominator == prime**e``, None if it is not a power of ``prime``."""
    exponent = 0
    while denominator % prime == 0:
        denominator //= prime
        exponent += 1
    return exponent if denominator == 1 else None


@dataclasses.dataclass(frozen=True)
class PruferElement:
    """Element of ``A`` over a window; coordinate ``i`` belongs to the i-th prime."""

    window: PrimeWindow
    coords: typing.Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.window.size:
            raise exceptions.ShapeMismatchError(
                f"Window {self.window} needs {self.window.size} coordinates, got {len(self.coords)}"
            )
        coords = tuple(Fraction(x) % 1 for x in self.coords)
        for prime, x in zip(self.window.primes, coords):
            if _p_exponent(x.denominator, prime) is None:
                raise exceptions.NotWellDefinedError(
                    f"Coordinate {x} at {prime} does not have a power of {prime} as denominator"
                )
        object.__setattr__(self, "coords", coords)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coords) + ")"

    @classmethod
    def zero(cls, window: PrimeWindow) -> "PruferElement":
        return cls(window, (Fraction(0),) * window.size)

    @classmethod
    def from_mapping(
        cls, window: PrimeWindow, coordinates: typing.Mapping[int, Fraction]
    ) -> "PruferElement":
        """Element with the given coordinates per prime; omitted primes are zero."""
        values = [Fraction(0)] * window.size
        for prime, value in coordinates.items():
            values[window.index_of(prime)] += Fraction(value)
        return cls(window, tuple(values))

    def _check_window(self, other: "PruferElement"):
        if other.window != self.window:
            raise exceptions.WindowError(f"Windows {self.window} and {other.window} differ")

    def __add__(self, other: "PruferElement") -> "PruferElement":
        self._check_window(other)
        return PruferElement(self.window, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "PruferElement":
        return PruferElement(self.window, tuple(-a for a in self.coords))

    def __sub__(self, other: "PruferElement") -> "PruferElement":
        return self + (-other)

    def __mul__(self, factor: int) -> "PruferElement":
        return PruferElement(self.window, tuple(factor * a for a in self.coords))

    __rmul__ = __mul__

    def coordinate(self, prime: int) -> Fraction:
        return self.coords[self.window.index_of(prime)]

    def coordinate_orders(self) -> typing.Tuple[int, ...]:
        """Order of each coordinate in its Prüfer group."""
        return tuple(x.denominator for x in self.coords)

    @property
    def order(self) -> int:
        return math.lcm(*self.coordinate_orders())

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def support(self) -> typing.Tuple[int, ...]:
        return tuple(p for p, x in zip(self.window.primes, self.coords) if x)

    @property
    def exponent(self) -> int:
        """Largest ``e`` with some coordinate of order ``p^e``."""
        return max(
            (_p_exponent(x.denominator, p) for p, x in zip(self.window.primes, self.coords)),
            default=0,
        )

    def extend(self, window: PrimeWindow) -> "PruferElement":
        """Same coordinates in a larger window, zero on the new primes."""
        if window.primes[: self.window.size] != self.window.primes:
            raise exceptions.WindowError(f"{window} does not extend {self.window}")
        return PruferElement(window, self.coords + (Fraction(0),) * (window.size - self.window.size))


def diag_embed(k: int, window: PrimeWindow) -> PruferElement:
    """``k (1/2, 1/3, ..., 1/p_N)``."""
    return PruferElement(window, tuple(Fraction(k, p) for p in window.primes))


@dataclasses.dataclass(frozen=True, eq=False)
class PruferClass:
    """Class of ``representative`` in ``A_0 = A / Z``.

    Two elements are in the same class when their difference is ``k`` times the
    diagonal; at window scale that holds iff every coordinate of the difference
    has order dividing its prime.
    """

    representative: PruferElement

    def __str__(self):
        return f"[{self.representative}]"

    @classmethod
    def zero(cls, window: PrimeWindow) -> "PruferClass":
        return cls(PruferElement.zero(window))

    @classmethod
    def from_mapping(
        cls, window: PrimeWindow, coordinates: typing.Mapping[int, Fraction]
    ) -> "PruferClass":
        return cls(PruferElement.from_mapping(window, coordinates))

    @property
    def window(self) -> PrimeWindow:
        return self.representative.window

    def __eq__(self, other):
        if not isinstance(other, PruferClass):
            return NotImplemented
        if other.window != self.window:
            return False
        return diagonal_multiplier(self.representative - other.representative) is not None

    def __hash__(self):
        return hash((self.window, self.canonical().coords))

    def canonical(self) -> PruferElement:
        """Representative with every coordinate reduced modulo ``1/p``."""
        return PruferElement(
            self.window,
            tuple(
                x - Fraction(math.floor(p * x), p)
                for p, x in zip(self.window.primes, self.representative.coords)
            ),
        )

    def __add__(self, other: "PruferClass") -> "PruferClass":
        return PruferClass(self.representative + other.representative)

    def __neg__(self) -> "PruferClass":
        return PruferClass(-self.representative)

    def __sub__(self, other: "PruferClass") -> "PruferClass":
        return self + (-other)

    def scale(self, factor: int) -> "PruferClass":
        return PruferClass(factor * self.representative)

    __mul__ = scale
    __rmul__ = scale

    def extend(self, window: PrimeWindow) -> "PruferClass":
        return PruferClass(self.representative.extend(window))


def diagonal_multiplier(element: PruferElement) -> typing.Optional[int]:
    """Least ``k >= 0`` with ``element == k * diag``, None if there is none."""
    residues = []
    for prime, x in zip(element.window.primes, element.coords):
        if x and x.denominator != prime:
            return None
        residues.append(int(x * prime))
    return _crt(element.window.primes, residues)


def _crt(moduli: typing.Sequence[int], residues: typing.Sequence[int]) -> int:
    """Least non-negative solution of ``k = r_i (mod m_i)`` for pairwise coprime moduli."""
    if not moduli:
        return 0
    solution, _ = crt(list(moduli), list(residues))
    return int(solution)


###############################################################################
# MEMBERSHIP ##################################################### MEMBERSHIP #
###############################################################################


@dataclasses.dataclass(frozen=True)
class Membership:
    """Answer to ``c in A_0^(n)``.

    A member carries the CRT integer ``reducer``; a non-member carries the first
    ``prime`` whose coordinate has an ``order`` not dividing it.
    """

    stage: int
    member: bool
    reducer: typing.Optional[int] = None
    prime: typing.Optional[int] = None
    order: typing.Optional[int] = None

    def __bool__(self):
        return self.member


def _check_stage(window: PrimeWindow, n: int):
    if not 0 <= n <= window.size:
        raise exceptions.StageOutOfRangeError(f"Stage {n} is outside 0..{window.size}")


def in_image_stage(c: PruferClass, n: int) -> Membership:
    """Whether ``c`` has a representative vanishing on the first ``n`` primes."""
    window = c.window
    _check_stage(window, n)
    primes = window.primes[:n]
    residues = []
    for prime, x in zip(primes, c.representative.coords):
        if x.denominator not in (1, prime):
            return Membership(stage=n, member=False, prime=prime, order=x.denominator)
        residues.append(int(x * prime))
    return Membership(stage=n, member=True, reducer=_crt(primes, residues))


@dataclasses.dataclass(frozen=True)
class Reduction:
    """Outcome of ``reduce_to_stage``: a new representative or the failure certificate."""

    membership: Membership
    representative: typing.Optional[PruferElement] = None

    @property
    def success(self) -> bool:
        return self.membership.member


def reduce_to_stage(c: PruferClass, n: int) -> Reduction:
    """Subtract the CRT multiple of the diagonal so the first ``n`` coordinates vanish."""
    membership = in_image_stage(c, n)
    if not membership:
        return Reduction(membership=membership)

    k = membership.reducer
    reduced = c.representative - diag_embed(k, c.window)
    if any(reduced.coords[:n]):
        raise exceptions.ConsistencyError(f"CRT reducer {k} leaves a nonzero leading coordinate")
    if diagonal_multiplier(c.representative - reduced) != k % primorial(c.window.size):
        raise exceptions.ConsistencyError(f"Reduced representative differs by more than {k} diag")
    LOG.debug(f"Reduced {c} to stage {n} with k = {k}")
    return Reduction(membership=membership, representative=reduced)


@dataclasses.dataclass(frozen=True)
class StableMembership:
    """Largest ``n`` with ``c in A_0^(n)`` and whether that is the whole window."""

    largest: int
    all_primes: bool
    memberships: typing.Tuple[Membership, ...]


def stable_membership(c: PruferClass) -> StableMembership:
    """Window shadow of ``c in A_0^(inf)``."""
    memberships = tuple(in_image_stage(c, n) for n in range(c.window.size + 1))
    largest = 0
    for membership in memberships[1:]:
        if not membership:
            break
        largest = membership.stage
    flag = all(x.denominator in (1, p) for p, x in zip(c.window.primes, c.representative.coords))
    if flag != (largest == c.window.size):
        raise exceptions.ConsistencyError(f"Membership chain of {c} disagrees with its orders")
    return StableMembership(largest=largest, all_primes=flag, memberships=memberships)


def minimal_reducer(c: PruferClass, n: int) -> typing.Optional[int]:
    """Least ``k >= 0`` making ``c - k diag`` vanish on the first ``n`` primes."""
    return in_image_stage(c, n).reducer


@dataclasses.dataclass(frozen=True)
class GrowthRow:
    size: int
    largest_prime: int
    reducer: typing.Optional[int]


def reducer_growth(
    coordinates: typing.Mapping[int, Fraction], sizes: typing.Iterable[int]
) -> typing.Tuple[GrowthRow, ...]:
    """Minimal reducers of one class extended by zeros over growing windows."""
    rows = []
    for size in sizes:
        window = PrimeWindow.first(size)
        c = PruferClass.from_mapping(window, coordinates)
        rows.append(GrowthRow(size, window.largest, minimal_reducer(c, size)))
    return tuple(rows)


def is_strictly_increasing(rows: typing.Sequence[GrowthRow]) -> bool:
    reducers = [row.reducer for row in rows]
    if None in reducers:
        return False
    return all(a < b for a, b in zip(reducers, reducers[1:]))


###############################################################################
# CLASS ARITHMETIC ######################################### CLASS ARITHMETIC #
###############################################################################


def class_order(c: PruferClass) -> int:
    """Order of ``c`` in ``A_0``: a coordinate of order ``p^e`` contributes ``p^(e-1)``."""
    order = 1
    for x in c.representative.coords:
        if x.denominator > 1:
            prime = sympy.primefactors(x.denominator)[0]
            order *= x.denominator // prime
    return order


def power_action(c: PruferClass, degree: int) -> PruferClass:
    """``x_p -> degree^p x_p``: the action of a degree-``d`` self map."""
    window = c.window
    return PruferClass(
        PruferElement(
            window,
            tuple(
                pow(degree, p, x.denominator) * x if x.denominator > 1 else x
                for p, x in zip(window.primes, c.representative.coords)
            ),
        )
    )


def to_residue_tower(c: PruferClass, n: int) -> ResidueTower:
    """Minimal reducers over moduli ``k(1) | ... | k(n)``.

    Only defined for ``c in A_0^(n)``; this is the CRT picture of the classes with
    coordinates ``n_p / p`` as compatible residues in ``lim Z/k(n)Z``.
    """
    _check_stage(c.window, n)
    residues = []
    for j in range(1, n + 1):
        k = minimal_reducer(c, j)
        if k is None:
            raise exceptions.IncompatibleResiduesError(f"{c} is not in the image of stage {j}")
        residues.append(k)
    return ResidueTower(tuple(primorial(j) for j in range(1, n + 1)), tuple(residues))


###############################################################################
# FINITE MODELS ############################################### FINITE MODELS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class WindowModel:
    """``prod Z/p^e`` over a set of primes, optionally modulo the diagonal.

    A coordinate ``a/p^f`` with ``f <= e`` becomes ``a p^(e-f)``; the diagonal is
    ``(p^(e-1))_p``.
    """

    primes: typing.Tuple[int, ...]
    exponent: int
    presentation: Presentation

    @property
    def group(self) -> FgAbGroup:
        return self.presentation.group

    def raw(self, element: PruferElement) -> typing.List[int]:
        values = []
        for prime in self.primes:
            x = element.coordinate(prime)
            f = _p_exponent(x.denominator, prime)
            if f > self.exponent:
                raise exceptions.WindowError(
                    f"Coordinate {x} needs exponent {f}, the model has {self.exponent}"
                )
            values.append(x.numerator * prime ** (self.exponent - f))
        return values

    def encode(self, element: PruferElement):
        if set(element.support) - set(self.primes):
            raise exceptions.WindowError(f"{element} is not supported on {self.primes}")
        return self.presentation.project(self.raw(element))


def _window_model(
    primes: typing.Sequence[int], exponent: int, quotient_by_diagonal: bool = False
) -> WindowModel:
    relations = diagonal_relations([p**exponent for p in primes])
    if quotient_by_diagonal:
        diagonal = np.array([[p ** (exponent - 1)] for p in primes], dtype=object).reshape(
            len(primes), 1
        )
        relations = hstack(relations, diagonal)
    return WindowModel(
        primes=tuple(primes), exponent=exponent, presentation=present(len(primes), relations)
    )


def _inclusion(upper: WindowModel, lower: WindowModel) -> Homomorphism:
    """Coordinate inclusion ``upper -> lower`` for ``upper.primes`` a subset of ``lower.primes``."""
    embedding = np.zeros((len(lower.primes), len(upper.primes)), dtype=object)
    for j, prime in enumerate(upper.primes):
        embedding[lower.primes.index(prime), j] = 1
    matrix = matmul(matmul(lower.presentation.projection, embedding), upper.presentation.section)
    return Homomorphism(upper.group, lower.group, matrix)


@dataclasses.dataclass(frozen=True)
class SubTowerModel:
    """Torsion part of stage ``m``: ``prod_{p >= l(m)} Z/p^inf``, modulo the diagonal iff ``m == 1``."""

    m: int
    window: PrimeWindow

    def __post_init__(self):
        if self.m < 1:
            raise exceptions.StageOutOfRangeError(f"Stage index must be positive, got {self.m}")
        if self.least_prime > self.window.largest:
            raise exceptions.WindowError(
                f"l({self.m}) = {self.least_prime} is beyond the window {self.window}"
            )

    @property
    def least_prime(self) -> int:
        return least_prime_at_least(self.m)

    @property
    def support(self) -> typing.Tuple[int, ...]:
        return tuple(p for p in self.window.primes if p >= self.least_prime)

    @property
    def quotiented(self) -> bool:
        return self.m == 1

    @property
    def image_stage(self) -> int:
        """``j`` with image of this stage in stage 1 equal to ``A_0^(j)``."""
        return self.window.count_below(self.least_prime)

    def contains(self, element: PruferElement) -> bool:
        return set(element.support) <= set(self.support)


@dataclasses.dataclass(frozen=True, eq=False)
class PhantomTowerModel:
    """Stages ``m = 1..max_m`` with inclusion bonds, stage 1 taken modulo the diagonal."""

    window: PrimeWindow
    stages: typing.Tuple[SubTowerModel, ...]

    @property
    def max_m(self) -> int:
        return len(self.stages)

    def stage(self, m: int) -> SubTowerModel:
        if not 1 <= m <= self.max_m:
            raise exceptions.StageOutOfRangeError(f"Stage {m} is outside 1..{self.max_m}")
        return self.stages[m - 1]

    def in_stage_image(self, c: PruferClass, m: int) -> Membership:
        """Whether ``c`` lifts to stage ``m``."""
        return in_image_stage(c, self.stage(m).image_stage)

    def as_tower(self, exponent: int) -> typing.Tuple[Tower, typing.Tuple[WindowModel, ...]]:
        """Finite tower with every Prüfer factor truncated to ``Z/p^exponent``."""
        models = tuple(
            _window_model(stage.support, exponent, quotient_by_diagonal=stage.quotiented)
            for stage in self.stages
        )
        bonds = [_inclusion(models[m], models[m - 1]) for m in range(1, self.max_m)]
        tower = Tower(tuple(model.group for model in models), bonds, name="phantom model")
        return tower, models

    def cross_check(self, classes: typing.Iterable[PruferClass], exponent: int) -> typing.List[str]:
        """Compare the stage-1 image chain of ``as_tower`` with ``in_image_stage``.

        Returns the disagreements; empty when the two agree on every class and stage.
        """
        tower, models = self.as_tower(exponent)
        chain = image_filtration(tower, 1)
        mismatches = []
        for c in classes:
            encoded = models[0].encode(c.representative)
            for m in range(1, self.max_m + 1):
                computed = chain.image(m).contains(encoded)
                expected = bool(self.in_stage_image(c, m))
                if computed != expected:
                    mismatches.append(f"{c} at stage {m}: tower says {computed}, CRT says {expected}")
        LOG.debug(f"Phantom model cross-check: {len(mismatches)} mismatches")
        return mismatches


def build_phantom_tower_model(window: PrimeWindow, max_m: int) -> PhantomTowerModel:
    """Stages ``1..max_m`` of the phantom-tower torsion shadow."""
    if max_m < 1 or max_m > window.largest:
        raise exceptions.WindowError(
            f"max_m = {max_m} must lie in 1..{window.largest} for the window {window}"
        )
    return PhantomTowerModel(
        window=window, stages=tuple(SubTowerModel(m, window) for m in range(1, max_m + 1))
    )


def window_ses(window_size: int, exponent: int = 2) -> TowerSES:
    """Window analogue of ``0 -> {K_n^0} -> {A_n} -> {A_0^(n)} -> 0`` for ``n = 1..N``.

    ``A_n`` is supported on the primes after ``p_n``, ``K_n^0`` is generated by
    ``k(n) diag`` and the quotient is the image of ``A_n`` in ``A_0``.
    """
    window = PrimeWindow.first(window_size)
    models = [_window_model(window.primes[n:], exponent) for n in range(1, window_size + 1)]

    kernels = []
    for n, model in enumerate(models, start=1):
        generator = diag_embed(kernel_generator(n), window)
        kernels.append(Subgroup(model.group, [model.encode(generator)]))
    quotients = [quotient_data(model.group, k.generators) for model, k in zip(models, kernels)]

    middle = Tower(
        [model.group for model in models],
        [_inclusion(models[n], models[n - 1]) for n in range(1, window_size)],
        name="A_n",
    )
    sub = Tower(
        [k.group for k in kernels],
        [restrict(middle.bond(n), kernels[n], kernels[n - 1]) for n in range(1, window_size)],
        name="K_n",
    )
    quo_bonds = []
    for n in range(1, window_size):
        upper, lower = quotients[n], quotients[n - 1]
        images = [lower.map(middle.bond(n)(upper.lift(y))) for y in upper.group.generators()]
        quo_bonds.append(Homomorphism.from_images(upper.group, lower.group, images))
    quo = Tower([q.group for q in quotients], quo_bonds, name="A_0^(n)")

    inclusion = TowerMap(sub, middle, [k.inclusion for k in kernels])
    projection = TowerMap(middle, quo, [q.map for q in quotients])
    return TowerSES(inclusion, projection, name=f"prufer window {window_size}")

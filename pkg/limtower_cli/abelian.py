"""Finitely generated abelian groups over exact integers.

Groups are kept in invariant-factor form: ``Z/d_1 + ... + Z/d_t + Z^r`` with
``d_1 | d_2 | ... | d_t`` and every ``d_i >= 2``. Torsion generators come first,
free generators last. Matrices are numpy arrays of ``dtype=object`` so every
entry is a Python int and nothing overflows.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import dataclasses
import itertools
import logging
import math
import typing

# Installed
import numpy as np

# Own modules
from limtower_cli import exceptions

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

INFINITE_ORDER = math.inf

###############################################################################
# MATRICES ######################################################### MATRICES #
###############################################################################


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def as_matrix(entries, shape: typing.Optional[typing.Tuple[int, int]] = None) -> np.ndarray:
    """Read-only integer matrix with arbitrary-precision entries.

    ``shape`` is needed for matrices without entries (zero rows or columns).
    """
    array = np.array(entries, dtype=object)
    if shape is not None and array.size == 0:
        array = array.reshape(shape)
    if array.ndim != 2 or (shape is not None and array.shape != tuple(shape)):
        raise exceptions.ShapeMismatchError(
            f"Expected a matrix of shape {shape}, got {array.shape}"
            if shape is not None
            else f"Expected a 2-dimensional matrix, got shape {array.shape}"
        )
    if array.size:
        array = np.frompyfunc(int, 1, 1)(array)
    return _freeze(array)


def identity(size: int) -> np.ndarray:
    """Identity matrix."""
    return _freeze(np.eye(size, dtype=object))


def zeros(nrows: int, ncols: int) -> np.ndarray:
    """Zero matrix."""
    return _freeze(np.zeros((nrows, ncols), dtype=object))


def matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Exact matrix product, also for empty inner dimension."""
    if left.shape[1] != right.shape[0]:
        raise exceptions.ShapeMismatchError(f"Cannot multiply {left.shape} by {right.shape}")
    if left.shape[1] == 0:
        return zeros(left.shape[0], right.shape[1])
    return _freeze(left.dot(right))


def column(vector: typing.Sequence[int]) -> np.ndarray:
    """Column matrix from a sequence of integers."""
    return as_matrix([[int(x)] for x in vector], shape=(len(vector), 1))


def hstack(*blocks: np.ndarray) -> np.ndarray:
    """Side by side concatenation; all blocks have the same number of rows."""
    return _freeze(np.concatenate(blocks, axis=1))


###############################################################################
# SMITH NORMAL FORM ####################################### SMITH NORMAL FORM #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class SmithForm:
    """Result of ``smith_normal_form``: ``left @ matrix @ right == diagonal``.

    Unpacks as ``U, D, V``.
    """

    left: np.ndarray
    diagonal: np.ndarray
    right: np.ndarray
    left_inverse: np.ndarray
    rank: int

    def __iter__(self):
        return iter((self.left, self.diagonal, self.right))

    @property
    def invariants(self) -> typing.Tuple[int, ...]:
        """Nonzero diagonal entries, in order."""
        return tuple(self.diagonal[i, i] for i in range(self.rank))

    def verify(self, matrix) -> bool:
        """Check ``U M V = D``, the divisibility chain and unimodularity of the transforms."""
        matrix = as_matrix(matrix, shape=(self.left.shape[0], self.right.shape[0]))
        if not np.array_equal(matmul(matmul(self.left, matrix), self.right), self.diagonal):
            return False
        if not np.array_equal(matmul(self.left, self.left_inverse), identity(self.left.shape[0])):
            return False
        nrows, ncols = self.diagonal.shape
        for i, j in itertools.product(range(nrows), range(ncols)):
            if i != j and self.diagonal[i, j] != 0:
                return False
        chain = [self.diagonal[i, i] for i in range(min(nrows, ncols))]
        if any(d <= 0 for d in chain[: self.rank]) or any(chain[self.rank :]):
            return False
        if any(b % a for a, b in zip(chain[: self.rank], chain[1 : self.rank])):
            return False
        return abs(_determinant(self.right)) == 1


def _determinant(matrix: np.ndarray) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    size = matrix.shape[0]
    if size == 0:
        return 1
    work = [[int(x) for x in row] for row in matrix]
    sign, previous = 1, 1
    for k in range(size - 1):
        if work[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if work[i][k] != 0), None)
            if swap is None:
                return 0
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                work[i][j] = (work[i][j] * work[k][k] - work[i][k] * work[k][j]) // previous
        previous = work[k][k]
    return sign * work[-1][-1]


class _SmithReducer:
    """Unimodular row and column reduction tracking U, U^-1 and V.

    Pivot is the nonzero entry of least absolute value in the remaining block,
    ties broken by lowest (row, column).
    """

    def __init__(self, matrix: np.ndarray):
        self.work = matrix.copy()
        nrows, ncols = matrix.shape
        self.left = np.eye(nrows, dtype=object)
        self.left_inverse = np.eye(nrows, dtype=object)
        self.right = np.eye(ncols, dtype=object)

    @property
    def nrows(self) -> int:
        return self.work.shape[0]

    @property
    def ncols(self) -> int:
        return self.work.shape[1]

    def reduce(self) -> int:
        """Diagonalize in place and return the rank."""
        rank = 0
        for s in range(min(self.nrows, self.ncols)):
            if not self._move_pivot(s):
                break
            while not self._clear_cross(s):
                pass
            if self.work[s, s] < 0:
                self._negate_row(s)
            rank += 1
        return rank

    def _move_pivot(self, s: int) -> bool:
        best = None
        for i in range(s, self.nrows):
            for j in range(s, self.ncols):
                value = self.work[i, j]
                if value != 0 and (best is None or abs(value) < abs(self.work[best])):
                    best = (i, j)
        if best is None:
            return False
        self._swap_rows(s, best[0])
        self._swap_columns(s, best[1])
        return True

    def _clear_cross(self, s: int) -> bool:
        """Eliminate row and column s; True once both are clean and the pivot divides the block."""
        pivot = self.work[s, s]
        for i in range(s + 1, self.nrows):
            factor = self.work[i, s] // pivot
            if factor:
                self._add_row(i, s, -factor)
        for j in range(s + 1, self.ncols):
            factor = self.work[s, j] // pivot
            if factor:
                self._add_column(j, s, -factor)

        remainders = any(self.work[i, s] for i in range(s + 1, self.nrows)) or any(
            self.work[s, j] for j in range(s + 1, self.ncols)
        )
        if remainders:
            self._move_pivot(s)
            return False

        for i in range(s + 1, self.nrows):
            for j in range(s + 1, self.ncols):
                if self.work[i, j] % pivot:
                    self._add_row(s, i, 1)
                    return False
        return True

    # Elementary operations ######################### Elementary operations #
    def _add_row(self, target: int, source: int, factor: int):
        self.work[target] += factor * self.work[source]
        self.left[target] += factor * self.left[source]
        self.left_inverse[:, source] -= factor * self.left_inverse[:, target]

    def _add_column(self, target: int, source: int, factor: int):
        self.work[:, target] += factor * self.work[:, source]
        self.right[:, target] += factor * self.right[:, source]

    def _swap_rows(self, first: int, second: int):
        if first == second:
            return
        self.work[[first, second]] = self.work[[second, first]]
        self.left[[first, second]] = self.left[[second, first]]
        self.left_inverse[:, [first, second]] = self.left_inverse[:, [second, first]]

    def _swap_columns(self, first: int, second: int):
        if first == second:
            return
        self.work[:, [first, second]] = self.work[:, [second, first]]
        self.right[:, [first, second]] = self.right[:, [second, first]]

    def _negate_row(self, row: int):
        self.work[row] *= -1
        self.left[row] *= -1
        self.left_inverse[:, row] *= -1


def smith_normal_form(matrix) -> SmithForm:
    """Smith normal form ``U M V = D`` of an integer matrix."""
    matrix = matrix if isinstance(matrix, np.ndarray) else as_matrix(matrix)
    reducer = _SmithReducer(matrix)
    rank = reducer.reduce()
    LOG.debug(f"Smith normal form of {matrix.shape[0]}x{matrix.shape[1]} matrix, rank {rank}")
    return SmithForm(
        left=_freeze(reducer.left),
        diagonal=_freeze(reducer.work),
        right=_freeze(reducer.right),
        left_inverse=_freeze(reducer.left_inverse),
        rank=rank,
    )


def integer_kernel(matrix: np.ndarray) -> np.ndarray:
    """Matrix whose columns are a basis of the integer kernel of ``matrix``."""
    form = smith_normal_form(matrix)
    return _freeze(form.right[:, form.rank :].copy())


def solve_integer(matrix: np.ndarray, target: typing.Sequence[int]):
    """Some integer vector ``a`` with ``matrix @ a == target``, or None."""
    form = smith_normal_form(matrix)
    image = matmul(form.left, column(target))[:, 0]
    solution = []
    for i in range(form.rank):
        quotient, remainder = divmod(image[i], form.diagonal[i, i])
        if remainder:
            return None
        solution.append(quotient)
    if any(image[form.rank :]):
        return None
    solution += [0] * (matrix.shape[1] - form.rank)
    return tuple(matmul(form.right, column(solution))[:, 0])


###############################################################################
# GROUPS ############################################################# GROUPS #
###############################################################################


@dataclasses.dataclass(frozen=True)
class FgAbGroup:
    """Finitely generated abelian group ``Z/d_1 + ... + Z/d_t + Z^rank``."""

    rank: int = 0
    torsion: typing.Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise exceptions.InvalidGroupError(f"Negative free rank: {self.rank}")
        if any(d < 2 for d in self.torsion):
            raise exceptions.InvalidGroupError(
                f"Invariant factors must be at least 2: {self.torsion}"
            )
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise exceptions.InvalidGroupError(
                f"Invariant factors do not form a divisibility chain: {self.torsion}"
            )

    def __str__(self):
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"

    # Constructors ########################################### Constructors #
    @classmethod
    def from_orders(cls, *orders: int) -> "FgAbGroup":
        """Direct sum of cyclic groups ``Z/m`` (``m = 0`` for ``Z``), normalized."""
        return present(len(orders), diagonal_relations(orders)).group

    @classmethod
    def integers(cls, rank: int = 1) -> "FgAbGroup":
        return cls(rank=rank)

    @classmethod
    def cyclic(cls, order: int) -> "FgAbGroup":
        return cls.from_orders(order)

    # Properties ############################################### Properties #
    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.rank

    @property
    def orders(self) -> typing.Tuple[int, ...]:
        """Order of each generator, 0 for the free ones."""
        return self.torsion + (0,) * self.rank

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self):
        return math.prod(self.torsion) if self.is_finite else INFINITE_ORDER

    @property
    def relation_matrix(self) -> np.ndarray:
        """Columns ``d_i e_i`` spanning the relation lattice."""
        return diagonal_relations(self.orders)

    # Elements ################################################### Elements #
    def element(self, coordinates) -> "GroupElement":
        return GroupElement(group=self, coordinates=tuple(coordinates))

    def zero(self) -> "GroupElement":
        return self.element((0,) * self.ngens)

    def generators(self) -> typing.List["GroupElement"]:
        return [self.element(row) for row in identity(self.ngens).tolist()]

    def elements(self) -> typing.Iterator["GroupElement"]:
        """Every element of a finite group, in lexicographic coordinate order."""
        if not self.is_finite:
            raise exceptions.AlgebraError(f"Cannot enumerate the infinite group {self}")
        for coordinates in itertools.product(*(range(d) for d in self.torsion)):
            yield self.element(coordinates)


def diagonal_relations(orders: typing.Sequence[int]) -> np.ndarray:
    """Relation columns ``m e_i`` for every nonzero order ``m``."""
    size = len(orders)
    columns = [i for i, m in enumerate(orders) if m]
    matrix = np.zeros((size, len(columns)), dtype=object)
    for col, i in enumerate(columns):
        matrix[i, col] = int(orders[i])
    return _freeze(matrix)


@dataclasses.dataclass(frozen=True)
class GroupElement:
    """Element of an FgAbGroup; torsion coordinates reduced into ``[0, d_i)``."""

    group: FgAbGroup
    coordinates: typing.Tuple[int, ...]

    def __post_init__(self):
        if len(self.coordinates) != self.group.ngens:
            raise exceptions.ShapeMismatchError(
                f"{self.group} has {self.group.ngens} generators, got {len(self.coordinates)} "
                "coordinates"
            )
        reduced = tuple(
            int(x) % m if m else int(x) for x, m in zip(self.coordinates, self.group.orders)
        )
        object.__setattr__(self, "coordinates", reduced)

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.coordinates) + ")"

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check_same_group(other)
        return self.group.element(a + b for a, b in zip(self.coordinates, other.coordinates))

    def __neg__(self) -> "GroupElement":
        return self.group.element(-a for a in self.coordinates)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __mul__(self, factor: int) -> "GroupElement":
        return self.group.element(factor * a for a in self.coordinates)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    @property
    def order(self):
        return element_order(self)

    def _check_same_group(self, other: "GroupElement"):
        if other.group != self.group:
            raise exceptions.ShapeMismatchError(f"Elements of {self.group} and {other.group}")


def element_order(element: GroupElement):
    """Least ``n >= 1`` with ``n x = 0``; ``INFINITE_ORDER`` if there is none."""
    order = 1
    for x, m in zip(element.coordinates, element.group.orders):
        if not x:
            continue
        if not m:
            return INFINITE_ORDER
        order = math.lcm(order, m // math.gcd(m, x))
    return order


def is_isomorphic(first: FgAbGroup, second: FgAbGroup) -> bool:
    """Same free rank and same invariant factors."""
    return first.rank == second.rank and first.torsion == second.torsion


###############################################################################
# PRESENTATIONS ############################################### PRESENTATIONS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class Presentation:
    """``Z^ngens`` modulo the column span of a relation matrix, in normal form.

    ``projection`` sends raw coordinates to coordinates of ``group``;
    ``section`` sends generators of ``group`` back to raw vectors.
    """

    ngens: int
    group: FgAbGroup
    projection: np.ndarray
    section: np.ndarray

    def project(self, vector: typing.Sequence[int]) -> GroupElement:
        return self.group.element(matmul(self.projection, column(vector))[:, 0])

    def lift(self, element: GroupElement) -> typing.Tuple[int, ...]:
        return tuple(matmul(self.section, column(element.coordinates))[:, 0])


def present(ngens: int, relations=None) -> Presentation:
    """Normalize the group with ``ngens`` generators and relation columns ``relations``."""
    if relations is None or np.size(relations) == 0:
        relations = zeros(ngens, 0)
    else:
        relations = as_matrix(relations)
    if relations.shape[0] != ngens:
        raise exceptions.ShapeMismatchError(
            f"Relation matrix has {relations.shape[0]} rows for {ngens} generators"
        )
    form = smith_normal_form(relations)
    invariants = form.invariants
    kept = [i for i, d in enumerate(invariants) if d != 1] + list(range(form.rank, ngens))
    group = FgAbGroup(
        rank=ngens - form.rank, torsion=tuple(d for d in invariants if d != 1)
    )
    index = np.array(kept, dtype=int)
    return Presentation(
        ngens=ngens,
        group=group,
        projection=_freeze(form.left[index, :].copy()),
        section=_freeze(form.left_inverse[:, index].copy()),
    )


###############################################################################
# HOMOMORPHISMS ############################################### HOMOMORPHISMS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class Homomorphism:
    """Map ``source -> target``; column j is the image of generator j."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: np.ndarray

    def __post_init__(self):
        matrix = as_matrix(self.matrix, shape=(self.target.ngens, self.source.ngens))
        reduced = np.array(matrix, dtype=object)
        for i, m in enumerate(self.target.orders):
            if m:
                reduced[i] = [x % m for x in reduced[i]]
        object.__setattr__(self, "matrix", _freeze(reduced))
        self._check_well_defined()

    def _check_well_defined(self):
        for j, d in enumerate(self.source.orders):
            if not d:
                continue
            for i, m in enumerate(self.target.orders):
                entry = self.matrix[i, j]
                if (m and (d * entry) % m) or (not m and entry):
                    raise exceptions.NotWellDefinedError(
                        f"Generator {j} of {self.source} has order {d} but its image "
                        f"coordinate {i} in {self.target} does not vanish after scaling"
                    )

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def __call__(self, element: GroupElement) -> GroupElement:
        if element.group != self.source:
            raise exceptions.ShapeMismatchError(f"{element} is not an element of {self.source}")
        return self.target.element(matmul(self.matrix, column(element.coordinates))[:, 0])

    def __add__(self, other: "Homomorphism") -> "Homomorphism":
        if (self.source, self.target) != (other.source, other.target):
            raise exceptions.ShapeMismatchError("Cannot add maps between different groups")
        return Homomorphism(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> "Homomorphism":
        return Homomorphism(self.source, self.target, -self.matrix)

    def __str__(self):
        return f"{self.source} -> {self.target} {self.matrix.tolist()}"

    # Constructors ########################################### Constructors #
    @classmethod
    def identity(cls, group: FgAbGroup) -> "Homomorphism":
        return cls(group, group, identity(group.ngens))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "Homomorphism":
        return cls(source, target, zeros(target.ngens, source.ngens))

    @classmethod
    def from_images(
        cls, source: FgAbGroup, target: FgAbGroup, images: typing.Sequence[GroupElement]
    ) -> "Homomorphism":
        """Map sending generator j of ``source`` to ``images[j]``."""
        if len(images) != source.ngens:
            raise exceptions.ShapeMismatchError(
                f"{source} has {source.ngens} generators, got {len(images)} images"
            )
        matrix = np.zeros((target.ngens, source.ngens), dtype=object)
        for j, image in enumerate(images):
            if image.group != target:
                raise exceptions.ShapeMismatchError(f"{image} is not an element of {target}")
            matrix[:, j] = image.coordinates
        return cls(source, target, matrix)

    # Operations ############################################### Operations #
    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """``self`` after ``other``."""
        if other.target != self.source:
            raise exceptions.ShapeMismatchError(
                f"Cannot compose {other.source} -> {other.target} with "
                f"{self.source} -> {self.target}"
            )
        return Homomorphism(other.source, self.target, matmul(self.matrix, other.matrix))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def kernel(self) -> "Subgroup":
        return kernel(self)

    def image(self) -> "Subgroup":
        return image(self)

    def cokernel(self) -> FgAbGroup:
        return cokernel(self)

    @property
    def is_injective(self) -> bool:
        return kernel(self).is_trivial

    @property
    def is_surjective(self) -> bool:
        return image(self).is_whole

    @property
    def is_isomorphism(self) -> bool:
        return self.is_injective and self.is_surjective


###############################################################################
# SUBGROUPS ####################################################### SUBGROUPS #
###############################################################################


class Subgroup:
    """Subgroup of ``ambient`` spanned by generators, normalized via SNF.

    ``group`` is the abstract subgroup in invariant-factor form and
    ``inclusion`` its embedding; ``generators`` are the images of the
    generators of ``group``.
    """

    def __init__(self, ambient: FgAbGroup, generators: typing.Iterable = ()):
        elements = [g if isinstance(g, GroupElement) else ambient.element(g) for g in generators]
        for element in elements:
            if element.group != ambient:
                raise exceptions.ShapeMismatchError(f"{element} is not an element of {ambient}")
        self.ambient = ambient

        columns = _columns_of(ambient, elements)
        relations = integer_kernel(hstack(columns, ambient.relation_matrix))[: len(elements), :]
        presentation = present(len(elements), relations)
        self.group = presentation.group
        self.inclusion = Homomorphism(
            self.group, ambient, matmul(columns, presentation.section)
        )
        self.generators = tuple(
            ambient.element(self.inclusion.matrix[:, j]) for j in range(self.group.ngens)
        )
        self._span = hstack(self.inclusion.matrix, ambient.relation_matrix)

    def __repr__(self):
        return f"Subgroup({self.ambient}, [{', '.join(str(g) for g in self.generators)}])"

    def __str__(self):
        if self.is_trivial:
            return "0"
        if self.ambient == FgAbGroup.integers() and len(self.generators) == 1:
            factor = self.generators[0].coordinates[0]
            return "Z" if abs(factor) == 1 else f"{abs(factor)}Z"
        return "<" + ", ".join(str(g) for g in self.generators) + ">"

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and is_isomorphic(self.group, other.group)
            and self <= other
            and other <= self
        )

    __hash__ = None

    def __le__(self, other: "Subgroup") -> bool:
        return self.ambient == other.ambient and all(other.contains(g) for g in self.generators)

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and not other <= self

    @property
    def is_trivial(self) -> bool:
        return self.group.is_trivial

    @property
    def is_whole(self) -> bool:
        return all(self.contains(g) for g in self.ambient.generators())

    def contains(self, element: GroupElement) -> bool:
        return self.coordinates(element) is not None

    def coordinates(self, element: GroupElement) -> typing.Optional[GroupElement]:
        """Express ``element`` in the generators of ``group``; None if it is not a member."""
        if element.group != self.ambient:
            raise exceptions.ShapeMismatchError(f"{element} is not an element of {self.ambient}")
        solution = solve_integer(self._span, element.coordinates)
        if solution is None:
            return None
        return self.group.element(solution[: self.group.ngens])

    def image_under(self, homomorphism: Homomorphism) -> "Subgroup":
        """Image of this subgroup under a map out of its ambient group."""
        if homomorphism.source != self.ambient:
            raise exceptions.ShapeMismatchError("Map does not start at the ambient group")
        return Subgroup(homomorphism.target, [homomorphism(g) for g in self.generators])

    def index(self):
        """Order of the quotient ``ambient / self``."""
        return quotient(self.ambient, self.generators).order


def _columns_of(ambient: FgAbGroup, elements: typing.Sequence[GroupElement]) -> np.ndarray:
    matrix = np.zeros((ambient.ngens, len(elements)), dtype=object)
    for j, element in enumerate(elements):
        matrix[:, j] = element.coordinates
    return _freeze(matrix)


def kernel(homomorphism: Homomorphism) -> Subgroup:
    """Kernel as a subgroup of the source (its ``inclusion`` is exact at the source)."""
    source, target = homomorphism.source, homomorphism.target
    solutions = integer_kernel(hstack(homomorphism.matrix, target.relation_matrix))
    generators = [source.element(solutions[: source.ngens, j]) for j in range(solutions.shape[1])]
    return Subgroup(source, generators)


def image(homomorphism: Homomorphism) -> Subgroup:
    """Image as a subgroup of the target."""
    target = homomorphism.target
    return Subgroup(
        target, [target.element(homomorphism.matrix[:, j]) for j in range(homomorphism.source.ngens)]
    )


###############################################################################
# QUOTIENTS ####################################################### QUOTIENTS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class Quotient:
    """``ambient / subgroup`` with its projection and a set-theoretic lift."""

    ambient: FgAbGroup
    subgroup: Subgroup
    group: FgAbGroup
    map: Homomorphism
    section: np.ndarray

    def lift(self, element: GroupElement) -> GroupElement:
        return self.ambient.element(matmul(self.section, column(element.coordinates))[:, 0])


def quotient_data(ambient: FgAbGroup, elements: typing.Iterable = ()) -> Quotient:
    """Quotient of ``ambient`` by the span of ``elements``.

    Exactness of ``0 -> span -> ambient -> quotient -> 0`` is verified.
    """
    subgroup = Subgroup(ambient, elements)
    presentation = present(
        ambient.ngens, hstack(ambient.relation_matrix, subgroup.inclusion.matrix)
    )
    projection = Homomorphism(ambient, presentation.group, presentation.projection)
    if not projection.compose(subgroup.inclusion).is_zero or kernel(projection) != subgroup:
        raise exceptions.ConsistencyError(
            f"Quotient of {ambient} by {subgroup} is not exact at the ambient group"
        )
    return Quotient(
        ambient=ambient,
        subgroup=subgroup,
        group=presentation.group,
        map=projection,
        section=presentation.section,
    )


def quotient(ambient: FgAbGroup, elements: typing.Iterable = ()) -> FgAbGroup:
    """Quotient group ``ambient / <elements>`` in invariant-factor form."""
    return quotient_data(ambient, elements).group


def cokernel(homomorphism: Homomorphism) -> FgAbGroup:
    """Cokernel ``target / image``."""
    return quotient(homomorphism.target, image(homomorphism).generators)


def cokernel_data(homomorphism: Homomorphism) -> Quotient:
    return quotient_data(homomorphism.target, image(homomorphism).generators)


###############################################################################
# DIRECT SUMS ################################################### DIRECT SUMS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class DirectSum:
    """Normalized direct sum with its injections and projections."""

    summands: typing.Tuple[FgAbGroup, ...]
    group: FgAbGroup
    injections: typing.Tuple[Homomorphism, ...]
    projections: typing.Tuple[Homomorphism, ...]

    def combine(self, components: typing.Sequence[GroupElement]) -> GroupElement:
        """The element with the given components."""
        total = self.group.zero()
        for injection, component in zip(self.injections, components):
            total = total + injection(component)
        return total

    def split(self, element: GroupElement) -> typing.Tuple[GroupElement, ...]:
        return tuple(projection(element) for projection in self.projections)


def direct_sum(*groups: FgAbGroup) -> DirectSum:
    """Direct sum of ``groups``."""
    orders = [m for group in groups for m in group.orders]
    presentation = present(len(orders), diagonal_relations(orders))
    injections, projections, offset = [], [], 0
    for group in groups:
        block = np.arange(offset, offset + group.ngens, dtype=int)
        injections.append(
            Homomorphism(group, presentation.group, presentation.projection[:, block])
        )
        projections.append(
            Homomorphism(presentation.group, group, presentation.section[block, :])
        )
        offset += group.ngens
    return DirectSum(
        summands=tuple(groups),
        group=presentation.group,
        injections=tuple(injections),
        projections=tuple(projections),
    )


###############################################################################
# RANDOM INSTANCES ######################################### RANDOM INSTANCES #
###############################################################################


def random_group(rng, max_order: int = 64, free_rank: int = 0) -> FgAbGroup:
    """Random group whose torsion part has order at most ``max_order``."""
    orders, remaining = [], max_order
    while remaining >= 2 and rng.random() < 0.7:
        factor = rng.randint(2, remaining)
        orders.append(factor)
        remaining //= factor
    return FgAbGroup.from_orders(*orders, *([0] * free_rank))


def random_homomorphism(rng, source: FgAbGroup, target: FgAbGroup, bound: int = 5) -> Homomorphism:
    """Random well-defined map; free images bounded by ``bound`` in absolute value."""
    matrix = np.zeros((target.ngens, source.ngens), dtype=object)
    for j, d in enumerate(source.orders):
        for i, m in enumerate(target.orders):
            if m:
                step = m // math.gcd(m, d) if d else 1
                matrix[i, j] = step * rng.randrange(m // step)
            elif not d:
                matrix[i, j] = rng.randint(-bound, bound)
    return Homomorphism(source, target, matrix)

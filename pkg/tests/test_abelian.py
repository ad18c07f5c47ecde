import itertools
import logging
import math
import random

import pytest
from _pytest.logging import LogCaptureFixture
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix

from limtower_cli import abelian
from limtower_cli.abelian import FgAbGroup, Homomorphism, Subgroup
from limtower_cli.exceptions import (
    InvalidGroupError,
    NotWellDefinedError,
    ShapeMismatchError,
)

matrices = st.integers(min_value=1, max_value=6).flatmap(
    lambda rows: st.integers(min_value=1, max_value=6).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(min_value=-50, max_value=50), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)

small_matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda rows: st.integers(min_value=1, max_value=4).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(min_value=-20, max_value=20), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)

# smith_normal_form


def test_smith_normal_form_two_by_two():
    """Invariant factors of [[4, 6], [8, 10]] are 2 and 4."""
    form = abelian.smith_normal_form([[4, 6], [8, 10]])
    assert form.invariants == (2, 4)
    assert form.verify([[4, 6], [8, 10]])


def test_smith_normal_form_identity_and_zero():
    """Identity stays the identity, zero stays zero."""
    identity = abelian.smith_normal_form(abelian.identity(3))
    assert identity.invariants == (1, 1, 1)

    zero = abelian.smith_normal_form([[0, 0], [0, 0]])
    assert zero.rank == 0
    assert not any(zero.diagonal.flatten())


def test_smith_normal_form_unpacks_as_u_d_v():
    """The result unpacks as U, D, V with U M V = D."""
    matrix = abelian.as_matrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    left, diagonal, right = abelian.smith_normal_form(matrix)
    assert (abelian.matmul(abelian.matmul(left, matrix), right) == diagonal).all()


def test_smith_normal_form_logs_size(caplog: LogCaptureFixture):
    """Sizes are logged at debug level."""
    with caplog.at_level(logging.DEBUG):
        abelian.smith_normal_form([[1, 2], [3, 4], [5, 6]])
    assert (
        "limtower_cli.abelian",
        logging.DEBUG,
        "Smith normal form of 3x2 matrix, rank 2",
    ) in caplog.record_tuples


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_smith_normal_form_verifies(matrix):
    """U M V = D, unimodular transforms and a divisibility chain."""
    assert abelian.smith_normal_form(matrix).verify(matrix)


def determinantal_divisors(matrix):
    """gcd of all k x k minors for k = 1, 2, ... until it vanishes."""
    sympy_matrix = Matrix(matrix)
    rows, cols = sympy_matrix.shape
    divisors = []
    for size in range(1, min(rows, cols) + 1):
        divisor = math.gcd(
            *(
                int(sympy_matrix.extract(list(r), list(c)).det())
                for r in itertools.combinations(range(rows), size)
                for c in itertools.combinations(range(cols), size)
            )
        )
        if divisor == 0:
            break
        divisors.append(divisor)
    return divisors


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_smith_normal_form_matches_minors(matrix):
    """d_1 ... d_k equals the gcd of the k x k minors."""
    invariants = abelian.smith_normal_form(matrix).invariants
    assert [math.prod(invariants[: k + 1]) for k in range(len(invariants))] == (
        determinantal_divisors(matrix)
    )


def test_smith_normal_form_random_batch():
    """1000 seeded random matrices."""
    rng = random.Random(7)
    for _ in range(1000):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        matrix = [[rng.randint(-50, 50) for _ in range(cols)] for _ in range(rows)]
        assert abelian.smith_normal_form(matrix).verify(matrix)


# solve_integer


def test_solve_integer():
    """Solutions exist exactly when the target is in the lattice."""
    matrix = abelian.as_matrix([[2, 0], [0, 3]])
    assert abelian.solve_integer(matrix, (4, 9)) == (2, 3)
    assert abelian.solve_integer(matrix, (1, 0)) is None


# FgAbGroup


def test_group_validation():
    """Invariant factors must be a divisibility chain of integers >= 2."""
    with pytest.raises(InvalidGroupError):
        FgAbGroup(torsion=(2, 3))
    with pytest.raises(InvalidGroupError):
        FgAbGroup(torsion=(1,))
    with pytest.raises(InvalidGroupError):
        FgAbGroup(rank=-1)


def test_group_from_orders_normalizes():
    """Z/2 + Z/3 is Z/6; Z/4 + Z/6 is Z/2 + Z/12."""
    assert FgAbGroup.from_orders(2, 3) == FgAbGroup(torsion=(6,))
    assert FgAbGroup.from_orders(4, 6) == FgAbGroup(torsion=(2, 12))
    assert FgAbGroup.from_orders(1, 0) == FgAbGroup.integers()


def test_group_str_and_order():
    """Printing and orders."""
    group = FgAbGroup(rank=2, torsion=(2, 4))
    assert str(group) == "Z/2 + Z/4 + Z^2"
    assert str(FgAbGroup()) == "0"
    assert group.order == math.inf
    assert FgAbGroup(torsion=(2, 4)).order == 8


def test_group_elements_enumeration():
    """A finite group lists every element once."""
    group = FgAbGroup(torsion=(2, 4))
    assert len(set(e.coordinates for e in group.elements())) == 8


# element_order


def test_element_order():
    """Orders of zero, a generator and a mixed element."""
    assert abelian.element_order(FgAbGroup.cyclic(6).zero()) == 1
    assert abelian.element_order(FgAbGroup.cyclic(6).element((1,))) == 6
    assert FgAbGroup(torsion=(2, 18)).element((1, 3)).order == 6
    assert FgAbGroup.integers().element((3,)).order == abelian.INFINITE_ORDER


# is_isomorphic


def test_is_isomorphic():
    """CRT, free against torsion, Z/4 against Z/2 + Z/2."""
    assert abelian.is_isomorphic(FgAbGroup.from_orders(2, 3), FgAbGroup.cyclic(6))
    assert not abelian.is_isomorphic(FgAbGroup.integers(), FgAbGroup.cyclic(2))
    assert not abelian.is_isomorphic(FgAbGroup.cyclic(4), FgAbGroup.from_orders(2, 2))


# Homomorphism


def test_homomorphism_not_well_defined():
    """Z/2 -> Z/3 sending 1 to 1 does not respect the relation."""
    with pytest.raises(NotWellDefinedError):
        Homomorphism(FgAbGroup.cyclic(2), FgAbGroup.cyclic(3), [[1]])
    with pytest.raises(NotWellDefinedError):
        Homomorphism(FgAbGroup.cyclic(2), FgAbGroup.integers(), [[1]])


def test_homomorphism_shape_mismatch():
    """Matrix shape must be target x source generators."""
    with pytest.raises(ShapeMismatchError):
        Homomorphism(FgAbGroup.integers(), FgAbGroup.integers(), [[1, 2]])


def test_homomorphism_compose_and_add():
    """Composition and sums of maps on Z."""
    integers = FgAbGroup.integers()
    double = Homomorphism(integers, integers, [[2]])
    triple = Homomorphism(integers, integers, [[3]])
    assert double.compose(triple) == Homomorphism(integers, integers, [[6]])
    assert double + triple == Homomorphism(integers, integers, [[5]])
    assert (double + -double).is_zero


# kernel / image / cokernel / quotient


def test_kernel_examples():
    """Kernels of x6 on Z, reduction Z -> Z/6 and the zero map on Z/4."""
    integers = FgAbGroup.integers()
    assert abelian.kernel(Homomorphism(integers, integers, [[6]])).is_trivial

    reduction = Homomorphism(integers, FgAbGroup.cyclic(6), [[1]])
    kernel = abelian.kernel(reduction)
    assert kernel.group == integers
    assert str(kernel) == "6Z"

    zero = Homomorphism.zero(FgAbGroup.cyclic(4), FgAbGroup.cyclic(4))
    assert abelian.kernel(zero).group == FgAbGroup.cyclic(4)


def test_image_and_cokernel_of_doubling():
    """Image of x2 has index 2, cokernel Z/2."""
    integers = FgAbGroup.integers()
    double = Homomorphism(integers, integers, [[2]])
    assert double.image().index() == 2
    assert double.cokernel() == FgAbGroup.cyclic(2)
    assert double.is_injective and not double.is_surjective


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_kernel_and_image_ranks_add_up(matrix):
    """For Z^m -> Z^n, rank of kernel plus rank of image is m; both are free."""
    source, target = FgAbGroup.integers(len(matrix[0])), FgAbGroup.integers(len(matrix))
    homomorphism = Homomorphism(source, target, matrix)
    kernel, image = abelian.kernel(homomorphism), abelian.image(homomorphism)

    assert kernel.group.rank + image.group.rank == source.rank
    assert not kernel.group.torsion and not image.group.torsion
    assert image.group.rank == Matrix(matrix).rank()


@settings(max_examples=100, deadline=None)
@given(small_matrices, st.randoms(use_true_random=False))
def test_quotient_ignores_relation_order(matrix, rng):
    """Presenting the same relations in another order gives an isomorphic quotient."""
    ambient = FgAbGroup.integers(len(matrix[0]))
    shuffled = list(matrix)
    rng.shuffle(shuffled)

    first = abelian.quotient(ambient, [ambient.element(row) for row in matrix])
    second = abelian.quotient(ambient, [ambient.element(row) for row in shuffled])
    assert abelian.is_isomorphic(first, second)
    assert first == second


def test_quotient_examples():
    """Z^2 / <(2,0), (0,3)> is Z/6; G / G is 0."""
    plane = FgAbGroup.integers(2)
    assert abelian.quotient(plane, [plane.element((2, 0)), plane.element((0, 3))]) == (
        FgAbGroup.cyclic(6)
    )
    group = FgAbGroup(torsion=(2, 4), rank=1)
    assert abelian.quotient(group, group.generators()).is_trivial


def test_quotient_data_lift():
    """The map of a quotient sends lifts back."""
    group = FgAbGroup(torsion=(4,), rank=1)
    data = abelian.quotient_data(group, [group.element((2, 3))])
    for y in data.group.generators():
        assert data.map(data.lift(y)) == y


# Subgroup


def test_subgroup_equality_by_double_inclusion():
    """<2> = <4, 6> in Z and 2Z strictly contains 4Z."""
    integers = FgAbGroup.integers()
    two = Subgroup(integers, [(2,)])
    assert two == Subgroup(integers, [(4,), (6,)])
    assert Subgroup(integers, [(4,)]) < two
    assert Subgroup(integers, [(1,)]).is_whole


def test_subgroup_coordinates():
    """Members get coordinates in the subgroup; non-members None."""
    group = FgAbGroup.cyclic(12)
    sub = Subgroup(group, [(4,)])
    assert sub.group == FgAbGroup.cyclic(3)
    assert sub.coordinates(group.element((8,))) is not None
    assert sub.coordinates(group.element((6,))) is None


# direct_sum / present


def test_direct_sum_projections():
    """Projections undo injections."""
    total = abelian.direct_sum(FgAbGroup.cyclic(2), FgAbGroup.cyclic(3), FgAbGroup.integers())
    assert total.group == FgAbGroup(rank=1, torsion=(6,))
    components = (
        FgAbGroup.cyclic(2).element((1,)),
        FgAbGroup.cyclic(3).element((2,)),
        FgAbGroup.integers().element((-5,)),
    )
    assert total.split(total.combine(components)) == components


def test_present_roundtrip():
    """Projection after section is the identity on the normalized group."""
    presentation = abelian.present(3, [[2, 0], [0, 3], [0, 0]])
    assert presentation.group == FgAbGroup(rank=1, torsion=(6,))
    for generator in presentation.group.generators():
        assert presentation.project(presentation.lift(generator)) == generator


# random_group / random_homomorphism


def test_random_instances_are_well_defined():
    """Random groups respect the order bound; random maps construct."""
    rng = random.Random(3)
    for _ in range(50):
        source = abelian.random_group(rng, max_order=64)
        target = abelian.random_group(rng, max_order=64)
        assert source.order <= 64
        assert abelian.random_homomorphism(rng, source, target).source == source

import itertools
import logging
import operator
import random

import pytest
from _pytest.logging import LogCaptureFixture
from hypothesis import given, settings
from hypothesis import strategies as st

from limtower_cli import towers
from limtower_cli.abelian import FgAbGroup, Homomorphism
from limtower_cli.exceptions import (
    IncompatibleResiduesError,
    NonCommutingError,
    NotExactError,
    ShapeMismatchError,
    StageOutOfRangeError,
)
from limtower_cli.towers import GrayBranch, Lim1Verdict, StageStatus

# Tower


def test_tower_shape_checks():
    """Bond count and bond ends must match the stages."""
    integers = FgAbGroup.integers()
    with pytest.raises(ShapeMismatchError):
        towers.Tower((integers, integers), ())
    with pytest.raises(ShapeMismatchError):
        towers.Tower(
            (integers, FgAbGroup.cyclic(2)),
            (Homomorphism(integers, integers, [[1]]),),
        )
    with pytest.raises(ShapeMismatchError):
        towers.Tower((), ())


def test_tower_stage_out_of_range():
    """Stages are numbered 1..N."""
    tower = towers.multiply_tower(2, 3)
    assert tower.stage(1) == FgAbGroup.integers()
    with pytest.raises(StageOutOfRangeError):
        tower.stage(0)
    with pytest.raises(StageOutOfRangeError):
        tower.stage(4)
    with pytest.raises(StageOutOfRangeError):
        tower.composite(1, 2)


def test_tower_composite_and_truncate():
    """Composed bonds multiply; truncation keeps the lower stages."""
    tower = towers.primorial_tower(4)
    assert tower.composite(4, 1).matrix[0, 0] == 30
    assert tower.composite(2, 2).is_isomorphism
    assert tower.truncate(2) == towers.primorial_tower(2)


# image_filtration


def test_image_filtration_doubling():
    """x2 tower, stage 1, horizon 5: Z ⊇ 2Z ⊇ 4Z ⊇ 8Z ⊇ 16Z."""
    report = towers.image_filtration(towers.multiply_tower(2, 5), 1)
    assert [str(sub) for sub in report.chain] == ["Z", "2Z", "4Z", "8Z", "16Z"]
    assert report.stabilized_at is None
    assert report.strict_drops == ((1, 2), (2, 3), (3, 4), (4, 5))


def test_image_filtration_primorial():
    """Primorial tower, horizon 4: Z ⊇ 2Z ⊇ 6Z ⊇ 30Z."""
    report = towers.image_filtration(towers.primorial_tower(4), 1)
    assert [str(sub) for sub in report.chain] == ["Z", "2Z", "6Z", "30Z"]
    assert report.image(3).index() == 6


def test_image_filtration_constant(caplog: LogCaptureFixture):
    """Identity bonds stabilize at once."""
    with caplog.at_level(logging.DEBUG):
        report = towers.image_filtration(towers.constant_tower(FgAbGroup.cyclic(6), 4), 1)
    assert report.stabilized_at == 1
    assert not report.strict_drops
    assert (
        "limtower_cli.towers",
        logging.DEBUG,
        "Stage 1 of horizon 4: stabilized at 1",
    ) in caplog.record_tuples


def test_image_filtration_stabilizes_late():
    """Z/2 <- Z/4 <- Z/8 with zero then surjective bonds stabilizes at stage 2."""
    stages = [FgAbGroup.cyclic(2), FgAbGroup.cyclic(4), FgAbGroup.cyclic(8)]
    bonds = [
        Homomorphism.zero(stages[1], stages[0]),
        Homomorphism(stages[2], stages[1], [[1]]),
    ]
    report = towers.image_filtration(towers.Tower(stages, bonds), 1)
    assert report.stabilized_at == 2
    assert report.stable_image.is_trivial


# is_mittag_leffler / lim1_classification


def test_mittag_leffler_constant_tower():
    """Every stage of a finite constant tower is certified."""
    report = towers.is_mittag_leffler(towers.constant_tower(FgAbGroup.cyclic(6), 4))
    assert report.is_certified
    assert [s.status for s in report.stages] == [StageStatus.STABILIZED] * 3 + [
        StageStatus.FINITE
    ]


def test_mittag_leffler_doubling_is_undetermined():
    """Lower stages of the x2 tower are undetermined; the top one is the horizon."""
    report = towers.is_mittag_leffler(towers.multiply_tower(2, 5))
    assert not report.is_certified
    assert [s.stage for s in report.undetermined] == [1, 2, 3, 4]
    assert report.stage(5).status is StageStatus.HORIZON
    assert report.stage(1).witness == (4, 5)


def test_mittag_leffler_single_stage():
    """A lone infinite stage is undetermined; a lone finite stage certifies."""
    report = towers.is_mittag_leffler(towers.multiply_tower(2, 1))
    assert report.stage(1).status is StageStatus.UNDETERMINED
    finite = towers.is_mittag_leffler(towers.constant_tower(FgAbGroup.cyclic(3), 1))
    assert finite.is_certified


def test_mittag_leffler_workers_agree():
    """Threaded and sequential runs give the same verdicts."""
    tower = towers.primorial_tower(6)
    sequential = towers.is_mittag_leffler(tower)
    threaded = towers.is_mittag_leffler(tower, workers=4)
    assert [s.status for s in sequential.stages] == [s.status for s in threaded.stages]


def test_lim1_classification_verdicts():
    """Finite towers certify zero; the primorial tower stays undetermined."""
    finite = towers.lim1_classification(towers.reduction_tower(2, 4))
    assert finite.verdict is Lim1Verdict.ZERO_CERTIFIED
    assert finite.certificate[0] == (1, "stabilized", 1)

    primorial = towers.lim1_classification(towers.primorial_tower(5))
    assert primorial.verdict is Lim1Verdict.UNDETERMINED_AT_HORIZON
    assert not primorial.is_zero_certified
    assert [s.stage for s in primorial.witness] == [1, 2, 3, 4]


def test_random_finite_towers_certify():
    """Finite stages always certify."""
    rng = random.Random(11)
    for _ in range(20):
        tower = towers.random_finite_tower(rng, horizon=rng.randint(1, 5), max_order=32)
        assert towers.lim1_classification(tower).is_zero_certified


# stable_image_tower


def test_stable_image_tower_doubling():
    """x2 tower at horizon 6: stage n is 2^(6-n)Z."""
    stable = towers.stable_image_tower(towers.multiply_tower(2, 6))
    assert [str(sub) for sub in stable.subgroups] == ["32Z", "16Z", "8Z", "4Z", "2Z", "Z"]
    assert all(stable.surjective)
    assert not stable.stabilized
    assert not stable.equals_original


def test_stable_image_tower_of_surjective_tower():
    """Surjective bonds leave the tower unchanged."""
    stable = towers.stable_image_tower(towers.reduction_tower(3, 4))
    assert stable.equals_original
    assert stable.stabilized


@pytest.mark.parametrize("zero_bond", [1, 2, 3, 4])
def test_stable_image_tower_with_one_zero_bond(zero_bond):
    """Z/2 tower whose bond f_j is zero: stable images vanish up to j and are whole above."""
    group = FgAbGroup.cyclic(2)
    bonds = [
        Homomorphism.zero(group, group) if n == zero_bond else Homomorphism.identity(group)
        for n in range(1, 5)
    ]
    stable = towers.stable_image_tower(towers.Tower((group,) * 5, bonds))

    assert [sub.is_trivial for sub in stable.subgroups[:zero_bond]] == [True] * zero_bond
    assert all(sub.is_whole for sub in stable.subgroups[zero_bond:])
    assert all(stable.surjective)
    assert not stable.equals_original


# lim_at_horizon / lim_image_cokernel / enumerate_limit


def test_lim_at_horizon_reduction():
    """lim(Z/8 <- Z/16 <- Z/32) is Z/32."""
    limit = towers.lim_at_horizon(towers.reduction_tower(2, 3, start=3))
    assert limit.group == FgAbGroup.cyclic(32)
    assert limit.image_in(1).is_whole


def test_lim_at_horizon_primorial():
    """The primorial limit at horizon 4 is Z and lands in 30Z at stage 1."""
    tower = towers.primorial_tower(4)
    limit = towers.lim_at_horizon(tower)
    assert limit.group == FgAbGroup.integers()
    assert str(limit.image_in(1)) == "30Z"
    assert towers.lim_image_cokernel(tower, 1) == FgAbGroup.cyclic(30)
    assert towers.lim_image_cokernel(tower, 4).is_trivial


def test_lim_at_horizon_components():
    """Compatible components round-trip; incompatible ones give None."""
    tower = towers.reduction_tower(2, 2)
    limit = towers.lim_at_horizon(tower)
    generator = limit.group.generators()[0]
    assert limit.element_from_components(limit.components(generator)) == generator
    assert (
        limit.element_from_components((tower.stage(1).element((1,)), tower.stage(2).zero()))
        is None
    )


def test_enumerate_limit_matches_order():
    """Brute force agrees with the computed order."""
    tower = towers.reduction_tower(2, 3)
    assert len(towers.enumerate_limit(tower)) == towers.lim_at_horizon(tower).group.order


def test_enumerate_limit_refuses_infinite_stages():
    with pytest.raises(StageOutOfRangeError):
        towers.enumerate_limit(towers.multiply_tower(2, 2))


# TowerMap / TowerSES / six_term_check


def test_tower_map_must_commute():
    """Identity maps between x2 and x3 towers do not commute."""
    source, target = towers.multiply_tower(2, 2), towers.multiply_tower(3, 2)
    integers = FgAbGroup.integers()
    with pytest.raises(NonCommutingError):
        towers.TowerMap(source, target, [Homomorphism.identity(integers)] * 2)


def test_tower_ses_must_be_exact():
    """A zero inclusion is not injective."""
    tower = towers.constant_tower(FgAbGroup.integers(), 2)
    integers = FgAbGroup.integers()
    inclusion = towers.TowerMap(tower, tower, [Homomorphism.zero(integers, integers)] * 2)
    projection = towers.TowerMap(tower, tower, [Homomorphism.identity(integers)] * 2)
    with pytest.raises(NotExactError):
        towers.TowerSES(inclusion, projection)


def test_six_term_prime_power():
    """The prime-power sequence passes every arrow, cross-validated."""
    report = towers.six_term_check(towers.prime_power_ses(2, 4))
    assert report.passed
    assert report.cross_validated is True
    assert all(arrow.status is towers.ArrowStatus.VERIFIED for arrow in report.arrows)
    assert report.limits == (
        FgAbGroup.cyclic(16),
        FgAbGroup.cyclic(256),
        FgAbGroup.cyclic(16),
    )


def test_six_term_trivial_sequence_of_infinite_tower():
    """0 -> 0 -> T -> T -> 0 on the x2 tower skips the surjectivity arrow."""
    report = towers.six_term_check(towers.trivial_ses(towers.multiply_tower(2, 3)))
    assert report.passed
    assert report.cross_validated is None
    assert report.arrows[-1].status is towers.ArrowStatus.SKIPPED


def test_six_term_random_split_sequences():
    """Random split sequences pass and cross-validate."""
    rng = random.Random(5)
    for _ in range(10):
        report = towers.six_term_check(towers.random_split_ses(rng, horizon=rng.randint(1, 3)))
        assert report.passed
        assert report.cross_validated in (True, None)


# gray_kernel_levels


def test_gray_constant_tower():
    """Derived towers of a constant tower are certified."""
    report = towers.gray_kernel_levels(towers.constant_tower(FgAbGroup.integers(), 4), 2)
    assert report.branch is GrayBranch.CONSTANT
    assert report.branch_used
    assert report.classification.is_zero_certified
    assert report.derived.horizon == 4


def test_gray_doubling_tower_undetermined():
    """The x2 tower's derived tower at index 1 is its own image chain."""
    report = towers.gray_kernel_levels(towers.multiply_tower(2, 4), 1, GrayBranch.VERBATIM)
    assert not report.branch_used
    assert not report.classification.is_zero_certified
    assert report.consequence.startswith("undetermined at horizon")


@pytest.mark.parametrize("branch", list(GrayBranch))
def test_gray_primorial_tower_first_index(branch):
    """At k = 1 the derived tower is the image chain k(n - 1)Z, whatever the branch."""
    report = towers.gray_kernel_levels(towers.primorial_tower(5), 1, branch)
    assert not report.branch_used
    assert report.derived.stages == (FgAbGroup.integers(),) * 5
    assert [abs(bond.matrix[0, 0]) for bond in report.derived.bonds] == [2, 3, 5, 7]
    assert report.classification.verdict is Lim1Verdict.UNDETERMINED_AT_HORIZON
    assert report.consequence.startswith("undetermined at horizon")


def test_gray_verbatim_branch_keeps_lower_stages():
    """Doubling tower at k = 2: verbatim keeps G_1 and its bond, constant repeats G_2."""
    tower = towers.multiply_tower(2, 4)
    verbatim = towers.gray_kernel_levels(tower, 2, GrayBranch.VERBATIM)
    constant = towers.gray_kernel_levels(tower, 2, GrayBranch.CONSTANT)

    assert verbatim.branch is GrayBranch.VERBATIM
    assert verbatim.branch_used and constant.branch_used
    assert abs(verbatim.derived.bond(1).matrix[0, 0]) == 2
    assert abs(constant.derived.bond(1).matrix[0, 0]) == 1
    assert [abs(bond.matrix[0, 0]) for bond in verbatim.derived.bonds] == [2, 2, 2]
    assert not verbatim.classification.is_zero_certified


def test_gray_verbatim_branch_finite_tower():
    """A constant finite tower is its own derived tower on both branches."""
    tower = towers.constant_tower(FgAbGroup.cyclic(6), 4)
    for k in range(2, 5):
        report = towers.gray_kernel_levels(tower, k, GrayBranch.VERBATIM)
        assert report.derived.stages == tower.stages
        assert report.classification.is_zero_certified


def test_gray_index_out_of_range():
    with pytest.raises(StageOutOfRangeError):
        towers.gray_kernel_levels(towers.multiply_tower(2, 3), 4)


# ResidueTower


def test_residue_tower_make():
    """make((2, 6, 30), 7) has residues (1, 1, 7)."""
    tower = towers.ResidueTower.make((2, 6, 30), 7)
    assert tower.residues == (1, 1, 7)
    assert str(tower) == "(1 mod 2, 1 mod 6, 7 mod 30)"
    assert tower.project(3) == 7
    assert tower.truncate(2).moduli == (2, 6)


def test_residue_tower_rejects_incompatible_residues():
    with pytest.raises(IncompatibleResiduesError):
        towers.ResidueTower((2, 6), (1, 2))
    with pytest.raises(IncompatibleResiduesError):
        towers.ResidueTower((2, 5), (0, 0))


def test_residue_tower_arithmetic():
    """Sums, negation and scaling stay compatible."""
    first = towers.ResidueTower.make((2, 6, 30), 7)
    second = towers.ResidueTower.make((2, 6, 30), 11)
    assert (first + second).residues == (0, 0, 18)
    assert (first - first).is_zero
    assert (3 * first).residues == (1, 3, 21)


divisibility_chains = st.lists(st.integers(min_value=1, max_value=7), min_size=1, max_size=5).map(
    lambda factors: tuple(itertools.accumulate(factors, operator.mul))
)


@settings(max_examples=100, deadline=None)
@given(
    divisibility_chains,
    st.integers(min_value=-(10**6), max_value=10**6),
    st.integers(min_value=-(10**6), max_value=10**6),
    st.integers(min_value=-(10**6), max_value=10**6),
    st.integers(min_value=-50, max_value=50),
)
def test_residue_tower_group_axioms(moduli, a, b, c, factor):
    """Compatible residue towers form an abelian group; make is additive in the seed."""
    x, y, z = (towers.ResidueTower.make(moduli, seed) for seed in (a, b, c))
    zero = towers.ResidueTower.zero(moduli)

    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x + zero == x
    assert (x + (-x)).is_zero
    assert x - y == x + (-y)
    assert x + y == towers.ResidueTower.make(moduli, a + b)
    assert factor * (x + y) == factor * x + factor * y
    assert x.scale(factor) == towers.ResidueTower.make(moduli, factor * a)


def test_is_diagonal_at_horizon():
    """make(5) minus zero is the diagonal 5 mod 30."""
    witness = towers.is_diagonal_at_horizon(
        towers.ResidueTower.make((2, 6, 30), 5), towers.ResidueTower.zero((2, 6, 30))
    )
    assert (witness.residue, witness.modulus) == (5, 30)

"""Inverse towers of finitely generated abelian groups, truncated at a finite horizon.

Stage ``n`` (1-based) of a tower of horizon ``N`` is ``stages[n - 1]``; the bond
``f_n: G_{n+1} -> G_n`` is ``bonds[n - 1]``. Nothing here claims an infinitary
fact: a stage whose image chain has not settled before the horizon is reported
as undetermined, never as a failure of the Mittag-Leffler condition.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import concurrent.futures
import dataclasses
import enum
import logging
import typing

# Installed
import sympy

# Own modules
from limtower_cli import exceptions
from limtower_cli.abelian import (
    FgAbGroup,
    GroupElement,
    Homomorphism,
    Subgroup,
    direct_sum,
    image,
    is_isomorphic,
    kernel,
    quotient,
    random_group,
    random_homomorphism,
)

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# TOWERS ############################################################# TOWERS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class Tower:
    """Finite inverse system ``G_1 <- G_2 <- ... <- G_N``."""

    stages: typing.Tuple[FgAbGroup, ...]
    bonds: typing.Tuple[Homomorphism, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if not self.stages:
            raise exceptions.ShapeMismatchError("A tower needs at least one stage")
        if len(self.bonds) != len(self.stages) - 1:
            raise exceptions.ShapeMismatchError(
                f"{len(self.stages)} stages need {len(self.stages) - 1} bonds, "
                f"got {len(self.bonds)}"
            )
        for n, bond in enumerate(self.bonds, start=1):
            if bond.source != self.stages[n] or bond.target != self.stages[n - 1]:
                raise exceptions.ShapeMismatchError(
                    f"Bond {n} maps {bond.source} -> {bond.target}, expected "
                    f"{self.stages[n]} -> {self.stages[n - 1]}"
                )

    def __eq__(self, other):
        if not isinstance(other, Tower):
            return NotImplemented
        return self.stages == other.stages and self.bonds == other.bonds

    __hash__ = None

    @property
    def horizon(self) -> int:
        return len(self.stages)

    @property
    def is_finite(self) -> bool:
        return all(stage.is_finite for stage in self.stages)

    def _check_stage(self, n: int):
        if not 1 <= n <= self.horizon:
            raise exceptions.StageOutOfRangeError(
                f"Stage {n} is outside 1..{self.horizon}"
            )

    def stage(self, n: int) -> FgAbGroup:
        self._check_stage(n)
        return self.stages[n - 1]

    def bond(self, n: int) -> Homomorphism:
        """``f_n: G_{n+1} -> G_n``."""
        if not 1 <= n < self.horizon:
            raise exceptions.StageOutOfRangeError(f"Bond {n} is outside 1..{self.horizon - 1}")
        return self.bonds[n - 1]

    def composites(self, n: int) -> typing.Iterator[typing.Tuple[int, Homomorphism]]:
        """``(k, G_k -> G_n)`` for ``k = n .. N``, built incrementally."""
        self._check_stage(n)
        current = Homomorphism.identity(self.stage(n))
        yield n, current
        for k in range(n, self.horizon):
            current = current.compose(self.bond(k))
            yield k + 1, current

    def composite(self, k: int, n: int) -> Homomorphism:
        """Composed bond ``G_k -> G_n`` for ``n <= k``."""
        self._check_stage(k)
        if n > k:
            raise exceptions.StageOutOfRangeError(f"No map from stage {k} down to stage {n}")
        for index, current in self.composites(n):
            if index == k:
                return current

    def truncate(self, horizon: int) -> "Tower":
        self._check_stage(horizon)
        return Tower(self.stages[:horizon], self.bonds[: horizon - 1], name=self.name)


###############################################################################
# FILTRATION ##################################################### FILTRATION #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class FiltrationReport:
    """Image chain ``G_n^(n) ⊇ G_n^(n+1) ⊇ ... ⊇ G_n^(N)`` of one stage.

    ``stabilized_at`` is the least ``k < N`` from which the chain is constant,
    None when no such ``k`` exists. ``strict_drops`` lists the ``(k, k + 1)``
    with ``G_n^(k+1)`` strictly smaller than ``G_n^(k)``.
    """

    stage: int
    horizon: int
    chain: typing.Tuple[Subgroup, ...]
    stabilized_at: typing.Optional[int]
    strict_drops: typing.Tuple[typing.Tuple[int, int], ...]

    def image(self, k: int) -> Subgroup:
        if not self.stage <= k <= self.horizon:
            raise exceptions.StageOutOfRangeError(
                f"Image index {k} is outside {self.stage}..{self.horizon}"
            )
        return self.chain[k - self.stage]

    @property
    def stable_image(self) -> Subgroup:
        return self.chain[-1]

    @property
    def is_stabilized(self) -> bool:
        return self.stabilized_at is not None


def image_filtration(tower: Tower, n: int) -> FiltrationReport:
    """Image filtration of stage ``n`` up to the horizon."""
    chain = tuple(image(composite) for _, composite in tower.composites(n))

    settled = []
    for k, (larger, smaller) in enumerate(zip(chain, chain[1:]), start=n):
        if not smaller <= larger:
            raise exceptions.ConsistencyError(
                f"Image chain of stage {n} is not descending at {k} -> {k + 1}"
            )
        settled.append(larger <= smaller)

    stabilized_at = None
    for k in range(tower.horizon - 1, n - 1, -1):
        if not settled[k - n]:
            break
        stabilized_at = k

    drops = tuple((k, k + 1) for k, same in enumerate(settled, start=n) if not same)
    LOG.debug(f"Stage {n} of horizon {tower.horizon}: stabilized at {stabilized_at}")
    return FiltrationReport(
        stage=n,
        horizon=tower.horizon,
        chain=chain,
        stabilized_at=stabilized_at,
        strict_drops=drops,
    )


###############################################################################
# MITTAG-LEFFLER ############################################# MITTAG-LEFFLER #
###############################################################################


class StageStatus(enum.Enum):
    """Verdict on a single stage's image chain."""

    STABILIZED = "stabilized"
    FINITE = "finite"
    UNDETERMINED = "undetermined at horizon"
    HORIZON = "top stage"

    @property
    def certifies(self) -> bool:
        return self in (StageStatus.STABILIZED, StageStatus.FINITE)


@dataclasses.dataclass(frozen=True, eq=False)
class StageReport:
    stage: int
    status: StageStatus
    filtration: FiltrationReport

    @property
    def stabilized_at(self) -> typing.Optional[int]:
        return self.filtration.stabilized_at

    @property
    def witness(self) -> typing.Optional[typing.Tuple[int, int]]:
        """Strictly decreasing pair closest to the horizon."""
        drops = self.filtration.strict_drops
        return drops[-1] if drops else None


@dataclasses.dataclass(frozen=True, eq=False)
class MittagLefflerReport:
    """Per-stage verdicts; the top stage only counts when it is the only one."""

    horizon: int
    stages: typing.Tuple[StageReport, ...]

    def stage(self, n: int) -> StageReport:
        return self.stages[n - 1]

    @property
    def undetermined(self) -> typing.Tuple[StageReport, ...]:
        return tuple(s for s in self.stages if s.status is StageStatus.UNDETERMINED)

    @property
    def is_certified(self) -> bool:
        return not self.undetermined


def _stage_status(tower: Tower, filtration: FiltrationReport) -> StageStatus:
    if filtration.is_stabilized:
        return StageStatus.STABILIZED
    if tower.stage(filtration.stage).is_finite:
        return StageStatus.FINITE
    if filtration.stage == tower.horizon and tower.horizon > 1:
        return StageStatus.HORIZON
    return StageStatus.UNDETERMINED


def is_mittag_leffler(tower: Tower, workers: int = 1) -> MittagLefflerReport:
    """Mittag-Leffler verdict for every stage.

    A finite stage always certifies (descending chains of finite groups
    stabilize). The top stage of a tower with more than one stage is reported
    as ``HORIZON``: its chain is decided by bonds beyond the horizon.
    """
    stages = range(1, tower.horizon + 1)
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            filtrations = list(executor.map(lambda n: image_filtration(tower, n), stages))
    else:
        filtrations = [image_filtration(tower, n) for n in stages]

    return MittagLefflerReport(
        horizon=tower.horizon,
        stages=tuple(
            StageReport(stage=f.stage, status=_stage_status(tower, f), filtration=f)
            for f in filtrations
        ),
    )


class Lim1Verdict(enum.Enum):
    ZERO_CERTIFIED = "ZeroCertified"
    UNDETERMINED_AT_HORIZON = "UndeterminedAtHorizon"


@dataclasses.dataclass(frozen=True, eq=False)
class Lim1Classification:
    """``ZeroCertified`` with stabilization indices, or the stages that are undetermined."""

    verdict: Lim1Verdict
    horizon: int
    certificate: typing.Tuple[typing.Tuple[int, str, typing.Optional[int]], ...]
    witness: typing.Tuple[StageReport, ...]

    @property
    def is_zero_certified(self) -> bool:
        return self.verdict is Lim1Verdict.ZERO_CERTIFIED


def lim1_classification(
    tower: Tower, report: typing.Optional[MittagLefflerReport] = None, workers: int = 1
) -> Lim1Classification:
    """Classify lim¹ at the horizon; never claims that lim¹ is nonzero."""
    report = report or is_mittag_leffler(tower, workers=workers)
    if report.is_certified:
        verdict = Lim1Verdict.ZERO_CERTIFIED
    else:
        verdict = Lim1Verdict.UNDETERMINED_AT_HORIZON
    return Lim1Classification(
        verdict=verdict,
        horizon=tower.horizon,
        certificate=tuple((s.stage, s.status.value, s.stabilized_at) for s in report.stages),
        witness=report.undetermined,
    )


###############################################################################
# STABLE IMAGES ############################################### STABLE IMAGES #
###############################################################################


def restrict(
    homomorphism: Homomorphism, source: Subgroup, target: Subgroup
) -> Homomorphism:
    """Map ``source.group -> target.group`` induced by ``homomorphism``."""
    images = []
    for generator in source.generators:
        coordinates = target.coordinates(homomorphism(generator))
        if coordinates is None:
            raise exceptions.ConsistencyError(
                f"{homomorphism(generator)} does not lie in the subgroup {target}"
            )
        images.append(coordinates)
    return Homomorphism.from_images(source.group, target.group, images)


@dataclasses.dataclass(frozen=True, eq=False)
class StableImageTower:
    """Tower of ``G_n^(N)`` with restricted bonds."""

    tower: Tower
    subgroups: typing.Tuple[Subgroup, ...]
    stabilized: bool
    surjective: typing.Tuple[bool, ...]

    @property
    def equals_original(self) -> bool:
        return all(sub.is_whole for sub in self.subgroups)


def stable_image_tower(
    tower: Tower, report: typing.Optional[MittagLefflerReport] = None
) -> StableImageTower:
    """Horizon approximation of the stable-image tower ``{G_n^(inf)}``."""
    report = report or is_mittag_leffler(tower)
    subgroups = tuple(s.filtration.stable_image for s in report.stages)
    bonds = tuple(
        restrict(tower.bond(n), subgroups[n], subgroups[n - 1])
        for n in range(1, tower.horizon)
    )
    surjective = tuple(bond.is_surjective for bond in bonds)
    if report.is_certified and not all(surjective):
        raise exceptions.ConsistencyError(
            "Stable-image tower of a certified tower has a bond that is not surjective"
        )
    return StableImageTower(
        tower=Tower(tuple(s.group for s in subgroups), bonds, name=f"{tower.name} stable"),
        subgroups=subgroups,
        stabilized=report.is_certified,
        surjective=surjective,
    )


###############################################################################
# LIMITS ############################################################# LIMITS #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class LimitAtHorizon:
    """Compatible tuples ``(g_1, ..., g_N)`` as a subgroup of the direct sum of the stages."""

    tower: Tower
    subgroup: Subgroup
    projections: typing.Tuple[Homomorphism, ...]
    _sum: typing.Any = dataclasses.field(repr=False)

    @property
    def group(self) -> FgAbGroup:
        return self.subgroup.group

    def components(self, element: GroupElement) -> typing.Tuple[GroupElement, ...]:
        return tuple(projection(element) for projection in self.projections)

    def element_from_components(
        self, components: typing.Sequence[GroupElement]
    ) -> typing.Optional[GroupElement]:
        """Limit element with the given components; None if they are not compatible."""
        return self.subgroup.coordinates(self._sum.combine(components))

    def image_in(self, n: int) -> Subgroup:
        return image(self.projections[n - 1])


def lim_at_horizon(tower: Tower) -> LimitAtHorizon:
    """Group of compatible tuples; asserts it is isomorphic to the top stage."""
    total = direct_sum(*tower.stages)
    lower = direct_sum(*tower.stages[:-1])
    differences = Homomorphism.zero(total.group, lower.group)
    for n in range(1, tower.horizon):
        component = total.projections[n - 1] + -tower.bond(n).compose(total.projections[n])
        differences = differences + lower.injections[n - 1].compose(component)

    compatible = kernel(differences)
    projections = tuple(p.compose(compatible.inclusion) for p in total.projections)
    if not is_isomorphic(compatible.group, tower.stages[-1]) or not projections[-1].is_isomorphism:
        raise exceptions.ConsistencyError(
            f"Compatible tuples {compatible.group} do not match the top stage {tower.stages[-1]}"
        )
    return LimitAtHorizon(
        tower=tower, subgroup=compatible, projections=projections, _sum=total
    )


def lim_image_cokernel(tower: Tower, n: int) -> FgAbGroup:
    """``G_n`` modulo the image of the limit at the horizon."""
    limit = lim_at_horizon(tower)
    return quotient(tower.stage(n), limit.image_in(n).generators)


def enumerate_limit(tower: Tower, cap: int = 4096) -> typing.Set[tuple]:
    """Brute-force set of compatible tuples of a finite tower (coordinate tuples).

    Raises StageOutOfRangeError when a stage is infinite or larger than ``cap``.
    """
    for n, stage in enumerate(tower.stages, start=1):
        if not stage.is_finite or stage.order > cap:
            raise exceptions.StageOutOfRangeError(
                f"Stage {n} ({stage}) is too large to enumerate"
            )

    preimages = []
    for n in range(1, tower.horizon):
        buckets: typing.Dict[tuple, list] = {}
        for element in tower.stage(n + 1).elements():
            buckets.setdefault(tower.bond(n)(element).coordinates, []).append(element.coordinates)
        preimages.append(buckets)

    partial = [(x.coordinates,) for x in tower.stage(1).elements()]
    for buckets in preimages:
        partial = [prefix + (up,) for prefix in partial for up in buckets.get(prefix[-1], [])]
    return set(partial)


###############################################################################
# SHORT EXACT SEQUENCES ############################### SHORT EXACT SEQUENCES #
###############################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class TowerMap:
    """Levelwise maps ``source_n -> target_n`` commuting with the bonds."""

    source: Tower
    target: Tower
    maps: typing.Tuple[Homomorphism, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.source.horizon == self.target.horizon == len(self.maps):
            raise exceptions.ShapeMismatchError(
                f"Horizons {self.source.horizon}, {self.target.horizon} and "
                f"{len(self.maps)} levelwise maps differ"
            )
        for n, level in enumerate(self.maps, start=1):
            if level.source != self.source.stage(n) or level.target != self.target.stage(n):
                raise exceptions.ShapeMismatchError(f"Levelwise map {n} has the wrong ends")
        for n in range(1, self.source.horizon):
            upper = self.maps[n - 1].compose(self.source.bond(n))
            lower = self.target.bond(n).compose(self.maps[n])
            if upper != lower:
                raise exceptions.NonCommutingError(f"Square at stage {n} does not commute")

    def level(self, n: int) -> Homomorphism:
        return self.maps[n - 1]

    def on_limits(self, source: LimitAtHorizon, target: LimitAtHorizon) -> Homomorphism:
        """Induced map of compatible tuples."""
        images = []
        for generator in source.group.generators():
            components = [
                level(component)
                for level, component in zip(self.maps, source.components(generator))
            ]
            tuple_image = target.element_from_components(components)
            if tuple_image is None:
                raise exceptions.ConsistencyError("Induced tuple is not compatible")
            images.append(tuple_image)
        return Homomorphism.from_images(source.group, target.group, images)


@dataclasses.dataclass(frozen=True, eq=False)
class TowerSES:
    """Levelwise short exact ``0 -> K -> G -> H -> 0``."""

    inclusion: TowerMap
    projection: TowerMap
    name: str = ""

    def __post_init__(self):
        if self.inclusion.target != self.projection.source:
            raise exceptions.ShapeMismatchError("Middle towers of the sequence differ")
        for n in range(1, self.middle.horizon + 1):
            self._check_level(n)

    def _check_level(self, n: int):
        alpha, beta = self.inclusion.level(n), self.projection.level(n)
        if not alpha.is_injective:
            raise exceptions.NotExactError(f"Stage {n}: {alpha} is not injective")
        if not beta.is_surjective:
            raise exceptions.NotExactError(f"Stage {n}: {beta} is not surjective")
        if image(alpha) != kernel(beta):
            raise exceptions.NotExactError(f"Stage {n}: image and kernel differ")

    @property
    def sub(self) -> Tower:
        return self.inclusion.source

    @property
    def middle(self) -> Tower:
        return self.inclusion.target

    @property
    def quotient(self) -> Tower:
        return self.projection.target


class ArrowStatus(enum.Enum):
    VERIFIED = "verified"
    FAILED = "failed"
    SKIPPED = "skipped"


@dataclasses.dataclass(frozen=True)
class ArrowCheck:
    arrow: str
    status: ArrowStatus
    detail: str = ""


@dataclasses.dataclass(frozen=True, eq=False)
class SixTermReport:
    """Checks on ``0 -> lim K -> lim G -> lim H`` and, when lim¹ is certified zero, onto lim H."""

    horizon: int
    limits: typing.Tuple[FgAbGroup, FgAbGroup, FgAbGroup]
    classifications: typing.Tuple[Lim1Classification, ...]
    arrows: typing.Tuple[ArrowCheck, ...]
    cross_validated: typing.Optional[bool] = None

    @property
    def passed(self) -> bool:
        return (
            all(a.status is not ArrowStatus.FAILED for a in self.arrows)
            and self.cross_validated is not False
        )


def _arrow(name: str, holds: bool, detail: str = "") -> ArrowCheck:
    return ArrowCheck(name, ArrowStatus.VERIFIED if holds else ArrowStatus.FAILED, detail)


def six_term_check(
    sequence: TowerSES, cross_validate: bool = True, cap: int = 4096
) -> SixTermReport:
    """Verify the computable part of the lim-lim¹ sequence at the horizon."""
    limits = tuple(lim_at_horizon(t) for t in (sequence.sub, sequence.middle, sequence.quotient))
    alpha = sequence.inclusion.on_limits(limits[0], limits[1])
    beta = sequence.projection.on_limits(limits[1], limits[2])
    classifications = tuple(
        lim1_classification(t) for t in (sequence.sub, sequence.middle, sequence.quotient)
    )

    arrows = [
        _arrow("0 -> lim K", alpha.is_injective, "induced map is injective"),
        _arrow("lim K -> lim G -> lim H", beta.compose(alpha).is_zero, "composite is zero"),
        _arrow("exact at lim G", image(alpha) == kernel(beta), "image equals kernel"),
    ]
    if all(c.is_zero_certified for c in classifications):
        arrows.append(_arrow("lim G -> lim H -> 0", beta.is_surjective, "lim¹ K certified zero"))
    else:
        arrows.append(
            ArrowCheck("lim G -> lim H -> 0", ArrowStatus.SKIPPED, "lim¹ not certified zero")
        )

    cross_validated = None
    if cross_validate and all(t.is_finite for t in (sequence.sub, sequence.middle, sequence.quotient)):
        try:
            cross_validated = _cross_validate(sequence, limits, arrows, cap)
        except exceptions.StageOutOfRangeError as err:
            LOG.debug(f"Skipping brute-force cross-validation: {err}")

    report = SixTermReport(
        horizon=sequence.middle.horizon,
        limits=tuple(limit.group for limit in limits),
        classifications=classifications,
        arrows=tuple(arrows),
        cross_validated=cross_validated,
    )
    LOG.debug(f"Six-term check of {sequence.name or 'sequence'}: passed={report.passed}")
    return report


def _cross_validate(sequence: TowerSES, limits, arrows, cap: int) -> bool:
    """Recompute the verified arrows on enumerated tuples."""
    tuples = [
        enumerate_limit(t, cap) for t in (sequence.sub, sequence.middle, sequence.quotient)
    ]
    if [len(t) for t in tuples] != [limit.group.order for limit in limits]:
        return False

    def apply(tower_map: TowerMap, point: tuple) -> tuple:
        return tuple(
            level(tower_map.source.stage(n).element(x)).coordinates
            for n, (level, x) in enumerate(zip(tower_map.maps, point), start=1)
        )

    sub, middle, quo = tuples
    zero = tuple(stage.zero().coordinates for stage in sequence.quotient.stages)
    alpha_image = {apply(sequence.inclusion, point) for point in sub}
    beta_kernel = {point for point in middle if apply(sequence.projection, point) == zero}
    checks = [len(alpha_image) == len(sub), alpha_image == beta_kernel]
    if arrows[-1].status is not ArrowStatus.SKIPPED:
        checks.append({apply(sequence.projection, point) for point in middle} == quo)
    return all(checks)


###############################################################################
# GRAY FILTRATION ########################################### GRAY FILTRATION #
###############################################################################


class GrayBranch(enum.Enum):
    """Stages ``n < k`` of the derived tower: the constant ``G_k`` or ``G_n`` itself."""

    CONSTANT = "constant"
    VERBATIM = "verbatim"


@dataclasses.dataclass(frozen=True, eq=False)
class GrayReport:
    index: int
    branch: GrayBranch
    branch_used: bool
    derived: Tower
    mittag_leffler: MittagLefflerReport
    classification: Lim1Classification

    @property
    def consequence(self) -> str:
        if self.classification.is_zero_certified:
            return f"derived lim¹ certified zero: p_{self.index} is trivial, L^{self.index} is all of lim¹"
        return f"undetermined at horizon: no conclusion on L^{self.index}"


def gray_kernel_levels(
    tower: Tower, k: int, branch: GrayBranch = GrayBranch.CONSTANT
) -> GrayReport:
    """Derived tower ``n -> G_k^(n)`` and its lim¹ classification."""
    if not 1 <= k <= tower.horizon:
        raise exceptions.StageOutOfRangeError(f"Index {k} is outside 1..{tower.horizon}")

    filtration = image_filtration(tower, k)
    levels = []
    for n in range(1, tower.horizon + 1):
        if n >= k:
            levels.append((k, filtration.image(n)))
        elif branch is GrayBranch.CONSTANT:
            levels.append((k, filtration.image(k)))
        else:
            levels.append((n, image(Homomorphism.identity(tower.stage(n)))))

    bonds = []
    for n in range(1, tower.horizon):
        (upper_index, upper), (lower_index, lower) = levels[n], levels[n - 1]
        bonds.append(restrict(tower.composite(upper_index, lower_index), upper, lower))

    derived = Tower(
        tuple(level.group for _, level in levels), bonds, name=f"{tower.name} derived at {k}"
    )
    report = is_mittag_leffler(derived)
    return GrayReport(
        index=k,
        branch=branch,
        branch_used=k > 1,
        derived=derived,
        mittag_leffler=report,
        classification=lim1_classification(derived, report),
    )


###############################################################################
# RESIDUE TOWERS ############################################# RESIDUE TOWERS #
###############################################################################


@dataclasses.dataclass(frozen=True)
class DiagonalWitness:
    """``x_n - y_n = residue (mod a_n)`` for every stage; only defined modulo ``modulus``."""

    residue: int
    modulus: int


@dataclasses.dataclass(frozen=True)
class ResidueTower:
    """Compatible residues ``r_n mod a_n`` along a divisibility chain of moduli."""

    moduli: typing.Tuple[int, ...]
    residues: typing.Tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(a) for a in self.moduli)
        if not moduli or len(moduli) != len(self.residues):
            raise exceptions.ShapeMismatchError(
                f"{len(moduli)} moduli and {len(self.residues)} residues"
            )
        if any(a < 1 for a in moduli) or any(b % a for a, b in zip(moduli, moduli[1:])):
            raise exceptions.IncompatibleResiduesError(
                f"Moduli {moduli} are not a divisibility chain of positive integers"
            )
        residues = tuple(int(r) % a for r, a in zip(self.residues, moduli))
        for n, (low, high, a) in enumerate(zip(residues, residues[1:], moduli), start=1):
            if (high - low) % a:
                raise exceptions.IncompatibleResiduesError(
                    f"Residue {high} at stage {n + 1} does not reduce to {low} mod {a}"
                )
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "residues", residues)

    def __str__(self):
        return "(" + ", ".join(f"{r} mod {a}" for r, a in zip(self.residues, self.moduli)) + ")"

    @classmethod
    def make(cls, moduli: typing.Sequence[int], seed: int) -> "ResidueTower":
        return cls(tuple(moduli), tuple(seed % a for a in moduli))

    @classmethod
    def zero(cls, moduli: typing.Sequence[int]) -> "ResidueTower":
        return cls.make(moduli, 0)

    @property
    def horizon(self) -> int:
        return len(self.moduli)

    def _check_moduli(self, other: "ResidueTower"):
        if other.moduli != self.moduli:
            raise exceptions.ShapeMismatchError(f"Moduli {self.moduli} and {other.moduli} differ")

    def __add__(self, other: "ResidueTower") -> "ResidueTower":
        self._check_moduli(other)
        return ResidueTower(self.moduli, tuple(a + b for a, b in zip(self.residues, other.residues)))

    def __neg__(self) -> "ResidueTower":
        return ResidueTower(self.moduli, tuple(-r for r in self.residues))

    def __sub__(self, other: "ResidueTower") -> "ResidueTower":
        return self + (-other)

    def scale(self, factor: int) -> "ResidueTower":
        return ResidueTower(self.moduli, tuple(factor * r for r in self.residues))

    __mul__ = scale
    __rmul__ = scale

    def project(self, n: int) -> int:
        if not 1 <= n <= self.horizon:
            raise exceptions.StageOutOfRangeError(f"Stage {n} is outside 1..{self.horizon}")
        return self.residues[n - 1]

    def truncate(self, n: int) -> "ResidueTower":
        self.project(n)
        return ResidueTower(self.moduli[:n], self.residues[:n])

    @property
    def is_zero(self) -> bool:
        return not any(self.residues)


def is_diagonal_at_horizon(first: ResidueTower, second: ResidueTower) -> DiagonalWitness:
    """The class ``k mod a_N`` with ``first - second = k`` at every stage."""
    difference = first - second
    witness = DiagonalWitness(residue=difference.residues[-1], modulus=difference.moduli[-1])
    for r, a in zip(difference.residues, difference.moduli):
        if (r - witness.residue) % a:
            raise exceptions.ConsistencyError("Difference of compatible towers is not constant")
    return witness


###############################################################################
# FAMILIES ######################################################### FAMILIES #
###############################################################################


def constant_tower(group: FgAbGroup, horizon: int, name: str = "constant") -> Tower:
    """``G <- G <- ...`` with identity bonds."""
    return Tower((group,) * horizon, (Homomorphism.identity(group),) * (horizon - 1), name=name)


def multiply_tower(factor: int, horizon: int, name: str = "") -> Tower:
    """``Z <- Z <- ...`` with every bond multiplication by ``factor``."""
    integers = FgAbGroup.integers()
    bond = Homomorphism(integers, integers, [[factor]])
    return Tower((integers,) * horizon, (bond,) * (horizon - 1), name=name or f"times-{factor}")


def primorial_tower(horizon: int, name: str = "primorial") -> Tower:
    """The subgroups ``k(n)Z`` of ``Z`` with inclusions, ``k(n)`` the n-th primorial.

    Stage ``n`` is ``k(n - 1)Z ≅ Z`` and the bond ``f_n`` is multiplication by
    the n-th prime, so ``G_1^(k) = k(k - 1)Z``.
    """
    integers = FgAbGroup.integers()
    bonds = [Homomorphism(integers, integers, [[sympy.prime(n)]]) for n in range(1, horizon)]
    return Tower((integers,) * horizon, bonds, name=name)


def reduction_tower(prime: int, horizon: int, start: int = 1, name: str = "") -> Tower:
    """``Z/p^s <- Z/p^(s+1) <- ...`` with reduction bonds."""
    stages = [FgAbGroup.cyclic(prime ** (start + n)) for n in range(horizon)]
    bonds = [Homomorphism(stages[n], stages[n - 1], [[1]]) for n in range(1, horizon)]
    return Tower(stages, bonds, name=name or f"reduction-{prime}")


def prime_power_ses(prime: int, horizon: int) -> TowerSES:
    """``0 -> {p^n Z/p^2n} -> {Z/p^2n} -> {Z/p^n} -> 0`` with natural bonds."""
    sub_stages = [FgAbGroup.cyclic(prime**n) for n in range(1, horizon + 1)]
    mid_stages = [FgAbGroup.cyclic(prime ** (2 * n)) for n in range(1, horizon + 1)]
    sub = Tower(
        sub_stages,
        [Homomorphism(sub_stages[n], sub_stages[n - 1], [[prime]]) for n in range(1, horizon)],
        name="p^n Z/p^2n",
    )
    middle = Tower(
        mid_stages,
        [Homomorphism(mid_stages[n], mid_stages[n - 1], [[1]]) for n in range(1, horizon)],
        name="Z/p^2n",
    )
    quo = reduction_tower(prime, horizon, name="Z/p^n")
    inclusion = TowerMap(
        sub,
        middle,
        [Homomorphism(s, m, [[prime ** n]]) for n, (s, m) in enumerate(zip(sub_stages, mid_stages), 1)],
    )
    projection = TowerMap(
        middle, quo, [Homomorphism(m, q, [[1]]) for m, q in zip(mid_stages, quo.stages)]
    )
    return TowerSES(inclusion, projection, name=f"prime-power p={prime}")


def zero_tower(horizon: int) -> Tower:
    return constant_tower(FgAbGroup(), horizon, name="zero")


def trivial_ses(tower: Tower) -> TowerSES:
    """``0 -> 0 -> T -> T -> 0``."""
    zero = zero_tower(tower.horizon)
    inclusion = TowerMap(zero, tower, [Homomorphism.zero(z, g) for z, g in zip(zero.stages, tower.stages)])
    projection = TowerMap(tower, tower, [Homomorphism.identity(g) for g in tower.stages])
    return TowerSES(inclusion, projection, name=f"0 -> 0 -> {tower.name} -> {tower.name} -> 0")


###############################################################################
# RANDOM INSTANCES ######################################### RANDOM INSTANCES #
###############################################################################


def random_finite_tower(rng, horizon: int, max_order: int = 64) -> Tower:
    """Random tower of finite groups with random bonds."""
    stages = [random_group(rng, max_order) for _ in range(horizon)]
    bonds = [random_homomorphism(rng, stages[n], stages[n - 1]) for n in range(1, horizon)]
    return Tower(stages, bonds, name="random")


def random_split_ses(rng, horizon: int, max_order: int = 8) -> TowerSES:
    """Levelwise split ``0 -> K -> K + H -> H -> 0`` with a random twist in the middle bonds."""
    sub = random_finite_tower(rng, horizon, max_order)
    quo = random_finite_tower(rng, horizon, max_order)
    sums = [direct_sum(k, h) for k, h in zip(sub.stages, quo.stages)]

    bonds = []
    for n in range(1, horizon):
        upper, lower = sums[n], sums[n - 1]
        twist = random_homomorphism(rng, quo.stage(n + 1), sub.stage(n))
        bond = (
            lower.injections[0].compose(sub.bond(n)).compose(upper.projections[0])
            + lower.injections[1].compose(quo.bond(n)).compose(upper.projections[1])
            + lower.injections[0].compose(twist).compose(upper.projections[1])
        )
        bonds.append(bond)
    middle = Tower([s.group for s in sums], bonds, name="random split")

    inclusion = TowerMap(sub, middle, [s.injections[0] for s in sums])
    projection = TowerMap(middle, quo, [s.projections[1] for s in sums])
    return TowerSES(inclusion, projection, name="random split")



"""Full verification suite behind ``limtower repro``.

Each check is a method decorated with ``acceptance_check``; it returns
``(passed, detail)`` and carries the claim it verifies. Checks draw from their
own seeded random generator, so a run is reproducible check by check and the
order in which they execute does not matter.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import concurrent.futures
import itertools
import logging
import pathlib
import random
import typing
from fractions import Fraction

# Installed
import sympy

# Own modules
import limtower_cli.base
import limtower_cli.utils
from limtower_cli import Defaults, abelian, delta, exceptions, prufer, towers
from limtower_cli.custom_decorators import (
    CheckResult,
    acceptance_check,
    registered_checks,
    with_spinner,
)

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

# Deliberately broken inputs used to prove the suite can fail
FAULTS = ("delta",)


def _faulty_delta(n: int, k: int) -> int:
    value = delta.delta(n, k)
    return value + 1 if (n, k) == (3, 5) else value


###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class ReproRunner(limtower_cli.base.LimTowerBaseClass):
    """Runs every verification at the configured scale."""

    def __init__(
        self,
        method: str = "repro",
        parallel: bool = False,
        as_json: bool = False,
        output: pathlib.Path = None,
        fault: typing.Optional[str] = None,
        seed: int = Defaults.SEED,
    ):
        """Pick the fault to inject, if any."""
        super().__init__(method=method, parallel=parallel, as_json=as_json, output=output)

        if self.method != "repro":
            raise exceptions.InvalidMethodError(attempted_method=self.method)
        if fault is not None and fault not in FAULTS:
            raise exceptions.InputError(f"Unknown fault '{fault}'. Known: {', '.join(FAULTS)}")

        self.fault = fault
        self.seed = seed
        if fault:
            LOG.warning(f"Injecting fault '{fault}': the run is expected to fail")

    def _rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")

    # Public methods ################################# Public methods #
    @with_spinner("Running verification suite")
    def run(self) -> typing.List[CheckResult]:
        """Run all checks, emit the report and raise CheckFailedError on any failure."""
        checks = registered_checks(self)
        LOG.info(f"Running {len(checks)} checks ({Defaults.PROFILE} profile)")
        if self.workers > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(lambda check: check(), checks))
        else:
            results = [check() for check in checks]

        passed = all(result.passed for result in results)
        self.report = {
            "passed": passed,
            "profile": Defaults.PROFILE,
            "seed": self.seed,
            "checks": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                    "reference": r.reference,
                }
                for r in results
            ],
        }
        self.tables = [
            limtower_cli.utils.create_table(
                title="Verification suite",
                columns=["Check", "Passed", "Detail", "Reference"],
                rows=[
                    {
                        "Check": r.name,
                        "Passed": r.passed,
                        "Detail": r.detail,
                        "Reference": r.reference,
                    }
                    for r in results
                ],
                caption=f"{sum(r.passed for r in results)}/{len(results)} checks passed",
            )
        ]
        self.emit()

        failed = [r.name for r in results if not r.passed]
        if failed:
            raise exceptions.CheckFailedError(f"Failed checks: {', '.join(failed)}")
        LOG.info("All checks passed")
        return results

    # Smith normal form ########################### Smith normal form #
    @acceptance_check(
        "smith normal form",
        reference="each of its homotopy groups is finitely generated",
    )
    def check_smith_form(self):
        rng = self._rng("smith")
        for sample in range(Defaults.SNF_SAMPLES):
            nrows, ncols = rng.randint(1, 6), rng.randint(1, 6)
            matrix = [[rng.randint(-50, 50) for _ in range(ncols)] for _ in range(nrows)]
            if not abelian.smith_normal_form(matrix).verify(matrix):
                return False, f"sample {sample}: {matrix}"
        return True, f"{Defaults.SNF_SAMPLES} random matrices up to 6x6"

    # Delta ################################################### Delta #
    @acceptance_check(
        "delta table",
        reference="δ_n(k) is known to be 0 for k<n and to be divisible by n!",
    )
    def check_delta_table(self):
        formula = _faulty_delta if self.fault == "delta" else delta.delta
        table = delta.DeltaTable.build(
            Defaults.DELTA_MAX_N, Defaults.DELTA_MAX_K, formula=formula
        )
        failed = [check.name for check in table.properties() if not check.holds]
        if failed:
            return False, f"failed: {', '.join(failed)}"
        return True, f"n, k <= {Defaults.DELTA_MAX_N}, {Defaults.DELTA_MAX_K}"

    @acceptance_check(
        "prime divisibility",
        reference="If p is a prime, then δ_n(p) is divisible by p for n>1.",
    )
    def check_prime_divisibility(self):
        primes = list(sympy.primerange(2, Defaults.DIVISIBILITY_MAX_PRIME + 1))
        for p in primes:
            report = delta.check_prime_divisibility(p, Defaults.DIVISIBILITY_MAX_N)
            if not report.passed:
                bad = [row.n for row in report.rows if row.residue and not row.exempt]
                return False, f"p = {p}: n in {bad}, congruence chain {report.congruence_holds}"
        return True, f"{len(primes)} primes, 2 <= n <= {Defaults.DIVISIBILITY_MAX_N}"

    @acceptance_check(
        "torsion action",
        reference="(φ_p)_* is trivial for m>1. For m=1, its image is isomorphic to Z/p "
        "and is generated by φ_p.",
    )
    def check_torsion_action(self):
        for p in sympy.primerange(2, Defaults.DIVISIBILITY_MAX_PRIME + 1):
            if delta.torsion_action(1, p) != 1:
                return False, f"n = 1, p = {p}"
            for n in range(2, Defaults.DIVISIBILITY_MAX_N + 1):
                if delta.torsion_action(n, p):
                    return False, f"n = {n}, p = {p}"
        return True, f"primes <= {Defaults.DIVISIBILITY_MAX_PRIME}, n <= {Defaults.DIVISIBILITY_MAX_N}"

    # Prüfer windows ################################# Prüfer windows #
    @staticmethod
    def _random_class(rng: random.Random, size: int, max_exponent: int = 2) -> prufer.PruferClass:
        window = prufer.PrimeWindow.first(size)
        coordinates = []
        for p in window.primes:
            modulus = p ** rng.choice([0] + [1] * 3 + list(range(1, max_exponent + 1)))
            coordinates.append(Fraction(rng.randrange(modulus), modulus))
        return prufer.PruferClass(prufer.PruferElement(window, tuple(coordinates)))

    @acceptance_check(
        "image membership",
        reference="by the Chinese Remainder Theorem there is an integer k such that "
        "n_2 ≡ k (mod 2), n_3 ≡ k (mod 3), ... for the first n primes",
    )
    def check_membership(self):
        rng = self._rng("membership")
        for sample in range(Defaults.PRUFER_SAMPLES):
            c = self._random_class(rng, rng.randint(1, Defaults.PRUFER_MAX_WINDOW))
            n = rng.randint(0, c.window.size)
            membership = prufer.in_image_stage(c, n)
            criterion = all(
                x.denominator in (1, p)
                for p, x in zip(c.window.primes[:n], c.representative.coords)
            )
            reduction = prufer.reduce_to_stage(c, n)
            if not bool(membership) == criterion == reduction.success:
                return False, f"sample {sample}: {c} at n = {n}"
            if reduction.success:
                difference = c.representative - reduction.representative
                if any(reduction.representative.coords[:n]) or (
                    prufer.diagonal_multiplier(difference) is None
                ):
                    return False, f"sample {sample}: residual of {c} at n = {n}"
        return True, f"{Defaults.PRUFER_SAMPLES} classes, windows up to {Defaults.PRUFER_MAX_WINDOW}"

    @acceptance_check(
        "reducer growth",
        reference="A_0^(∞) = (Z/2 × Z/3 × ... × Z/p × ...)/Z",
    )
    def check_reducer_growth(self):
        rows = prufer.reducer_growth({2: Fraction(1, 2)}, Defaults.GROWTH_WINDOWS)
        for row in rows:
            if row.reducer != prufer.primorial(row.size) // 2:
                return False, f"window {row.size}: k = {row.reducer}"
        if not prufer.is_strictly_increasing(rows):
            return False, "not strictly increasing"
        return True, ", ".join(str(row.reducer) for row in rows[:4]) + ", ..."

    @acceptance_check(
        "kernel generator",
        reference="K_n^0 = Ker(A_n → A_0) = k(n)K, where k(n) is a product of the first n primes",
    )
    def check_kernel_generator(self):
        window = prufer.PrimeWindow.first(5)
        for n in range(1, 5):
            generator = prufer.kernel_generator(n)
            for k in range(3 * generator + 1):
                vanishes = not any(prufer.diag_embed(k, window).coords[:n])
                if vanishes != (k % generator == 0):
                    return False, f"n = {n}, k = {k}"
        return True, "n <= 4"

    @acceptance_check(
        "power action",
        reference="as d^p ≡ d (mod p), we have φ∘d = dφ",
    )
    def check_power_action(self):
        rng = self._rng("power")
        for _ in range(50):
            c = self._random_class(rng, rng.randint(1, 10), max_exponent=1)
            degree = rng.randint(2, 9)
            if prufer.power_action(c, degree) != c.scale(degree):
                return False, f"{c}, d = {degree}"
        return True, "50 classes of prime order"

    @acceptance_check(
        "residue towers",
        reference="we can identify φ with an element in (Z/2 × Z/3 × ... × Z/p × ...)/Z",
    )
    def check_residue_towers(self):
        rng = self._rng("residue")
        for _ in range(50):
            c = self._random_class(rng, rng.randint(1, 8), max_exponent=1)
            shift = rng.randint(0, 10**6)
            shifted = prufer.PruferClass(
                c.representative + prufer.diag_embed(shift, c.window)
            )
            size = c.window.size
            witness = towers.is_diagonal_at_horizon(
                prufer.to_residue_tower(shifted, size), prufer.to_residue_tower(c, size)
            )
            if witness.residue != shift % prufer.primorial(size):
                return False, f"{c} shifted by {shift}: residue {witness.residue}"
        return True, "50 classes"

    @acceptance_check(
        "phantom tower model",
        reference="ℓ is the smallest prime which is equal to m or larger than m",
    )
    def check_phantom_model(self):
        rng = self._rng("phantom")
        window = prufer.PrimeWindow.first(5)
        model = prufer.build_phantom_tower_model(window, max_m=5)
        classes = [self._random_class(rng, window.size) for _ in range(20)]
        mismatches = model.cross_check(classes, exponent=2)
        if mismatches:
            return False, mismatches[0]
        return True, f"20 classes, stages 1..{model.max_m}"

    # Towers ################################################# Towers #
    @acceptance_check(
        "primorial tower",
        reference="lim¹_n k(n)Z ≅ R ⊕ Q/Z",
    )
    def check_primorial_tower(self):
        horizon = Defaults.ML_MAX_HORIZON
        report = towers.is_mittag_leffler(towers.primorial_tower(horizon))
        # Image chains of a truncation are prefixes of these, so every smaller horizon is covered
        for stage in report.stages[:-1]:
            drops = stage.filtration.strict_drops
            if stage.status is not towers.StageStatus.UNDETERMINED or len(drops) != horizon - stage.stage:
                return False, f"stage {stage.stage}: {stage.status.value}, drops {drops}"
        single = towers.lim1_classification(towers.primorial_tower(1))
        if single.is_zero_certified:
            return False, "horizon 1 certified"
        return True, f"every stage strictly decreasing up to horizon {horizon}"

    @acceptance_check(
        "finite towers",
        reference="it is sufficient to prove that the tower satisfies the Mittag-Leffler condition",
    )
    def check_finite_towers(self):
        rng = self._rng("finite")
        for sample in range(Defaults.TOWER_SAMPLES):
            tower = towers.random_finite_tower(rng, rng.randint(1, 6), max_order=64)
            if not towers.lim1_classification(tower).is_zero_certified:
                return False, f"sample {sample}: {[str(g) for g in tower.stages]}"
        return True, f"{Defaults.TOWER_SAMPLES} random towers"

    @acceptance_check(
        "six-term sequence",
        reference="a short exact sequence of inverse towers 1 → K → G → H → 1 "
        "induces a six term lim-lim¹ exact sequence of pointed sets",
    )
    def check_six_term(self):
        rng = self._rng("six-term")
        for sample in range(Defaults.SES_SAMPLES):
            sequence = towers.random_split_ses(rng, rng.randint(1, 6), max_order=8)
            report = towers.six_term_check(sequence)
            if not report.passed or report.cross_validated is not True:
                return False, f"sample {sample}: cross-validated {report.cross_validated}"
        for sequence in (towers.prime_power_ses(2, 5), prufer.window_ses(4, 2)):
            if not towers.six_term_check(sequence).passed:
                return False, sequence.name
        return True, f"{Defaults.SES_SAMPLES} split sequences, prime-power and window sequences"

    @acceptance_check(
        "stable images",
        reference="G_n^(∞) = ∩_{k≥n} G_n^(k)",
    )
    def check_stable_images(self):
        rng = self._rng("stable")
        for sample in range(20):
            tower = towers.random_finite_tower(rng, rng.randint(2, 5), max_order=32)
            stable = towers.stable_image_tower(tower)
            if not all(stable.surjective):
                return False, f"sample {sample}: bonds {stable.surjective}"
            if not abelian.is_isomorphic(
                towers.lim_at_horizon(stable.tower).group, towers.lim_at_horizon(tower).group
            ):
                return False, f"sample {sample}: limits differ"
        return True, "20 random towers"

    @acceptance_check(
        "gray filtration",
        reference="define L^k = Ker p_k ... which is called the algebraic Gray filtration",
    )
    def check_gray(self):
        rng = self._rng("gray")
        for sample, branch in zip(range(20), itertools.cycle(towers.GrayBranch)):
            tower = towers.random_finite_tower(rng, rng.randint(2, 5), max_order=32)
            k = rng.randint(1, tower.horizon)
            report = towers.gray_kernel_levels(tower, k, branch)
            if not report.classification.is_zero_certified:
                return False, f"sample {sample}: k = {k}, {branch.value}"
        return True, "20 random towers, both branches"

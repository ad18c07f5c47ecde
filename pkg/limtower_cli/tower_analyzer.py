"""Tower analysis and six-term checks for named towers and sequences."""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import logging
import pathlib
import typing

# Installed

# Own modules
import limtower_cli.base
import limtower_cli.utils
from limtower_cli import exceptions, towers
from limtower_cli import scenario as scenario_codec
from limtower_cli.abelian import quotient

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class TowerAnalyzer(limtower_cli.base.LimTowerBaseClass):
    """Filtration, Mittag-Leffler and lim¹ reports for towers and sequences."""

    def __init__(
        self,
        method: str = "analyze",
        scenario_path: pathlib.Path = None,
        parallel: bool = False,
        as_json: bool = False,
        output: pathlib.Path = None,
    ):
        """Load the scenario."""
        super().__init__(
            method=method,
            scenario_path=scenario_path,
            parallel=parallel,
            as_json=as_json,
            output=output,
        )

        # Only methods "analyze" and "six-term" can use the TowerAnalyzer class
        if self.method not in ["analyze", "six-term"]:
            raise exceptions.InvalidMethodError(attempted_method=self.method)

    # Public methods ################################# Public methods #
    def analyze(
        self,
        name: str,
        horizon: typing.Optional[int] = None,
        gray_index: typing.Optional[int] = None,
        branch: towers.GrayBranch = towers.GrayBranch.CONSTANT,
    ) -> dict:
        """Build the report for one tower and emit it."""
        tower = scenario_codec.build_tower(self.scenario, name, horizon)
        LOG.info(f"Analyzing tower '{name}' up to stage {tower.horizon}")

        mittag_leffler = towers.is_mittag_leffler(tower, workers=self.workers)
        classification = towers.lim1_classification(tower, mittag_leffler)
        stable = towers.stable_image_tower(tower, mittag_leffler)
        limit = towers.lim_at_horizon(tower)

        stages = []
        for stage_report in mittag_leffler.stages:
            n = stage_report.stage
            filtration = stage_report.filtration
            stages.append(
                {
                    "stage": n,
                    "group": str(tower.stage(n)),
                    "status": stage_report.status.value,
                    "stabilized_at": stage_report.stabilized_at,
                    "chain": [str(subgroup) for subgroup in filtration.chain],
                    "witness": list(stage_report.witness) if stage_report.witness else None,
                    "stable_image": str(filtration.stable_image),
                    "lim_image_cokernel": str(
                        quotient(tower.stage(n), limit.image_in(n).generators)
                    ),
                }
            )

        self.report = {
            "tower": name,
            "horizon": tower.horizon,
            "stages": stages,
            "mittag_leffler": mittag_leffler.is_certified,
            "lim": str(limit.group),
            "lim1": classification.verdict.value,
            "certificate": [
                {"stage": stage, "status": status, "stabilized_at": index}
                for stage, status, index in classification.certificate
            ],
            "stable_image_tower": {
                "groups": [str(group) for group in stable.tower.stages],
                "surjective_bonds": list(stable.surjective),
                "equals_original": stable.equals_original,
            },
        }
        self.tables = [
            limtower_cli.utils.create_table(
                title=f"Tower '{name}', horizon {tower.horizon}",
                columns=["Stage", "Group", "Status", "Stabilized at", "Image chain", "Witness"],
                rows=[
                    {
                        "Stage": row["stage"],
                        "Group": row["group"],
                        "Status": row["status"],
                        "Stabilized at": row["stabilized_at"],
                        "Image chain": " ⊇ ".join(row["chain"]),
                        "Witness": (
                            f"G^({row['witness'][0]}) ⊋ G^({row['witness'][1]})"
                            if row["witness"]
                            else None
                        ),
                    }
                    for row in stages
                ],
                caption=f"lim at horizon: {limit.group}. lim¹: {classification.verdict.value}",
            ),
            limtower_cli.utils.create_table(
                title="Stable images",
                columns=["Stage", "Stable image", "Cokernel of lim"],
                rows=[
                    {
                        "Stage": row["stage"],
                        "Stable image": row["stable_image"],
                        "Cokernel of lim": row["lim_image_cokernel"],
                    }
                    for row in stages
                ],
            ),
        ]

        if gray_index is not None:
            self.report["gray"] = self._gray(tower, gray_index, branch)

        self.emit()
        return self.report

    def six_term(self, name: typing.Optional[str] = None, horizon: typing.Optional[int] = None):
        """Check the lim-lim¹ sequence for one named sequence, or every sequence in the scenario."""
        names = [name] if name else sorted(self.scenario.sequences)
        if not names:
            raise exceptions.InputError("The scenario defines no sequences")

        results, rows = [], []
        for sequence_name in names:
            sequence = scenario_codec.build_sequence(self.scenario, sequence_name, horizon)
            LOG.info(f"Checking six-term sequence for '{sequence_name}'")
            report = towers.six_term_check(sequence)
            results.append(
                {
                    "sequence": sequence_name,
                    "horizon": report.horizon,
                    "limits": [str(group) for group in report.limits],
                    "lim1": [c.verdict.value for c in report.classifications],
                    "arrows": [
                        {"arrow": a.arrow, "status": a.status.value, "detail": a.detail}
                        for a in report.arrows
                    ],
                    "cross_validated": report.cross_validated,
                    "passed": report.passed,
                }
            )
            rows.extend(
                {
                    "Sequence": sequence_name,
                    "Arrow": arrow.arrow,
                    "Status": arrow.status.value,
                    "Detail": arrow.detail,
                }
                for arrow in report.arrows
            )

        self.report = {"sequences": results}
        self.tables = [
            limtower_cli.utils.create_table(
                title="Six-term sequence",
                columns=["Sequence", "Arrow", "Status", "Detail"],
                rows=rows,
                caption="; ".join(
                    f"{r['sequence']}: lim = {' -> '.join(r['limits'])}, "
                    f"brute force {r['cross_validated'] if r['cross_validated'] is not None else 'skipped'}"
                    for r in results
                ),
            )
        ]
        self.emit()

        failed = [r["sequence"] for r in results if not r["passed"]]
        if failed:
            raise exceptions.CheckFailedError(f"Six-term check failed for: {', '.join(failed)}")
        return self.report

    # Private methods ############################### Private methods #
    def _gray(self, tower: towers.Tower, index: int, branch: towers.GrayBranch) -> dict:
        gray = towers.gray_kernel_levels(tower, index, branch)
        if gray.branch_used:
            LOG.info(f"Stages below {index} of the derived tower use the {branch.value} branch")
        self.tables.append(
            limtower_cli.utils.create_table(
                title=f"Derived tower at {index} ({branch.value} branch)",
                columns=["Stage", "Group", "Status"],
                rows=[
                    {
                        "Stage": s.stage,
                        "Group": str(gray.derived.stage(s.stage)),
                        "Status": s.status.value,
                    }
                    for s in gray.mittag_leffler.stages
                ],
                caption=gray.consequence,
            )
        )
        return {
            "index": index,
            "branch": branch.value,
            "branch_used": gray.branch_used,
            "groups": [str(group) for group in gray.derived.stages],
            "lim1": gray.classification.verdict.value,
            "consequence": gray.consequence,
        }

"""Prüfer window commands: reduction, membership and growth witnesses."""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import logging
import pathlib

# Installed

# Own modules
import limtower_cli.base
import limtower_cli.utils
from limtower_cli import exceptions, prufer
from limtower_cli import scenario as scenario_codec

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class PruferManager(limtower_cli.base.LimTowerBaseClass):
    """Certificates for classes in a window of Prüfer groups modulo the diagonal."""

    def __init__(
        self,
        method: str = "reduce",
        window: int = None,
        as_json: bool = False,
        output: pathlib.Path = None,
    ):
        """Fix the window size."""
        super().__init__(method=method, as_json=as_json, output=output)

        # Only methods "reduce", "membership" and "witness" can use the PruferManager class
        if self.method not in ["reduce", "membership", "witness"]:
            raise exceptions.InvalidMethodError(attempted_method=self.method)

        self.window_size = window or limtower_cli.Defaults.WINDOW

    def _class(self, literal: str) -> prufer.PruferClass:
        # Scenario names resolve before literals
        classes = self.scenario.prufer.get("classes", {})
        if literal in classes:
            return self.scenario.prufer_class(literal, self.window_size)
        return scenario_codec.class_from_literal(literal, self.window_size)

    def reduce(self, literal: str, stage: int) -> dict:
        """Subtract the CRT multiple of the diagonal clearing the first ``stage`` coordinates."""
        c = self._class(literal)
        reduction = prufer.reduce_to_stage(c, stage)
        membership = reduction.membership
        self.report = {
            "class": scenario_codec.element_literal(c.representative),
            "window": self.window_size,
            "stage": stage,
            "success": reduction.success,
            "k": membership.reducer,
            "residual": (
                scenario_codec.element_literal(reduction.representative)
                if reduction.success
                else None
            ),
            "residual_coordinates": (
                list(reduction.representative.coords) if reduction.success else None
            ),
            "blocking_prime": membership.prime,
            "blocking_order": membership.order,
        }
        if reduction.success:
            LOG.info(f"Reduced with k = {membership.reducer}")
        else:
            LOG.warning(
                f"No reduction to stage {stage}: the coordinate at {membership.prime} "
                f"has order {membership.order}"
            )
        self._single_table(f"Reduction to stage {stage}")
        self.emit()
        return self.report

    def membership(self, literal: str, stage: int) -> dict:
        """Whether the class lies in the image of stage ``stage``, plus its stable flag."""
        c = self._class(literal)
        membership = prufer.in_image_stage(c, stage)
        stable = prufer.stable_membership(c)
        self.report = {
            "class": scenario_codec.element_literal(c.representative),
            "window": self.window_size,
            "stage": stage,
            "member": membership.member,
            "k": membership.reducer,
            "witness_prime": membership.prime,
            "witness_order": membership.order,
            "class_order": prufer.class_order(c),
            "largest_stage": stable.largest,
            "all_primes": stable.all_primes,
        }
        self._single_table(f"Membership in the image of stage {stage}")
        self.emit()
        return self.report

    def witness(self, literal: str, sizes: range) -> dict:
        """Minimal reducers of one class over growing windows."""
        coordinates = scenario_codec.parse_class_literal(literal)
        rows = prufer.reducer_growth(coordinates, sizes)
        increasing = prufer.is_strictly_increasing(rows)
        self.report = {
            "class": scenario_codec.format_class_literal(coordinates),
            "rows": [
                {
                    "window": row.size,
                    "largest_prime": row.largest_prime,
                    "k": row.reducer,
                    "primorial": prufer.primorial(row.size),
                }
                for row in rows
            ],
            "strictly_increasing": increasing,
        }
        if increasing:
            LOG.info("Minimal reducers grow strictly with the window")
        self.tables = [
            limtower_cli.utils.create_table(
                title=f"Minimal reducers of {self.report['class']}",
                columns=["Window", "Largest prime", "k", "k(N)"],
                rows=[
                    {
                        "Window": row["window"],
                        "Largest prime": row["largest_prime"],
                        "k": row["k"],
                        "k(N)": row["primorial"],
                    }
                    for row in self.report["rows"]
                ],
                caption=f"strictly increasing: {increasing}",
            )
        ]
        self.emit()
        return self.report

    def _single_table(self, title: str):
        self.tables = [
            limtower_cli.utils.create_table(
                title=title,
                columns=["Field", "Value"],
                rows=[
                    {"Field": key, "Value": value}
                    for key, value in self.report.items()
                    if key != "residual_coordinates"
                ],
            )
        ]

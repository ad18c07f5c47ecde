"""Delta table command."""

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
from limtower_cli import delta, exceptions

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class DeltaManager(limtower_cli.base.LimTowerBaseClass):
    """Builds ``delta_n(k)`` tables and checks their divisibility properties."""

    def __init__(
        self,
        method: str = "table",
        scenario_path: pathlib.Path = None,
        parallel: bool = False,
        as_json: bool = False,
        output: pathlib.Path = None,
    ):
        """Load the scenario for its delta bounds."""
        super().__init__(
            method=method,
            scenario_path=scenario_path,
            parallel=parallel,
            as_json=as_json,
            output=output,
        )

        if self.method != "table":
            raise exceptions.InvalidMethodError(attempted_method=self.method)

    def table(self, max_n: int = None, max_k: int = None) -> dict:
        """Emit the table and its property checks; raises CheckFailedError if one fails."""
        max_n = max_n or self.scenario.delta.get("max_n", limtower_cli.Defaults.DELTA_MAX_N)
        max_k = max_k or self.scenario.delta.get("max_k", limtower_cli.Defaults.DELTA_MAX_K)
        LOG.info(f"Computing delta_n(k) for n <= {max_n}, k <= {max_k}")

        try:
            table = delta.DeltaTable.build(max_n, max_k, workers=self.workers)
        except exceptions.OracleMismatchError as err:
            raise exceptions.CheckFailedError(str(err)) from err
        checks = table.properties()

        self.report = {
            "max_n": max_n,
            "max_k": max_k,
            "values": [list(row) for row in table.values],
            "properties": [
                {"name": check.name, "holds": check.holds, "detail": check.detail}
                for check in checks
            ],
        }

        columns = ["n \\ k"] + [str(k) for k in range(1, max_k + 1)]
        rows = []
        for n in range(1, max_n + 1):
            row = {"n \\ k": n}
            row.update({str(k): table.value(n, k) for k in range(1, max_k + 1)})
            rows.append(row)
        self.tables = [
            limtower_cli.utils.create_table(title="delta_n(k)", columns=columns, rows=rows),
            limtower_cli.utils.create_table(
                title="Properties",
                columns=["Property", "Holds", "Detail"],
                rows=[
                    {"Property": c.name, "Holds": c.holds, "Detail": c.detail} for c in checks
                ],
            ),
        ]
        self.emit()

        failed = [check.name for check in checks if not check.holds]
        if failed:
            raise exceptions.CheckFailedError(f"Properties failed: {', '.join(failed)}")
        return self.report

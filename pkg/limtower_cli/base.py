"""Base class for the limtower managers. Resolves the scenario and shared settings."""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import logging
import pathlib
import time
import typing

# Installed

# Own modules
import limtower_cli.utils
from limtower_cli import LIMTOWER_METHODS, LIMTOWER_PARALLEL_METHODS, Defaults
from limtower_cli import exceptions
from limtower_cli import scenario as scenario_codec

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)


###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class LimTowerBaseClass:
    """limtower base class. For common operations."""

    def __init__(
        self,
        method: str = None,
        scenario_path: pathlib.Path = None,
        parallel: bool = False,
        as_json: bool = False,
        output: pathlib.Path = None,
        method_check: bool = True,
    ):
        """Check the method and load the scenario the command works on."""
        self.method = method
        self.as_json = as_json
        self.output = output

        if method_check:
            if self.method not in LIMTOWER_METHODS:
                raise exceptions.InvalidMethodError(attempted_method=self.method)
            LOG.debug(f"Attempted operation: {self.method}")

        self.workers = 1
        if parallel:
            if self.method in LIMTOWER_PARALLEL_METHODS:
                self.workers = Defaults.WORKERS
            else:
                LOG.warning(f"'--parallel' has no effect on '{self.method}'")

        # Scenario file replaces the built-in names
        if scenario_path:
            self.scenario = scenario_codec.load(scenario_path)
            LOG.debug(f"Using scenario file {scenario_path}")
        else:
            self.scenario = scenario_codec.builtin()

        self.tables: typing.List = []
        self.report: typing.Dict = {}
        self._started = time.perf_counter()

    def __enter__(self):
        """Return self when using context manager."""
        return self

    def __exit__(self, exc_type, exc_value, tb):
        """Log the elapsed time; exceptions propagate to __main__.py."""
        LOG.debug(f"'{self.method}' finished in {time.perf_counter() - self._started:.2f} s")

        # Exception is not handled
        if exc_type is not None:
            LOG.debug(f"Exception: {exc_type} with value {exc_value}")
            return False

        return True

    # Public methods ################################# Public methods #
    def emit(self):
        """Write the collected tables or the JSON report."""
        limtower_cli.utils.emit(
            renderables=self.tables, data=self.report, as_json=self.as_json, output=self.output
        )

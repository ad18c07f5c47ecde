"""Module for all decorators related to the execution of the limtower commands."""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import dataclasses
import functools
import logging
import time
import typing

# Installed
from rich.progress import Progress, SpinnerColumn

# Own modules
import limtower_cli.utils
from limtower_cli import exceptions

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """One line of a verification report."""

    name: str
    passed: bool
    detail: str
    reference: str


###############################################################################
# DECORATORS ##################################################### DECORATORS #
###############################################################################


def acceptance_check(name: str, reference: str):
    """Turn a method returning ``(passed, detail)`` into one returning a CheckResult.

    Domain errors raised by the check count as a failure of that check only.
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapped(self, *args, **kwargs):
            LOG.debug(f"Running check '{name}'")
            started = time.perf_counter()
            try:
                passed, detail = func(self, *args, **kwargs)
            except exceptions.AlgebraError as err:
                passed, detail = False, f"{type(err).__name__}: {err}"
            elapsed = time.perf_counter() - started

            if passed:
                LOG.debug(f"Check '{name}' passed in {elapsed:.2f} s")
            else:
                LOG.warning(f"Check '{name}' failed after {elapsed:.2f} s: {detail}")
            return CheckResult(name=name, passed=passed, detail=detail, reference=reference)

        wrapped.check_name = name
        return wrapped

    return decorator


def with_spinner(description: str):
    """Show a spinner on stderr while the wrapped method runs."""

    def decorator(func):
        @functools.wraps(func)
        def create_and_remove_task(self, *args, **kwargs):
            with Progress(
                "[bold]{task.description}",
                SpinnerColumn(spinner_name="dots12", style="white"),
                console=limtower_cli.utils.stderr_console,
                transient=True,
            ) as progress:
                task = progress.add_task(description=f"{description}...")

                # Exceptions are caught in __main__.py
                try:
                    return func(self, *args, **kwargs)
                finally:
                    progress.remove_task(task)

        return create_and_remove_task

    return decorator


def registered_checks(instance) -> typing.List[typing.Callable]:
    """Bound methods decorated with acceptance_check, in definition order."""
    checks = []
    for attribute in type(instance).__dict__.values():
        if callable(attribute) and hasattr(attribute, "check_name"):
            checks.append(getattr(instance, attribute.__name__))
    return checks

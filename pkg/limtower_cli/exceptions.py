"""Custom Exception classes."""

# Standard library
import logging

# Installed
import click

# Own modules

# Logger
LOG = logging.getLogger(__name__)


class InvalidMethodError(Exception):
    """Managers only accept their own methods. Anything else should raise errors."""

    def __init__(self, attempted_method, message="Attempting an invalid method in limtower"):
        """Init invalid method error."""
        self.method = attempted_method
        self.message = message
        super().__init__(message)

    def __str__(self):
        """Print message and attempted method."""
        return f"{self.message}: {self.method}"


###############################################################################
# ALGEBRA ########################################################### ALGEBRA #
###############################################################################


class AlgebraError(Exception):
    """Base for errors raised by the pure algebra modules."""


class InvalidGroupError(AlgebraError):
    """Invariant factors are not a divisibility chain of integers >= 2."""


class ShapeMismatchError(AlgebraError):
    """Matrix shape does not match the groups it maps between."""


class NotWellDefinedError(AlgebraError):
    """A matrix does not respect the relations of its source group."""


class StageOutOfRangeError(AlgebraError):
    """Stage or index outside the horizon of a tower or window."""


class NonCommutingError(AlgebraError):
    """Levelwise maps do not commute with the bonding maps."""


class NotExactError(AlgebraError):
    """A levelwise sequence of towers is not short exact."""


class IncompatibleResiduesError(AlgebraError):
    """Residues of a residue tower are not compatible along the moduli chain."""


class NotPrimeError(AlgebraError):
    """An argument that has to be prime is not."""


class WindowError(AlgebraError):
    """Prime window is malformed or too small for the request."""


class OracleMismatchError(AlgebraError):
    """Two independent computations of the same quantity disagree."""


class ConsistencyError(AlgebraError):
    """An identity that is verified internally did not hold."""


###############################################################################
# CLI ################################################################### CLI #
###############################################################################


class LimTowerCLIException(click.ClickException):
    """Base exception for click in limtower."""

    def __init__(self, message, sign=":warning-emoji:", show_emojis=True):
        """Init base exception."""
        self.message = message
        self.show_emojis = show_emojis
        self.sign = sign
        super().__init__(message)

    def __str__(self):
        """Format error message and return with signs."""
        msg = f"{self.sign} {self.message} {self.sign}" if self.show_emojis else self.message
        return msg


class InputError(LimTowerCLIException):
    """Bad input from the command line or a scenario file."""

    exit_code = 2


class ScenarioParseError(InputError):
    """Scenario document could not be parsed."""

    def __init__(self, message, line=None, column=None):
        """Keep the position (1-based) of the offending node."""
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message=message, show_emojis=False)


class UnknownNameError(InputError):
    """Named tower, sequence or class does not exist."""


class MalformedLiteralError(InputError):
    """A class literal or range literal could not be parsed."""


class CheckFailedError(LimTowerCLIException):
    """One or more verifications failed."""

    exit_code = 1

    def __init__(self, message, sign=":x:"):
        """Update error message."""
        super().__init__(message=message, sign=sign)

"""Inverse towers of abelian groups: limits, lim¹ and Prüfer windows."""

import os

from limtower_cli.version import __version__ as version_number

###############################################################################
# PROJECT SPEC ################################################# PROJECT SPEC #
###############################################################################

__title__ = "limtower"
__version__ = version_number
__author__ = "limtower developers"
__license__ = "MIT"
__all__ = [
    "LIMTOWER_METHODS",
    "Defaults",
]


###############################################################################
# VARIABLES ####################################################### VARIABLES #
###############################################################################

# Keep track of all allowed methods
LIMTOWER_METHODS = [
    "analyze",
    "reduce",
    "membership",
    "witness",
    "table",
    "six-term",
    "repro",
]

# Methods that can fan out over a thread pool
LIMTOWER_PARALLEL_METHODS = ["analyze", "table", "repro"]


###############################################################################
# CLASSES ########################################################### CLASSES #
###############################################################################


class Defaults:
    """Default sizes for every command; LIMTOWER_CLI_ENV picks the profile."""

    PROFILE = os.getenv("LIMTOWER_CLI_ENV", "production")

    HORIZON = int(os.getenv("LIMTOWER_HORIZON", "32"))
    WINDOW = 12
    DELTA_MAX_N = 30
    DELTA_MAX_K = 30
    SEED = 20180103
    WORKERS = min(8, os.cpu_count() or 1)

    if PROFILE == "quick":
        SNF_SAMPLES = 100
        PRUFER_SAMPLES = 100
        TOWER_SAMPLES = 10
        SES_SAMPLES = 10
        ML_MAX_HORIZON = 12
    else:
        SNF_SAMPLES = 1000
        PRUFER_SAMPLES = 1000
        TOWER_SAMPLES = 100
        SES_SAMPLES = 100
        ML_MAX_HORIZON = 50

    PRUFER_MAX_WINDOW = 25
    GROWTH_WINDOWS = range(2, 13)
    DIVISIBILITY_MAX_PRIME = 97
    DIVISIBILITY_MAX_N = 25

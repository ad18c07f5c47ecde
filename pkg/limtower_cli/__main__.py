"""CLI for limtower."""

####################################################################################################
# IMPORTS ################################################################################ IMPORTS #
####################################################################################################

# Standard library
import logging
import sys

# Installed
import rich_click as click
import click_pathlib
import rich
import rich.logging

# Own modules
import limtower_cli
import limtower_cli.delta_manager
import limtower_cli.exceptions
import limtower_cli.prufer_manager
import limtower_cli.repro_runner
import limtower_cli.tower_analyzer
import limtower_cli.utils
from limtower_cli import scenario as scenario_codec
from limtower_cli import towers
from limtower_cli.options import (
    class_option,
    horizon_option,
    json_flag,
    name_arg,
    parallel_flag,
    scenario_option,
    stage_index_option,
    window_option,
)

####################################################################################################
# START LOGGING CONFIG ###################################################### START LOGGING CONFIG #
####################################################################################################

LOG = logging.getLogger()

# Configuration for rich-click output
click.rich_click.MAX_WIDTH = 100

# Errors that mean the input was bad rather than a check failing
INPUT_ERRORS = (
    limtower_cli.exceptions.InputError,
    limtower_cli.exceptions.AlgebraError,
    limtower_cli.exceptions.InvalidMethodError,
)


## # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # #
#                                                                                                  #
#                          MMMM   MMMM      AAAA      II   NNNN    NN                              #
#                          MM MM MM MM     AA  AA     II   NN NN   NN                              #
#                          MM  MMM  MM    AA    AA    II   NN  NN  NN                              #
#                          MM   M   MM   AAAAAAAAAA   II   NN   NN NN                              #
#                          MM       MM   AA      AA   II   NN    NNNN                              #
#                                                                                                  #
# # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # # ##


def _fail(err, code: int):
    """Log the error and exit with ``code``."""
    LOG.error(err)
    sys.exit(code)


# -- limtower -- #
@click.group()
@click.option(
    "-v", "--verbose", is_flag=True, default=False, help="Print verbose output to the console."
)
@click.option("-l", "--log-file", help="Save a log to a file.", metavar="<filename>")
@click.option(
    "-o",
    "--output",
    type=click_pathlib.Path(dir_okay=False),
    help="Write the report to this file instead of the terminal.",
)
@click.version_option(
    version=limtower_cli.__version__,
    prog_name=limtower_cli.__title__,
    help="Display the version of this software.",
)
@click.help_option(
    help="List the options of any limtower subcommand and its default settings.",
)
@click.pass_context
def limtower_main(click_ctx, verbose, log_file, output):
    """Inverse towers of abelian groups: image filtrations, Mittag-Leffler, lim¹ and Prüfer windows.

    Built-in towers and sequences are available by name; pass a scenario file to use your own.
    Exit status is 0 on success, 1 when a verification fails and 2 on bad input.
    """
    if limtower_cli.utils.stderr_console.is_terminal:
        limtower_cli.utils.stderr_console.print(
            f"[bold]{limtower_cli.__title__}[/] [dim]version {limtower_cli.__version__}",
            highlight=False,
        )

    if "--help" not in sys.argv:
        # Set the base logger to output DEBUG
        LOG.setLevel(logging.DEBUG)

        # Set up logs to the console
        LOG.addHandler(
            rich.logging.RichHandler(
                level=logging.DEBUG if verbose else logging.INFO,
                console=limtower_cli.utils.stderr_console,
                show_time=False,
                markup=True,
                show_path=verbose,
            )
        )

        # Set up logs to a file if we asked for one
        if log_file:
            log_fh = logging.FileHandler(log_file, encoding="utf-8")
            log_fh.setLevel(logging.DEBUG)
            log_fh.setFormatter(
                logging.Formatter("[%(asctime)s] %(name)-20s [%(levelname)-7s]  %(message)s")
            )
            LOG.addHandler(log_fh)

    # Create context object
    click_ctx.obj = {"OUTPUT": output, "VERBOSE": verbose}


# ************************************************************************************************ #
# TOWER COMMANDS ****************************************************************** TOWER COMMANDS #
# ************************************************************************************************ #

# -- limtower tower -- #
@limtower_main.group(name="tower", no_args_is_help=True)
@click.pass_obj
def tower_group_command(_):
    """Analyze inverse towers of finitely generated abelian groups."""


# -- limtower tower analyze -- #
@tower_group_command.command(name="analyze", no_args_is_help=True)
@name_arg()
@scenario_option()
@horizon_option()
@click.option(
    "--gray",
    "gray_index",
    type=click.IntRange(min=1),
    help="Also classify the derived tower n -> G_k^(n) for this k.",
)
@click.option(
    "--branch",
    type=click.Choice([branch.value for branch in towers.GrayBranch]),
    default=towers.GrayBranch.CONSTANT.value,
    show_default=True,
    help="Stages n < k of the derived tower: constant G_k or G_n itself.",
)
@json_flag()
@parallel_flag()
@click.pass_obj
def analyze_tower(click_ctx, name, scenario, horizon, gray_index, branch, json, parallel):
    """Image filtration, Mittag-Leffler status and lim¹ classification of a tower.

    Built-in towers: primorial, doubling, constant-z6, reduction-2.
    """
    try:
        with limtower_cli.tower_analyzer.TowerAnalyzer(
            method="analyze",
            scenario_path=scenario,
            parallel=parallel,
            as_json=json,
            output=click_ctx.get("OUTPUT"),
        ) as analyzer:
            analyzer.analyze(
                name=name,
                horizon=horizon,
                gray_index=gray_index,
                branch=towers.GrayBranch(branch),
            )
    except INPUT_ERRORS as err:
        _fail(err, 2)


# -- limtower six-term -- #
@limtower_main.group(name="six-term", no_args_is_help=True)
@click.pass_obj
def six_term_group_command(_):
    """Short exact sequences of towers and their lim-lim¹ sequence."""


# -- limtower six-term check -- #
@six_term_group_command.command(name="check")
@click.argument(
    "scenario_file",
    metavar="[SCENARIO]",
    required=False,
    type=click_pathlib.Path(exists=True, dir_okay=False),
)
@click.option("--name", "-n", type=str, help="Check only this sequence.")
@horizon_option()
@json_flag()
@click.pass_obj
def check_six_term(click_ctx, scenario_file, name, horizon, json):
    """Verify 0 -> lim K -> lim G -> lim H (-> 0 when lim¹ K is certified zero).

    Without a scenario the built-in sequences prime-power and prufer-window are checked.
    """
    try:
        with limtower_cli.tower_analyzer.TowerAnalyzer(
            method="six-term",
            scenario_path=scenario_file,
            as_json=json,
            output=click_ctx.get("OUTPUT"),
        ) as analyzer:
            analyzer.six_term(name=name, horizon=horizon)
    except limtower_cli.exceptions.CheckFailedError as err:
        _fail(err, 1)
    except INPUT_ERRORS as err:
        _fail(err, 2)


# ************************************************************************************************ #
# PRUFER COMMANDS **************************************************************** PRUFER COMMANDS #
# ************************************************************************************************ #

# -- limtower prufer -- #
@limtower_main.group(name="prufer", no_args_is_help=True)
@click.pass_obj
def prufer_group_command(_):
    """Classes in a window of Prüfer groups modulo the diagonal."""


# -- limtower prufer reduce -- #
@prufer_group_command.command(name="reduce", no_args_is_help=True)
@class_option()
@stage_index_option()
@window_option()
@json_flag()
@click.pass_obj
def reduce_class(click_ctx, class_literal, stage, window, json):
    """Subtract k times the diagonal so that the first n coordinates vanish."""
    try:
        with limtower_cli.prufer_manager.PruferManager(
            method="reduce", window=window, as_json=json, output=click_ctx.get("OUTPUT")
        ) as manager:
            manager.reduce(literal=class_literal, stage=stage)
    except INPUT_ERRORS as err:
        _fail(err, 2)


# -- limtower prufer membership -- #
@prufer_group_command.command(name="membership", no_args_is_help=True)
@class_option()
@stage_index_option()
@window_option()
@json_flag()
@click.pass_obj
def class_membership(click_ctx, class_literal, stage, window, json):
    """Whether a class lies in the image of stage n, with the blocking coordinate if not."""
    try:
        with limtower_cli.prufer_manager.PruferManager(
            method="membership", window=window, as_json=json, output=click_ctx.get("OUTPUT")
        ) as manager:
            manager.membership(literal=class_literal, stage=stage)
    except INPUT_ERRORS as err:
        _fail(err, 2)


# -- limtower prufer witness -- #
@prufer_group_command.command(name="witness", no_args_is_help=True)
@class_option(
    help_message="Coordinates of the class, e.g. 2:1.", long="--coord", short="-c"
)
@click.option(
    "--windows",
    default="2..12",
    show_default=True,
    help="Range of window sizes A..B.",
)
@json_flag()
@click.pass_obj
def growth_witness(click_ctx, class_literal, windows, json):
    """Minimal reducers of one class over growing windows."""
    try:
        sizes = scenario_codec.parse_range_literal(windows)
        with limtower_cli.prufer_manager.PruferManager(
            method="witness", as_json=json, output=click_ctx.get("OUTPUT")
        ) as manager:
            manager.witness(literal=class_literal, sizes=sizes)
    except INPUT_ERRORS as err:
        _fail(err, 2)


# ************************************************************************************************ #
# DELTA COMMANDS ****************************************************************** DELTA COMMANDS #
# ************************************************************************************************ #

# -- limtower delta-table -- #
@limtower_main.command(name="delta-table")
@click.option("--max-n", type=click.IntRange(min=1), help="Largest n. Defaults to 30.")
@click.option("--max-k", type=click.IntRange(min=1), help="Largest k. Defaults to 30.")
@scenario_option(help_message="Scenario file whose delta section sets the bounds.")
@json_flag()
@parallel_flag()
@click.pass_obj
def delta_table(click_ctx, max_n, max_k, scenario, json, parallel):
    """Table of delta_n(k) with its vanishing and divisibility checks."""
    try:
        with limtower_cli.delta_manager.DeltaManager(
            method="table",
            scenario_path=scenario,
            parallel=parallel,
            as_json=json,
            output=click_ctx.get("OUTPUT"),
        ) as manager:
            manager.table(max_n=max_n, max_k=max_k)
    except limtower_cli.exceptions.CheckFailedError as err:
        _fail(err, 1)
    except INPUT_ERRORS as err:
        _fail(err, 2)


# ************************************************************************************************ #
# VERIFICATION ********************************************************************** VERIFICATION #
# ************************************************************************************************ #

# -- limtower repro -- #
@limtower_main.command(name="repro")
@json_flag()
@parallel_flag()
@click.option(
    "--seed", type=int, default=limtower_cli.Defaults.SEED, show_default=True, help="Random seed."
)
@click.option(
    "--inject-fault",
    "fault",
    type=click.Choice(limtower_cli.repro_runner.FAULTS),
    hidden=True,
)
@click.pass_obj
def repro(click_ctx, json, parallel, seed, fault):
    """Run every verification; exit status 1 if any fails.

    LIMTOWER_CLI_ENV=quick reduces the sample counts.
    """
    try:
        with limtower_cli.repro_runner.ReproRunner(
            parallel=parallel,
            as_json=json,
            output=click_ctx.get("OUTPUT"),
            fault=fault,
            seed=seed,
        ) as runner:
            runner.run()
    except limtower_cli.exceptions.CheckFailedError as err:
        _fail(err, 1)
    except INPUT_ERRORS as err:
        _fail(err, 2)


limtower_main.add_command(repro, name="paper-repro")


# ************************************************************************************************ #
# SCENARIO COMMANDS ********************************************************** SCENARIO COMMANDS #
# ************************************************************************************************ #

# -- limtower scenario -- #
@limtower_main.group(name="scenario", no_args_is_help=True)
@click.pass_obj
def scenario_group_command(_):
    """Scenario files."""


# -- limtower scenario format -- #
@scenario_group_command.command(name="format")
@click.argument(
    "scenario_file",
    metavar="[SCENARIO]",
    required=False,
    type=click_pathlib.Path(exists=True, dir_okay=False),
)
@click.pass_obj
def format_scenario(click_ctx, scenario_file):
    """Print a scenario in canonical form (the built-in one without a file)."""
    try:
        document = scenario_codec.load(scenario_file) if scenario_file else scenario_codec.builtin()
        text = document.dump()
        output = click_ctx.get("OUTPUT")
        if output:
            output.write_text(text, encoding="utf-8")
            LOG.info(f"Canonical scenario saved to {output}")
        else:
            limtower_cli.utils.console.out(text, end="", highlight=False)
    except INPUT_ERRORS as err:
        _fail(err, 2)

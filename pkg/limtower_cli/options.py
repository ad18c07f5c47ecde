"""Click limtower options used multiple times in __main__.py."""

# Imports
import click
import click_pathlib

import limtower_cli


# Args used multiple times
def name_arg(name="name", metavar="NAME", required=True):
    """
    Tower or sequence name positional argument standard definition.

    Use as decorator for commands.
    """
    return click.argument(name, metavar=metavar, type=str, required=required)


# Options used multiple times
def scenario_option(
    help_message="Scenario file (YAML). Built-in towers and sequences are used without it.",
    long="--scenario",
    short="-s",
    name="scenario",
    required=False,
):
    """
    Scenario option standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        short,
        name,
        required=required,
        type=click_pathlib.Path(exists=True, dir_okay=False),
        help=help_message,
    )


def horizon_option(
    help_message="Number of stages to compute. Defaults to the scenario's horizon.",
    long="--horizon",
    short="-N",
    name="horizon",
    required=False,
):
    """
    Horizon option standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        short,
        name,
        required=required,
        type=click.IntRange(min=1),
        help=help_message,
    )


def class_option(
    help_message="Prüfer class literal, e.g. 2:1,3:2,5^2:4.",
    long="--class",
    short="-c",
    name="class_literal",
    required=True,
):
    """
    Class literal option standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        short,
        name,
        required=required,
        type=str,
        help=help_message,
    )


def stage_index_option(
    help_message="Stage index n.",
    long="--n",
    short="-n",
    name="stage",
    required=True,
):
    """
    Stage index option standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        short,
        name,
        required=required,
        type=click.IntRange(min=0),
        help=help_message,
    )


def window_option(
    help_message="Number of primes in the Prüfer window.",
    long="--window",
    short="-w",
    name="window",
    required=False,
    default=limtower_cli.Defaults.WINDOW,
    show_default=True,
):
    """
    Window option standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        short,
        name,
        required=required,
        default=default,
        show_default=show_default,
        type=click.IntRange(min=1),
        help=help_message,
    )


# Flags
def json_flag(help_message="Output in JSON format.", long="--json", name="json", show_default=True):
    """
    Json flag standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        name,
        is_flag=True,
        default=False,
        show_default=show_default,
        help=help_message,
    )


def parallel_flag(
    help_message="Spread independent computations over a thread pool. Output order is unchanged.",
    long="--parallel",
    name="parallel",
    show_default=True,
):
    """
    Parallel flag standard definition.

    Use as decorator for commands.
    """
    return click.option(
        long,
        name,
        is_flag=True,
        default=False,
        show_default=show_default,
        help=help_message,
    )

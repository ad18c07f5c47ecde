"""limtower utils module."""

import dataclasses
import enum
import fractions
import logging
import math
import pathlib
import typing

import rich.console
import rich.markup
import rich.table
import simplejson
from rich.table import Table

import limtower_cli.exceptions

console = rich.console.Console()
stderr_console = rich.console.Console(stderr=True)

LOG = logging.getLogger(__name__)

# Width used when a report goes to a file instead of a terminal
FILE_WIDTH = 100

# Functions


def format_fraction(value: fractions.Fraction) -> str:
    """``3/7``, or ``3`` when the denominator is 1."""
    value = fractions.Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def format_cell(value) -> str:
    """Render one table cell."""
    if isinstance(value, bool):
        return ":white_heavy_check_mark:" if value else ":x:"
    if value is None:
        return "-"
    if isinstance(value, fractions.Fraction):
        return format_fraction(value)
    if isinstance(value, float) and math.isinf(value):
        return "∞"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, (list, tuple)):
        return ", ".join(format_cell(item) for item in value)
    return rich.markup.escape(str(value))


def jsonable(item):
    """Recursively convert a report into plain JSON values."""
    if isinstance(item, bool) or item is None or isinstance(item, (int, str)):
        return item
    if isinstance(item, fractions.Fraction):
        return format_fraction(item)
    if isinstance(item, float):
        return "inf" if math.isinf(item) else item
    if isinstance(item, enum.Enum):
        return item.value
    if dataclasses.is_dataclass(item):
        return {field.name: jsonable(getattr(item, field.name)) for field in dataclasses.fields(item)}
    if isinstance(item, typing.Mapping):
        return {str(key): jsonable(value) for key, value in item.items()}
    if isinstance(item, (list, tuple, range)):
        return [jsonable(value) for value in item]
    return str(item)


def create_table(
    title: str,
    columns: list,
    rows: list,
    show_header: bool = True,
    header_style: str = "bold",
    show_footer: bool = False,
    caption: str = "",
) -> Table:
    """Create table from a list of row mappings keyed by column name."""
    table = Table(
        title=title,
        show_header=show_header,
        header_style=header_style,
        show_footer=show_footer,
        caption=caption,
    )

    for col in columns:
        table.add_column(col, justify="left", overflow="fold")

    for row in rows:
        table.add_row(*[format_cell(row.get(x)) for x in columns])

    return table


def print_or_page(item):
    """Paginate or print out depending on size of item."""
    if isinstance(item, rich.table.Table) and not item.columns:
        raise limtower_cli.exceptions.InputError("Nothing to report.")
    if (
        isinstance(item, rich.table.Table)
        and console.is_terminal
        and item.row_count + 5 > console.height
    ):
        with console.pager():
            console.print(item)
    else:
        console.print(item)


def emit(renderables: list, data, as_json: bool = False, output: pathlib.Path = None):
    """Write a report as rich tables or JSON, to stdout or to ``output``."""
    if as_json:
        text = simplejson.dumps(jsonable(data), indent=2)
        if output:
            pathlib.Path(output).write_text(text + "\n", encoding="utf-8")
            LOG.info(f"Report saved to {output}")
        else:
            console.out(text, highlight=False)
        return

    if output:
        with pathlib.Path(output).open(mode="w", encoding="utf-8") as handle:
            file_console = rich.console.Console(file=handle, width=FILE_WIDTH, no_color=True)
            for renderable in renderables:
                file_console.print(renderable)
        LOG.info(f"Report saved to {output}")
        return

    for renderable in renderables:
        print_or_page(renderable)

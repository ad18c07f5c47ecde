import logging
import pathlib
import typing
from fractions import Fraction

import pytest
from _pytest.logging import LogCaptureFixture
from pyfakefs.fake_filesystem import FakeFilesystem

import limtower_cli
from limtower_cli import scenario as scenario_codec
from limtower_cli import prufer, towers
from limtower_cli.abelian import FgAbGroup
from limtower_cli.exceptions import (
    InputError,
    MalformedLiteralError,
    ScenarioParseError,
    UnknownNameError,
)

# Literals


def test_parse_class_literal():
    """q:m stands for m/q; prime powers may be written p^e."""
    assert scenario_codec.parse_class_literal("2:1,3:2,5:1,7:3") == {
        2: Fraction(1, 2),
        3: Fraction(2, 3),
        5: Fraction(1, 5),
        7: Fraction(3, 7),
    }
    assert scenario_codec.parse_class_literal("2^2:1") == {2: Fraction(1, 4)}
    assert scenario_codec.parse_class_literal("4:1") == {2: Fraction(1, 4)}


def test_parse_class_literal_combines_and_drops_zeros():
    """Tokens for one prime add up; integer coordinates vanish."""
    assert scenario_codec.parse_class_literal("2:1, 4:1") == {2: Fraction(3, 4)}
    assert scenario_codec.parse_class_literal("3:3,5:-1") == {5: Fraction(4, 5)}
    assert scenario_codec.parse_class_literal("0") == {}
    assert scenario_codec.parse_class_literal("") == {}


@pytest.mark.parametrize("literal", ["2/1", "6:1", "2:", "x:1", "2^:1", "1:1", "0:1", "0^3:1"])
def test_parse_class_literal_rejects(literal):
    with pytest.raises(MalformedLiteralError):
        scenario_codec.parse_class_literal(literal)


def test_format_class_literal():
    """Ascending primes, p^e for higher powers, "0" for the zero class."""
    assert (
        scenario_codec.format_class_literal({7: Fraction(3, 7), 2: Fraction(1, 4)})
        == "2^2:1,7:3"
    )
    assert scenario_codec.format_class_literal({3: Fraction(0)}) == "0"
    assert scenario_codec.format_class_literal(
        scenario_codec.parse_class_literal("4:3,2:1")
    ) == "2^2:1"


def test_parse_range_literal():
    assert scenario_codec.parse_range_literal("2..12") == range(2, 13)
    assert scenario_codec.parse_range_literal("5..5") == range(5, 6)
    with pytest.raises(MalformedLiteralError):
        scenario_codec.parse_range_literal("12..2")
    with pytest.raises(MalformedLiteralError):
        scenario_codec.parse_range_literal("2-12")


def test_class_from_literal_window():
    """Primes outside the window are an input error."""
    c = scenario_codec.class_from_literal("2:1,7:3", 4)
    assert c.window.size == 4
    with pytest.raises(InputError, match="outside the window"):
        scenario_codec.class_from_literal("11:1", 4)


# Built-in scenario


def test_builtin_scenario_is_canonical():
    """The built-in text is already in canonical form."""
    builtin = scenario_codec.builtin()
    assert builtin.dump() == scenario_codec.BUILTIN_TEXT
    assert scenario_codec.loads(builtin.dump()) == builtin


def test_builtin_names():
    builtin = scenario_codec.builtin()
    assert sorted(builtin.towers) == ["constant-z6", "doubling", "primorial", "reduction-2"]
    assert sorted(builtin.sequences) == ["prime-power", "prufer-window"]
    assert builtin.prufer["classes"]["lifted"] == "2:1,3:2,5:1,7:3"


def test_builtin_towers_build():
    builtin = scenario_codec.builtin()
    assert scenario_codec.build_tower(builtin, "primorial") == towers.primorial_tower(10)
    assert scenario_codec.build_tower(builtin, "doubling", horizon=3) == towers.multiply_tower(2, 3)
    reduction = scenario_codec.build_tower(builtin, "reduction-2")
    assert reduction.stages == (FgAbGroup.cyclic(8), FgAbGroup.cyclic(16), FgAbGroup.cyclic(32))
    constant = scenario_codec.build_tower(builtin, "constant-z6")
    assert constant.stages == (FgAbGroup.cyclic(6),) * 4


def test_builtin_sequences_build():
    builtin = scenario_codec.builtin()
    assert scenario_codec.build_sequence(builtin, "prime-power").middle.horizon == 5
    assert scenario_codec.build_sequence(builtin, "prufer-window").middle.horizon == 4


def test_unknown_names():
    builtin = scenario_codec.builtin()
    with pytest.raises(UnknownNameError, match="Known: constant-z6"):
        builtin.tower_spec("nope")
    with pytest.raises(UnknownNameError):
        builtin.sequence_spec("nope")
    with pytest.raises(UnknownNameError):
        builtin.prufer_class("nope")


def test_prufer_class_uses_scenario_window():
    c = scenario_codec.builtin().prufer_class("quarter")
    assert c.window.size == limtower_cli.Defaults.WINDOW
    assert scenario_codec.builtin().prufer_class("quarter", window=3).window.size == 3


def test_scenario_annotations_resolve_to_modules():
    """Field names shadow module names in the class body; hints must still reach the modules."""
    hints = typing.get_type_hints(scenario_codec.Scenario.prufer_class)
    assert hints["return"] is prufer.PruferClass
    assert isinstance(scenario_codec.builtin().prufer_class("quarter"), hints["return"])


# Horizons


def test_resolve_horizon_order():
    """Command line, then tower, then document, then the default."""
    document = scenario_codec.loads("horizon: 7\ntowers:\n  t:\n    family: primorial\n")
    spec = document.tower_spec("t")
    assert scenario_codec.resolve_horizon(document, spec, 3) == 3
    assert scenario_codec.resolve_horizon(document, spec, None) == 7
    assert scenario_codec.resolve_horizon(document, {"horizon": 5}, None) == 5
    assert (
        scenario_codec.resolve_horizon(scenario_codec.Scenario(), {}, None)
        == limtower_cli.Defaults.HORIZON
    )


# Inline towers and explicit sequences

INLINE = """\
towers:
  halves:
    stages:
    - torsion: [2]
    - torsion: [4]
    - torsion: [8]
    bonds:
    - [[1]]
    - [[1]]
  free:
    stages:
    - rank: 1
    - rank: 1
    bonds:
    - [[3]]
sequences:
  split:
    sub: halves
    mid: halves
    quo: halves
    inclusions: [[[1]], [[1]], [[1]]]
    projections: [[[0]], [[0]], [[0]]]
"""


def test_inline_tower():
    document = scenario_codec.loads(INLINE)
    tower = scenario_codec.build_tower(document, "halves")
    assert tower.stages == (FgAbGroup.cyclic(2), FgAbGroup.cyclic(4), FgAbGroup.cyclic(8))
    assert scenario_codec.build_tower(document, "halves", horizon=2).horizon == 2
    assert towers.image_filtration(scenario_codec.build_tower(document, "free"), 1).strict_drops == (
        (1, 2),
    )


def test_inline_tower_too_short():
    document = scenario_codec.loads(INLINE)
    with pytest.raises(ScenarioParseError, match="only 3 stages"):
        scenario_codec.build_tower(document, "halves", horizon=5)


def test_explicit_sequence_not_exact():
    """Identity inclusion with a zero projection is not exact; reported at the sequence."""
    document = scenario_codec.loads(INLINE)
    with pytest.raises(ScenarioParseError) as err:
        scenario_codec.build_sequence(document, "split")
    assert (err.value.line, err.value.column) == (18, 5)
    assert "Sequence 'split'" in err.value.message


def test_bad_bond_is_reported_at_the_tower():
    """A bond that does not respect orders is a parse failure at the tower."""
    document = scenario_codec.loads(
        "towers:\n  bad:\n    stages:\n    - torsion: [3]\n    - torsion: [2]\n    bonds:\n    - [[1]]\n"
    )
    with pytest.raises(ScenarioParseError) as err:
        scenario_codec.build_tower(document, "bad")
    assert (err.value.line, err.value.column) == (3, 5)


# Parse errors


@pytest.mark.parametrize(
    "text, line, column, message",
    [
        ("horizon: 0\n", 1, 10, "horizon must be positive"),
        ("horizon: 3\nextra: 1\n", 2, 8, "Unknown key 'extra'"),
        ("towers:\n  t:\n    family: spiral\n", 3, 13, "Unknown tower family 'spiral'"),
        ("towers:\n  t:\n    family: reduction\n    prime: 4\n", 4, 12, "4 is not prime"),
        ("prufer:\n  classes:\n    half: 2:1\n", 3, 11, "class 'half' must be a string"),
        ("prufer:\n  classes:\n    bad: '6:1'\n", 3, 10, "not a prime power"),
        ("horizon: 3\nhorizon: 4\n", 2, 1, "Duplicate key 'horizon'"),
        ("towers: [1, 2\n", 2, 1, None),
        ("- 1\n- 2\n", 1, 1, "A scenario must be a mapping"),
    ],
)
def test_parse_errors_carry_positions(text, line, column, message):
    with pytest.raises(ScenarioParseError) as err:
        scenario_codec.loads(text)
    assert (err.value.line, err.value.column) == (line, column)
    assert str(err.value).startswith(f"line {line}, column {column}: ")
    if message:
        assert message in err.value.message


def test_sequence_with_unknown_tower():
    with pytest.raises(ScenarioParseError, match="Unknown tower 'ghost'"):
        scenario_codec.loads(
            "sequences:\n  s:\n    sub: ghost\n    mid: ghost\n    quo: ghost\n"
            "    inclusions: []\n    projections: []\n"
        )


def test_empty_document_is_empty_scenario():
    assert scenario_codec.loads("") == scenario_codec.Scenario()


# Files


def test_load_missing_file(fs: FakeFilesystem):
    with pytest.raises(InputError, match="Cannot read scenario file"):
        scenario_codec.load(pathlib.Path("missing.yaml"))


def test_load_and_dump_roundtrip(fs: FakeFilesystem, caplog: LogCaptureFixture):
    """A loaded file dumps canonically and reloads to the same scenario."""
    fs.create_file(
        "scenario.yaml",
        contents="towers:\n  z4: {family: constant, torsion: [4], horizon: 2}\n"
        "prufer:\n  classes:\n    c: '4:3,2:1'\n",
    )
    with caplog.at_level(logging.DEBUG):
        document = scenario_codec.load(pathlib.Path("scenario.yaml"))
    assert document.prufer["classes"]["c"] == "2^2:1"
    assert scenario_codec.loads(document.dump()) == document
    assert (
        "limtower_cli.scenario",
        logging.DEBUG,
        "Parsed scenario with 1 towers and 0 sequences",
    ) in caplog.record_tuples

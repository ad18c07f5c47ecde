"""Scenario documents: named towers, sequences, Prüfer classes and delta bounds.

Scenarios are YAML; the grammar is documented in ``docs/scenario.rst``. Parsing
goes through the composed node tree so every semantic error carries the line and
column of the offending node.
"""

###############################################################################
# IMPORTS ########################################################### IMPORTS #
###############################################################################

# Standard library
import dataclasses
import fractions
import logging
import pathlib
import re
import typing

# Installed
import sympy
import yaml
from immutabledict import immutabledict

# Own modules
import limtower_cli
from limtower_cli import exceptions, prufer, towers
from limtower_cli.abelian import FgAbGroup, Homomorphism

###############################################################################
# START LOGGING CONFIG ################################# START LOGGING CONFIG #
###############################################################################

LOG = logging.getLogger(__name__)

###############################################################################
# LITERALS ######################################################### LITERALS #
###############################################################################

_TOKEN = re.compile(r"^\s*(\d+)(?:\s*\^\s*(\d+))?\s*:\s*(-?\d+)\s*$")
_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


def parse_class_literal(text: str) -> typing.Dict[int, fractions.Fraction]:
    """``"2:1,3:2,2^2:3"`` to ``{prime: coordinate}``; ``q:m`` stands for ``m/q``.

    ``q`` is a prime power written as an integer or as ``p^e``. Tokens for the
    same prime add up; ``"0"`` and the empty string are the zero class.
    """
    coordinates: typing.Dict[int, fractions.Fraction] = {}
    if text.strip() in ("", "0"):
        return coordinates
    for token in text.split(","):
        match = _TOKEN.match(token)
        if not match:
            raise exceptions.MalformedLiteralError(
                f"'{token.strip()}' is not of the form q:m or p^e:m"
            )
        base, exponent, numerator = match.groups()
        modulus = int(base) ** int(exponent or 1)
        if modulus < 2:
            raise exceptions.MalformedLiteralError(f"{modulus} in '{token.strip()}' is not a prime power")
        factors = sympy.factorint(modulus)
        if len(factors) != 1 or not sympy.isprime(next(iter(factors))):
            raise exceptions.MalformedLiteralError(f"{modulus} in '{token.strip()}' is not a prime power")
        (prime,) = factors
        value = coordinates.get(prime, fractions.Fraction(0)) + fractions.Fraction(int(numerator), modulus)
        coordinates[prime] = value % 1
    return {p: x for p, x in sorted(coordinates.items()) if x}


def format_class_literal(coordinates: typing.Mapping[int, fractions.Fraction]) -> str:
    """Canonical literal, ascending primes, zero coordinates omitted."""
    tokens = []
    for prime in sorted(coordinates):
        value = fractions.Fraction(coordinates[prime]) % 1
        if not value:
            continue
        exponent = sympy.multiplicity(prime, value.denominator)
        modulus = str(prime) if exponent == 1 else f"{prime}^{exponent}"
        tokens.append(f"{modulus}:{value.numerator}")
    return ",".join(tokens) if tokens else "0"


def element_literal(element: prufer.PruferElement) -> str:
    return format_class_literal(dict(zip(element.window.primes, element.coords)))


def parse_range_literal(text: str) -> range:
    """``"2..12"`` to ``range(2, 13)``."""
    match = _RANGE.match(text)
    if not match or int(match.group(1)) > int(match.group(2)):
        raise exceptions.MalformedLiteralError(f"'{text}' is not a range of the form A..B with A <= B")
    return range(int(match.group(1)), int(match.group(2)) + 1)


###############################################################################
# DOCUMENT ######################################################### DOCUMENT #
###############################################################################

TOWER_FAMILIES = ("constant", "multiply", "primorial", "reduction")
SEQUENCE_FAMILIES = ("prime-power", "prufer-window")
TOP_LEVEL_KEYS = ("delta", "horizon", "prufer", "sequences", "towers")


def _freeze(data):
    if isinstance(data, dict):
        return immutabledict({key: _freeze(value) for key, value in data.items()})
    if isinstance(data, list):
        return tuple(_freeze(item) for item in data)
    return data


def _thaw(data):
    if isinstance(data, typing.Mapping):
        return {key: _thaw(value) for key, value in data.items()}
    if isinstance(data, tuple):
        return [_thaw(item) for item in data]
    return data


@dataclasses.dataclass(frozen=True)
class Scenario:
    """Validated scenario document; nested mappings are immutable."""

    horizon: typing.Optional[int] = None
    prufer: immutabledict = immutabledict()
    delta: immutabledict = immutabledict()
    towers: immutabledict = immutabledict()
    sequences: immutabledict = immutabledict()
    positions: immutabledict = dataclasses.field(
        default=immutabledict(), compare=False, repr=False
    )

    def to_dict(self) -> dict:
        document = {
            "horizon": self.horizon,
            "prufer": _thaw(self.prufer),
            "delta": _thaw(self.delta),
            "towers": _thaw(self.towers),
            "sequences": _thaw(self.sequences),
        }
        return {key: value for key, value in document.items() if value not in (None, {})}

    def dump(self) -> str:
        """Canonical YAML text."""
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def position(self, path: tuple) -> typing.Tuple[typing.Optional[int], typing.Optional[int]]:
        while path and path not in self.positions:
            path = path[:-1]
        return self.positions.get(path, (None, None))

    def fail(self, path: tuple, message: str):
        line, column = self.position(path)
        raise exceptions.ScenarioParseError(message, line=line, column=column)

    # Lookups ##################################################### Lookups #
    def tower_spec(self, name: str) -> typing.Mapping:
        if name not in self.towers:
            raise exceptions.UnknownNameError(
                f"Unknown tower '{name}'. Known: {', '.join(sorted(self.towers)) or 'none'}"
            )
        return self.towers[name]

    def sequence_spec(self, name: str) -> typing.Mapping:
        if name not in self.sequences:
            raise exceptions.UnknownNameError(
                f"Unknown sequence '{name}'. Known: {', '.join(sorted(self.sequences)) or 'none'}"
            )
        return self.sequences[name]

    def prufer_class(self, name: str, window: typing.Optional[int] = None) -> "prufer.PruferClass":
        classes = self.prufer.get("classes", immutabledict())
        if name not in classes:
            raise exceptions.UnknownNameError(f"Unknown class '{name}'")
        size = window or self.prufer.get("window", limtower_cli.Defaults.WINDOW)
        return class_from_literal(classes[name], size)


def class_from_literal(literal: str, window_size: int) -> prufer.PruferClass:
    """Class over the first ``window_size`` primes; every prime in the literal must be in the window."""
    coordinates = parse_class_literal(literal)
    window = prufer.PrimeWindow.first(window_size)
    outside = [p for p in coordinates if p not in window.primes]
    if outside:
        raise exceptions.InputError(f"Primes {outside} are outside the window {window}")
    return prufer.PruferClass.from_mapping(window, coordinates)


###############################################################################
# PARSING ########################################################### PARSING #
###############################################################################


class _Composer:
    """Builds plain data from a YAML node tree, remembering where each node started."""

    def __init__(self):
        self.positions: typing.Dict[tuple, typing.Tuple[int, int]] = {}
        self._constructor = yaml.constructor.SafeConstructor()

    def build(self, node, path: tuple = ()):
        self.positions[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
        if isinstance(node, yaml.MappingNode):
            result = {}
            for key_node, value_node in node.value:
                key = self._constructor.construct_object(key_node)
                if key in result:
                    raise exceptions.ScenarioParseError(
                        f"Duplicate key '{key}'",
                        line=key_node.start_mark.line + 1,
                        column=key_node.start_mark.column + 1,
                    )
                result[key] = self.build(value_node, path + (key,))
            return result
        if isinstance(node, yaml.SequenceNode):
            return [self.build(item, path + (i,)) for i, item in enumerate(node.value)]
        return self._constructor.construct_object(node)


def loads(text: str) -> Scenario:
    """Parse and validate scenario text."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark
        raise exceptions.ScenarioParseError(
            str(err.problem), line=mark.line + 1 if mark else None, column=mark.column + 1 if mark else None
        ) from err

    composer = _Composer()
    data = composer.build(node) if node is not None else {}
    scenario = Scenario(positions=immutabledict(composer.positions))
    if not isinstance(data, dict):
        scenario.fail((), "A scenario must be a mapping")
    _validate(scenario, data)
    scenario = Scenario(
        horizon=data.get("horizon"),
        prufer=_freeze(data.get("prufer", {})),
        delta=_freeze(data.get("delta", {})),
        towers=_freeze(data.get("towers", {})),
        sequences=_freeze(data.get("sequences", {})),
        positions=scenario.positions,
    )
    LOG.debug(
        f"Parsed scenario with {len(scenario.towers)} towers and {len(scenario.sequences)} sequences"
    )
    return scenario


def load(path: pathlib.Path) -> Scenario:
    try:
        text = pathlib.Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise exceptions.InputError(f"Cannot read scenario file '{path}': {err}") from err
    return loads(text)


# Validation ################################################### Validation #
def _expect(scenario: Scenario, path: tuple, value, kind, what: str):
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        scenario.fail(path, f"{what} must be {_KIND_NAMES.get(kind, kind)}")


_KIND_NAMES = {int: "an integer", str: "a string", dict: "a mapping", list: "a list"}


def _positive(scenario: Scenario, path: tuple, value, what: str):
    _expect(scenario, path, value, int, what)
    if value < 1:
        scenario.fail(path, f"{what} must be positive")


def _unknown_keys(scenario: Scenario, path: tuple, mapping: dict, allowed: typing.Iterable[str]):
    for key in mapping:
        if key not in allowed:
            scenario.fail(path + (key,), f"Unknown key '{key}'")


def _validate(scenario: Scenario, data: dict):
    _unknown_keys(scenario, (), data, TOP_LEVEL_KEYS)
    if "horizon" in data:
        _positive(scenario, ("horizon",), data["horizon"], "horizon")

    section = data.get("prufer", {})
    _expect(scenario, ("prufer",), section, dict, "prufer")
    _unknown_keys(scenario, ("prufer",), section, ("classes", "window"))
    if "window" in section:
        _positive(scenario, ("prufer", "window"), section["window"], "window")
    classes = section.get("classes", {})
    _expect(scenario, ("prufer", "classes"), classes, dict, "classes")
    for name, literal in classes.items():
        path = ("prufer", "classes", name)
        _expect(scenario, path, literal, str, f"class '{name}'")
        try:
            classes[name] = format_class_literal(parse_class_literal(literal))
        except exceptions.MalformedLiteralError as err:
            scenario.fail(path, err.message)

    section = data.get("delta", {})
    _expect(scenario, ("delta",), section, dict, "delta")
    _unknown_keys(scenario, ("delta",), section, ("max_k", "max_n"))
    for key in section:
        _positive(scenario, ("delta", key), section[key], key)

    tower_specs = data.get("towers", {})
    _expect(scenario, ("towers",), tower_specs, dict, "towers")
    for name, spec in tower_specs.items():
        _validate_tower(scenario, ("towers", name), spec)

    sequence_specs = data.get("sequences", {})
    _expect(scenario, ("sequences",), sequence_specs, dict, "sequences")
    for name, spec in sequence_specs.items():
        _validate_sequence(scenario, ("sequences", name), spec, tower_specs)


def _validate_matrix(scenario: Scenario, path: tuple, matrix):
    _expect(scenario, path, matrix, list, "matrix")
    for i, row in enumerate(matrix):
        _expect(scenario, path + (i,), row, list, "matrix row")
        for j, entry in enumerate(row):
            _expect(scenario, path + (i, j), entry, int, "matrix entry")


def _validate_group(scenario: Scenario, path: tuple, spec: dict):
    rank = spec.get("rank", 0)
    _expect(scenario, path + ("rank",), rank, int, "rank")
    if rank < 0:
        scenario.fail(path + ("rank",), "rank must not be negative")
    torsion = spec.get("torsion", [])
    _expect(scenario, path + ("torsion",), torsion, list, "torsion")
    for i, order in enumerate(torsion):
        _expect(scenario, path + ("torsion", i), order, int, "order")
        if order < 1:
            scenario.fail(path + ("torsion", i), "orders must be positive")


def _validate_tower(scenario: Scenario, path: tuple, spec):
    _expect(scenario, path, spec, dict, "tower")
    if "horizon" in spec:
        _positive(scenario, path + ("horizon",), spec["horizon"], "horizon")
    family = spec.get("family")
    if family is None:
        _unknown_keys(scenario, path, spec, ("bonds", "horizon", "stages"))
        stages = spec.get("stages")
        _expect(scenario, path + ("stages",), stages, list, "stages")
        if not stages:
            scenario.fail(path + ("stages",), "A tower needs at least one stage")
        for i, stage in enumerate(stages):
            stage_path = path + ("stages", i)
            _expect(scenario, stage_path, stage, dict, "stage")
            _unknown_keys(scenario, stage_path, stage, ("rank", "torsion"))
            _validate_group(scenario, stage_path, stage)
        bonds = spec.get("bonds", [])
        _expect(scenario, path + ("bonds",), bonds, list, "bonds")
        for i, matrix in enumerate(bonds):
            _validate_matrix(scenario, path + ("bonds", i), matrix)
        return

    if family not in TOWER_FAMILIES:
        scenario.fail(path + ("family",), f"Unknown tower family '{family}'")
    allowed = {
        "constant": ("family", "horizon", "rank", "torsion"),
        "multiply": ("factor", "family", "horizon"),
        "primorial": ("family", "horizon"),
        "reduction": ("family", "horizon", "prime", "start"),
    }[family]
    _unknown_keys(scenario, path, spec, allowed)
    if family == "multiply":
        _expect(scenario, path + ("factor",), spec.get("factor"), int, "factor")
    if family == "reduction":
        _positive(scenario, path + ("prime",), spec.get("prime"), "prime")
        if not sympy.isprime(spec["prime"]):
            scenario.fail(path + ("prime",), f"{spec['prime']} is not prime")
        if "start" in spec:
            _positive(scenario, path + ("start",), spec["start"], "start")
    if family == "constant":
        _validate_group(scenario, path, spec)


def _validate_sequence(scenario: Scenario, path: tuple, spec, tower_specs: dict):
    _expect(scenario, path, spec, dict, "sequence")
    family = spec.get("family")
    if family == "prime-power":
        _unknown_keys(scenario, path, spec, ("family", "horizon", "prime"))
        _positive(scenario, path + ("prime",), spec.get("prime"), "prime")
        if "horizon" in spec:
            _positive(scenario, path + ("horizon",), spec["horizon"], "horizon")
    elif family == "prufer-window":
        _unknown_keys(scenario, path, spec, ("exponent", "family", "window"))
        _positive(scenario, path + ("window",), spec.get("window"), "window")
        if "exponent" in spec:
            _positive(scenario, path + ("exponent",), spec["exponent"], "exponent")
    elif family is None:
        _unknown_keys(scenario, path, spec, ("inclusions", "mid", "projections", "quo", "sub"))
        for role in ("sub", "mid", "quo"):
            name = spec.get(role)
            _expect(scenario, path + (role,), name, str, role)
            if name not in tower_specs:
                scenario.fail(path + (role,), f"Unknown tower '{name}'")
        for role in ("inclusions", "projections"):
            _expect(scenario, path + (role,), spec.get(role), list, role)
            for i, matrix in enumerate(spec[role]):
                _validate_matrix(scenario, path + (role, i), matrix)
    else:
        scenario.fail(path + ("family",), f"Unknown sequence family '{family}'")


###############################################################################
# BUILDING ######################################################### BUILDING #
###############################################################################


def resolve_horizon(scenario: Scenario, spec: typing.Mapping, override: typing.Optional[int]) -> int:
    """Command line, then tower, then document, then the configured default."""
    for candidate in (override, spec.get("horizon"), scenario.horizon):
        if candidate is not None:
            return candidate
    return limtower_cli.Defaults.HORIZON


def build_tower(scenario: Scenario, name: str, horizon: typing.Optional[int] = None) -> towers.Tower:
    """Tower named ``name``, truncated or generated up to the resolved horizon."""
    spec = scenario.tower_spec(name)
    path = ("towers", name)
    try:
        if "family" not in spec:
            tower = _inline_tower(spec, name)
            if horizon is not None or "horizon" in spec:
                size = resolve_horizon(scenario, spec, horizon)
                if size > tower.horizon:
                    scenario.fail(path, f"Tower '{name}' has only {tower.horizon} stages, not {size}")
                tower = tower.truncate(size)
            return tower

        size = resolve_horizon(scenario, spec, horizon)
        family = spec["family"]
        if family == "primorial":
            return towers.primorial_tower(size, name=name)
        if family == "multiply":
            return towers.multiply_tower(spec["factor"], size, name=name)
        if family == "reduction":
            return towers.reduction_tower(spec["prime"], size, start=spec.get("start", 1), name=name)
        group = FgAbGroup.from_orders(*spec.get("torsion", ()), *([0] * spec.get("rank", 0)))
        return towers.constant_tower(group, size, name=name)
    except exceptions.AlgebraError as err:
        scenario.fail(path, f"Tower '{name}': {err}")


def _inline_tower(spec: typing.Mapping, name: str) -> towers.Tower:
    stages = [
        FgAbGroup.from_orders(*stage.get("torsion", ()), *([0] * stage.get("rank", 0)))
        for stage in spec["stages"]
    ]
    bonds = [
        Homomorphism(stages[n], stages[n - 1], [list(row) for row in matrix])
        for n, matrix in enumerate(spec.get("bonds", ()), start=1)
    ]
    return towers.Tower(stages, bonds, name=name)


def build_sequence(
    scenario: Scenario, name: str, horizon: typing.Optional[int] = None
) -> towers.TowerSES:
    """Short exact sequence of towers named ``name``."""
    spec = scenario.sequence_spec(name)
    path = ("sequences", name)
    try:
        family = spec.get("family")
        if family == "prime-power":
            size = horizon or spec.get("horizon") or scenario.horizon or 5
            return towers.prime_power_ses(spec["prime"], size)
        if family == "prufer-window":
            return prufer.window_ses(spec["window"], spec.get("exponent", 2))

        sub, mid, quo = (build_tower(scenario, spec[role], horizon) for role in ("sub", "mid", "quo"))
        inclusion = towers.TowerMap(
            sub,
            mid,
            [
                Homomorphism(s, m, [list(row) for row in matrix])
                for s, m, matrix in zip(sub.stages, mid.stages, spec["inclusions"])
            ],
        )
        projection = towers.TowerMap(
            mid,
            quo,
            [
                Homomorphism(m, q, [list(row) for row in matrix])
                for m, q, matrix in zip(mid.stages, quo.stages, spec["projections"])
            ],
        )
        return towers.TowerSES(inclusion, projection, name=name)
    except exceptions.AlgebraError as err:
        scenario.fail(path, f"Sequence '{name}': {err}")


###############################################################################
# BUILT-INS ####################################################### BUILT-INS #
###############################################################################

BUILTIN_TEXT = """\
prufer:
  classes:
    half: '2:1'
    lifted: 2:1,3:2,5:1,7:3
    quarter: 2^2:1
  window: 12
sequences:
  prime-power:
    family: prime-power
    horizon: 5
    prime: 2
  prufer-window:
    exponent: 2
    family: prufer-window
    window: 4
towers:
  constant-z6:
    family: constant
    horizon: 4
    torsion:
    - 6
  doubling:
    factor: 2
    family: multiply
    horizon: 6
  primorial:
    family: primorial
    horizon: 10
  reduction-2:
    family: reduction
    horizon: 3
    prime: 2
    start: 3
"""


def builtin() -> Scenario:
    """Scenario available to every command without a file."""
    return loads(BUILTIN_TEXT)

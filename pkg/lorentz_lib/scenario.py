"""
Scenario module for Lorentz Lab

Parses and renders scenario files: UTF-8 text, one ``key = value`` per line,
``#`` starts a comment, vectors are comma-separated.

Example::

    name = cyclotron
    k = 1.0
    E = 0, 0, 0
    B = 0, 0, 1
    field_map = uniform
    x0 = 0, 0, 0, 0
    u0_spatial = 0.5, 0, 0
    dt = 0.00628318530717958
    n_steps = 1000
    stepper = EXACT
    output_stride = 1
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from physics.core_geometry import FourVector
from physics.dynamics import MAX_SPATIAL_FOUR_VELOCITY, Stepper
from physics.field_tensor import (
    FIELD_MAP_NAMES,
    Coupling,
    FieldMap,
    FieldTensor,
    build_field_map,
)

from .errors import ConfigurationError, ScenarioParseError
from .logging import get_logger

logger = get_logger("scenario")

REQUIRED_KEYS = (
    "name",
    "k",
    "E",
    "B",
    "x0",
    "u0_spatial",
    "dt",
    "n_steps",
    "stepper",
)
OPTIONAL_KEYS = ("field_map", "output_stride", "gradient", "bottle_length")

# Parameters each named field map needs
MAP_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    "uniform": (),
    "gradient_b": ("gradient",),
    "magnetic_bottle": ("bottle_length",),
}


@dataclass(frozen=True)
class Scenario:
    """A fully validated simulation setup."""

    name: str
    k: float
    E: Tuple[float, float, float]
    B: Tuple[float, float, float]
    x0: Tuple[float, float, float, float]
    u0_spatial: Tuple[float, float, float]
    dt: float
    n_steps: int
    stepper: Stepper
    field_map: str = "uniform"
    output_stride: int = 1
    gradient: Optional[float] = None
    bottle_length: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ScenarioParseError("must not be empty", "name")
        if self.name != self.name.strip() or any(c in self.name for c in "#\r\n"):
            raise ScenarioParseError(
                "must be a single line without surrounding spaces or '#'", "name"
            )
        for key in ("k", "dt", "gradient", "bottle_length"):
            value = getattr(self, key)
            if value is not None and not math.isfinite(value):
                raise ScenarioParseError("must be finite", key)
        for key in ("E", "B", "x0", "u0_spatial"):
            if not all(math.isfinite(v) for v in getattr(self, key)):
                raise ScenarioParseError("components must be finite", key)
        speed = math.hypot(*self.u0_spatial)
        if speed > MAX_SPATIAL_FOUR_VELOCITY:
            raise ScenarioParseError(
                f"|u0_spatial| = {speed:.6g} exceeds the integrable limit {MAX_SPATIAL_FOUR_VELOCITY:g}",
                "u0_spatial",
            )
        if not self.dt > 0.0:
            raise ScenarioParseError("dt must be positive", "dt")
        if self.n_steps < 1:
            raise ScenarioParseError("n_steps must be at least 1", "n_steps")
        if self.output_stride < 1:
            raise ScenarioParseError("output_stride must be at least 1", "output_stride")
        if self.bottle_length is not None and not self.bottle_length > 0.0:
            raise ScenarioParseError("bottle_length must be positive", "bottle_length")
        if self.field_map not in MAP_PARAMETERS:
            raise ScenarioParseError(
                f"unknown field map '{self.field_map}'. Supported: {', '.join(FIELD_MAP_NAMES)}",
                "field_map",
            )
        for param in MAP_PARAMETERS[self.field_map]:
            if getattr(self, param) is None:
                raise ScenarioParseError(
                    f"required by field_map = {self.field_map}", param
                )
        if self.stepper is Stepper.EXACT and self.field_map != "uniform":
            raise ConfigurationError(
                f"EXACT stepper requires field_map = uniform, got {self.field_map}"
            )

    @property
    def u0(self) -> FourVector:
        """Initial four-velocity, time component completed from the mass shell."""
        return FourVector.from_spatial_velocity(self.u0_spatial)

    @property
    def x0_vector(self) -> FourVector:
        return FourVector.from_array(self.x0)

    @property
    def field(self) -> FieldTensor:
        return FieldTensor(self.E, self.B)

    @property
    def coupling(self) -> Coupling:
        return Coupling(self.k)

    def build_field_map(self) -> FieldMap:
        params = {
            key: float(value)
            for key in ("gradient", "bottle_length")
            if (value := getattr(self, key)) is not None
        }
        return build_field_map(self.field_map, self.field, **params)


def _parse_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError as e:
        raise ScenarioParseError(f"expected a real number, got '{text}'", key) from e


def _parse_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError as e:
        raise ScenarioParseError(f"expected an integer, got '{text}'", key) from e


def _parse_vector(size: int) -> Callable[[str, str], Tuple[float, ...]]:
    def parse(key: str, text: str) -> Tuple[float, ...]:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != size:
            raise ScenarioParseError(
                f"expected {size} comma-separated components, got {len(parts)}", key
            )
        return tuple(_parse_float(key, p) for p in parts)

    return parse


def _parse_stepper(key: str, text: str) -> Stepper:
    try:
        return Stepper(text.upper())
    except ValueError as e:
        choices = ", ".join(s.value for s in Stepper)
        raise ScenarioParseError(f"expected one of {choices}, got '{text}'", key) from e


def _parse_text(key: str, text: str) -> str:
    return text


PARSERS: Dict[str, Callable[[str, str], object]] = {
    "name": _parse_text,
    "k": _parse_float,
    "E": _parse_vector(3),
    "B": _parse_vector(3),
    "field_map": _parse_text,
    "x0": _parse_vector(4),
    "u0_spatial": _parse_vector(3),
    "dt": _parse_float,
    "n_steps": _parse_int,
    "stepper": _parse_stepper,
    "output_stride": _parse_int,
    "gradient": _parse_float,
    "bottle_length": _parse_float,
}


def _split_lines(text: str) -> Dict[str, str]:
    """key -> raw value text, rejecting malformed and duplicate lines."""
    entries: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {number}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARSERS:
            raise ScenarioParseError(f"unknown key on line {number}", key)
        if key in entries:
            raise ScenarioParseError(f"duplicate key on line {number}", key)
        entries[key] = value
    return entries


def parse_scenario(text: str) -> Scenario:
    """
    Parse and validate a scenario document.

    Raises:
        ScenarioParseError: missing, unknown, duplicate or mistyped keys
        ConfigurationError: EXACT stepper with a non-uniform field map
    """
    entries = _split_lines(text)
    for key in REQUIRED_KEYS:
        if key not in entries:
            raise ScenarioParseError("missing required key", key)

    values = {key: PARSERS[key](key, raw) for key, raw in entries.items()}
    logger.debug("Parsed scenario '%s' with %d keys", values["name"], len(values))
    return Scenario(**values)  # type: ignore[arg-type]


def load_scenario(path: Path) -> Scenario:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigurationError(f"cannot read scenario file {path}: {e}") from e
    return parse_scenario(text)


def _render_value(value: object) -> str:
    if isinstance(value, Stepper):
        return value.value
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_scenario(scenario: Scenario) -> str:
    """Canonical writer; parse_scenario(render_scenario(s)) == s."""
    lines: List[str] = [f"# Lorentz Lab scenario: {scenario.name}"]
    for key in REQUIRED_KEYS + OPTIONAL_KEYS:
        value = getattr(scenario, key)
        if value is None:
            continue
        lines.append(f"{key} = {_render_value(value)}")
    return "\n".join(lines) + "\n"

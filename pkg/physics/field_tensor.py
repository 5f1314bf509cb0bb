"""
Field Tensor
------------

Electric and magnetic fields as Lorentz-algebra generators: eps = k E and
b = k B, with k the charge-to-mass ratio in natural units (c = 1). Frame
changes act on fields through conjugation Q -> L Q L^-1.

Sign convention: the generator layout fixes du/dtau = k (u0 E + B x u) for the
spatial part, so a positive k B3 turns the spatial velocity counterclockwise
in the 1-2 plane.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from lorentz_lib.errors import ConfigurationError, DomainError, FieldEvaluationError

from .core_geometry import FourVector, LorentzMatrix
from .lie_algebra import Generator, rates_from_generator

Vector3 = Tuple[float, float, float]

# Allowed generator-pattern deviation after conjugation, relative to max(1, max|Q'|)
FRAME_TRANSFORM_TOLERANCE = 1e-10


def _vector3(values: Sequence[float], name: str) -> Vector3:
    if len(values) != 3:
        raise DomainError(f"{name} must have three components")
    x, y, z = (float(v) for v in values)
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise DomainError(f"{name} must be finite")
    return (x, y, z)


@dataclass(frozen=True)
class FieldTensor:
    """Electric field E and magnetic field B in natural units."""

    E: Vector3
    B: Vector3

    def __post_init__(self) -> None:
        object.__setattr__(self, "E", _vector3(self.E, "E"))
        object.__setattr__(self, "B", _vector3(self.B, "B"))

    @classmethod
    def zero(cls) -> "FieldTensor":
        return cls((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


@dataclass(frozen=True)
class Coupling:
    """Charge-to-mass ratio q/m."""

    k: float

    def __post_init__(self) -> None:
        k = float(self.k)
        if not math.isfinite(k):
            raise DomainError("coupling k must be finite")
        object.__setattr__(self, "k", k)


UNIT_COUPLING = Coupling(1.0)


def tensor_to_generator(f: FieldTensor, k: Coupling) -> Generator:
    return Generator(
        tuple(k.k * e for e in f.E),  # type: ignore[arg-type]
        tuple(k.k * b for b in f.B),  # type: ignore[arg-type]
    )


def generator_to_tensor(g: Generator, k: Coupling) -> FieldTensor:
    if k.k == 0.0:
        raise DomainError("cannot recover fields from a generator with k = 0")
    return FieldTensor(
        tuple(e / k.k for e in g.eps),  # type: ignore[arg-type]
        tuple(b / k.k for b in g.b),  # type: ignore[arg-type]
    )


def frame_transform(f: FieldTensor, k: Coupling, L: LorentzMatrix) -> FieldTensor:
    """
    Fields after the adjoint action Q -> L Q L^-1 of a Lorentz matrix.

    Conjugation is linear, so k scales in and out again: the fields are
    conjugated at unit coupling and any finite k (including 0) is accepted.
    """
    q = tensor_to_generator(f, UNIT_COUPLING).matrix
    conjugated = L.m @ q @ L.inverse().m
    tolerance = FRAME_TRANSFORM_TOLERANCE * max(1.0, float(np.max(np.abs(conjugated))))
    return generator_to_tensor(rates_from_generator(conjugated, tolerance), UNIT_COUPLING)


def field_invariants(f: FieldTensor) -> Tuple[float, float]:
    """(E.B, E.E - B.B)."""
    e = np.array(f.E)
    b = np.array(f.B)
    return float(e @ b), float(e @ e - b @ b)


def drift_velocity(f: FieldTensor) -> Vector3:
    """
    Three-velocity at which the force from crossed fields vanishes.

    Requires E perpendicular to B and |E| < |B|; returns B x E / |B|^2.
    """
    e = np.array(f.E)
    b = np.array(f.B)
    b2 = float(b @ b)
    if b2 == 0.0:
        raise DomainError("drift velocity needs a nonzero magnetic field")
    scale = math.sqrt(float(e @ e) * b2)
    if abs(float(e @ b)) > 1e-12 * max(1.0, scale):
        raise DomainError("drift velocity needs E perpendicular to B")
    if float(e @ e) >= b2:
        raise DomainError("no drift frame exists when |E| >= |B|")
    drift = np.cross(b, e) / b2
    return (float(drift[0]), float(drift[1]), float(drift[2]))


class FieldMapKind(str, Enum):
    UNIFORM = "UNIFORM"
    VARYING = "VARYING"


class FieldMap(ABC):
    """Pure function from spacetime position to field."""

    kind: FieldMapKind = FieldMapKind.VARYING
    name: str = "field"

    @abstractmethod
    def field_at(self, x: FourVector) -> FieldTensor:
        """Field at position x; must not depend on mutable state."""


class UniformFieldMap(FieldMap):
    kind = FieldMapKind.UNIFORM
    name = "uniform"

    def __init__(self, field: FieldTensor):
        self.field = field

    def field_at(self, x: FourVector) -> FieldTensor:
        return self.field

    def __repr__(self) -> str:
        return f"UniformFieldMap(E={self.field.E}, B={self.field.B})"


class CallableFieldMap(FieldMap):
    """Varying map wrapping a position -> (E, B) function."""

    kind = FieldMapKind.VARYING

    def __init__(
        self,
        func: Callable[[FourVector], Tuple[Sequence[float], Sequence[float]]],
        name: str = "callable",
    ):
        self._func = func
        self.name = name

    def field_at(self, x: FourVector) -> FieldTensor:
        e, b = self._func(x)
        return FieldTensor(tuple(e), tuple(b))  # type: ignore[arg-type]


class GradientBFieldMap(FieldMap):
    """Uniform E and B plus a gradient in B3 along x1: B3 = B3_0 + g x1."""

    kind = FieldMapKind.VARYING
    name = "gradient_b"

    def __init__(self, field: FieldTensor, gradient: float):
        self.field = field
        self.gradient = float(gradient)

    def field_at(self, x: FourVector) -> FieldTensor:
        b1, b2, b3 = self.field.B
        return FieldTensor(self.field.E, (b1, b2, b3 + self.gradient * x.c1))


class MagneticBottleFieldMap(FieldMap):
    """
    Axisymmetric mirror field about axis 3 with uniform E.

    B = B3_0 (-x1 x3 / L^2, -x2 x3 / L^2, 1 + (x3 / L)^2), divergence-free.
    """

    kind = FieldMapKind.VARYING
    name = "magnetic_bottle"

    def __init__(self, field: FieldTensor, bottle_length: float):
        if not bottle_length > 0.0:
            raise DomainError("bottle_length must be positive")
        self.field = field
        self.bottle_length = float(bottle_length)

    def field_at(self, x: FourVector) -> FieldTensor:
        b0 = self.field.B[2]
        inv_l2 = 1.0 / (self.bottle_length * self.bottle_length)
        return FieldTensor(
            self.field.E,
            (
                -b0 * x.c1 * x.c3 * inv_l2,
                -b0 * x.c2 * x.c3 * inv_l2,
                b0 * (1.0 + x.c3 * x.c3 * inv_l2),
            ),
        )


def evaluate(field_map: FieldMap, x: FourVector) -> FieldTensor:
    """
    Evaluate a field map.

    Raises:
        FieldEvaluationError: if the map yields a non-finite field at x
    """
    try:
        return field_map.field_at(x)
    except DomainError as e:
        raise FieldEvaluationError(
            f"field map '{field_map.name}' produced an invalid field ({e})", tuple(x)
        ) from e


FIELD_MAP_NAMES = ("uniform", "gradient_b", "magnetic_bottle")


def build_field_map(name: str, field: FieldTensor, **params: float) -> FieldMap:
    """Construct one of the named analytic field maps."""
    builders: Dict[str, Callable[[], FieldMap]] = {
        "uniform": lambda: UniformFieldMap(field),
        "gradient_b": lambda: GradientBFieldMap(field, params["gradient"]),
        "magnetic_bottle": lambda: MagneticBottleFieldMap(
            field, params["bottle_length"]
        ),
    }
    if name not in builders:
        raise ConfigurationError(
            f"unknown field map '{name}'. Supported: {', '.join(FIELD_MAP_NAMES)}"
        )
    try:
        return builders[name]()
    except KeyError as e:
        raise ConfigurationError(f"field map '{name}' requires parameter {e}") from e

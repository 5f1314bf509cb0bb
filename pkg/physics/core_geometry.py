"""
Core Geometry
-------------

Four-vector algebra over the Minkowski metric diag(+1, -1, -1, -1) and the
finite rotations and boosts of the homogeneous Lorentz group.

Matrices act on column four-vectors, row index alpha and column index lambda:
``u'^alpha = L^alpha_lambda u^lambda``. Index 0 is time. Angles are radians,
rapidities are dimensionless.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from lorentz_lib.errors import DomainError, StructuralError

# Minkowski metric, signature (+, -, -, -)
ETA: NDArray[np.float64] = np.diag([1.0, -1.0, -1.0, -1.0])
ETA.setflags(write=False)

# Metric preservation tolerance, relative to max(1, max|L|^2)
LORENTZ_TOLERANCE = 1e-12

DEFAULT_FACTOR_ORDER: Tuple[int, ...] = (1, 2, 3, 4, 5, 6)

# (row, column) pairs of the 2x2 block a rotation about each spatial axis acts on
_ROTATION_PLANES = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def _frozen(array: NDArray[np.float64]) -> NDArray[np.float64]:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FourVector:
    """A point or tangent vector in Minkowski spacetime (c = 1)."""

    c0: float
    c1: float
    c2: float
    c3: float

    def __post_init__(self) -> None:
        for name in ("c0", "c1", "c2", "c3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"four-vector component {name} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "FourVector":
        c0, c1, c2, c3 = (float(v) for v in values)
        return cls(c0, c1, c2, c3)

    @classmethod
    def from_spatial_velocity(cls, spatial: Sequence[float]) -> "FourVector":
        """Complete a spatial four-velocity part to a unit timelike vector."""
        ux, uy, uz = (float(v) for v in spatial)
        return cls(math.sqrt(1.0 + ux * ux + uy * uy + uz * uz), ux, uy, uz)

    @property
    def array(self) -> NDArray[np.float64]:
        return np.array([self.c0, self.c1, self.c2, self.c3])

    @property
    def spatial(self) -> Tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)

    @property
    def gamma(self) -> float:
        """Lorentz factor of a four-velocity (its time component)."""
        return self.c0

    def three_velocity(self) -> Tuple[float, float, float]:
        if self.c0 == 0.0:
            raise DomainError("three-velocity undefined for zero time component")
        return (self.c1 / self.c0, self.c2 / self.c0, self.c3 / self.c0)

    def __iter__(self) -> Iterator[float]:
        return iter((self.c0, self.c1, self.c2, self.c3))


def minkowski_inner(a: FourVector, b: FourVector) -> float:
    """Minkowski bilinear form a0*b0 - a1*b1 - a2*b2 - a3*b3."""
    return a.c0 * b.c0 - a.c1 * b.c1 - a.c2 * b.c2 - a.c3 * b.c3


def metric_defect(m: NDArray[np.float64]) -> float:
    """max|m^T eta m - eta|, zero for an exact Lorentz matrix."""
    m = np.asarray(m, dtype=np.float64)
    return float(np.max(np.abs(m.T @ ETA @ m - ETA)))


@dataclass(frozen=True)
class LorentzMatrix:
    """A proper orthochronous Lorentz transformation stored as a dense 4x4 array."""

    m: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        m = _frozen(self.m)
        if m.shape != (4, 4):
            raise StructuralError(f"expected a 4x4 matrix, got shape {m.shape}", 0.0, 0.0)
        if not np.all(np.isfinite(m)):
            raise StructuralError("matrix has non-finite entries", math.inf, 0.0)

        scale = max(1.0, float(np.max(np.abs(m)))) ** 2
        tolerance = LORENTZ_TOLERANCE * scale
        defect = metric_defect(m)
        if defect > tolerance:
            raise StructuralError("matrix does not preserve the metric", defect, tolerance)
        det_defect = abs(float(np.linalg.det(m)) - 1.0)
        if det_defect > tolerance * scale:
            raise StructuralError("determinant is not +1", det_defect, tolerance * scale)
        if m[0, 0] < 1.0 - tolerance:
            raise StructuralError(
                "transformation reverses time", 1.0 - float(m[0, 0]), tolerance
            )
        object.__setattr__(self, "m", m)

    @classmethod
    def from_array(cls, m: Sequence[Sequence[float]]) -> "LorentzMatrix":
        return cls(np.asarray(m, dtype=np.float64))

    @classmethod
    def identity(cls) -> "LorentzMatrix":
        return cls(np.eye(4))

    def inverse(self) -> "LorentzMatrix":
        """eta L^T eta, exact for Lorentz matrices."""
        return LorentzMatrix(ETA @ self.m.T @ ETA)

    def __matmul__(self, other: "LorentzMatrix") -> "LorentzMatrix":
        return compose(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LorentzMatrix):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self) -> int:
        return hash(self.m.tobytes())


def _check_axis(axis: int) -> None:
    if axis not in (1, 2, 3):
        raise DomainError(f"axis must be 1, 2 or 3, got {axis!r}")


def rotation_matrix(axis: int, phi: float) -> LorentzMatrix:
    """Finite spatial rotation by phi radians about axis 1, 2 or 3."""
    _check_axis(axis)
    if not math.isfinite(phi):
        raise DomainError("rotation angle must be finite")
    i, j = _ROTATION_PLANES[axis]
    c, s = math.cos(phi), math.sin(phi)
    m = np.eye(4)
    m[i, i] = c
    m[i, j] = -s
    m[j, i] = s
    m[j, j] = c
    return LorentzMatrix(m)


def boost_matrix(axis: int, psi: float) -> LorentzMatrix:
    """Pure boost of rapidity psi along axis 1, 2 or 3."""
    _check_axis(axis)
    if not math.isfinite(psi):
        raise DomainError("rapidity must be finite")
    ch, sh = math.cosh(psi), math.sinh(psi)
    m = np.eye(4)
    m[0, 0] = ch
    m[axis, axis] = ch
    m[0, axis] = sh
    m[axis, 0] = sh
    return LorentzMatrix(m)


def rapidity(beta: float) -> float:
    """Rapidity of a boost with speed beta (|beta| < 1)."""
    if not abs(beta) < 1.0:
        raise DomainError(f"speed must satisfy |beta| < 1, got {beta!r}")
    return math.atanh(beta)


def compose(a: LorentzMatrix, b: LorentzMatrix) -> LorentzMatrix:
    """Matrix product a.b (apply b first)."""
    return LorentzMatrix(a.m @ b.m)


def general_product(
    phi: Sequence[float],
    psi: Sequence[float],
    order: Sequence[int] = DEFAULT_FACTOR_ORDER,
) -> LorentzMatrix:
    """
    Product of the six single-axis factors, left to right in ``order``.

    Factors 1-3 are rotations by phi[0..2], factors 4-6 boosts by psi[0..2].
    Orders other than the default differ at second order in the angles.
    """
    if len(phi) != 3 or len(psi) != 3:
        raise DomainError("general_product expects three angles and three rapidities")
    if sorted(order) != list(DEFAULT_FACTOR_ORDER):
        raise DomainError(f"order must be a permutation of 1..6, got {tuple(order)}")

    result = np.eye(4)
    for index in order:
        if index <= 3:
            factor = rotation_matrix(index, float(phi[index - 1]))
        else:
            factor = boost_matrix(index - 3, float(psi[index - 4]))
        result = result @ factor.m
    return LorentzMatrix(result)


def apply(L: LorentzMatrix, u: FourVector) -> FourVector:
    """Transport a four-vector: L^alpha_lambda u^lambda."""
    return FourVector.from_array(L.m @ u.array)

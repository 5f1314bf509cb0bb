"""
Lie Algebra
-----------

Generators of the Lorentz group in the boost/rotation layout

    | 0    e1   e2   e3 |
    | e1   0   -b3   b2 |
    | e2   b3   0   -b1 |
    | e3  -b2   b1   0  |

with boost rates ``eps`` and rotation rates ``b`` per unit proper time.
Covers construction, read-back, the exponential map, commutators, the
six-factor product family with linear angles and its numerical derivative.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from lorentz_lib.errors import DomainError, StructuralError

from .core_geometry import ETA, LorentzMatrix, general_product

Matrix4 = NDArray[np.float64]
Rates = Tuple[float, float, float]
Curve = Callable[[float], Union[LorentzMatrix, Matrix4]]

# Finite-difference step for the fourth-order central stencil
DEFAULT_DERIVATIVE_STEP = 1e-3

# Taylor series stops once the next term's max entry drops below this
TAYLOR_TERM_THRESHOLD = 1e-16
# Scale the argument until its infinity norm is at most this before summing
SCALING_NORM_LIMIT = 0.5
MAX_TAYLOR_TERMS = 60

# Pattern tolerance used when re-reading commutators as generators
COMMUTATOR_TOLERANCE = 1e-12


def _rates(values: Sequence[float], name: str) -> Rates:
    if len(values) != 3:
        raise DomainError(f"{name} must have three components")
    x, y, z = (float(v) for v in values)
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise DomainError(f"{name} must be finite")
    return (x, y, z)


def generator_array(eps: Sequence[float], b: Sequence[float]) -> Matrix4:
    """Raw 4x4 generator matrix for boost rates eps and rotation rates b."""
    e1, e2, e3 = eps
    b1, b2, b3 = b
    return np.array(
        [
            [0.0, e1, e2, e3],
            [e1, 0.0, -b3, b2],
            [e2, b3, 0.0, -b1],
            [e3, -b2, b1, 0.0],
        ],
        dtype=np.float64,
    )


@dataclass(frozen=True)
class Generator:
    """Lie-algebra element with boost rates eps and rotation rates b."""

    eps: Rates
    b: Rates

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps", _rates(self.eps, "eps"))
        object.__setattr__(self, "b", _rates(self.b, "b"))

    @classmethod
    def zero(cls) -> "Generator":
        return cls((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))

    @cached_property
    def matrix(self) -> Matrix4:
        q = generator_array(self.eps, self.b)
        q.setflags(write=False)
        return q

    def boost_part(self) -> "Generator":
        return Generator(self.eps, (0.0, 0.0, 0.0))

    def rotation_part(self) -> "Generator":
        return Generator((0.0, 0.0, 0.0), self.b)

    def scaled(self, factor: float) -> "Generator":
        return Generator(
            tuple(factor * e for e in self.eps),  # type: ignore[arg-type]
            tuple(factor * r for r in self.b),  # type: ignore[arg-type]
        )

    def __add__(self, other: "Generator") -> "Generator":
        return Generator(
            tuple(x + y for x, y in zip(self.eps, other.eps)),  # type: ignore[arg-type]
            tuple(x + y for x, y in zip(self.b, other.b)),  # type: ignore[arg-type]
        )

    def __neg__(self) -> "Generator":
        return self.scaled(-1.0)


def generator_from_rates(eps: Sequence[float], b: Sequence[float]) -> Generator:
    return Generator(_rates(eps, "eps"), _rates(b, "b"))


def pattern_deviation(q: Matrix4) -> float:
    """Largest departure of q from the generator layout."""
    q = np.asarray(q, dtype=np.float64)
    diagonal = np.max(np.abs(np.diag(q)))
    time_symmetry = np.max(np.abs(q[0, 1:] - q[1:, 0]))
    spatial = q[1:, 1:]
    spatial_antisymmetry = np.max(np.abs(spatial + spatial.T))
    return float(max(diagonal, time_symmetry, spatial_antisymmetry))


def rates_from_generator(q: Matrix4, tol: float) -> Generator:
    """
    Read boost and rotation rates back out of a 4x4 matrix.

    Raises:
        StructuralError: if q departs from the generator layout by more than tol
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4, 4):
        raise StructuralError(f"expected a 4x4 matrix, got shape {q.shape}", math.inf, tol)
    if not np.all(np.isfinite(q)):
        raise StructuralError("matrix has non-finite entries", math.inf, tol)

    deviation = pattern_deviation(q)
    if deviation > tol:
        raise StructuralError("matrix is not a Lorentz generator", deviation, tol)

    # Symmetrized reads; exact when the pattern holds exactly
    eps = tuple((q[0, i] + q[i, 0]) / 2.0 for i in (1, 2, 3))
    b = (
        (q[3, 2] - q[2, 3]) / 2.0,
        (q[1, 3] - q[3, 1]) / 2.0,
        (q[2, 1] - q[1, 2]) / 2.0,
    )
    return Generator(eps, b)  # type: ignore[arg-type]


def antisymmetry_defect(gen: Generator) -> float:
    """max|eta Q + (eta Q)^T|; zero for every generator."""
    lowered = ETA @ gen.matrix
    return float(np.max(np.abs(lowered + lowered.T)))


@dataclass(frozen=True)
class ProductFamily:
    """tau -> product of the six single-axis factors with angles b*tau, eps*tau."""

    gen: Generator

    def __call__(self, tau: float) -> LorentzMatrix:
        phi = tuple(rate * tau for rate in self.gen.b)
        psi = tuple(rate * tau for rate in self.gen.eps)
        return general_product(phi, psi)


def parametrized_curve(gen: Generator) -> ProductFamily:
    return ProductFamily(gen)


def _as_array(value: Union[LorentzMatrix, Matrix4]) -> Matrix4:
    if isinstance(value, LorentzMatrix):
        return value.m
    return np.asarray(value, dtype=np.float64)


def derivative_at_zero(curve: Curve, h: float = DEFAULT_DERIVATIVE_STEP) -> Matrix4:
    """Fourth-order central difference of a matrix curve at tau = 0."""
    if not h > 0.0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")
    return (
        -_as_array(curve(2.0 * h))
        + 8.0 * _as_array(curve(h))
        - 8.0 * _as_array(curve(-h))
        + _as_array(curve(-2.0 * h))
    ) / (12.0 * h)


def expm_matrix(a: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    Matrix exponential by scaling and squaring with a truncated Taylor series.

    The argument is scaled by 2**-s until its infinity norm is at most
    SCALING_NORM_LIMIT, the series is summed until the next term's max entry
    falls below TAYLOR_TERM_THRESHOLD, and the result is squared s times.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expm needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("expm argument has non-finite entries")

    norm = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
    squarings = 0
    if norm > SCALING_NORM_LIMIT:
        squarings = int(math.ceil(math.log2(norm / SCALING_NORM_LIMIT)))
    scaled = a / (2.0**squarings)

    result = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for n in range(1, MAX_TAYLOR_TERMS + 1):
        term = term @ scaled / n
        result = result + term
        if np.max(np.abs(term)) < TAYLOR_TERM_THRESHOLD:
            break

    for _ in range(squarings):
        result = result @ result
    return result


def expm(gen: Generator, tau: float) -> LorentzMatrix:
    """exp(tau Q): the one-parameter subgroup generated by gen."""
    if not math.isfinite(tau):
        raise DomainError("tau must be finite")
    return LorentzMatrix(expm_matrix(tau * gen.matrix))


def commutator(a: Generator, b: Generator) -> Generator:
    """[A, B] = AB - BA, read back as a generator."""
    product = a.matrix @ b.matrix - b.matrix @ a.matrix
    scale = max(1.0, float(np.max(np.abs(a.matrix))) * float(np.max(np.abs(b.matrix))))
    return rates_from_generator(product, COMMUTATOR_TOLERANCE * scale)


def product_defect(gen: Generator, tau: float) -> float:
    """max|L_G(tau) - exp(tau Q)| for the six-factor family."""
    return float(np.max(np.abs(parametrized_curve(gen)(tau).m - expm(gen, tau).m)))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    log_x = np.log(np.asarray(xs, dtype=np.float64))
    log_y = np.log(np.asarray(ys, dtype=np.float64))
    slope, _intercept = np.polyfit(log_x, log_y, 1)
    return float(slope)


def product_defect_slope(gen: Generator, taus: Sequence[float]) -> float:
    """Order of agreement between the product family and exp(tau Q)."""
    defects = [product_defect(gen, tau) for tau in taus]
    if min(defects) <= 0.0:
        raise DomainError("product family coincides with exp(tau Q); slope undefined")
    return loglog_slope(taus, defects)

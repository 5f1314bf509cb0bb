"""
Dynamics
--------

Lorentz-force evolution du/dtau = Q(x) u, dx/dtau = u of a charged particle.

Three steppers are provided:
- EXACT: exp(Q dt) for u and the exact integral of u for x (uniform fields only)
- RK4: classical fourth-order Runge-Kutta on the 8-dimensional (x, u) state
- RK4_RENORM: RK4 followed by projection back onto the mass shell

Analytic oracles for hyperbolic and cyclotron motion are used to check them.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from lorentz_lib.errors import (
    ConfigurationError,
    DomainError,
    FieldEvaluationError,
    IntegratorAbort,
)
from lorentz_lib.logging import get_logger

from .core_geometry import FourVector, minkowski_inner
from .field_tensor import (
    Coupling,
    FieldMap,
    FieldMapKind,
    FieldTensor,
    evaluate,
    tensor_to_generator,
)
from .lie_algebra import expm_matrix, generator_array, loglog_slope

# Module logger
logger = get_logger("dynamics")

# Mass-shell defect beyond which integration stops
MASS_SHELL_ABORT = 1e-3
# Initial four-velocity must sit on the mass shell to this accuracy, relative to gamma^2
INITIAL_SHELL_TOLERANCE = 1e-9
# Loose invariant for an individual particle state
STATE_SHELL_TOLERANCE = 1e-6
# Largest spatial four-velocity |u| accepted from a scenario; rounding keeps the
# shell defect near 1e-8 there, far below MASS_SHELL_ABORT
MAX_SPATIAL_FOUR_VELOCITY = 1e4
# Steps between progress callbacks and verbose diagnostics
PROGRESS_CHUNK = 10_000

Array = NDArray[np.float64]
ProgressCallback = Callable[[int, int], None]


class Stepper(str, Enum):
    EXACT = "EXACT"
    RK4 = "RK4"
    RK4_RENORM = "RK4_RENORM"


def _shell_defect(u: Array) -> float:
    return abs(float(u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3]) - 1.0)


@dataclass(frozen=True)
class ParticleState:
    """Proper time, event and four-velocity of a particle."""

    tau: float
    x: FourVector
    u: FourVector

    @property
    def shell_defect(self) -> float:
        return abs(minkowski_inner(self.u, self.u) - 1.0)

    def check_mass_shell(self, tol: float = STATE_SHELL_TOLERANCE) -> None:
        if self.shell_defect > tol:
            raise DomainError(
                f"four-velocity off the mass shell by {self.shell_defect:.3e}"
            )


@dataclass(frozen=True)
class Trajectory:
    """States sampled at strictly increasing proper times."""

    tau: Array
    x: Array
    u: Array
    stepper: Stepper
    dt: float
    field_kind: FieldMapKind

    def __post_init__(self) -> None:
        n = len(self.tau)
        if n == 0:
            raise DomainError("trajectory has no states")
        if self.x.shape != (n, 4) or self.u.shape != (n, 4):
            raise DomainError("trajectory arrays have inconsistent shapes")
        if n > 1 and not np.all(np.diff(self.tau) > 0.0):
            raise DomainError("trajectory proper times must be strictly increasing")
        for array in (self.tau, self.x, self.u):
            array.setflags(write=False)

    def __len__(self) -> int:
        return len(self.tau)

    def __getitem__(self, index: int) -> ParticleState:
        return ParticleState(
            float(self.tau[index]),
            FourVector.from_array(self.x[index]),
            FourVector.from_array(self.u[index]),
        )

    def __iter__(self) -> Iterator[ParticleState]:
        for index in range(len(self)):
            yield self[index]

    @property
    def initial(self) -> ParticleState:
        return self[0]

    @property
    def final(self) -> ParticleState:
        return self[len(self) - 1]

    def shell_defects(self) -> Array:
        u = self.u
        return np.abs(u[:, 0] ** 2 - u[:, 1] ** 2 - u[:, 2] ** 2 - u[:, 3] ** 2 - 1.0)

    def decimate(self, stride: int) -> "Trajectory":
        """Every stride-th state; the final state is always kept."""
        if stride < 1:
            raise DomainError(f"stride must be at least 1, got {stride}")
        if stride == 1:
            return self
        indices = list(range(0, len(self), stride))
        if indices[-1] != len(self) - 1:
            indices.append(len(self) - 1)
        return Trajectory(
            self.tau[indices].copy(),
            self.x[indices].copy(),
            self.u[indices].copy(),
            self.stepper,
            self.dt,
            self.field_kind,
        )


def lorentz_force(u: FourVector, f: FieldTensor, k: Coupling) -> FourVector:
    """du/dtau = Q u with Q built from k E and k B."""
    return FourVector.from_array(tensor_to_generator(f, k).matrix @ u.array)


def exact_propagators(q: Array, dt: float) -> Tuple[Array, Array]:
    """
    Propagators (exp(Q dt), Phi(dt)) for a constant generator.

    Phi(dt) = sum_n Q^n dt^(n+1) / (n+1)! is read off the upper-right block
    of exp([[Q dt, I dt], [0, 0]]).
    """
    augmented = np.zeros((8, 8))
    augmented[:4, :4] = q * dt
    augmented[:4, 4:] = np.eye(4) * dt
    block = expm_matrix(augmented)
    return block[:4, :4], block[:4, 4:]


def _check_dt(dt: float) -> None:
    if not (math.isfinite(dt) and dt > 0.0):
        raise DomainError(f"dt must be positive, got {dt!r}")


def step_exact(s: ParticleState, f: FieldTensor, k: Coupling, dt: float) -> ParticleState:
    """Advance exactly through a constant field for proper time dt."""
    _check_dt(dt)
    propagator, phi = exact_propagators(tensor_to_generator(f, k).matrix, dt)
    u = s.u.array
    return ParticleState(
        s.tau + dt,
        FourVector.from_array(s.x.array + phi @ u),
        FourVector.from_array(propagator @ u),
    )


def _generator_source(field_map: FieldMap, k: Coupling) -> Callable[[Array], Array]:
    """Position -> generator matrix, constant for uniform maps."""
    if field_map.kind is FieldMapKind.UNIFORM:
        f = evaluate(field_map, FourVector(0.0, 0.0, 0.0, 0.0))
        q = generator_array([k.k * e for e in f.E], [k.k * b for b in f.B])
        return lambda x: q

    def source(x: Array) -> Array:
        try:
            position = FourVector.from_array(x)
        except DomainError as e:
            raise FieldEvaluationError(
                "non-finite position reached", [float(c) for c in x]
            ) from e
        f = evaluate(field_map, position)
        return generator_array([k.k * e for e in f.E], [k.k * b for b in f.B])

    return source


def _rk4_arrays(
    x: Array, u: Array, source: Callable[[Array], Array], dt: float
) -> Tuple[Array, Array]:
    k1x, k1u = u, source(x) @ u
    x2, u2 = x + 0.5 * dt * k1x, u + 0.5 * dt * k1u
    k2x, k2u = u2, source(x2) @ u2
    x3, u3 = x + 0.5 * dt * k2x, u + 0.5 * dt * k2u
    k3x, k3u = u3, source(x3) @ u3
    x4, u4 = x + dt * k3x, u + dt * k3u
    k4x, k4u = u4, source(x4) @ u4
    return (
        x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
    )


def step_rk4(
    s: ParticleState, field_map: FieldMap, k: Coupling, dt: float
) -> ParticleState:
    """One classical Runge-Kutta step; no mass-shell projection."""
    _check_dt(dt)
    x, u = _rk4_arrays(s.x.array, s.u.array, _generator_source(field_map, k), dt)
    return ParticleState(s.tau + dt, FourVector.from_array(x), FourVector.from_array(u))


def _renormalize_array(u: Array) -> Array:
    norm = float(u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3])
    if not (norm > 0.0 and u[0] > 0.0):
        raise DomainError("cannot renormalize a non-timelike or past-pointing vector")
    result: Array = u / math.sqrt(norm)
    return result


def renormalize(u: FourVector) -> FourVector:
    """Project a future-pointing timelike vector onto the mass shell."""
    return FourVector.from_array(_renormalize_array(u.array))


def _validate_run(
    x0: FourVector,
    u0: FourVector,
    field_map: FieldMap,
    dt: float,
    n_steps: int,
    stepper: Stepper,
) -> None:
    _check_dt(dt)
    if n_steps < 1:
        raise DomainError(f"n_steps must be at least 1, got {n_steps}")
    # rounding in the time component grows like gamma^2
    initial = ParticleState(0.0, x0, u0)
    initial.check_mass_shell(INITIAL_SHELL_TOLERANCE * max(1.0, u0.gamma * u0.gamma))
    if stepper is Stepper.EXACT and field_map.kind is not FieldMapKind.UNIFORM:
        raise ConfigurationError(
            f"EXACT stepper requires a uniform field map, got '{field_map.name}'"
        )


def integrate(
    x0: FourVector,
    u0: FourVector,
    field_map: FieldMap,
    k: Coupling,
    dt: float,
    n_steps: int,
    stepper: Stepper,
    progress_callback: Optional[ProgressCallback] = None,
) -> Trajectory:
    """
    Integrate n_steps fixed steps from (x0, u0) at tau = 0.

    Raises:
        DomainError: invalid dt, n_steps or initial four-velocity
        ConfigurationError: EXACT requested on a varying field map
        IntegratorAbort: mass-shell defect beyond MASS_SHELL_ABORT
    """
    stepper = Stepper(stepper)
    _validate_run(x0, u0, field_map, dt, n_steps, stepper)

    tau = np.arange(n_steps + 1, dtype=np.float64) * dt
    x = np.empty((n_steps + 1, 4))
    u = np.empty((n_steps + 1, 4))
    x[0] = x0.array
    u[0] = u0.array

    with logger.timer(f"{stepper.value} integration of {n_steps} steps"):
        if stepper is Stepper.EXACT:
            _run_exact(x, u, field_map, k, dt, n_steps, progress_callback)
        else:
            _run_rk4(x, u, field_map, k, dt, n_steps, stepper, progress_callback)

    return Trajectory(tau, x, u, stepper, dt, field_map.kind)


def _report(
    step: int,
    n_steps: int,
    dt: float,
    u: Array,
    progress_callback: Optional[ProgressCallback],
) -> None:
    logger.log_step_diagnostic(step, step * dt, _shell_defect(u))
    if progress_callback:
        progress_callback(step, n_steps)


def _run_exact(
    x: Array,
    u: Array,
    field_map: FieldMap,
    k: Coupling,
    dt: float,
    n_steps: int,
    progress_callback: Optional[ProgressCallback],
) -> None:
    f = evaluate(field_map, FourVector.from_array(x[0]))
    propagator, phi = exact_propagators(tensor_to_generator(f, k).matrix, dt)

    for i in range(n_steps):
        ui = u[i]
        x[i + 1] = x[i] + phi @ ui
        u[i + 1] = propagator @ ui
        if (i + 1) % PROGRESS_CHUNK == 0:
            _report(i + 1, n_steps, dt, u[i + 1], progress_callback)

    defects = np.abs(u[:, 0] ** 2 - u[:, 1] ** 2 - u[:, 2] ** 2 - u[:, 3] ** 2 - 1.0)
    bad = np.flatnonzero(~(defects <= MASS_SHELL_ABORT))
    if bad.size:
        step = int(bad[0])
        raise IntegratorAbort(step, step * dt, float(defects[step]), Stepper.EXACT.value)
    _report(n_steps, n_steps, dt, u[n_steps], progress_callback)


def _run_rk4(
    x: Array,
    u: Array,
    field_map: FieldMap,
    k: Coupling,
    dt: float,
    n_steps: int,
    stepper: Stepper,
    progress_callback: Optional[ProgressCallback],
) -> None:
    source = _generator_source(field_map, k)
    renorm = stepper is Stepper.RK4_RENORM

    for i in range(n_steps):
        xi, ui = _rk4_arrays(x[i], u[i], source, dt)
        if renorm:
            try:
                ui = _renormalize_array(ui)
            except DomainError as e:
                raise IntegratorAbort(i + 1, (i + 1) * dt, math.inf, stepper.value) from e
        defect = _shell_defect(ui)
        if not defect <= MASS_SHELL_ABORT:
            raise IntegratorAbort(i + 1, (i + 1) * dt, defect, stepper.value)
        x[i + 1] = xi
        u[i + 1] = ui
        if (i + 1) % PROGRESS_CHUNK == 0:
            _report(i + 1, n_steps, dt, ui, progress_callback)

    _report(n_steps, n_steps, dt, u[n_steps], progress_callback)


def _steps_for(tau: float, dt: float) -> int:
    n = int(round(tau / dt))
    if n < 1 or not math.isclose(n * dt, tau, rel_tol=1e-9, abs_tol=0.0):
        raise DomainError(f"tau={tau!r} is not a positive multiple of dt={dt!r}")
    return n


def flow_group_defect(
    x0: FourVector,
    u0: FourVector,
    field_map: FieldMap,
    k: Coupling,
    tau1: float,
    tau2: float,
    dt: Optional[float] = None,
    stepper: Stepper = Stepper.EXACT,
) -> float:
    """
    Max component difference between flowing tau1 then tau2 and flowing tau1 + tau2.

    With dt=None every leg is a single step (EXACT only); otherwise both
    tau1 and tau2 must be multiples of dt.
    """
    if dt is None:
        if stepper is not Stepper.EXACT:
            raise DomainError(f"{stepper.value} needs an explicit dt")
        plan = ((tau1, 1), (tau2, 1), (tau1 + tau2, 1))
    else:
        steps1, steps2 = _steps_for(tau1, dt), _steps_for(tau2, dt)
        plan = ((dt, steps1), (dt, steps2), (dt, steps1 + steps2))

    (dt1, n1), (dt2, n2), (dt3, n3) = plan
    first = integrate(x0, u0, field_map, k, dt1, n1, stepper).final
    second = integrate(first.x, first.u, field_map, k, dt2, n2, stepper).final
    direct = integrate(x0, u0, field_map, k, dt3, n3, stepper).final
    return float(
        max(
            np.max(np.abs(second.x.array - direct.x.array)),
            np.max(np.abs(second.u.array - direct.u.array)),
        )
    )


def oracle_hyperbolic(E0: float, k: Coupling, tau: float) -> ParticleState:
    """Closed-form motion from rest at the origin in a uniform E along axis 1."""
    a = k.k * E0
    if a == 0.0:
        return ParticleState(
            tau, FourVector(tau, 0.0, 0.0, 0.0), FourVector(1.0, 0.0, 0.0, 0.0)
        )
    ch, sh = math.cosh(a * tau), math.sinh(a * tau)
    half = math.sinh(0.5 * a * tau)
    return ParticleState(
        tau,
        FourVector(sh / a, 2.0 * half * half / a, 0.0, 0.0),
        FourVector(ch, sh, 0.0, 0.0),
    )


def oracle_cyclotron(B0: float, k: Coupling, u_perp: float, tau: float) -> ParticleState:
    """
    Closed-form gyration in a uniform B along axis 3.

    Starts at the origin with u = (gamma, u_perp, 0, 0); the spatial velocity
    turns at proper-time rate k*B0 (counterclockwise for k*B0 > 0) on a circle
    of radius u_perp / |k*B0| centred at (0, u_perp / (k*B0)).
    """
    gamma = math.sqrt(1.0 + u_perp * u_perp)
    omega = k.k * B0
    if omega == 0.0:
        return ParticleState(
            tau,
            FourVector(gamma * tau, u_perp * tau, 0.0, 0.0),
            FourVector(gamma, u_perp, 0.0, 0.0),
        )
    angle = omega * tau
    half = math.sin(0.5 * angle)
    return ParticleState(
        tau,
        FourVector(
            gamma * tau,
            u_perp * math.sin(angle) / omega,
            2.0 * u_perp * half * half / omega,
            0.0,
        ),
        FourVector(gamma, u_perp * math.cos(angle), u_perp * math.sin(angle), 0.0),
    )


def state_error(a: ParticleState, b: ParticleState) -> float:
    """Max component difference over x and u."""
    return float(
        max(
            np.max(np.abs(a.x.array - b.x.array)),
            np.max(np.abs(a.u.array - b.u.array)),
        )
    )


def convergence_slope(errors: Sequence[float], dts: Sequence[float]) -> float:
    """Observed order of a stepper: log-log slope of global error against dt."""
    if len(errors) != len(dts) or len(errors) < 2:
        raise DomainError("convergence slope needs at least two (dt, error) pairs")
    if min(errors) <= 0.0:
        raise DomainError("convergence slope needs strictly positive errors")
    return loglog_slope(dts, errors)

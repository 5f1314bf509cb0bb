"""
Verify module for Lorentz Lab

Property suite behind ``lorentz-lab verify``: each property draws its own
seeded random inputs, measures a worst-case deviation and compares it with
a threshold. Properties run concurrently; results are always reported in
suite order so the report depends only on (seed, trials).
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from physics.core_geometry import (
    FourVector,
    LorentzMatrix,
    boost_matrix,
    compose,
    minkowski_inner,
    rotation_matrix,
)
from physics.dynamics import (
    ParticleState,
    Stepper,
    convergence_slope,
    flow_group_defect,
    integrate,
    lorentz_force,
    oracle_cyclotron,
    oracle_hyperbolic,
    state_error,
)
from physics.field_tensor import (
    Coupling,
    FieldTensor,
    UniformFieldMap,
    field_invariants,
    frame_transform,
)
from physics.lie_algebra import (
    Generator,
    antisymmetry_defect,
    derivative_at_zero,
    expm,
    parametrized_curve,
    product_defect_slope,
)

from .errors import LorentzLabError
from .logging import get_logger

logger = get_logger("verify")

# Thresholds
DERIVATIVE_TOLERANCE = 1e-9
GROUP_LAW_TOLERANCE = 1e-12
SINGLE_AXIS_TOLERANCE = 1e-13
ANTISYMMETRY_TOLERANCE = 1e-12
INVARIANT_TOLERANCE = 1e-10
ROTATION_NORM_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-10
CLOSURE_TOLERANCE = 1e-9
MASS_SHELL_TOLERANCE = 1e-9
FLOW_GROUP_TOLERANCE = 1e-12
RK4_ORDER = 4.0
RK4_ORDER_BAND = 0.2
PRODUCT_SLOPE_MINIMUM = 1.9

# Mass-shell run length: 10^4 steps per trial, capped at the full 10^6-step run
MASS_SHELL_STEPS_PER_TRIAL = 10_000
MASS_SHELL_MAX_STEPS = 1_000_000
# Cap on generators used for the (comparatively slow) slope fits
MAX_SLOPE_SAMPLES = 20
SINGLE_AXIS_SAMPLES = 20
DEFAULT_WORKERS = 4

ProgressCallback = Callable[[str, int, int], None]


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of one property: measured worst case against a threshold."""

    name: str
    description: str
    measured: float
    threshold: float
    passed: bool
    relation: str = "<="
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    trials: int
    results: Tuple[PropertyResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.passed]


def _at_most(name: str, description: str, measured: float, threshold: float) -> PropertyResult:
    return PropertyResult(name, description, measured, threshold, measured <= threshold)


def _random_generator(rng: np.random.Generator, bound: float) -> Generator:
    rates = rng.uniform(-bound, bound, size=6)
    return Generator(tuple(rates[:3]), tuple(rates[3:]))  # type: ignore[arg-type]


def _random_field(rng: np.random.Generator) -> FieldTensor:
    values = rng.uniform(-1.0, 1.0, size=6)
    return FieldTensor(tuple(values[:3]), tuple(values[3:]))  # type: ignore[arg-type]


def _random_lorentz(rng: np.random.Generator, max_rapidity: float) -> LorentzMatrix:
    rotation = rotation_matrix(int(rng.integers(1, 4)), float(rng.uniform(-math.pi, math.pi)))
    boost = boost_matrix(
        int(rng.integers(1, 4)), float(rng.uniform(-max_rapidity, max_rapidity))
    )
    return compose(boost, rotation)


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def check_generator_derivative(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        gen = _random_generator(rng, 1.0)
        derivative = derivative_at_zero(parametrized_curve(gen))
        worst = max(worst, float(np.max(np.abs(derivative - gen.matrix))))
    return _at_most(
        "generator_derivative",
        "d/dtau of the six-factor product at 0 equals the generator",
        worst,
        DERIVATIVE_TOLERANCE,
    )


def check_group_law(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    for _ in range(trials):
        gen = _random_generator(rng, 2.0)
        tau1, tau2 = rng.uniform(-2.0, 2.0, size=2)
        composed = expm(gen, float(tau1)).m @ expm(gen, float(tau2)).m
        worst = max(worst, _relative(composed, expm(gen, float(tau1 + tau2)).m))
    return _at_most(
        "group_law",
        "exp(t1 Q) exp(t2 Q) = exp((t1 + t2) Q), relative to max(1, |entry|)",
        worst,
        GROUP_LAW_TOLERANCE,
    )


def check_single_axis_exponential(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    zero = (0.0, 0.0, 0.0)
    for axis in (1, 2, 3):
        unit = tuple(1.0 if i == axis - 1 else 0.0 for i in range(3))
        rotation = Generator(zero, unit)  # type: ignore[arg-type]
        boost = Generator(unit, zero)  # type: ignore[arg-type]
        for angle in np.linspace(-5.0, 5.0, SINGLE_AXIS_SAMPLES):
            angle = float(angle)
            worst = max(
                worst,
                _relative(expm(rotation, angle).m, rotation_matrix(axis, angle).m),
                _relative(expm(boost, angle).m, boost_matrix(axis, angle).m),
            )
    return _at_most(
        "single_axis_exponential",
        "exp of single-rate generators reproduces the finite rotations and boosts",
        worst,
        SINGLE_AXIS_TOLERANCE,
    )


def check_antisymmetry(rng: np.random.Generator, trials: int) -> PropertyResult:
    exact = 0.0
    orthogonality = 0.0
    k = Coupling(1.0)
    for _ in range(10 * trials):
        gen = _random_generator(rng, 1.0)
        exact = max(exact, antisymmetry_defect(gen))
        u = FourVector.from_array(rng.uniform(-10.0, 10.0, size=4))
        field = FieldTensor(gen.eps, gen.b)
        orthogonality = max(
            orthogonality, abs(minkowski_inner(lorentz_force(u, field, k), u))
        )
    measured = max(exact, orthogonality)
    return PropertyResult(
        "antisymmetry",
        "eta Q is antisymmetric (exactly) and <Qu, u> vanishes",
        measured,
        ANTISYMMETRY_TOLERANCE,
        exact == 0.0 and orthogonality <= ANTISYMMETRY_TOLERANCE,
        detail=f"eta Q defect {exact:.1e}",
    )


def check_field_invariants(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    k = Coupling(1.0)
    for _ in range(trials):
        field = _random_field(rng)
        transformed = frame_transform(field, k, _random_lorentz(rng, 3.0))
        before = np.array(field_invariants(field))
        after = np.array(field_invariants(transformed))
        worst = max(worst, float(np.max(np.abs(after - before))))
    return _at_most(
        "field_invariants",
        "E.B and E^2 - B^2 survive frame_transform",
        worst,
        INVARIANT_TOLERANCE,
    )


def _field_array(f: FieldTensor) -> np.ndarray:
    return np.array(f.E + f.B)


def check_adjoint_composition(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    k = Coupling(1.0)
    for _ in range(trials):
        field = _random_field(rng)
        first = _random_lorentz(rng, 1.5)
        second = _random_lorentz(rng, 1.5)
        at_once = frame_transform(field, k, compose(first, second))
        stepwise = frame_transform(frame_transform(field, k, second), k, first)
        worst = max(worst, _relative(_field_array(at_once), _field_array(stepwise)))
    return _at_most(
        "adjoint_composition",
        "transforming by L1 L2 equals transforming by L2 then L1",
        worst,
        INVARIANT_TOLERANCE,
    )


def check_rotation_covariance(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    k = Coupling(1.0)
    for _ in range(trials):
        field = _random_field(rng)
        rotation = rotation_matrix(
            int(rng.integers(1, 4)), float(rng.uniform(-math.pi, math.pi))
        )
        rotated = frame_transform(field, k, rotation)
        for before, after in ((field.E, rotated.E), (field.B, rotated.B)):
            worst = max(worst, abs(float(np.linalg.norm(after) - np.linalg.norm(before))))
    return _at_most(
        "rotation_covariance",
        "spatial rotations keep |E| and |B|",
        worst,
        ROTATION_NORM_TOLERANCE,
    )


def check_hyperbolic_oracle(rng: np.random.Generator, trials: int) -> PropertyResult:
    k = Coupling(1.0)
    field = FieldTensor((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    tau_total, n_steps = 5.0, 1000
    trajectory = integrate(
        FourVector(0.0, 0.0, 0.0, 0.0),
        FourVector(1.0, 0.0, 0.0, 0.0),
        UniformFieldMap(field),
        k,
        tau_total / n_steps,
        n_steps,
        Stepper.EXACT,
    )
    worst = 0.0
    for index in range(0, n_steps + 1, 50):
        state = trajectory[index]
        oracle = oracle_hyperbolic(1.0, k, state.tau)
        scale = max(1.0, float(np.max(np.abs(oracle.u.array))))
        worst = max(worst, state_error(state, oracle) / scale)
    return _at_most(
        "hyperbolic_oracle",
        "EXACT stepper follows cosh/sinh motion (kE0 = 1, tau in [0, 5])",
        worst,
        ORACLE_TOLERANCE,
    )


def check_cyclotron_closure(rng: np.random.Generator, trials: int) -> PropertyResult:
    k = Coupling(1.0)
    b0, u_perp, n_steps = 1.0, 0.5, 1000
    period = 2.0 * math.pi / (k.k * b0)
    start = oracle_cyclotron(b0, k, u_perp, 0.0)
    trajectory = integrate(
        start.x,
        start.u,
        UniformFieldMap(FieldTensor((0.0, 0.0, 0.0), (0.0, 0.0, b0))),
        k,
        period / n_steps,
        n_steps,
        Stepper.EXACT,
    )
    final = trajectory.final
    radius = u_perp / abs(k.k * b0)
    closure = float(np.max(np.abs(np.array(final.x.spatial) - np.array(start.x.spatial))))
    oracle_gap = state_error(final, oracle_cyclotron(b0, k, u_perp, final.tau))
    return PropertyResult(
        "cyclotron_closure",
        "EXACT orbit closes after one period (relative to radius)",
        closure / radius,
        CLOSURE_TOLERANCE,
        closure / radius <= CLOSURE_TOLERANCE and oracle_gap <= ORACLE_TOLERANCE,
        detail=f"oracle gap {oracle_gap:.1e}",
    )


def mass_shell_steps(trials: int) -> int:
    return min(MASS_SHELL_STEPS_PER_TRIAL * trials, MASS_SHELL_MAX_STEPS)


def check_mass_shell(rng: np.random.Generator, trials: int) -> PropertyResult:
    k = Coupling(1.0)
    field = FieldTensor((0.3, 0.0, 0.0), (0.0, 0.0, 1.0))
    n_steps = mass_shell_steps(trials)
    trajectory = integrate(
        FourVector(0.0, 0.0, 0.0, 0.0),
        FourVector.from_spatial_velocity((0.2, 0.1, 0.3)),
        UniformFieldMap(field),
        k,
        1e-2,
        n_steps,
        Stepper.EXACT,
    )
    return _at_most(
        "mass_shell",
        f"EXACT keeps <u, u> = 1 over {n_steps} steps in crossed E/B",
        float(np.max(trajectory.shell_defects())),
        MASS_SHELL_TOLERANCE,
    )


def _rk4_errors(
    oracle: Callable[[float], ParticleState],
    field: FieldTensor,
    k: Coupling,
    tau_total: float,
    exponents: range,
) -> Tuple[List[float], List[float]]:
    start = oracle(0.0)
    dts: List[float] = []
    errors: List[float] = []
    for exponent in exponents:
        n_steps = 2**exponent
        final = integrate(
            start.x,
            start.u,
            UniformFieldMap(field),
            k,
            tau_total / n_steps,
            n_steps,
            Stepper.RK4,
        ).final
        dts.append(tau_total / n_steps)
        errors.append(state_error(final, oracle(final.tau)))
    return dts, errors


def check_rk4_order(rng: np.random.Generator, trials: int) -> PropertyResult:
    k = Coupling(1.0)
    exponents = range(4, 10)
    cases = {
        "hyperbolic": (
            lambda tau: oracle_hyperbolic(1.0, k, tau),
            FieldTensor((1.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
            4.0,
        ),
        "cyclotron": (
            lambda tau: oracle_cyclotron(1.0, k, 0.5, tau),
            FieldTensor((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
            2.0 * math.pi,
        ),
    }
    slopes: Dict[str, float] = {}
    for name, (oracle, field, tau_total) in cases.items():
        dts, errors = _rk4_errors(oracle, field, k, tau_total, exponents)
        slopes[name] = convergence_slope(errors, dts)
    worst = max(abs(s - RK4_ORDER) for s in slopes.values())
    detail = ", ".join(f"{name} slope {slope:.3f}" for name, slope in slopes.items())
    return PropertyResult(
        "rk4_order",
        "RK4 global error scales as dt^4 against both oracles",
        worst,
        RK4_ORDER_BAND,
        worst <= RK4_ORDER_BAND,
        relation="|slope-4|<=",
        detail=detail,
    )


def check_product_defect(rng: np.random.Generator, trials: int) -> PropertyResult:
    taus = np.logspace(-4.0, -1.0, 7)
    slopes = [
        product_defect_slope(_random_generator(rng, 1.0), taus)
        for _ in range(min(trials, MAX_SLOPE_SAMPLES))
    ]
    worst = min(slopes)
    return PropertyResult(
        "product_defect_slope",
        "six-factor product departs from exp(tau Q) at second order",
        worst,
        PRODUCT_SLOPE_MINIMUM,
        worst >= PRODUCT_SLOPE_MINIMUM,
        relation=">=",
    )


def check_flow_group(rng: np.random.Generator, trials: int) -> PropertyResult:
    worst = 0.0
    k = Coupling(1.0)
    for _ in range(min(trials, MAX_SLOPE_SAMPLES)):
        field_map = UniformFieldMap(_random_field(rng))
        u0 = FourVector.from_spatial_velocity(rng.uniform(-1.0, 1.0, size=3))
        tau1, tau2 = rng.uniform(0.1, 1.0, size=2)
        defect = flow_group_defect(
            FourVector(0.0, 0.0, 0.0, 0.0), u0, field_map, k, float(tau1), float(tau2)
        )
        scale = max(1.0, float(np.max(np.abs(u0.array))))
        worst = max(worst, defect / scale)
    return _at_most(
        "flow_group",
        "EXACT flow for tau1 then tau2 equals flow for tau1 + tau2",
        worst,
        FLOW_GROUP_TOLERANCE,
    )


PropertyCheck = Callable[[np.random.Generator, int], PropertyResult]

PROPERTY_SUITE: Tuple[Tuple[str, PropertyCheck], ...] = (
    ("generator_derivative", check_generator_derivative),
    ("group_law", check_group_law),
    ("single_axis_exponential", check_single_axis_exponential),
    ("antisymmetry", check_antisymmetry),
    ("field_invariants", check_field_invariants),
    ("adjoint_composition", check_adjoint_composition),
    ("rotation_covariance", check_rotation_covariance),
    ("hyperbolic_oracle", check_hyperbolic_oracle),
    ("cyclotron_closure", check_cyclotron_closure),
    ("mass_shell", check_mass_shell),
    ("flow_group", check_flow_group),
    ("rk4_order", check_rk4_order),
    ("product_defect_slope", check_product_defect),
)


def _run_property(
    index: int, name: str, check: PropertyCheck, seed: int, trials: int
) -> PropertyResult:
    rng = np.random.default_rng([seed, index])
    try:
        with logger.timer(f"Property {name}"):
            result = check(rng, trials)
    except (LorentzLabError, ArithmeticError, ValueError) as e:
        logger.log_error_context(e, {"property": name, "seed": seed})
        return PropertyResult(
            name, "raised an error", math.inf, 0.0, False, detail=f"{type(e).__name__}: {e}"
        )
    logger.log_property_result(result.name, result.passed, result.measured, result.threshold)
    return result


def run_verification(
    seed: int,
    trials: int,
    workers: int = DEFAULT_WORKERS,
    progress_callback: Optional[ProgressCallback] = None,
) -> VerificationReport:
    """Run the full property suite; deterministic in (seed, trials)."""
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    workers = max(1, min(workers, len(PROPERTY_SUITE)))
    logger.debug("Running %d properties with %d workers", len(PROPERTY_SUITE), workers)

    results: Dict[int, PropertyResult] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {
            executor.submit(_run_property, index, name, check, seed, trials): index
            for index, (name, check) in enumerate(PROPERTY_SUITE)
        }
        for completed, future in enumerate(as_completed(future_to_index), start=1):
            index = future_to_index[future]
            results[index] = future.result()
            if progress_callback:
                progress_callback(PROPERTY_SUITE[index][0], completed, len(PROPERTY_SUITE))

    ordered = tuple(results[i] for i in range(len(PROPERTY_SUITE)))
    return VerificationReport(seed, trials, ordered)

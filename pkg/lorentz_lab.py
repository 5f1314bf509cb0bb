"""
Lorentz Lab (Core Module)
-------------------------

Core functionality behind the command line: running scenarios through the
integrators, changing the frame of a field, and driving the property suite.
Kept separate from CLI concerns so each piece can be called directly.
"""

import time
from dataclasses import dataclass
from typing import Optional, Tuple

import pyfiglet
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress
from rich.table import Table

from lorentz_lib.errors import ConfigurationError
from lorentz_lib.logging import get_logger
from lorentz_lib.outputs import TABLE_MINIMUM_WIDTH
from lorentz_lib.scenario import Scenario
from lorentz_lib.verify import DEFAULT_WORKERS, VerificationReport, run_verification
from physics.core_geometry import (
    LorentzMatrix,
    boost_matrix,
    compose,
    rapidity,
    rotation_matrix,
)
from physics.dynamics import Trajectory, integrate
from physics.field_tensor import (
    Coupling,
    FieldTensor,
    field_invariants,
    frame_transform,
)

# Global components
console = Console()
logger = get_logger()

# Invariant drift accepted by the transform check, relative to max(1, |invariant|)
TRANSFORM_CHECK_TOLERANCE = 1e-10


def display_banner(debug: bool) -> str:
    """Display fancy ASCII banner."""
    try:
        banner = pyfiglet.figlet_format("Lorentz Lab", font="slant")
        output = (
            f"[bold cyan]{banner}[/bold cyan]"
            if not debug
            else f"[bold green]{banner}[/bold green]"
        )
    except (pyfiglet.FontNotFound, pyfiglet.FigletError, OSError):
        # Fallback if pyfiglet fails
        output = "[bold cyan]╔═══════════════════════════════════════════════════════════╗[/bold cyan]\n"
        output += "[bold cyan]║                       LORENTZ LAB                        ║[/bold cyan]\n"
        output += "[bold cyan]╚═══════════════════════════════════════════════════════════╝[/bold cyan]"

    output += "\n[dim]Lorentz-group dynamics of charged particles[/dim]\n"

    console.print(output)
    return output


def display_scenario_panel(
    scenario: Scenario, stride: int, output_format: str, debug: bool
) -> None:
    """Display the scenario configuration panel."""
    config_table = Table(show_header=False, box=None, min_width=TABLE_MINIMUM_WIDTH)
    config_table.add_column("Parameter", style="cyan", width=18, highlight=True)
    config_table.add_column("Value", style="yellow", width=60, highlight=True)

    config_table.add_row("Scenario", scenario.name)
    config_table.add_row("Stepper", scenario.stepper.value)
    config_table.add_row("Field map", scenario.field_map)
    config_table.add_row("k", repr(scenario.k))
    config_table.add_row("E", ", ".join(repr(v) for v in scenario.E))
    config_table.add_row("B", ", ".join(repr(v) for v in scenario.B))
    if scenario.gradient is not None:
        config_table.add_row("Gradient", repr(scenario.gradient))
    if scenario.bottle_length is not None:
        config_table.add_row("Bottle length", repr(scenario.bottle_length))
    config_table.add_row("x0", ", ".join(repr(v) for v in scenario.x0))
    config_table.add_row("u0", ", ".join(f"{v:.12g}" for v in scenario.u0))
    config_table.add_row(
        "Steps", f"{scenario.n_steps} × dt={scenario.dt!r} (tau_end={scenario.n_steps * scenario.dt:.6g})"
    )
    config_table.add_row("Output stride", str(stride))
    config_table.add_row("Output", output_format.upper())

    console.print(
        Panel(
            config_table,
            title="[bold white]Configuration[/bold white]",
            title_align="center",
            border_style="bright_blue" if not debug else "green",
            padding=(0, 1),
        )
    )


def run_simulation(
    scenario: Scenario, progress: Optional[Progress] = None
) -> Tuple[Trajectory, float]:
    """
    Integrate a scenario.

    Returns:
        tuple: (trajectory, wall-clock duration in seconds)
    """
    field_map = scenario.build_field_map()
    logger.debug(
        "Simulating '%s': %s on %r, %d steps",
        scenario.name,
        scenario.stepper.value,
        field_map,
        scenario.n_steps,
    )

    task = None
    if progress:
        task = progress.add_task(
            f"🧮 {scenario.stepper.value} integration", total=scenario.n_steps
        )

    def update_progress(step: int, total: int) -> None:
        if progress and task is not None:
            progress.update(task, completed=step)

    start_time = time.perf_counter()
    trajectory = integrate(
        scenario.x0_vector,
        scenario.u0,
        field_map,
        scenario.coupling,
        scenario.dt,
        scenario.n_steps,
        scenario.stepper,
        progress_callback=update_progress,
    )
    duration = time.perf_counter() - start_time

    logger.log_integration_progress(
        scenario.stepper.value, scenario.n_steps, duration, scenario=scenario.name
    )
    return trajectory, duration


def build_transformation(
    boost_axis: Optional[int] = None,
    boost_rapidity: Optional[float] = None,
    velocity: Optional[float] = None,
    rotation_axis: Optional[int] = None,
    angle: Optional[float] = None,
) -> LorentzMatrix:
    """
    Assemble the frame change requested on the command line.

    A boost (axis plus rapidity or velocity) and a rotation (axis plus angle)
    may be given together; the rotation is applied first. Neither yields the
    identity.

    Raises:
        ConfigurationError: incomplete or conflicting parameters
    """
    transformation = LorentzMatrix.identity()

    if rotation_axis is not None or angle is not None:
        if rotation_axis is None or angle is None:
            raise ConfigurationError("a rotation needs both --rotation-axis and --angle")
        transformation = rotation_matrix(rotation_axis, angle)

    boost_given = boost_axis is not None or boost_rapidity is not None or velocity is not None
    if boost_given:
        if boost_rapidity is not None and velocity is not None:
            raise ConfigurationError("give either --rapidity or --velocity, not both")
        if boost_axis is None or (boost_rapidity is None and velocity is None):
            raise ConfigurationError(
                "a boost needs --boost-axis and one of --rapidity / --velocity"
            )
        psi = boost_rapidity if boost_rapidity is not None else rapidity(velocity)  # type: ignore[arg-type]
        transformation = compose(boost_matrix(boost_axis, psi), transformation)

    return transformation


@dataclass(frozen=True)
class TransformResult:
    before: FieldTensor
    after: FieldTensor
    invariants_before: Tuple[float, float]
    invariants_after: Tuple[float, float]

    @property
    def invariant_drift(self) -> float:
        return max(
            abs(a - b) / max(1.0, abs(b))
            for a, b in zip(self.invariants_after, self.invariants_before)
        )

    @property
    def passed(self) -> bool:
        return self.invariant_drift <= TRANSFORM_CHECK_TOLERANCE


def run_transform(field: FieldTensor, k: Coupling, transformation: LorentzMatrix) -> TransformResult:
    """Transform a field and measure both invariants before and after."""
    with logger.timer("Frame transform"):
        after = frame_transform(field, k, transformation)
    result = TransformResult(
        field, after, field_invariants(field), field_invariants(after)
    )
    logger.debug("Invariant drift after transform: %.3e", result.invariant_drift)
    return result


def perform_verification(
    seed: int,
    trials: int,
    workers: int = DEFAULT_WORKERS,
    progress: Optional[Progress] = None,
) -> VerificationReport:
    """Run the property suite with optional progress reporting."""
    logger.debug("Starting verification: seed=%d trials=%d workers=%d", seed, trials, workers)

    main_task = None
    if progress:
        main_task = progress.add_task("🔬 Checking properties", total=None)

    def update_progress(name: str, completed: int, total: int) -> None:
        if progress and main_task is not None:
            progress.update(
                main_task,
                completed=completed,
                total=total,
                description=f"🔬 Checked {name}",
            )

    return run_verification(seed, trials, workers, progress_callback=update_progress)

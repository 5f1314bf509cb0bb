#!/usr/bin/env python3
"""
Lorentz Lab CLI
---------------

Command-line interface for simulating charged particles in electromagnetic
fields, transforming fields between frames and running the property suite.
This module contains all CLI logic separated from core functionality.

Exit statuses: 0 success, 1 verification failure, 2 configuration or parse
error, 3 integrator abort.
"""

import json
import os
import re
import sys
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional, Tuple

import typer
from rich.console import Console
from rich.live import Live
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)

# Import core functions
from lorentz_lab import (
    build_transformation,
    display_banner,
    display_scenario_panel,
    perform_verification,
    run_simulation,
    run_transform,
)
from lorentz_lib.errors import (
    EXIT_CONFIGURATION,
    EXIT_VERIFICATION_FAILED,
    LorentzLabError,
    exit_status,
)

# Import logging configuration
from lorentz_lib.logging import (
    LabLogger,
    configure_logging,
    create_debug_log_file,
    get_output_console,
)
from lorentz_lib.outputs import (
    SUMMARY_FORMATS,
    build_simulation_summary,
    compare_with_existing,
    create_transform_table,
    create_verification_table,
    ensure_output_directory,
    output_summary,
    summary_path,
    write_trajectory_csv,
    write_verification_report,
)
from lorentz_lib.scenario import Scenario, load_scenario
from lorentz_lib.verify import DEFAULT_WORKERS, PROPERTY_SUITE
from physics.field_tensor import Coupling, FieldTensor

# Directory for auto-named outputs
OUTPUT_DIR_ENV = "LORENTZ_LAB_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = Path("/tmp/lorentz_lab")

# Global context for log file (shared across commands)
app_log_file: Optional[Path] = None

# Global context for verbose logging (shared across commands)
app_verbose: bool = False

# Add the script's directory to the Python path to find modules
script_dir = Path(__file__).parent.absolute()
if str(script_dir) not in sys.path:
    sys.path.insert(0, str(script_dir))

# Create the CLI application
app = typer.Typer(
    name="lorentz-lab",
    help="Lorentz Lab\n\nCharged-particle dynamics and field transforms built on the Lorentz group.\n\nUse 'simulate', 'transform' or 'verify'.",
    add_completion=True,
)
console = Console()


@app.callback()
def main(
    log_file: Optional[Path] = typer.Option(
        None,
        "--log-file",
        "-l",
        help="Global log file path for debug output (applies to all commands with --debug argument)",
    ),
    verbose: bool = typer.Option(
        False,
        "--verbose",
        "-v",
        help="Enable per-chunk integrator diagnostics (use with --debug)",
    ),
) -> None:
    """
    Lorentz Lab
    Simulate relativistic charged particles with structure-preserving steppers.
    Features:
    • EXACT exponential stepper for uniform fields, RK4 and renormalized RK4 otherwise
    • Named analytic field maps (uniform, gradient_b, magnetic_bottle)
    • Frame transforms of (E, B) with invariant checks
    • Seeded, deterministic property suite
    """
    global app_log_file, app_verbose
    app_log_file = log_file
    app_verbose = verbose


def _parse_vector(value: str) -> Tuple[float, float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise typer.BadParameter(f"expected three comma-separated numbers, got '{value}'")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError as e:
        raise typer.BadParameter(f"expected numbers, got '{value}'") from e
    return (x, y, z)


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, str(DEFAULT_OUTPUT_DIR)))


def _generate_output_filename(output_file: Optional[Path], stem: str, suffix: str) -> Path:
    """Generate output filename if not provided."""
    if output_file is not None:
        return output_file
    safe_stem = re.sub(r"[^A-Za-z0-9_.-]+", "-", stem).strip("-") or "run"
    return _output_dir() / f"{safe_stem}{suffix}"


def _setup_logging(debug: bool) -> Tuple[LabLogger, Optional[Path]]:
    debug_log_file = create_debug_log_file(app_log_file) if debug else None
    logger = configure_logging(debug=debug, log_file=debug_log_file, verbose=app_verbose)
    if debug:
        logger.info("Debug mode enabled - verbose logging activated")
        if debug_log_file:
            logger.info("Debug logs will be saved to: %s", debug_log_file)
    return logger, debug_log_file


def _fail(logger: LabLogger, error: LorentzLabError, context: Dict[str, Any]) -> NoReturn:
    """Report a library error and exit with its status."""
    logger.log_error_context(error, context)
    console.print(f"\n[red]❌ {type(error).__name__}: {error}[/red]")
    raise typer.Exit(exit_status(error))


def _progress_display() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TimeElapsedColumn(),
        console=get_output_console(),
        refresh_per_second=10,
    )


@app.command(name="simulate")
def simulate_command(
    scenario_file: Path = typer.Argument(..., help="Scenario file (key = value per line)"),
    output_file: Optional[Path] = typer.Option(
        None,
        "--output",
        "-o",
        help=f"Trajectory CSV path. Defaults to ${OUTPUT_DIR_ENV}/<name>.csv",
    ),
    stride: Optional[int] = typer.Option(
        None, "--stride", min=1, help="Write every N-th state (overrides output_stride)"
    ),
    output_format: str = typer.Option(
        "table", "--format", "-f", help="Summary format (table|json|md)"
    ),
    compare: bool = typer.Option(
        False, "--compare", "-c", help="Compare the summary with the previous run"
    ),
    dry_run: bool = typer.Option(
        False, "--dry-run", help="Show the integration plan without integrating"
    ),
    debug: bool = typer.Option(
        False,
        "--debug",
        "-d",
        help="Enable debug mode with verbose logging and detailed execution traces",
    ),
) -> None:
    """
    Integrate a scenario and write its trajectory as CSV plus a summary report.
    """
    logger, debug_log_file = _setup_logging(debug)

    if output_format not in SUMMARY_FORMATS:
        console.print(
            f"[red]❌ Unknown output format '{output_format}'. Supported: {', '.join(SUMMARY_FORMATS)}[/red]"
        )
        raise typer.Exit(EXIT_CONFIGURATION)

    try:
        scenario = load_scenario(scenario_file)
    except LorentzLabError as e:
        _fail(logger, e, {"scenario_file": scenario_file})

    effective_stride = stride if stride is not None else scenario.output_stride
    current_output_file = _generate_output_filename(output_file, scenario.name, ".csv")

    display_banner(debug)
    try:
        display_scenario_panel(scenario, effective_stride, output_format, debug)
    except LorentzLabError as e:
        _fail(logger, e, {"scenario": scenario.name})

    if dry_run:
        _handle_dry_run(scenario, effective_stride, current_output_file, output_format)
        return

    console.print(
        f"\n[bold blue]🧮 Integrating {scenario.n_steps} steps with {scenario.stepper.value}...[/bold blue]"
    )
    progress = _progress_display()
    with Live(
        Panel(
            progress,
            title="[bold white]Integration Progress[/bold white]",
            border_style="bright_blue" if not debug else "green",
            padding=(0, 1),
        ),
        console=get_output_console(),
        refresh_per_second=10,
    ):
        # Temporarily disable console logging during Live display to prevent interference
        logger.disable_console_output(debug_log_file)
        try:
            trajectory, duration = run_simulation(scenario, progress)
        except LorentzLabError as e:
            _fail(logger, e, {"scenario": scenario.name, "stepper": scenario.stepper.value})
        finally:
            logger.enable_console_output(debug_log_file)

    try:
        decimated = trajectory.decimate(effective_stride)
        write_trajectory_csv(decimated, current_output_file)
        console.print(f"[green]Trajectory saved to {current_output_file}[/green]")

        summary = build_simulation_summary(
            scenario.name,
            trajectory,
            len(decimated),
            duration,
            {
                "field_map": scenario.field_map,
                "k": scenario.k,
                "dt": scenario.dt,
                "output_stride": effective_stride,
            },
        )
        if compare:
            compare_with_existing(summary_path(current_output_file), summary)
        output_summary(summary, current_output_file, output_format, debug)
    except LorentzLabError as e:
        _fail(logger, e, {"output": current_output_file})

    console.print("\n[bold green]🎉 Simulation completed successfully![/bold green]")
    console.print(
        f"[green]📊 {scenario.n_steps} steps in {duration:.3f}s, max shell defect {summary['max_shell_defect']:.3e}[/green]"
    )


def _handle_dry_run(
    scenario: Scenario, stride: int, output_file: Path, output_format: str
) -> None:
    """Handle dry run display."""
    console.print(
        "\n[bold yellow]🔍 DRY RUN MODE - No integration will be performed[/bold yellow]"
    )
    console.print("\n[bold blue]Integration Plan:[/bold blue]")
    console.print(f"  • [bold]Stepper:[/bold] {scenario.stepper.value}")
    console.print(f"  • [bold]Field map:[/bold] {scenario.field_map}")
    console.print(
        f"  • [bold]Proper time:[/bold] 0 → {scenario.n_steps * scenario.dt:.6g} in {scenario.n_steps} steps"
    )
    rows = len(range(0, scenario.n_steps + 1, stride))
    if scenario.n_steps % stride:
        rows += 1
    console.print(f"  • [bold]CSV rows:[/bold] {rows} (stride {stride})")
    console.print(f"  • [bold]Output file:[/bold] {output_file}")
    console.print(f"  • [bold]Summary:[/bold] {summary_path(output_file, output_format)}")
    console.print(
        "\n[bold green]✅ Dry run completed. Use without --dry-run to integrate.[/bold green]"
    )


@app.command(name="transform")
def transform_command(
    electric: str = typer.Option("0,0,0", "--E", "-E", help="Electric field E1,E2,E3"),
    magnetic: str = typer.Option("0,0,0", "--B", "-B", help="Magnetic field B1,B2,B3"),
    k: float = typer.Option(1.0, "--k", help="Charge-to-mass ratio"),
    boost_axis: Optional[int] = typer.Option(
        None, "--boost-axis", help="Boost along spatial axis 1, 2 or 3"
    ),
    boost_rapidity: Optional[float] = typer.Option(
        None, "--rapidity", help="Boost rapidity"
    ),
    velocity: Optional[float] = typer.Option(
        None, "--velocity", help="Boost velocity |beta| < 1 (alternative to --rapidity)"
    ),
    rotation_axis: Optional[int] = typer.Option(
        None, "--rotation-axis", help="Rotate about spatial axis 1, 2 or 3"
    ),
    angle: Optional[float] = typer.Option(None, "--angle", help="Rotation angle (radians)"),
    output_file: Optional[Path] = typer.Option(
        None, "--output", "-o", help="Also write the report as JSON"
    ),
    debug: bool = typer.Option(
        False,
        "--debug",
        "-d",
        help="Enable debug mode with verbose logging and detailed execution traces",
    ),
) -> None:
    """
    Transform (E, B) to another frame and check both field invariants.
    """
    logger, _ = _setup_logging(debug)

    try:
        field = FieldTensor(_parse_vector(electric), _parse_vector(magnetic))
        transformation = build_transformation(
            boost_axis, boost_rapidity, velocity, rotation_axis, angle
        )
        result = run_transform(field, Coupling(k), transformation)
    except LorentzLabError as e:
        _fail(logger, e, {"E": electric, "B": magnetic})

    console.print(
        create_transform_table(
            [
                ("E", result.before.E, result.after.E),
                ("B", result.before.B, result.after.B),
            ],
            [
                ("E.B", result.invariants_before[0], result.invariants_after[0]),
                ("E^2 - B^2", result.invariants_before[1], result.invariants_after[1]),
            ],
            debug,
        )
    )
    status = "PASS" if result.passed else "FAIL"
    style = "bold green" if result.passed else "bold red"
    console.print(
        f"[{style}]Invariant check: {status}[/{style}] (drift {result.invariant_drift:.3e})"
    )

    if output_file is not None:
        ensure_output_directory(output_file)
        report = {
            "before": {"E": list(result.before.E), "B": list(result.before.B)},
            "after": {"E": list(result.after.E), "B": list(result.after.B)},
            "invariants_before": list(result.invariants_before),
            "invariants_after": list(result.invariants_after),
            "check": status,
        }
        output_file.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        console.print(f"[green]Transform report saved to {output_file}[/green]")

    if not result.passed:
        raise typer.Exit(EXIT_VERIFICATION_FAILED)


@app.command(name="verify")
def verify_command(
    seed: int = typer.Option(42, "--seed", help="Random seed for every property"),
    trials: int = typer.Option(100, "--trials", min=1, help="Random trials per property"),
    workers: int = typer.Option(
        DEFAULT_WORKERS,
        "--workers",
        "-w",
        help=f"Properties checked in parallel (1-{len(PROPERTY_SUITE)})",
    ),
    output_file: Optional[Path] = typer.Option(
        None,
        "--output",
        "-o",
        help=f"Report path. Defaults to ${OUTPUT_DIR_ENV}/verify-seed<N>-trials<M>.txt",
    ),
    debug: bool = typer.Option(
        False,
        "--debug",
        "-d",
        help="Enable debug mode with verbose logging and detailed execution traces",
    ),
) -> None:
    """
    Run the seeded property suite; exits 1 if any property fails.
    """
    logger, debug_log_file = _setup_logging(debug)
    workers = max(1, min(workers, len(PROPERTY_SUITE)))
    current_output_file = _generate_output_filename(
        output_file, f"verify-seed{seed}-trials{trials}", ".txt"
    )

    display_banner(debug)
    console.print(
        f"[bold blue]🔬 Checking {len(PROPERTY_SUITE)} properties (seed={seed}, trials={trials}, workers={workers})...[/bold blue]"
    )

    progress = _progress_display()
    with Live(
        Panel(
            progress,
            title="[bold white]Verification Progress[/bold white]",
            border_style="bright_blue" if not debug else "green",
            padding=(0, 1),
        ),
        console=get_output_console(),
        refresh_per_second=10,
    ):
        logger.disable_console_output(debug_log_file)
        try:
            with logger.timer("Property suite") as timer:
                report = perform_verification(seed, trials, workers, progress)
        finally:
            logger.enable_console_output(debug_log_file)

    console.print(create_verification_table(report, debug))
    try:
        write_verification_report(report, current_output_file)
    except LorentzLabError as e:
        _fail(logger, e, {"output": current_output_file})
    console.print(f"[dim]Suite completed in {timer.duration:.2f}s[/dim]")

    if not report.passed:
        names = ", ".join(r.name for r in report.failures)
        console.print(f"[bold red]❌ Verification failed: {names}[/bold red]")
        raise typer.Exit(EXIT_VERIFICATION_FAILED)
    console.print("[bold green]✅ All properties passed[/bold green]")


if __name__ == "__main__":
    app()

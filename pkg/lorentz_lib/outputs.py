"""
Outputs module for Lorentz Lab

Handles formatting and output of simulation, transform and verification
results: trajectory CSV, JSON/markdown summaries and rich console tables.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

from deepdiff import DeepDiff
from rich import box
from rich.console import Console
from rich.table import Table

from physics.dynamics import Trajectory

from .errors import ConfigurationError
from .logging import get_logger
from .verify import VerificationReport

console = Console()
logger = get_logger("outputs")

# Minimum width for tables to ensure readability
TABLE_MINIMUM_WIDTH = 86

CSV_COLUMNS = ("tau", "t", "x", "y", "z", "u0", "u1", "u2", "u3", "shell_defect")
# 17 significant digits round-trip every float64
FLOAT_FORMAT = "%.17g"

SUMMARY_FORMATS = ("table", "json", "md")
# Wall-clock figures vary between runs and never take part in comparisons
VOLATILE_SUMMARY_KEYS = ("performance",)


def _border(debug: bool) -> str:
    return "bright_blue" if not debug else "green"


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def ensure_output_directory(output_file: Path) -> None:
    """Ensure the output directory exists, create if it doesn't."""
    output_dir = output_file.parent
    if not output_dir.exists():
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
            console.print(f"[dim]Created output directory: {output_dir}[/dim]")
        except OSError as e:
            console.print(
                f"[red]Failed to create output directory {output_dir}: {e}[/red]"
            )
            raise ConfigurationError(
                f"cannot create output directory {output_dir}: {e}"
            ) from e


def trajectory_csv_text(trajectory: Trajectory) -> str:
    """Render a trajectory with one row per state in CSV_COLUMNS order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    defects = trajectory.shell_defects()
    for index in range(len(trajectory)):
        row = [trajectory.tau[index], *trajectory.x[index], *trajectory.u[index], defects[index]]
        writer.writerow([format_float(float(v)) for v in row])
    return buffer.getvalue()


def write_trajectory_csv(trajectory: Trajectory, output_file: Path) -> None:
    ensure_output_directory(output_file)
    output_file.write_text(trajectory_csv_text(trajectory), encoding="utf-8")
    logger.debug("Wrote %d trajectory rows to %s", len(trajectory), output_file)


def summary_path(output_file: Path, output_format: str = "json") -> Path:
    """<output>.summary.json (or .summary.md) next to the trajectory file."""
    suffix = "md" if output_format == "md" else "json"
    return output_file.with_name(f"{output_file.stem}.summary.{suffix}")


def build_simulation_summary(
    name: str,
    trajectory: Trajectory,
    rows_written: int,
    duration: float,
    extra: Dict[str, Any],
) -> Dict[str, Any]:
    """
    Structured summary of one simulation run.

    Args:
        name: Scenario name
        trajectory: Full (undecimated) trajectory
        rows_written: Number of CSV rows after applying the output stride
        duration: Integration wall-clock time in seconds
        extra: Scenario parameters echoed into the summary

    Returns:
        Dict: JSON-serializable summary
    """
    initial = trajectory.initial
    final = trajectory.final
    steps = len(trajectory) - 1
    closure = max(abs(a - b) for a, b in zip(final.x.spatial, initial.x.spatial))
    return {
        "scenario": name,
        **extra,
        "stepper": trajectory.stepper.value,
        "steps": steps,
        "rows_written": rows_written,
        "final_state": {
            "tau": final.tau,
            "x": list(final.x),
            "u": list(final.u),
            "gamma": final.u.gamma,
            "velocity": list(final.u.three_velocity()),
        },
        "max_shell_defect": float(trajectory.shell_defects().max()),
        "closure": closure,
        "performance": {
            "wall_clock_seconds": duration,
            "steps_per_second": steps / duration if duration > 0 else None,
        },
    }


def create_summary_table(summary: Dict[str, Any], debug: bool) -> Table:
    table = Table(
        title=f"Simulation: {summary['scenario']}",
        border_style=_border(debug),
        min_width=TABLE_MINIMUM_WIDTH,
        box=box.SIMPLE_HEAVY,
    )
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="yellow", justify="right")

    final = summary["final_state"]
    table.add_row("Stepper", summary["stepper"])
    table.add_row("Steps", str(summary["steps"]))
    table.add_row("Rows written", str(summary["rows_written"]))
    table.add_row("Final tau", f"{final['tau']:.10g}")
    table.add_row("Final x", ", ".join(f"{v:.10g}" for v in final["x"]))
    table.add_row("Final u", ", ".join(f"{v:.10g}" for v in final["u"]))
    table.add_row("Final gamma", f"{final['gamma']:.12g}")
    table.add_row("Final velocity", ", ".join(f"{v:.10g}" for v in final["velocity"]))
    table.add_row("Max shell defect", f"{summary['max_shell_defect']:.3e}")
    table.add_row("Closure |x_final - x_0|", f"{summary['closure']:.3e}")

    performance = summary.get("performance", {})
    table.add_section()
    table.add_row("Wall clock", f"{performance.get('wall_clock_seconds', 0.0):.3f}s")
    rate = performance.get("steps_per_second")
    table.add_row("Steps/second", f"{rate:,.0f}" if rate else "n/a", style="bold green")
    return table


def generate_markdown_summary(summary: Dict[str, Any]) -> str:
    """Markdown rendition of a simulation summary."""
    final = summary["final_state"]
    md_content = [f"# Lorentz Lab Simulation: {summary['scenario']}"]

    md_content.append("\n## Run")
    for key in ("stepper", "field_map", "k", "dt", "steps", "output_stride", "rows_written"):
        if key in summary:
            md_content.append(f"- **{key}**: {summary[key]}")

    md_content.append("\n## Final State")
    md_content.append("| Quantity | Value |")
    md_content.append("|----------|-------|")
    md_content.append(f"| tau | `{format_float(final['tau'])}` |")
    md_content.append(f"| x | `{', '.join(format_float(v) for v in final['x'])}` |")
    md_content.append(f"| u | `{', '.join(format_float(v) for v in final['u'])}` |")
    md_content.append(f"| gamma | `{format_float(final['gamma'])}` |")
    md_content.append(f"| velocity | `{', '.join(format_float(v) for v in final['velocity'])}` |")

    md_content.append("\n## Diagnostics")
    md_content.append(f"- **Max shell defect**: {summary['max_shell_defect']:.3e}")
    md_content.append(f"- **Closure**: {summary['closure']:.3e}")

    performance = summary.get("performance", {})
    rate = performance.get("steps_per_second")
    md_content.append("\n## Performance")
    md_content.append(
        f"- **Wall clock**: {performance.get('wall_clock_seconds', 0.0):.3f}s"
    )
    md_content.append(f"- **Steps/second**: {f'{rate:,.0f}' if rate else 'n/a'}")
    return "\n".join(md_content) + "\n"


def output_summary(
    summary: Dict[str, Any], output_file: Path, output_format: str, debug: bool
) -> Path:
    """
    Write the summary next to the trajectory and show it on the console.

    Returns:
        Path: the summary file written
    """
    if output_format not in SUMMARY_FORMATS:
        raise ConfigurationError(
            f"unknown output format '{output_format}'. Supported: {', '.join(SUMMARY_FORMATS)}"
        )

    json_file = summary_path(output_file, "json")
    ensure_output_directory(json_file)
    json_file.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    written = json_file

    if output_format == "json":
        console.print(json.dumps(summary, indent=2))
    elif output_format == "table":
        console.print(create_summary_table(summary, debug))
    else:
        md_file = summary_path(output_file, "md")
        md_file.write_text(generate_markdown_summary(summary), encoding="utf-8")
        console.print(f"[green]Markdown report saved to {md_file}[/green]")
        console.print(create_summary_table(summary, debug))
        written = md_file

    console.print(f"[green]Summary saved to {json_file}[/green]")
    return written


def _deterministic(summary: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in summary.items() if k not in VOLATILE_SUMMARY_KEYS}


def compare_with_existing(summary_file: Path, new_data: Dict[str, Any]) -> bool:
    """
    Compare a new summary with the one already on disk.

    Returns:
        bool: True if differences were found
    """
    if not summary_file.exists():
        console.print(f"[dim]No previous summary at {summary_file}; nothing to compare.[/dim]")
        return False

    try:
        existing_data = json.loads(summary_file.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        logger.warning("Cannot read previous summary %s: %s", summary_file, e)
        return False

    # vectors are ordered, so list order is part of the comparison
    diff = DeepDiff(_deterministic(existing_data), _deterministic(new_data))
    if not diff:
        console.print("[green]No changes detected since last run.[/green]")
        return False
    console.print("[yellow]Changes detected![/yellow]")
    console.print(diff.to_json(indent=2))
    return True


def create_verification_table(report: VerificationReport, debug: bool) -> Table:
    table = Table(
        title=f"Property Suite (seed={report.seed}, trials={report.trials})",
        border_style=_border(debug),
        min_width=TABLE_MINIMUM_WIDTH,
    )
    table.add_column("Property", style="cyan")
    table.add_column("Measured", style="yellow", justify="right")
    table.add_column("Threshold", style="white", justify="right")
    table.add_column("Status", justify="center")

    for result in report.results:
        status = "[bold green]PASS[/bold green]" if result.passed else "[bold red]FAIL[/bold red]"
        table.add_row(
            result.name,
            f"{result.measured:.3e}",
            f"{result.relation} {result.threshold:.1e}",
            status,
        )

    passed = len(report.results) - len(report.failures)
    table.add_section()
    table.add_row(
        "TOTAL",
        f"{passed}/{len(report.results)} passed",
        "",
        "PASS" if report.passed else "FAIL",
        style="bold green" if report.passed else "bold red",
    )
    return table


def render_verification_report(report: VerificationReport) -> str:
    """Plain-text report; a function of (seed, trials) only."""
    lines = [
        "Lorentz Lab verification report",
        f"seed = {report.seed}",
        f"trials = {report.trials}",
        "",
    ]
    width = max(len(r.name) for r in report.results)
    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        line = (
            f"{status}  {result.name:<{width}}  measured {result.measured:.6e}"
            f"  {result.relation} {result.threshold:.1e}"
        )
        if result.detail:
            line += f"  ({result.detail})"
        lines.append(line)
        lines.append(f"      {result.description}")
    lines.append("")
    failures = len(report.failures)
    lines.append(
        "RESULT: PASS"
        if report.passed
        else f"RESULT: FAIL ({failures} of {len(report.results)} properties failed)"
    )
    return "\n".join(lines) + "\n"


def write_verification_report(report: VerificationReport, output_file: Path) -> None:
    ensure_output_directory(output_file)
    output_file.write_text(render_verification_report(report), encoding="utf-8")
    console.print(f"[green]Verification report saved to {output_file}[/green]")


def create_transform_table(
    rows: Sequence[Tuple[str, Sequence[float], Sequence[float]]],
    invariants: List[Tuple[str, float, float]],
    debug: bool,
) -> Table:
    """Side-by-side fields and invariants before and after a frame change."""
    table = Table(
        title="Frame Transform",
        border_style=_border(debug),
        min_width=TABLE_MINIMUM_WIDTH,
        box=box.SIMPLE_HEAVY,
    )
    table.add_column("Quantity", style="cyan")
    table.add_column("Before", style="white", justify="right")
    table.add_column("After", style="yellow", justify="right")

    for label, before, after in rows:
        table.add_row(
            label,
            ", ".join(f"{v:.12g}" for v in before),
            ", ".join(f"{v:.12g}" for v in after),
        )
    table.add_section()
    for label, before_value, after_value in invariants:
        table.add_row(label, f"{before_value:.12g}", f"{after_value:.12g}")
    return table

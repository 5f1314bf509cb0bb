import json

import pytest

from lorentz_lib.errors import ConfigurationError
from lorentz_lib.outputs import (
    CSV_COLUMNS,
    build_simulation_summary,
    compare_with_existing,
    format_float,
    generate_markdown_summary,
    output_summary,
    render_verification_report,
    summary_path,
    trajectory_csv_text,
    write_trajectory_csv,
)
from lorentz_lib.verify import PropertyResult, VerificationReport
from physics.core_geometry import FourVector
from physics.dynamics import Stepper, integrate

ORIGIN = FourVector(0.0, 0.0, 0.0, 0.0)


@pytest.fixture
def free_trajectory(free_map, unit_coupling):
    u0 = FourVector.from_spatial_velocity((0.75, 0.0, 0.0))
    return integrate(ORIGIN, u0, free_map, unit_coupling, 0.25, 100, Stepper.EXACT)


@pytest.fixture
def summary(free_trajectory):
    return build_simulation_summary(
        "free", free_trajectory, 101, 0.5, {"k": 1.0, "dt": 0.25, "field_map": "uniform"}
    )


def test_format_float_round_trips():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(1.25) == "1.25"
    assert float(format_float(2.0 / 3.0)) == 2.0 / 3.0


def test_csv_header_and_rows(free_trajectory):
    lines = trajectory_csv_text(free_trajectory).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(free_trajectory)
    assert lines[1] == "0,0,0,0,0,1.25,0.75,0,0,0"
    assert lines[2] == "0.25,0.3125,0.1875,0,0,1.25,0.75,0,0,0"


def test_free_particle_has_zero_defect_column(free_trajectory):
    rows = trajectory_csv_text(free_trajectory).splitlines()[1:]
    assert all(row.split(",")[-1] == "0" for row in rows)


def test_write_trajectory_csv_creates_directories(tmp_path, free_trajectory):
    target = tmp_path / "nested" / "dir" / "free.csv"
    write_trajectory_csv(free_trajectory, target)
    assert target.read_text(encoding="utf-8") == trajectory_csv_text(free_trajectory)


def test_summary_path(tmp_path):
    assert summary_path(tmp_path / "run.csv") == tmp_path / "run.summary.json"
    assert summary_path(tmp_path / "run.csv", "md") == tmp_path / "run.summary.md"


def test_summary_contents(summary):
    assert summary["scenario"] == "free"
    assert summary["k"] == 1.0
    assert summary["stepper"] == "EXACT"
    assert summary["steps"] == 100
    assert summary["rows_written"] == 101
    assert summary["final_state"]["tau"] == 25.0
    assert summary["final_state"]["x"] == [31.25, 18.75, 0.0, 0.0]
    assert summary["final_state"]["gamma"] == 1.25
    assert summary["final_state"]["velocity"] == [0.6, 0.0, 0.0]
    assert summary["max_shell_defect"] == 0.0
    assert summary["closure"] == 18.75
    assert summary["performance"]["steps_per_second"] == 200.0
    json.dumps(summary)


def test_markdown_summary(summary):
    text = generate_markdown_summary(summary)
    assert text.startswith("# Lorentz Lab Simulation: free\n")
    assert "- **field_map**: uniform" in text
    assert "| gamma | `1.25` |" in text
    assert "| velocity | `0.59999999999999998, 0, 0` |" in text


def test_output_summary_json(tmp_path, summary):
    written = output_summary(summary, tmp_path / "free.csv", "json", debug=False)
    assert written == tmp_path / "free.summary.json"
    assert json.loads(written.read_text(encoding="utf-8")) == summary


def test_output_summary_markdown_writes_both_files(tmp_path, summary):
    written = output_summary(summary, tmp_path / "free.csv", "md", debug=False)
    assert written == tmp_path / "free.summary.md"
    assert (tmp_path / "free.summary.json").exists()
    assert "Lorentz Lab Simulation" in written.read_text(encoding="utf-8")


def test_output_summary_table(tmp_path, summary):
    written = output_summary(summary, tmp_path / "free.csv", "table", debug=True)
    assert written == tmp_path / "free.summary.json"


def test_output_summary_rejects_unknown_format(tmp_path, summary):
    with pytest.raises(ConfigurationError, match="unknown output format"):
        output_summary(summary, tmp_path / "free.csv", "yaml", debug=False)


def test_compare_ignores_performance(tmp_path, summary):
    output_summary(summary, tmp_path / "free.csv", "json", debug=False)
    rerun = dict(summary, performance={"wall_clock_seconds": 9.0, "steps_per_second": 1.0})
    assert compare_with_existing(tmp_path / "free.summary.json", rerun) is False


def test_compare_detects_changes(tmp_path, summary):
    output_summary(summary, tmp_path / "free.csv", "json", debug=False)
    changed = dict(summary, steps=99)
    assert compare_with_existing(tmp_path / "free.summary.json", changed) is True


def test_compare_without_previous_summary(tmp_path, summary):
    assert compare_with_existing(tmp_path / "missing.summary.json", summary) is False


def _report(*passed: bool) -> VerificationReport:
    results = tuple(
        PropertyResult(f"check_{i}", f"description {i}", 1e-14, 1e-12, ok)
        for i, ok in enumerate(passed)
    )
    return VerificationReport(42, 100, results)


def test_render_passing_report():
    text = render_verification_report(_report(True, True))
    lines = text.splitlines()
    assert lines[:3] == ["Lorentz Lab verification report", "seed = 42", "trials = 100"]
    assert lines[4] == "PASS  check_0  measured 1.000000e-14  <= 1.0e-12"
    assert lines[5] == "      description 0"
    assert lines[-1] == "RESULT: PASS"


def test_render_failing_report():
    text = render_verification_report(_report(True, False, False))
    assert "FAIL  check_1" in text
    assert text.endswith("RESULT: FAIL (2 of 3 properties failed)\n")


def test_compare_is_sensitive_to_component_order(tmp_path, summary):
    output_summary(summary, tmp_path / "free.csv", "json", debug=False)
    final = dict(summary["final_state"], x=[31.25, 0.0, 18.75, 0.0])
    assert compare_with_existing(tmp_path / "free.summary.json", dict(summary, final_state=final)) is True

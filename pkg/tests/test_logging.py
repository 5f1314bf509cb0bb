from pathlib import Path

import pytest

from lorentz_lib import logging as lab_logging
from lorentz_lib.logging import configure_logging, create_debug_log_file, get_logger


@pytest.fixture(autouse=True)
def restore_default_logging():
    yield
    configure_logging(debug=False)


def test_get_logger_returns_shared_instance():
    assert get_logger("physics.dynamics") is get_logger("lorentz_lib.verify")


def test_create_debug_log_file_with_explicit_file(tmp_path):
    target = tmp_path / "logs" / "run.log"
    assert create_debug_log_file(target) == target
    assert target.parent.is_dir()


def test_create_debug_log_file_in_directory(tmp_path):
    path = create_debug_log_file(tmp_path / "logs")
    assert path.parent == tmp_path / "logs"
    assert path.name.startswith("lorentz_lab_debug_")
    assert path.suffix == ".log"


def test_create_debug_log_file_default_directory(tmp_path, monkeypatch):
    monkeypatch.setattr(lab_logging, "DEFAULT_DEBUG_LOG_DIR", tmp_path / ".debug_logs")
    assert create_debug_log_file(None).parent == tmp_path / ".debug_logs"


def test_debug_session_writes_file(tmp_path):
    log_file = tmp_path / "debug.log"
    logger = configure_logging(debug=True, log_file=log_file, verbose=True)
    assert logger.debug_mode and logger.verbose_mode

    logger.log_step_diagnostic(500, 12.5, 3.0e-15)
    logger.log_property_result("boost_composition", True, 1e-14, 1e-12)
    logger.log_error_context(ValueError("bad dt"), {"scenario": "free"})

    text = Path(log_file).read_text(encoding="utf-8")
    assert "step=500 tau=12.5 shell_defect=3.000e-15" in text
    assert "Property boost_composition PASS" in text
    assert "ValueError: bad dt [scenario=free]" in text
    assert "test_logging.py" in text


def test_step_diagnostic_silent_without_verbose(tmp_path):
    log_file = tmp_path / "debug.log"
    logger = configure_logging(debug=True, log_file=log_file, verbose=False)
    logger.log_step_diagnostic(1, 0.1, 0.0)
    assert "step=1" not in log_file.read_text(encoding="utf-8")


def test_timer_records_duration_and_failure(tmp_path):
    log_file = tmp_path / "debug.log"
    logger = configure_logging(debug=True, log_file=log_file)

    with logger.timer("Frame transform") as stopwatch:
        pass
    assert stopwatch.duration >= 0.0

    with pytest.raises(RuntimeError):
        with logger.timer("Broken integration"):
            raise RuntimeError("diverged")

    text = log_file.read_text(encoding="utf-8")
    assert "Frame transform done in" in text
    assert "Broken integration failed after" in text


def test_console_output_toggle():
    logger = configure_logging(debug=False)
    logger.disable_console_output()
    assert all(h.level == lab_logging.logging.CRITICAL for h in logger.logger.handlers)
    logger.enable_console_output()
    assert all(h.level == lab_logging.logging.INFO for h in logger.logger.handlers)


def test_verbose_mode_leaves_warnings_logger_alone():
    before = lab_logging.logging.getLogger("py.warnings").level
    configure_logging(debug=True, verbose=True)
    assert lab_logging.logging.getLogger("py.warnings").level == before

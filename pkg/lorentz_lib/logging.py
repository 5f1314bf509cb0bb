"""
Logging for Lorentz Lab
-----------------------

One process-wide ``lorentz-lab`` logger shared by the physics modules, the
property suite and the CLI. Console records go through rich on stdout; a
debug session additionally writes every record, with its call site, to a log
file. Live progress bars draw on a separate stderr console, and the console
handler is muted while they run.
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install

LOGGER_NAME = "lorentz-lab"

# Debug sessions without --log-file write here
DEFAULT_DEBUG_LOG_DIR = Path.cwd() / ".debug_logs"

FILE_LOG_FORMAT = (
    "%(asctime)s.%(msecs)03d | %(levelname)-8s | "
    "%(pathname)s:%(funcName)s:%(lineno)d | %(message)s"
)
FILE_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class Stopwatch:
    """Times a block and logs its start, end and failure at debug level."""

    def __init__(self, logger: logging.Logger, operation: str):
        self.logger = logger
        self.operation = operation
        self.duration = 0.0
        self._started = 0.0

    def __enter__(self) -> "Stopwatch":
        self._started = time.perf_counter()
        self.logger.debug("%s ...", self.operation, stacklevel=4)
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.duration = time.perf_counter() - self._started
        if exc_type is None:
            self.logger.debug(
                "%s done in %.3fs", self.operation, self.duration, stacklevel=4
            )
        else:
            self.logger.error(
                "%s failed after %.3fs: %s",
                self.operation,
                self.duration,
                exc_val,
                stacklevel=4,
            )


def _console_handler(debug: bool) -> RichHandler:
    handler = RichHandler(
        console=Console(stderr=False, legacy_windows=False),
        show_time=True,
        show_path=debug,
        markup=False,
        rich_tracebacks=True,
        tracebacks_show_locals=debug,
        keywords=[],
        omit_repeated_times=False,
    )
    handler.setLevel(logging.DEBUG if debug else logging.INFO)
    handler.setFormatter(logging.Formatter("%(message)s"))
    return handler


def _file_handler(log_file: Path) -> logging.FileHandler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_LOG_FORMAT, datefmt=FILE_DATE_FORMAT))
    return handler


class LabLogger:
    """
    Wrapper around the ``lorentz-lab`` logger.

    The plain level methods keep the caller's file and line in file logs;
    the ``log_*`` helpers format the recurring simulator and suite events.
    """

    def __init__(self, name: str = LOGGER_NAME):
        self.logger = logging.getLogger(name)
        self._settings: Optional[Tuple[bool, Optional[Path], bool]] = None
        self._progress_console: Optional[Console] = None

    @property
    def debug_mode(self) -> bool:
        return bool(self._settings and self._settings[0])

    @property
    def verbose_mode(self) -> bool:
        return bool(self._settings and self._settings[2])

    def configure(
        self, debug: bool = False, log_file: Optional[Path] = None, verbose: bool = False
    ) -> None:
        """(Re)build the handlers; a no-op when the settings are unchanged."""
        settings = (debug, log_file, verbose)
        if settings == self._settings:
            return
        self._settings = settings

        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()
        self.logger.setLevel(logging.DEBUG if debug else logging.INFO)
        self.logger.propagate = False

        if debug:
            install(show_locals=True)
        self.logger.addHandler(_console_handler(debug))

        if debug and log_file:
            try:
                self.logger.addHandler(_file_handler(log_file))
            except OSError as e:
                self.logger.warning("Could not open debug log %s: %s", log_file, e)
            else:
                self.logger.debug("Lorentz Lab debug session started (verbose=%s)", verbose)

    def get_progress_console(self) -> Console:
        """stderr console for rich Live displays."""
        if self._progress_console is None:
            self._progress_console = Console(stderr=True, legacy_windows=False)
        return self._progress_console

    def _set_console_level(self, level: int) -> None:
        for handler in self.logger.handlers:
            if isinstance(handler, RichHandler):
                handler.setLevel(level)

    def disable_console_output(self, log_file_path: Optional[Path] = None) -> None:
        """Mute the console handler while a Live display is drawing."""
        if log_file_path and self.debug_mode:
            self.logger.info("Debug output during the progress display goes to %s", log_file_path)
        self._set_console_level(logging.CRITICAL)

    def enable_console_output(self, log_file_path: Optional[Path] = None) -> None:
        self._set_console_level(logging.DEBUG if self.debug_mode else logging.INFO)

    @contextmanager
    def timer(self, operation: str) -> Iterator[Stopwatch]:
        with Stopwatch(self.logger, operation) as stopwatch:
            yield stopwatch

    def debug(self, message: str, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("stacklevel", 2)
        self.logger.debug(message, *args, **kwargs)

    def info(self, message: str, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("stacklevel", 2)
        self.logger.info(message, *args, **kwargs)

    def warning(self, message: str, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("stacklevel", 2)
        self.logger.warning(message, *args, **kwargs)

    def error(self, message: str, *args: Any, **kwargs: Any) -> None:
        kwargs.setdefault("stacklevel", 2)
        self.logger.error(message, *args, **kwargs)

    def log_integration_progress(
        self, stepper: str, steps: int, duration: float, **context: Any
    ) -> None:
        """Throughput of a finished integration."""
        rate = steps / duration if duration > 0 else float("inf")
        suffix = "".join(f" {key}={value}" for key, value in context.items())
        self.logger.debug(
            "%s: %d steps in %.3fs (%.0f steps/s)%s",
            stepper,
            steps,
            duration,
            rate,
            suffix,
            stacklevel=2,
        )

    def log_step_diagnostic(self, step: int, tau: float, shell_defect: float) -> None:
        """Mass-shell defect at a progress chunk; verbose mode only."""
        if self.verbose_mode:
            self.logger.debug(
                "step=%d tau=%.6g shell_defect=%.3e", step, tau, shell_defect, stacklevel=2
            )

    def log_property_result(
        self, name: str, passed: bool, measured: float, threshold: float
    ) -> None:
        self.logger.debug(
            "Property %s %s: measured %.3e against %.1e",
            name,
            "PASS" if passed else "FAIL",
            measured,
            threshold,
            stacklevel=2,
        )

    def log_error_context(
        self, error: Exception, context: Optional[Dict[str, Any]] = None
    ) -> None:
        message = f"{type(error).__name__}: {error}"
        if context:
            message += " [" + ", ".join(f"{k}={v}" for k, v in context.items()) + "]"
        self.logger.error(message, stacklevel=2)


_lab_logger: Optional[LabLogger] = None


def get_logger(name: str = LOGGER_NAME) -> LabLogger:
    """
    The shared LabLogger, configured at INFO on first use.

    ``name`` only labels the call site; every module shares one logger.
    """
    global _lab_logger
    if _lab_logger is None:
        _lab_logger = LabLogger()
        _lab_logger.configure()
    return _lab_logger


def configure_logging(
    debug: bool = False, log_file: Optional[Path] = None, verbose: bool = False
) -> LabLogger:
    """
    Configure the shared logger for a CLI command.

    Args:
        debug: DEBUG level, rich tracebacks with locals, call sites on the console
        log_file: Debug log file (used only with debug)
        verbose: Integrator diagnostics every progress chunk

    Returns:
        LabLogger: the shared instance
    """
    lab_logger = get_logger()
    lab_logger.configure(debug=debug, log_file=log_file, verbose=verbose)
    return lab_logger


def get_output_console() -> Console:
    return get_logger().get_progress_console()


def create_debug_log_file(log_file: Optional[Path]) -> Path:
    """
    Resolve the debug log path.

    A path with a suffix is used as is; any other path is a directory that
    receives a timestamped ``lorentz_lab_debug_*.log``. Without a path the
    file goes to DEFAULT_DEBUG_LOG_DIR.
    """
    if log_file and Path(log_file).suffix:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        return Path(log_file)

    directory = Path(log_file) if log_file else DEFAULT_DEBUG_LOG_DIR
    directory.mkdir(parents=True, exist_ok=True)
    return directory / f"lorentz_lab_debug_{time.strftime('%Y%m%d_%H%M%S')}.log"

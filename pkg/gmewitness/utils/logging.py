"""Logging configuration for gmewitness using Rich and Loguru."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional, cast

from loguru import logger
from rich.console import Console
from rich.logging import RichHandler
from rich.theme import Theme
from rich.traceback import install as install_rich_traceback

from gmewitness.settings import app_settings

# Lazy initialization - console created only when needed
_console: Optional[Console] = None
_is_logging_configured = False
_console_sink_id: Optional[int] = None
_file_sink_ids: dict[Path, int] = {}


def get_console() -> Console:
    """Get or create the stderr Rich console (lazy initialization)."""
    global _console
    if _console is None:
        theme = Theme(
            {
                "info": app_settings.logging.theme_info,
                "warning": app_settings.logging.theme_warning,
                "error": app_settings.logging.theme_error,
                "critical": app_settings.logging.theme_critical,
                "debug": app_settings.logging.theme_debug,
                "witness": app_settings.logging.theme_witness,
            }
        )
        # stdout stays clean for piping
        _console = Console(theme=theme, highlight=True, stderr=True)
        install_rich_traceback(
            console=_console,
            show_locals=app_settings.logging.show_locals,
            width=app_settings.logging.traceback_width,
        )
    return cast(Console, _console)


def configure_logger(log_level: Optional[str] = None) -> None:
    """Configure the loguru logger with a Rich console sink.

    Args:
        log_level: Minimum log level (uses settings default if not provided)
    """
    global _is_logging_configured, _console_sink_id

    level = log_level or app_settings.logging.default_level

    if _is_logging_configured and log_level is None:
        return

    if not _is_logging_configured:
        logger.remove()
    elif _console_sink_id is not None:
        logger.remove(_console_sink_id)

    _console_sink_id = logger.add(
        RichHandler(
            console=get_console(),
            rich_tracebacks=True,
            markup=False,
            log_time_format="[%X]",
            show_path=False,
        ),
        format="{message}",
        level=level,
    )
    _is_logging_configured = True


def add_file_sink(directory: Path, level: str = "DEBUG") -> Path:
    """Attach a sidecar log file in ``directory`` (idempotent per path).

    Args:
        directory: Output directory of the current run
        level: Minimum level written to the file

    Returns:
        Path of the log file
    """
    configure_logger()
    directory.mkdir(parents=True, exist_ok=True)
    log_file = directory / app_settings.logging.log_filename
    if log_file not in _file_sink_ids:
        _file_sink_ids[log_file] = logger.add(
            log_file,
            rotation=app_settings.logging.log_rotation,
            level=level,
            format=app_settings.logging.log_format,
            backtrace=True,
            diagnose=False,
        )
    return log_file


def remove_file_sinks() -> None:
    """Detach every sidecar log file."""
    for sink_id in _file_sink_ids.values():
        logger.remove(sink_id)
    _file_sink_ids.clear()


def get_logger(name: Optional[str] = None) -> type[logger]:
    """Get a configured logger instance with automatic name inference.

    Args:
        name: Optional logger name (auto-inferred from caller if not provided)

    Returns:
        Configured logger instance bound to the module name
    """
    configure_logger()

    if name is None:
        frame = sys._getframe(1)
        name = frame.f_globals.get("__name__", "gmewitness")

    return logger.bind(module=name)


def set_log_level(level: str) -> None:
    """Change the console log level at runtime.

    Args:
        level: New log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    configure_logger(log_level=level)

"""Logging and parallel execution helpers."""

from .logging import configure_logger, get_logger, set_log_level
from .parallel import parallel_map, resolve_workers

__all__ = [
    "configure_logger",
    "get_logger",
    "parallel_map",
    "resolve_workers",
    "set_log_level",
]

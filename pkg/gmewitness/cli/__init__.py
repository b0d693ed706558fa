"""Command-line interface: run configuration, subcommands and result files."""

from .config import RunConfig, dump_config, load_config, validate_config
from .main import main, run

__all__ = ["RunConfig", "dump_config", "load_config", "main", "run", "validate_config"]

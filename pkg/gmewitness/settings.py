"""Settings configuration for the GME witness pipeline.

Library-wide numerical tolerances, guards and defaults live here as
pydantic-settings sections. Every value can be overridden from the
environment (``FOCK__MAX_BASIS_SIZE=200000``) or a ``.env`` file.
"""

import math
from typing import Literal, Optional

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class FockSettings(BaseSettings):
    """Truncated Fock-space guards and tolerances."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="FOCK__",
        extra="allow",
    )

    default_n_max: int = 2

    # Dimension guards
    max_basis_size: int = 100_000
    max_pattern_modes: int = 20

    # State validation
    hermitian_tol: float = 1e-12
    trace_tol: float = 1e-12
    psd_tol: float = 1e-10

    # Probabilities outside [-tol, 1 + tol] are a consistency failure
    probability_tol: float = 1e-10


class BisepSettings(BaseSettings):
    """Biseparable-bound optimisation settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="BISEP__",
        extra="allow",
    )

    # Mixing-angle search on [0, pi/2]
    angle_grid_points: int = 2001
    angle_xtol: float = 1e-10
    refine_candidates: int = 4

    max_asymmetric_parties: int = 24

    # Worst case over an alpha box
    box_grid_points: int = 5
    max_box_grid_modes: int = 4
    max_box_corners: int = 4096

    # Product-state oracle
    oracle_restarts: int = 200
    oracle_tol: float = 1e-12
    oracle_max_iter: int = 2000
    oracle_max_parties: int = 8


class SimulationSettings(BaseSettings):
    """Source model and trial simulation settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SIMULATION__",
        extra="allow",
    )

    # Heralding-detector dark fraction of the reference setup (0.6 of 11.5 counts/s)
    experiment_herald_dark_fraction: float = 0.6 / 11.5

    sigma_convention: Literal["conservative", "paper-tables"] = "conservative"

    # Trials per independently seeded block
    trial_block_size: int = 250_000


class TuningSettings(BaseSettings):
    """Grid search and refinement of the witness parameters."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="TUNING__",
        extra="allow",
    )

    lambda_min: float = 0.1
    lambda_max: float = 100.0
    lambda_points: int = 40

    mu_min: float = 1.0
    mu_max: float = 1e4
    mu_points: int = 40

    refine: bool = True
    refine_xatol: float = 1e-7
    refine_fatol: float = 1e-11
    refine_max_iter: int = 600


class ScanSettings(BaseSettings):
    """Scaling-study defaults."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SCAN__",
        extra="allow",
    )

    alpha: float = math.sqrt(math.log(2.0))
    tune_points: int = 12
    max_parties: int = 40


class LoggingSettings(BaseSettings):
    """Logging configuration settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="LOGGING__",
        extra="allow",
    )

    # Sidecar log written next to CLI outputs
    log_filename: str = "run.log"
    log_rotation: str = "10 MB"

    log_format: str = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} | {message}"

    default_level: str = "WARNING"

    # Rich Theme Colors
    theme_info: str = "bold cyan"
    theme_warning: str = "bold yellow"
    theme_error: str = "bold red"
    theme_critical: str = "bold white on red"
    theme_debug: str = "dim blue"
    theme_witness: str = "bold green"

    # Rich Console Settings
    traceback_width: int = 120
    show_locals: bool = False


class RuntimeSettings(BaseSettings):
    """Process-level runtime knobs."""

    model_config = SettingsConfigDict(
        env_file=".env",
        extra="allow",
    )

    workers: Optional[int] = Field(
        default=None,
        ge=1,
        validation_alias=AliasChoices("WITNESS_WORKERS", "RUNTIME__WORKERS"),
    )


class Settings(BaseSettings):
    """Main settings class that aggregates all configuration components."""

    model_config = SettingsConfigDict(
        env_nested_delimiter="__",
        env_file=".env",
        extra="allow",
    )

    fock: FockSettings = FockSettings()
    bisep: BisepSettings = BisepSettings()
    simulation: SimulationSettings = SimulationSettings()
    tuning: TuningSettings = TuningSettings()
    scan: ScanSettings = ScanSettings()
    logging: LoggingSettings = LoggingSettings()
    runtime: RuntimeSettings = RuntimeSettings()


app_settings = Settings()

"""Run configuration of the command-line interface.

A run is described by a single JSON document validated into
:class:`RunConfig`. Unknown keys and duplicate keys are rejected, every
default is filled in, and dumping a resolved config and validating it
again yields the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional, Union

import orjson
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from gmewitness.common.models import DisplacementSpec, SigmaConvention, WitnessParams
from gmewitness.errors import ConfigValidationError
from gmewitness.expsim import Conventions, SourceModel, TuningGrid
from gmewitness.fock import PhaseAveraging
from gmewitness.settings import app_settings


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class AlphaConfig(_Section):
    """Displacement amplitude: nominal value and calibration box."""

    nominal: float = Field(
        default_factory=lambda: app_settings.scan.alpha,
        ge=0,
        description="Nominal amplitude shared by all parties",
    )
    per_mode: Optional[list[float]] = Field(
        None, description="Per-party nominal amplitudes (overrides nominal)"
    )
    box: Optional[tuple[float, float]] = Field(
        None, description="Calibration interval [min, max] applied to every party"
    )

    @field_validator("box")
    @classmethod
    def _box_ordered(cls, box: Optional[tuple[float, float]]) -> Optional[tuple[float, float]]:
        if box is not None:
            lo, hi = box
            if lo < 0:
                raise ValueError("box must be non-negative")
            if lo > hi:
                raise ValueError(f"box is inverted: [{lo}, {hi}]")
        return box

    @field_validator("per_mode")
    @classmethod
    def _per_mode_non_negative(cls, values: Optional[list[float]]) -> Optional[list[float]]:
        if values is not None and any(v < 0 for v in values):
            raise ValueError("amplitudes must be non-negative")
        return values


class SourceConfig(_Section):
    """Heralded source, losses and dark counts."""

    p: float = Field(0.0, ge=0, description="Relative two-photon weight")
    eta: float = Field(1.0, ge=0, le=1, description="Overall transmission")
    per_mode_eta: Optional[list[float]] = Field(None, description="Per-party transmissions")
    split_weights: Optional[list[float]] = Field(None, description="Splitter intensity weights")
    p_dc: float = Field(0.0, ge=0, le=1, description="Dark-count probability per detector")
    herald_dark_fraction: float = Field(
        0.0, ge=0, lt=1, description="Fraction of heralds caused by heralding dark counts"
    )


class ConventionsConfig(_Section):
    """Estimator and reduction choices."""

    sigma_convention: SigmaConvention = Field(
        default_factory=lambda: app_settings.simulation.sigma_convention
    )
    symmetric_bipartitions: Optional[bool] = None
    phase_averaging: bool = True
    phase_points: Optional[int] = Field(None, ge=1)
    path: Literal["auto", "exact", "reduced"] = "auto"
    local_symmetric: bool = True


class TuningConfig(_Section):
    """Lambda/mu search grid."""

    lambda_min: float = Field(default_factory=lambda: app_settings.tuning.lambda_min, gt=0)
    lambda_max: float = Field(default_factory=lambda: app_settings.tuning.lambda_max, gt=0)
    lambda_points: int = Field(default_factory=lambda: app_settings.tuning.lambda_points, ge=1)
    mu_min: float = Field(default_factory=lambda: app_settings.tuning.mu_min, gt=0)
    mu_max: float = Field(default_factory=lambda: app_settings.tuning.mu_max, gt=0)
    mu_points: int = Field(default_factory=lambda: app_settings.tuning.mu_points, ge=1)
    refine: bool = Field(default_factory=lambda: app_settings.tuning.refine)


class TrialsConfig(_Section):
    """Trial numbers of the o, z and s settings."""

    n: int = Field(1_000_000, ge=1)
    m: int = Field(1_000_000, ge=1)
    l: int = Field(1_000_000, ge=1)  # noqa: E741


class ObservedConfig(_Section):
    """Published sample means and trial counts."""

    o_bar: float
    z_bar: float
    s_bar: float = Field(..., le=0)
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    l: int = Field(..., ge=1)  # noqa: E741


class ScanConfig(_Section):
    """Scaling-study ranges."""

    n_values: Optional[list[int]] = Field(None, description="Party counts of scan-n")
    n_min: int = Field(2, ge=2)
    n_max: int = Field(30, ge=2)
    etas: list[float] = Field(
        default_factory=lambda: [round(0.06 + 0.03 * k, 2) for k in range(10)],
        description="Transmissions of scan-eta",
    )
    sources: list[tuple[float, float]] = Field(
        default_factory=lambda: [(5e-3, 1e-6)], description="(p, p_dc) pairs of scan-eta"
    )
    n_cap: int = Field(default_factory=lambda: app_settings.scan.max_parties, ge=2)
    tune_points: int = Field(default_factory=lambda: app_settings.scan.tune_points, ge=1)

    @field_validator("etas")
    @classmethod
    def _etas_in_range(cls, etas: list[float]) -> list[float]:
        if not etas or any(not 0.0 < e <= 1.0 for e in etas):
            raise ValueError("etas must be a non-empty list of values in (0, 1]")
        return etas


class OutputConfig(_Section):
    """Artifacts written next to result.json."""

    csv: bool = False


class RunConfig(_Section):
    """Fully resolved configuration of one CLI run."""

    n_parties: int = Field(..., alias="N", ge=2, description="Number of parties")
    n_max: int = Field(2, ge=2, description="Photon-number truncation")
    lam: Union[float, Literal["tune"]] = Field("tune", alias="lambda")
    mu: Union[float, Literal["tune"]] = "tune"
    alpha: AlphaConfig = Field(default_factory=AlphaConfig)
    source: SourceConfig = Field(default_factory=SourceConfig)
    conventions: ConventionsConfig = Field(default_factory=ConventionsConfig)
    tuning: TuningConfig = Field(default_factory=TuningConfig)
    trials: TrialsConfig = Field(default_factory=TrialsConfig)
    observed: Optional[ObservedConfig] = None
    bound: Optional[float] = Field(None, description="Explicit biseparable bound for pvalue")
    target_log10_p: float = Field(-10.0, lt=0)
    scan: ScanConfig = Field(default_factory=ScanConfig)
    seed: int = Field(0, ge=0, lt=2**64)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("lam", "mu")
    @classmethod
    def _positive_weight(cls, value: Union[float, str]) -> Union[float, str]:
        if value != "tune" and not float(value) > 0:
            raise ValueError("must be positive or 'tune'")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> RunConfig:
        if (self.lam == "tune") != (self.mu == "tune"):
            raise ValueError("lambda and mu must both be numbers or both be 'tune'")
        n = self.n_parties
        for name, values in (
            ("alpha.per_mode", self.alpha.per_mode),
            ("source.per_mode_eta", self.source.per_mode_eta),
            ("source.split_weights", self.source.split_weights),
        ):
            if values is not None and len(values) != n:
                raise ValueError(f"{name} needs {n} entries, got {len(values)}")
        return self

    @property
    def tuned(self) -> bool:
        """True when lambda and mu are to be tuned."""
        return self.lam == "tune"

    def witness_params(self) -> WitnessParams:
        """Explicit witness parameters."""
        if self.tuned:
            raise ConfigValidationError("lambda", "this command needs numeric lambda and mu")
        return WitnessParams(self.n_parties, float(self.lam), float(self.mu))

    def displacement(self) -> DisplacementSpec:
        """Displacement spec of the configured parties."""
        nominal = self.alpha.per_mode or [self.alpha.nominal] * self.n_parties
        box = self.alpha.box
        try:
            if box is None:
                return DisplacementSpec.degenerate(nominal)
            return DisplacementSpec(
                nominal=tuple(nominal),
                lower=(box[0],) * self.n_parties,
                upper=(box[1],) * self.n_parties,
            )
        except ValueError as exc:
            raise ConfigValidationError("alpha", str(exc)) from exc

    def source_model(self, n_parties: Optional[int] = None) -> SourceModel:
        """Source model of the configured parties."""
        src = self.source
        try:
            return SourceModel(
                n_parties=n_parties or self.n_parties,
                p=src.p,
                eta=src.eta,
                p_dc=src.p_dc,
                herald_dark_fraction=src.herald_dark_fraction,
                per_mode_eta=tuple(src.per_mode_eta) if src.per_mode_eta else None,
                split_weights=tuple(src.split_weights) if src.split_weights else None,
                n_max=self.n_max,
            )
        except ValueError as exc:
            raise ConfigValidationError("source", str(exc)) from exc

    def evaluation_conventions(self) -> Conventions:
        """Evaluation conventions."""
        conv = self.conventions
        return Conventions(
            sigma_convention=conv.sigma_convention,
            symmetric_bipartitions=conv.symmetric_bipartitions,
            phase_averaging=PhaseAveraging(conv.phase_averaging, conv.phase_points),
            path=conv.path,
            local_symmetric=conv.local_symmetric,
        )

    def tuning_grid(self, points: Optional[int] = None) -> TuningGrid:
        """Tuning grid; ``points`` overrides both axis sizes."""
        t = self.tuning
        try:
            return TuningGrid(
                lambda_min=t.lambda_min,
                lambda_max=t.lambda_max,
                lambda_points=points or t.lambda_points,
                mu_min=t.mu_min,
                mu_max=t.mu_max,
                mu_points=points or t.mu_points,
                refine=t.refine,
            )
        except ValueError as exc:
            raise ConfigValidationError("tuning", str(exc)) from exc

    def dump(self) -> dict[str, Any]:
        """JSON-ready dict using the external key names."""
        return self.model_dump(mode="json", by_alias=True)


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise ConfigValidationError(key, "duplicate key")
        result[key] = value
    return result


def parse_document(text: str | bytes) -> dict[str, Any]:
    """Parse a JSON config document, rejecting duplicate keys."""
    try:
        # orjson keeps the last duplicate silently, so the pairs hook goes through json
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError("<document>", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigValidationError("<document>", "config must be a JSON object")
    return data


def apply_override(data: dict[str, Any], dotted: str, raw: str) -> None:
    """Set ``data[a][b]... = value`` for a ``--a.b value`` flag; the value is parsed as JSON when possible."""
    try:
        value = orjson.loads(raw)
    except orjson.JSONDecodeError:
        value = raw
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        child = node.setdefault(key, {})
        if not isinstance(child, dict):
            raise ConfigValidationError(dotted, f"'{key}' is not a section")
        node = child
    node[keys[-1]] = value


def validate_config(data: dict[str, Any]) -> RunConfig:
    """Validate a config dict into a :class:`RunConfig`.

    Raises:
        ConfigValidationError: Naming the first offending field by its dotted path.
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or "<document>"
        message = error["msg"].removeprefix("Value error, ")
        raise ConfigValidationError(field, message) from exc


def load_config(path: Path | None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Read, override and validate a config file (``None`` starts from an empty document)."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            data = parse_document(path.read_bytes())
        except OSError as exc:
            raise ConfigValidationError("--config", f"cannot read {path}: {exc}") from exc
    for dotted, raw in (overrides or {}).items():
        apply_override(data, dotted, raw)
    return validate_config(data)


def dump_config(config: RunConfig) -> bytes:
    """Canonical JSON bytes of a resolved config."""
    return orjson.dumps(config.dump(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)


__all__ = [
    "AlphaConfig",
    "ConventionsConfig",
    "ObservedConfig",
    "OutputConfig",
    "RunConfig",
    "ScanConfig",
    "SourceConfig",
    "TrialsConfig",
    "TuningConfig",
    "apply_override",
    "dump_config",
    "load_config",
    "parse_document",
    "validate_config",
]

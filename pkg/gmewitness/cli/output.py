"""Result files of the command-line interface.

``result.json`` holds the schema version, the command, the library
version, the resolved config and the command result. Table-shaped
results also go to ``curve.csv``; every CSV row is mirrored under
``result.rows``. No timestamps are written here so identical runs give
identical bytes.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import Any

import orjson
import pandas as pd

from gmewitness.__version__ import __version__
from gmewitness.bisep import BoundResult
from gmewitness.common.models import ObservableTriple, TrialCounts
from gmewitness.expsim import ScenarioReport
from gmewitness.utils.logging import get_logger

logger = get_logger("gmewitness.cli.output")

SCHEMA_VERSION = 1
RESULT_FILENAME = "result.json"
CSV_FILENAME = "curve.csv"

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def bound_to_dict(bound: BoundResult) -> dict[str, Any]:
    """Flatten a bound result; per-partition values go to ``rows``."""
    return {
        "value": bound.value,
        "partition": bound.partition.label(),
        "angle": bound.angle,
        "alpha": list(bound.alpha),
        "alpha_strategy": bound.alpha_strategy,
        "alpha_points": bound.alpha_points,
    }


def partition_rows(bound: BoundResult) -> list[dict[str, Any]]:
    """One row per bipartition at the worst-case displacement."""
    return [
        {
            "partition": row.partition.label(),
            "g1_size": len(row.partition.g1),
            "value": row.value,
            "angle": row.angle,
            "grid_slack": row.grid_slack,
        }
        for row in bound.per_partition
    ]


def triple_to_dict(triple: ObservableTriple) -> dict[str, Any]:
    """Observable triple with its witness sum."""
    return {**asdict(triple), "witness": triple.witness}


def report_to_dict(report: ScenarioReport) -> dict[str, Any]:
    """Flatten a scenario report."""
    return {
        "lambda": report.params.lam,
        "mu": report.params.mu,
        "N": report.params.n_parties,
        "triple": triple_to_dict(report.triple),
        "bound": bound_to_dict(report.bound),
        "bound_with_pstar": report.bound_with_pstar,
        "dark_penalty": report.dark_penalty,
        "violation": report.violation,
        "path": report.path,
        "p_click": list(report.p_click),
        "p_cc": report.p_cc,
        "operator_expectation": report.operator_expectation,
    }


def counts_to_dict(counts: TrialCounts) -> dict[str, Any]:
    """Trial counts with their witness estimate."""
    return {**asdict(counts), "witness": counts.witness}


def counts_from_dict(data: dict[str, Any]) -> TrialCounts:
    """Inverse of :func:`counts_to_dict`."""
    fields = {k: v for k, v in data.items() if k != "witness"}
    return TrialCounts(**fields)


def build_document(
    command: str,
    config: dict[str, Any],
    result: dict[str, Any],
    rows: list[dict[str, Any]] | None = None,
) -> dict[str, Any]:
    """Assemble the schema-versioned result document."""
    if rows is not None:
        result = {**result, "rows": rows}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": __version__,
        "config": config,
        "result": result,
    }


def write_outputs(
    out_dir: Path,
    document: dict[str, Any],
    rows: list[dict[str, Any]] | None = None,
    write_csv: bool = False,
) -> list[Path]:
    """Write ``result.json`` (and ``curve.csv``) into ``out_dir``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    result_path = out_dir / RESULT_FILENAME
    result_path.write_bytes(orjson.dumps(document, option=_JSON_OPTIONS) + b"\n")
    written.append(result_path)
    if write_csv and rows:
        csv_path = out_dir / CSV_FILENAME
        frame = pd.DataFrame(rows)
        frame = frame[sorted(frame.columns)]
        frame.to_csv(csv_path, index=False)
        written.append(csv_path)
    logger.info(f"Wrote {', '.join(str(p) for p in written)}")
    return written


def read_document(path: Path) -> dict[str, Any]:
    """Load a previously written result document."""
    return orjson.loads(path.read_bytes())


__all__ = [
    "CSV_FILENAME",
    "RESULT_FILENAME",
    "SCHEMA_VERSION",
    "bound_to_dict",
    "build_document",
    "counts_from_dict",
    "counts_to_dict",
    "partition_rows",
    "read_document",
    "report_to_dict",
    "triple_to_dict",
    "write_outputs",
]

"""Subcommand implementations.

Every command takes the resolved :class:`RunConfig` plus the parsed
arguments and returns a :class:`CommandOutput`: the JSON result and,
for table-shaped results, the rows mirrored into ``curve.csv``.
"""

from __future__ import annotations

import argparse
from collections.abc import Callable
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

from gmewitness.bisep import worst_case_bound
from gmewitness.cli.config import RunConfig
from gmewitness.cli.output import (
    bound_to_dict,
    counts_from_dict,
    counts_to_dict,
    partition_rows,
    read_document,
    report_to_dict,
    triple_to_dict,
)
from gmewitness.common.models import TrialCounts, WitnessParams
from gmewitness.errors import ConfigValidationError
from gmewitness.expsim import (
    ScenarioReport,
    dark_penalty,
    evaluate,
    last_violating,
    sample_trials,
    scan_eta,
    scan_n,
    subset_analysis,
    tune_params,
)
from gmewitness.stats import empirical_half_widths, ln_p_value, min_trials, p_value, ranges
from gmewitness.witness import f_coeffs


@dataclass(frozen=True)
class CommandOutput:
    """Result of one subcommand."""

    result: dict[str, Any]
    rows: list[dict[str, Any]] | None = None


def _scenario(config: RunConfig) -> ScenarioReport:
    """Evaluate the configured model, tuning lambda and mu when requested."""
    model = config.source_model()
    spec = config.displacement()
    conventions = config.evaluation_conventions()
    if config.tuned:
        return tune_params(model, spec, config.tuning_grid(), conventions).report
    return evaluate(model, config.witness_params(), spec, conventions)


def run_bound(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Worst-case biseparable bound and its per-partition table."""
    params = config.witness_params()
    bound = worst_case_bound(
        params, config.displacement(), config.conventions.symmetric_bipartitions
    )
    return CommandOutput(
        result={"lambda": params.lam, "mu": params.mu, "N": params.n_parties, **bound_to_dict(bound)},
        rows=partition_rows(bound),
    )


def run_simulate(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Scenario report of the configured source model."""
    report = _scenario(config)
    return CommandOutput(result={"tuned": config.tuned, **report_to_dict(report)})


def run_sample(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Simulated trial averages next to their expected values."""
    report = _scenario(config)
    t = config.trials
    counts = sample_trials(
        config.source_model(),
        report.params,
        config.displacement(),
        (t.n, t.m, t.l),
        config.seed,
        config.evaluation_conventions(),
    )
    half_o, half_z, half_s = empirical_half_widths(counts)
    return CommandOutput(
        result={
            "lambda": report.params.lam,
            "mu": report.params.mu,
            "trials": counts_to_dict(counts),
            "expected": triple_to_dict(report.triple),
            "half_width_99": {"o": half_o, "z": half_z, "s": half_s},
            "bound": report.bound.value,
            "dark_penalty": report.dark_penalty,
        }
    )


def _load_counts(config: RunConfig, trials_path: Path | None) -> tuple[TrialCounts, WitnessParams]:
    if trials_path is not None:
        try:
            document = read_document(trials_path)
            sampled = document["result"]
            counts = counts_from_dict(sampled["trials"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise ConfigValidationError("--trials", f"not a sample result file: {exc}") from exc
        if config.tuned:
            params = WitnessParams(config.n_parties, sampled["lambda"], sampled["mu"])
        else:
            params = config.witness_params()
        return counts, params
    if config.observed is None:
        raise ConfigValidationError("observed", "pvalue needs an observed block or --trials")
    obs = config.observed
    counts = TrialCounts(
        o_bar=obs.o_bar,
        z_bar=obs.z_bar,
        s_bar=obs.s_bar,
        n=obs.n,
        m=obs.m,
        l=obs.l,
        n_parties=config.n_parties,
    )
    return counts, config.witness_params()


def run_pvalue(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Hoeffding p-value of observed or simulated trial averages."""
    counts, params = _load_counts(config, getattr(args, "trials", None))
    spec = config.displacement()
    if config.bound is not None:
        bound = config.bound
        bound_source = "config"
    else:
        bound = worst_case_bound(params, spec, config.conventions.symmetric_bipartitions).value
        bound += dark_penalty(params.n_parties, config.source.p_dc)
        bound_source = "computed"
    r = ranges(params, f_coeffs(spec), config.conventions.sigma_convention)
    t = counts.witness - bound
    return CommandOutput(
        result={
            "lambda": params.lam,
            "mu": params.mu,
            "bound": bound,
            "bound_source": bound_source,
            "t": t,
            "log10_p": p_value(counts, bound, r),
            "ln_p": ln_p_value(counts, bound, r),
            "ranges": asdict(r),
            "target_log10_p": config.target_log10_p,
            "min_trials": min_trials(t, r, config.target_log10_p) if t > 0 else None,
        }
    )


def run_subsets(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Violation of every subset of two or more parties."""
    params = None
    if not config.tuned:
        params = {
            size: WitnessParams(size, float(config.lam), float(config.mu))
            for size in range(2, config.n_parties + 1)
        }
    t = config.trials
    rows = subset_analysis(
        config.source_model(),
        config.displacement(),
        params,
        config.evaluation_conventions(),
        counts=(t.n, t.m, t.l),
        grid=config.tuning_grid(),
    )
    table = [{**asdict(row), "modes": "-".join(str(m) for m in row.modes), "size": row.size} for row in rows]
    return CommandOutput(
        result={"subsets": len(rows), "violating": sum(row.violation > 0 for row in rows)},
        rows=table,
    )


def run_scan_n(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Violation against the number of parties."""
    scan = config.scan
    n_values = scan.n_values or list(range(scan.n_min, scan.n_max + 1))
    params = None if config.tuned else config.witness_params()
    points = scan_n(
        config.source_model(2),
        n_values,
        alpha=config.alpha.nominal,
        box=config.alpha.box,
        params=params,
        grid=config.tuning_grid(scan.tune_points),
        conventions=config.evaluation_conventions(),
    )
    return CommandOutput(
        result={"last_violating_N": last_violating(points)},
        rows=[asdict(p) for p in points],
    )


def run_scan_eta(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Largest violating party count against the transmission."""
    scan = config.scan
    rows = scan_eta(
        config.source_model(2),
        scan.etas,
        scan.sources,
        alpha=config.alpha.nominal,
        box=config.alpha.box,
        grid=config.tuning_grid(scan.tune_points),
        conventions=config.evaluation_conventions(),
        n_cap=scan.n_cap,
    )
    return CommandOutput(result={"cells": len(rows)}, rows=[asdict(r) for r in rows])


def run_tune(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Tuned lambda and mu with the scored grid."""
    grid = config.tuning_grid()
    tuned = tune_params(
        config.source_model(), config.displacement(), grid, config.evaluation_conventions()
    )
    rows = [
        {"lambda": float(lam), "mu": float(mu), "violation": float(tuned.grid_violation[i, j])}
        for i, lam in enumerate(grid.lambdas)
        for j, mu in enumerate(grid.mus)
    ]
    return CommandOutput(
        result={
            "lambda": tuned.lam,
            "mu": tuned.mu,
            "violation": tuned.violation,
            "refined": tuned.refined,
            "report": report_to_dict(tuned.report),
        },
        rows=rows,
    )


def run_validate(config: RunConfig, args: argparse.Namespace) -> CommandOutput:
    """Resolved configuration only."""
    return CommandOutput(result={"valid": True})


COMMANDS: dict[str, tuple[Callable[[RunConfig, argparse.Namespace], CommandOutput], str]] = {
    "bound": (run_bound, "Worst-case biseparable bound"),
    "simulate": (run_simulate, "Witness value, bound and violation of the source model"),
    "sample": (run_sample, "Monte Carlo trial averages"),
    "pvalue": (run_pvalue, "Hoeffding p-value of trial averages"),
    "subsets": (run_subsets, "Violation of every subset of parties"),
    "scan-n": (run_scan_n, "Violation against the number of parties"),
    "scan-eta": (run_scan_eta, "Largest violating party count against the transmission"),
    "tune": (run_tune, "Grid search and refinement of lambda and mu"),
    "validate": (run_validate, "Validate and echo the resolved configuration"),
}


__all__ = ["COMMANDS", "CommandOutput"]

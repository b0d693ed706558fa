"""Console summaries on stderr."""

from __future__ import annotations

from typing import Any

from rich.table import Table

from gmewitness.utils.logging import get_console


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "-"
    return str(value)


def show_summary(title: str, values: dict[str, Any]) -> None:
    """Two-column key/value table of the scalar entries of a result."""
    table = Table(title=title, show_header=False, title_style="witness")
    table.add_column("quantity", style="info")
    table.add_column("value", justify="right")
    for key, value in values.items():
        if isinstance(value, (dict, list)):
            continue
        table.add_row(key, _format(value))
    get_console().print(table)


def show_rows(title: str, rows: list[dict[str, Any]], limit: int = 40) -> None:
    """Tabular view of result rows (first ``limit`` rows)."""
    if not rows:
        return
    columns = list(rows[0].keys())
    table = Table(title=title, title_style="witness")
    for column in columns:
        table.add_column(column, justify="right")
    for row in rows[:limit]:
        table.add_row(*(_format(row.get(c)) for c in columns))
    if len(rows) > limit:
        table.caption = f"{len(rows) - limit} more rows in the result file"
    get_console().print(table)


__all__ = ["show_rows", "show_summary"]

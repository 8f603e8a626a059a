"""Plain-text tables. Every number is a rounding of a value in the JSON report."""

from __future__ import annotations

from typing import Sequence

from ..meta import MetaResult, contribution_totals


def fmt(x) -> str:
    """Four decimals, switching to four-digit scientific form for tiny values."""
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, int):
        return str(x)
    if x != 0 and abs(x) < 1e-3:
        return f"{x:.4e}"
    return f"{x:.4f}"


def _render(header: Sequence[str], body: Sequence[Sequence[str]]) -> list:
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(header)]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return "  ".join([first, *rest]).rstrip()

    rule = "-" * len(line(header))
    return [line(header), rule, *(line(r) for r in body)]


def row_label(row: dict) -> str:
    label = f"{row['study_label']}, {row['country']}" if row.get("country") else row["study_label"]
    return f"{label} ({row['group_tag']})" if row["group_tag"] else label


def contribution_table(rows: Sequence[dict], r_bar: float) -> str:
    """Per-observation table with N, r, NxR and N(r - r_bar)^2 plus a total row."""
    header = ["Study", "N", "r", "NxR", f"n(r-{fmt(r_bar)})^2"]
    body = [
        [row_label(row), fmt(row["n"]), fmt(row["r"]), fmt(row["n_r"]), fmt(row["n_sq_dev"])]
        for row in rows
    ]
    tot = contribution_totals(rows)
    lines = _render(header, body + [["TOTAL", fmt(tot["n"]), "", fmt(tot["n_r"]), fmt(tot["n_sq_dev"])]])
    return "\n".join(lines) + "\n"


SUMMARY_FIELDS = (
    ("k", "observations"),
    ("total_n", "total N"),
    ("mean_n", "mean N"),
    ("r_bar", "weighted mean r"),
    ("var_observed", "observed variance"),
    ("var_sampling", "sampling-error variance"),
    ("var_true", "true-effect variance"),
    ("clamped", "variance clamped at zero"),
    ("z", "z"),
    ("ci_low", "interval low"),
    ("ci_high", "interval high"),
)


def summary_table(result: MetaResult) -> str:
    data = result.to_dict()
    body = [[label, fmt(data[key])] for key, label in SUMMARY_FIELDS]
    return "\n".join(_render(["quantity", "value"], body)) + "\n"


def meta_report(rows: Sequence[dict], result: MetaResult, title: str) -> str:
    return f"{title}\n\n{contribution_table(rows, result.r_bar)}\n{summary_table(result)}"

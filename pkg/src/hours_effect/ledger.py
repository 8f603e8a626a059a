"""Study records: CSV ingestion, percent-change conversion and filtering.

One row is one elasticity estimate, not one study. A study that reports
separate male/female or sector estimates contributes several rows that
share ``study_label``.

Rows whose ``group_tag`` carries the ``alternate`` tag are secondary
estimates for a sample that already has a headline row (for example a
cost-adjusted re-estimate over a sub-sample). They are kept in the ledger
so the cost-weighted analysis can use them, and are dropped from
headline analyses with ``exclude_tags={"alternate"}``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

HEADER = (
    "id",
    "study_label",
    "country",
    "group_tag",
    "sample_size",
    "elasticity",
    "significant",
    "cost_weighted",
    "source_note",
)

ALTERNATE_TAG = "alternate"
MAX_ABS_ELASTICITY = 10.0


class LedgerError(ValueError):
    """Raised on malformed ledger input.

    ``row`` is the 1-based line number in the CSV file (the header is line 1)
    and ``column`` the offending column name, when known.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class StudyObservation:
    id: str
    study_label: str
    country: str
    group_tag: str
    sample_size: int
    elasticity: float
    significant: bool
    cost_weighted: bool
    source_note: str = ""

    def __post_init__(self):
        if isinstance(self.sample_size, bool) or not isinstance(self.sample_size, int):
            raise LedgerError(f"sample_size must be an integer, got {self.sample_size!r}")
        if self.sample_size < 2:
            raise LedgerError(f"sample_size must be >= 2, got {self.sample_size}")
        if not math.isfinite(self.elasticity):
            raise LedgerError(f"elasticity must be finite, got {self.elasticity!r}")
        if abs(self.elasticity) > MAX_ABS_ELASTICITY:
            raise LedgerError(f"|elasticity| exceeds {MAX_ABS_ELASTICITY}: {self.elasticity}")

    @property
    def tags(self) -> frozenset[str]:
        """Semicolon-separated tokens of ``group_tag``."""
        return frozenset(t.strip() for t in self.group_tag.split(";") if t.strip())


@dataclass(frozen=True)
class FilterSpec:
    """Declarative selection of observations.

    An observation passes when it meets every enabled flag requirement,
    carries every tag in ``include_tags`` and none in ``exclude_tags``.
    The default filter accepts everything.
    """

    require_significant: bool = False
    require_cost_weighted: bool = False
    include_tags: frozenset[str] = field(default_factory=frozenset)
    exclude_tags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        # accept any iterable of strings for the tag sets
        object.__setattr__(self, "include_tags", frozenset(self.include_tags))
        object.__setattr__(self, "exclude_tags", frozenset(self.exclude_tags))

    def accepts(self, obs: StudyObservation) -> bool:
        if self.require_significant and not obs.significant:
            return False
        if self.require_cost_weighted and not obs.cost_weighted:
            return False
        tags = obs.tags
        if not self.include_tags <= tags:
            return False
        if tags & self.exclude_tags:
            return False
        return True

    def conjoin(self, other: "FilterSpec") -> "FilterSpec":
        """Spec accepting exactly the observations both specs accept."""
        return FilterSpec(
            require_significant=self.require_significant or other.require_significant,
            require_cost_weighted=self.require_cost_weighted or other.require_cost_weighted,
            include_tags=self.include_tags | other.include_tags,
            exclude_tags=self.exclude_tags | other.exclude_tags,
        )

    def to_dict(self) -> dict:
        return {
            "require_significant": self.require_significant,
            "require_cost_weighted": self.require_cost_weighted,
            "include_tags": sorted(self.include_tags),
            "exclude_tags": sorted(self.exclude_tags),
        }


def analysis_filter(
    significant_only: bool = False,
    cost_weighted_only: bool = False,
    alternates: str = "auto",
) -> FilterSpec:
    """Build the FilterSpec behind the two standard analyses.

    ``alternates`` is ``"auto"`` (keep alternate rows only when cost weighting
    is required), ``"include"`` or ``"exclude"``.
    """
    if alternates not in ("auto", "include", "exclude"):
        raise ValueError(f"alternates must be auto, include or exclude, got {alternates!r}")
    drop = alternates == "exclude" or (alternates == "auto" and not cost_weighted_only)
    return FilterSpec(
        require_significant=significant_only,
        require_cost_weighted=cost_weighted_only,
        exclude_tags=frozenset({ALTERNATE_TAG}) if drop else frozenset(),
    )


SIGNIFICANT = analysis_filter(significant_only=True)
SIGNIFICANT_COST_WEIGHTED = analysis_filter(significant_only=True, cost_weighted_only=True)


def elasticity_from_percent_changes(d_employment_pct: float, d_hours_pct: float) -> float:
    """Employment elasticity with respect to hours from two signed percent changes.

    A positive result means employment moves in the same direction as hours,
    so cutting hours cuts jobs.

    >>> round(elasticity_from_percent_changes(-2.4, -2.5), 10)
    0.96
    """
    if d_hours_pct == 0:
        raise ZeroDivisionError("hours change must be non-zero")
    return d_employment_pct / d_hours_pct


def apply_filter(ledger: Iterable[StudyObservation], spec: FilterSpec) -> list[StudyObservation]:
    return [obs for obs in ledger if spec.accepts(obs)]


def _parse_bool(text: str, row: int, column: str) -> bool:
    value = text.strip().lower()
    if value == "true":
        return True
    if value == "false":
        return False
    raise LedgerError(f"expected true/false, got {text!r}", row, column)


def _parse_float(text: str, row: int, column: str) -> float:
    # European-style comma decimals ("0,20") are accepted
    value = text.strip().replace(",", ".")
    try:
        number = float(value)
    except ValueError:
        raise LedgerError(f"not a number: {text!r}", row, column) from None
    if not math.isfinite(number):
        raise LedgerError(f"non-finite value: {text!r}", row, column)
    return number


def _parse_int(text: str, row: int, column: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise LedgerError(f"not an integer: {text!r}", row, column) from None


def parse_ledger(csv_text: str) -> list[StudyObservation]:
    """Parse ledger CSV text into observations, in file order.

    Raises
    ------
    LedgerError
        On a wrong header, a short or long row, an unparsable field, or an
        observation that breaks the record invariants. The error carries the
        row number and column name.
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise LedgerError("empty input: missing header", row=1) from None
    if header and header[0].startswith("﻿"):
        header[0] = header[0][1:]
    if tuple(h.strip() for h in header) != HEADER:
        raise LedgerError(f"header must be {','.join(HEADER)}", row=1)

    observations = []
    for row_no, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(HEADER):
            raise LedgerError(f"expected {len(HEADER)} fields, got {len(cells)}", row=row_no)
        rec = dict(zip(HEADER, cells))
        if not rec["id"].strip():
            raise LedgerError("empty id", row_no, "id")
        size = _parse_int(rec["sample_size"], row_no, "sample_size")
        if size < 2:
            raise LedgerError(f"sample_size must be >= 2, got {size}", row_no, "sample_size")
        r = _parse_float(rec["elasticity"], row_no, "elasticity")
        if abs(r) > MAX_ABS_ELASTICITY:
            raise LedgerError(f"|elasticity| exceeds {MAX_ABS_ELASTICITY}", row_no, "elasticity")
        observations.append(
            StudyObservation(
                id=rec["id"].strip(),
                study_label=rec["study_label"].strip(),
                country=rec["country"].strip(),
                group_tag=rec["group_tag"].strip(),
                sample_size=size,
                elasticity=r,
                significant=_parse_bool(rec["significant"], row_no, "significant"),
                cost_weighted=_parse_bool(rec["cost_weighted"], row_no, "cost_weighted"),
                source_note=rec["source_note"],
            )
        )
    return observations


def serialize_ledger(ledger: Sequence[StudyObservation]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for obs in ledger:
        writer.writerow(
            [
                obs.id,
                obs.study_label,
                obs.country,
                obs.group_tag,
                obs.sample_size,
                repr(float(obs.elasticity)),
                "true" if obs.significant else "false",
                "true" if obs.cost_weighted else "false",
                obs.source_note,
            ]
        )
    return buf.getvalue()


def load_ledger(path) -> list[StudyObservation]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_ledger(fh.read())


def observation_to_dict(obs: StudyObservation) -> dict:
    return asdict(obs)

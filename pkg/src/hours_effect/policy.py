"""Policy arithmetic: cost per job, growth decomposition, FTE deflation.

Money is held as :class:`decimal.Decimal` so sums and differences of
currency amounts are exact; only the final per-job quotient is rounded,
at the context precision (28 significant digits).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Sequence

RESIDUAL_FLAG_THRESHOLD = Decimal("0.5")


class PolicySchemaError(ValueError):
    pass


def _decimal(value, name: str) -> Decimal:
    if isinstance(value, bool) or not isinstance(value, (str, int, Decimal)):
        # floats are refused so that no binary rounding enters the ledger
        raise PolicySchemaError(f"{name} must be a decimal string or integer, got {value!r}")
    try:
        number = Decimal(value)
    except InvalidOperation:
        raise PolicySchemaError(f"{name} is not a number: {value!r}") from None
    if not number.is_finite():
        raise PolicySchemaError(f"{name} must be finite, got {value!r}")
    return number


@dataclass(frozen=True)
class Offset:
    label: str
    amount: Decimal


@dataclass(frozen=True)
class PolicyCostLedger:
    gross_cost_low: Decimal
    gross_cost_high: Decimal
    offsets: tuple = ()
    jobs: int = 1
    currency: str = "EUR"

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if self.gross_cost_low < 0:
            raise PolicySchemaError("gross costs must be non-negative")
        if self.gross_cost_low > self.gross_cost_high:
            raise PolicySchemaError("gross_cost_low exceeds gross_cost_high")
        for off in self.offsets:
            if off.amount < 0:
                raise PolicySchemaError(f"offset {off.label!r} is negative")
        if isinstance(self.jobs, bool) or not isinstance(self.jobs, int):
            raise PolicySchemaError(f"jobs must be an integer, got {self.jobs!r}")
        if self.jobs < 1:
            raise PolicySchemaError(f"jobs must be at least 1, got {self.jobs}")

    @property
    def total_offsets(self) -> Decimal:
        return sum((o.amount for o in self.offsets), Decimal(0))


@dataclass(frozen=True)
class CostPerJob:
    net_low: Decimal
    net_high: Decimal
    per_job_low: Decimal
    per_job_high: Decimal
    offsets_applied: bool
    low_clamped: bool
    high_clamped: bool

    def to_dict(self) -> dict:
        return {
            "net_low": str(self.net_low),
            "net_high": str(self.net_high),
            "per_job_low": str(self.per_job_low),
            "per_job_high": str(self.per_job_high),
            "offsets_applied": self.offsets_applied,
            "low_clamped": self.low_clamped,
            "high_clamped": self.high_clamped,
        }


def cost_per_job(ledger: PolicyCostLedger, apply_offsets: bool = True) -> CostPerJob:
    """Net program cost per job and year, for both gross-cost bounds.

    Offsets larger than a gross bound clamp that net bound at zero and set
    the matching ``*_clamped`` flag.
    """
    if ledger.jobs < 1:
        raise ZeroDivisionError("jobs must be at least 1")
    deduct = ledger.total_offsets if apply_offsets else Decimal(0)
    raw_low = ledger.gross_cost_low - deduct
    raw_high = ledger.gross_cost_high - deduct
    net_low = max(raw_low, Decimal(0))
    net_high = max(raw_high, Decimal(0))
    jobs = Decimal(ledger.jobs)
    return CostPerJob(
        net_low=net_low,
        net_high=net_high,
        per_job_low=net_low / jobs,
        per_job_high=net_high / jobs,
        offsets_applied=apply_offsets,
        low_clamped=raw_low < 0,
        high_clamped=raw_high < 0,
    )


@dataclass(frozen=True)
class GrowthDecomposition:
    total_growth: Decimal
    components: tuple
    residual: Decimal
    flagged: bool

    def to_dict(self) -> dict:
        return {
            "total_growth": str(self.total_growth),
            "components": [{"label": label, "percent": str(pct)} for label, pct in self.components],
            "residual": str(self.residual),
            "flagged": self.flagged,
        }


def decompose_growth(total, components: Sequence[tuple] = ()) -> GrowthDecomposition:
    """Split ``total`` percent growth into named parts plus a residual.

    ``components`` is a sequence of ``(label, percent)`` pairs. The residual
    is flagged when it exceeds half a percentage point in absolute value.
    """
    total_d = _decimal(total, "total")
    parts = tuple((str(label), _decimal(pct, f"component {label!r}")) for label, pct in components)
    residual = total_d - sum((pct for _, pct in parts), Decimal(0))
    return GrowthDecomposition(total_d, parts, residual, abs(residual) > RESIDUAL_FLAG_THRESHOLD)


@dataclass(frozen=True)
class FteGrowth:
    headcount_growth: float
    fte_growth: float
    gap: float


def fte_growth(jobs_base, jobs_new, hours_base, hours_new) -> FteGrowth:
    """Headcount growth against growth in full-time equivalents, in percent."""
    for name, value in (("jobs_base", jobs_base), ("hours_base", hours_base)):
        if value == 0:
            raise ZeroDivisionError(f"{name} must be non-zero")
    for name, value in (("jobs_base", jobs_base), ("jobs_new", jobs_new),
                        ("hours_base", hours_base), ("hours_new", hours_new)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    head = (jobs_new / jobs_base - 1.0) * 100.0
    fte = ((jobs_new * hours_new) / (jobs_base * hours_base) - 1.0) * 100.0
    # algebraically head - fte; written this way it is zero only when hours match
    gap = (jobs_new / jobs_base) * (1.0 - hours_new / hours_base) * 100.0
    return FteGrowth(head, fte, gap)


@dataclass(frozen=True)
class PolicyFile:
    ledger: PolicyCostLedger
    growth: GrowthDecomposition | None = None
    notes: tuple = field(default_factory=tuple)


_TOP_KEYS = {"currency", "gross_cost_low", "gross_cost_high", "offsets", "jobs", "growth_decomposition", "notes"}


def policy_from_dict(data: dict) -> PolicyFile:
    """Validate a parsed policy JSON object; see ``docs/formats.md``."""
    if not isinstance(data, dict):
        raise PolicySchemaError("policy file must hold a JSON object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise PolicySchemaError(f"unknown field(s): {', '.join(unknown)}")
    for key in ("gross_cost_low", "gross_cost_high", "jobs"):
        if key not in data:
            raise PolicySchemaError(f"missing field {key!r}")
    offsets = []
    raw_offsets = data.get("offsets", [])
    if not isinstance(raw_offsets, list):
        raise PolicySchemaError("offsets must be a list")
    for i, item in enumerate(raw_offsets):
        if not isinstance(item, dict) or set(item) != {"label", "amount"}:
            raise PolicySchemaError(f"offsets[{i}] must have exactly label and amount")
        offsets.append(Offset(str(item["label"]), _decimal(item["amount"], f"offsets[{i}].amount")))
    ledger = PolicyCostLedger(
        gross_cost_low=_decimal(data["gross_cost_low"], "gross_cost_low"),
        gross_cost_high=_decimal(data["gross_cost_high"], "gross_cost_high"),
        offsets=offsets,
        jobs=data["jobs"],
        currency=str(data.get("currency", "EUR")),
    )
    growth = None
    if "growth_decomposition" in data:
        g = data["growth_decomposition"]
        if not isinstance(g, dict) or "total" not in g:
            raise PolicySchemaError("growth_decomposition needs a total")
        comps = g.get("components", [])
        if not isinstance(comps, list) or any(
            not isinstance(c, dict) or set(c) != {"label", "percent"} for c in comps
        ):
            raise PolicySchemaError("growth components must have exactly label and percent")
        growth = decompose_growth(g["total"], [(c["label"], c["percent"]) for c in comps])
    notes = data.get("notes", [])
    if not isinstance(notes, list):
        raise PolicySchemaError("notes must be a list of strings")
    return PolicyFile(ledger, growth, tuple(str(n) for n in notes))


def load_policy(path) -> PolicyFile:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PolicySchemaError(f"invalid JSON ({exc})") from None
    return policy_from_dict(data)

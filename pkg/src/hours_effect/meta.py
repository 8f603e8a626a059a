"""Bare-bones (sample-size weighted) meta-analysis of elasticities.

Sums are accumulated exactly with :class:`fractions.Fraction` (every finite
float is a dyadic rational) and rounded to float once at the end, so results
do not depend on observation order or on a common rescaling of the sample
sizes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

from .ledger import FilterSpec, StudyObservation, apply_filter

DEFAULT_Z = 1.96


class EmptyInputError(ValueError):
    """Raised when an aggregation receives no observations."""


@dataclass(frozen=True)
class MetaResult:
    k: int
    total_n: int
    mean_n: float
    r_bar: float
    var_observed: float
    var_sampling: float
    var_true: float
    clamped: bool
    z: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return asdict(self)


def _require(obs: Sequence[StudyObservation]) -> None:
    if len(obs) == 0:
        raise EmptyInputError("no observations to aggregate")


def _exact_mean(obs: Sequence[StudyObservation]) -> Fraction:
    total_n = sum(o.sample_size for o in obs)
    return sum((o.sample_size * Fraction(o.elasticity) for o in obs), Fraction(0)) / total_n


def _exact_observed_variance(obs: Sequence[StudyObservation], r_bar: Fraction) -> Fraction:
    total_n = sum(o.sample_size for o in obs)
    sq = sum((o.sample_size * (Fraction(o.elasticity) - r_bar) ** 2 for o in obs), Fraction(0))
    return sq / total_n


def _exact_sampling_variance(r_bar: Fraction, mean_n: Fraction) -> Fraction:
    return (1 - r_bar**2) ** 2 / (mean_n - 1)


def weighted_mean_effect(obs: Sequence[StudyObservation]) -> float:
    """Sample-size weighted mean elasticity, sum(N_i r_i) / sum(N_i)."""
    _require(obs)
    return float(_exact_mean(obs))


def observed_variance(obs: Sequence[StudyObservation], r_bar: float) -> float:
    """Weighted variance of the elasticities around ``r_bar``."""
    _require(obs)
    return float(_exact_observed_variance(obs, Fraction(r_bar)))


def sampling_error_variance(r_bar: float, mean_n: float) -> float:
    """Expected sampling-error variance (1 - r_bar**2)**2 / (mean_n - 1).

    ``mean_n`` is the average sample size per observation and must exceed 1.
    """
    if not mean_n > 1:
        raise ValueError(f"mean sample size must exceed 1, got {mean_n}")
    return float(_exact_sampling_variance(Fraction(r_bar), Fraction(mean_n)))


def true_variance(var_observed: float, var_sampling: float) -> tuple[float, bool]:
    """Residual variance after removing sampling error, clamped at zero.

    Returns the variance and a flag that is set when the raw difference was
    negative.
    """
    if var_observed < 0 or var_sampling < 0:
        raise ValueError("variances must be non-negative")
    raw = var_observed - var_sampling
    if raw < 0:
        return 0.0, True
    return raw, False


def credibility_interval(r_bar: float, var_true: float, z: float = DEFAULT_Z) -> tuple[float, float]:
    if var_true < 0:
        raise ValueError(f"var_true must be non-negative, got {var_true}")
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    half = z * math.sqrt(var_true)
    return r_bar - half, r_bar + half


def meta_analyze(obs: Sequence[StudyObservation], z: float = DEFAULT_Z) -> MetaResult:
    """Run the full aggregation on an already selected set of observations."""
    _require(obs)
    if z < 0 or not math.isfinite(z):
        raise ValueError(f"z must be finite and non-negative, got {z}")
    k = len(obs)
    total_n = sum(o.sample_size for o in obs)
    mean_n = Fraction(total_n, k)
    r_bar = _exact_mean(obs)
    var_obs = _exact_observed_variance(obs, r_bar)
    var_samp = _exact_sampling_variance(r_bar, mean_n)
    raw = var_obs - var_samp
    clamped = raw < 0
    var_true = Fraction(0) if clamped else raw

    r_bar_f = float(r_bar)
    var_true_f = float(var_true)
    ci_low, ci_high = credibility_interval(r_bar_f, var_true_f, z)
    return MetaResult(
        k=k,
        total_n=total_n,
        mean_n=float(mean_n),
        r_bar=r_bar_f,
        var_observed=float(var_obs),
        var_sampling=float(var_samp),
        var_true=var_true_f,
        clamped=clamped,
        z=float(z),
        ci_low=ci_low,
        ci_high=ci_high,
    )


def run_meta(ledger: Sequence[StudyObservation], spec: FilterSpec, z: float = DEFAULT_Z) -> MetaResult:
    selected = apply_filter(ledger, spec)
    if not selected:
        raise EmptyInputError("filter left no observations")
    return meta_analyze(selected, z)


def contribution_rows(obs: Sequence[StudyObservation], r_bar: float) -> list[dict]:
    """Per-observation columns of the worked tables: N, r, N*r, N*(r - r_bar)**2."""
    rows = []
    for o in obs:
        rows.append(
            {
                "id": o.id,
                "study_label": o.study_label,
                "country": o.country,
                "group_tag": o.group_tag,
                "n": o.sample_size,
                "r": o.elasticity,
                "n_r": o.sample_size * o.elasticity,
                "n_sq_dev": o.sample_size * (o.elasticity - r_bar) ** 2,
            }
        )
    return rows


def contribution_totals(rows: Sequence[dict]) -> dict:
    """Column totals of :func:`contribution_rows` output (correctly rounded sums)."""
    return {
        "n": sum(row["n"] for row in rows),
        "n_r": math.fsum(row["n_r"] for row in rows),
        "n_sq_dev": math.fsum(row["n_sq_dev"] for row in rows),
    }

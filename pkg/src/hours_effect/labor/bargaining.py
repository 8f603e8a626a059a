"""Employment under collectively bargained hours and wages.

For each hours level the bargained hourly wage is fixed by the schedule
and the firm picks employment on its labor demand curve. The curve of
employment against hours peaks at ``H_max``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .monopsony import CapResponse, CapSample, ModelError, NonFiniteError, effective_hours
from .params import BargainParams

SWEEPABLE = ("market_power", "union_power", "eta1")


def hourly_wage(params: BargainParams, hours):
    """Bargained hourly wage: ``w0 * (H/H0)**-eta0 * exp(-eta1 * (H - H0))``.

    Its elasticity with respect to hours is ``-(eta0 + eta1 * H)``, so an
    hours cut raises the hourly rate, and more so at long hours.
    """
    h = np.asarray(hours, dtype=float)
    ratio = h / params.reference_hours
    return params.base_wage * ratio ** (-params.eta0) * np.exp(-params.eta1 * (h - params.reference_hours))


def rent_premium(params: BargainParams) -> float:
    return params.market_power * params.union_power * params.base_wage * params.reference_hours


def cost_per_worker(params: BargainParams, hours):
    return hourly_wage(params, hours) * np.asarray(hours, dtype=float) + rent_premium(params)


def employment_at_hours(params: BargainParams, hours):
    """Labor demand at the bargained cost for the given hours."""
    a = params.returns_exponent
    e = effective_hours(params, hours)
    value = a * params.output_price * params.production_scale * e**a / cost_per_worker(params, hours)
    return value ** (1.0 / (1.0 - a))


def bargaining_employment_curve(params: BargainParams) -> CapResponse:
    hours = params.hours_grid.values()
    wage = hourly_wage(params, hours)
    if not np.all(np.isfinite(wage)):
        raise NonFiniteError("bargained wage is not finite on the hours grid")
    lab = employment_at_hours(params, hours)
    if not np.all(np.isfinite(lab)):
        raise NonFiniteError("employment is not finite on the hours grid")
    out = params.production_scale * (lab * effective_hours(params, hours)) ** params.returns_exponent
    samples = [CapSample(float(h), float(l), float(w), float(o)) for h, l, w, o in zip(hours, lab, wage, out)]
    return CapResponse(samples, "bargained")


def bargaining_cap_sweep(params: BargainParams, caps: Sequence[float]) -> CapResponse:
    """Employment when a statutory cap overrides bargained hours it undercuts.

    Hours are ``min(cap, bargained_hours)``: a cap above the bargained level
    does not bind.
    """
    caps = np.asarray(caps, dtype=float)
    lo, hi = params.hours_grid.lo, params.hours_grid.hi
    if caps.ndim != 1 or caps.size == 0:
        raise ModelError("caps must be a non-empty 1-d sequence")
    if np.any(caps < lo) or np.any(caps > hi):
        raise ModelError(f"caps must lie inside the hours grid [{lo}, {hi}]")
    hours = np.minimum(caps, params.bargained_hours)
    lab = employment_at_hours(params, hours)
    wage = hourly_wage(params, hours)
    out = params.production_scale * (lab * effective_hours(params, hours)) ** params.returns_exponent
    samples = [CapSample(float(c), float(l), float(w), float(o)) for c, l, w, o in zip(caps, lab, wage, out)]
    return CapResponse(samples, "bargained")


def find_h_max(curve: CapResponse) -> tuple:
    """Hours of maximum employment; ties go to the shorter hours."""
    if len(curve) == 0:
        raise ModelError("curve is empty")
    i = int(np.argmax(curve.employment))
    s = curve.samples[i]
    return s.cap, s.employment


def local_maxima(values) -> list:
    """Indices of strict local maxima, counting plateaus once and the ends."""
    v = np.asarray(values, dtype=float)
    # collapse runs of equal values
    keep = np.concatenate(([True], v[1:] != v[:-1]))
    idx = np.flatnonzero(keep)
    w = v[idx]
    peaks = []
    for k in range(len(w)):
        left = k == 0 or w[k] > w[k - 1]
        right = k == len(w) - 1 or w[k] > w[k + 1]
        if left and right:
            peaks.append(int(idx[k]))
    return peaks


@dataclass(frozen=True)
class HmaxPoint:
    value: float
    h_max: float
    gap: float


def comparative_static_hmax(base: BargainParams, vary: str, values: Sequence[float]) -> list:
    """Re-solve ``H_max`` while one parameter runs over ``values``.

    ``gap`` is the signed distance ``H_b - H_max``.
    """
    if vary not in SWEEPABLE:
        raise ModelError(f"cannot vary {vary!r}; choose from {', '.join(SWEEPABLE)}")
    trace = []
    for value in values:
        params = replace(base, **{vary: float(value)})
        h_max, _ = find_h_max(bargaining_employment_curve(params))
        trace.append(HmaxPoint(float(value), h_max, params.bargained_hours - h_max))
    return trace

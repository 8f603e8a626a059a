"""Qualitative shape checks for solved models.

Each function returns a list of :class:`Check` records, one per property,
so callers can report every violation instead of stopping at the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bargaining import (
    bargaining_employment_curve,
    comparative_static_hmax,
    employment_at_hours,
    find_h_max,
    local_maxima,
)
from .monopsony import (
    WAGE_REGIMES,
    competitive_cap_scenario,
    competitive_cap_sweep,
    monopsony_cap_sweep,
    solve_competitive,
    solve_monopsony,
)
from .params import BargainParams, MonopsonyParams

MARKET_POWER_SWEEP = tuple(np.linspace(0.0, 1.0, 11))
ETA1_SWEEP = tuple(np.linspace(0.0, 0.02, 9))
CAP_CUT = 0.9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def failures(checks) -> list:
    return [c for c in checks if not c.passed]


def _weakly_monotone(values, increasing: bool) -> bool:
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d >= 0) if increasing else np.all(d <= 0))


def monopsony_checks(params: MonopsonyParams) -> list:
    """Ordering of the two equilibria and the shape of the cap sweep."""
    m = solve_monopsony(params)
    c = solve_competitive(params)
    hours = params.hours_grid.values()
    sweep = monopsony_cap_sweep(params, hours)
    emp = sweep.employment
    i_c = int(np.searchsorted(hours, c.hours))
    i_m = int(np.searchsorted(hours, m.hours))
    peak = emp.max()
    out = [
        Check("hours_order", m.hours > c.hours, f"H_M={m.hours:.4f} H_C={c.hours:.4f}"),
        Check("employment_order", m.employment < c.employment,
              f"L_M={m.employment:.4f} L_C={c.employment:.4f}"),
        Check("wage_order", m.wage < c.wage, f"w_M={m.wage:.4f} w_C={c.wage:.4f}"),
        Check("sweep_rises_from_hm_to_hc", _weakly_monotone(emp[i_c:i_m + 1], increasing=False),
              "employment must not fall as the cap moves down from H_M to H_C"),
        Check("sweep_peaks_at_hc", bool(emp[i_c] == peak),
              f"L(H_C)={emp[i_c]:.6f} max={peak:.6f}"),
        Check("sweep_falls_below_hc", _weakly_monotone(emp[:i_c + 1], increasing=True),
              "employment must not rise as the cap moves down below H_C"),
        Check("sweep_flat_above_hm", bool(np.all(emp[i_m:] == m.employment)),
              "caps at or above H_M must leave L_M unchanged"),
    ]
    if i_c > 0:
        out.append(Check("deep_cut_below_peak", bool(emp[0] < peak),
                         f"L(cap={hours[0]:.4f})={emp[0]:.6f} peak={peak:.6f}"))
    return out


def competitive_checks(params: MonopsonyParams) -> list:
    """Wage-regime comparison for caps that bind on the competitive benchmark."""
    c = solve_competitive(params)
    hours = params.hours_grid.values()
    caps = hours[hours < c.hours]
    out = []
    if caps.size:
        fixed = competitive_cap_sweep(params, caps, "fixed_monthly").employment
        prop = competitive_cap_sweep(params, caps, "proportional_hourly").employment
        out.append(Check("fixed_not_above_proportional", bool(np.all(fixed <= prop)),
                         f"{int(np.sum(fixed > prop))} binding caps violate"))
        out.append(Check("fixed_falls_with_cap", _weakly_monotone(fixed, increasing=True),
                         "fixed-monthly employment must not rise as the cap falls"))
    cut = CAP_CUT * c.hours
    if cut >= params.hours_grid.lo:
        s = competitive_cap_scenario(params, cut, "fixed_monthly")
        out.append(Check("fixed_cut_lowers_employment", s.employment < c.employment,
                         f"L(cap={cut:.4f})={s.employment:.6f} uncapped={c.employment:.6f}"))
    for regime in WAGE_REGIMES:
        top = competitive_cap_scenario(params, params.hours_grid.hi, regime)
        out.append(Check(f"{regime}_slack_cap_neutral", top.employment == c.employment,
                         "a cap above chosen hours must leave employment unchanged"))
    return out


def bargaining_checks(params: BargainParams) -> list:
    curve = bargaining_employment_curve(params)
    h_max, _ = find_h_max(curve)
    peaks = local_maxima(curve.employment)
    h_b = params.bargained_hours
    below = max(h_b - params.hours_grid.step, params.hours_grid.lo)
    l_b, l_below = float(employment_at_hours(params, h_b)), float(employment_at_hours(params, below))
    if h_b > h_max:
        cap_ok, want = l_below > l_b, "raise"
    else:
        cap_ok, want = l_below < l_b, "lower"
    mu = comparative_static_hmax(params, "market_power", MARKET_POWER_SWEEP)
    eta = comparative_static_hmax(params, "eta1", ETA1_SWEEP)
    return [
        Check("single_peak", len(peaks) == 1, f"{len(peaks)} local maxima"),
        Check("cap_response", bool(cap_ok),
              f"H_b={h_b:.4f} H_max={h_max:.4f}: a small cut must {want} employment"),
        Check("gap_shrinks_with_market_power", _weakly_monotone([abs(p.gap) for p in mu], False),
              "|H_b - H_max| must not grow with market power"),
        Check("hmax_rises_with_eta1", _weakly_monotone([p.h_max for p in eta], True),
              "H_max must not fall as eta1 rises"),
    ]

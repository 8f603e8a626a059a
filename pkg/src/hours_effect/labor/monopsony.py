"""Monopsony and competitive benchmarks solved by exhaustive grid search.

All argmax searches scan hours in the outer loop and wages in the inner
loop, both ascending, and keep the first maximum. Ties therefore resolve
to the smallest hours and then the smallest wage.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .params import MonopsonyParams

WAGE_REGIMES = ("fixed_monthly", "proportional_hourly")

# slack when comparing a cap with grid nodes produced by linspace
_CAP_EPS = 1e-9


class ModelError(ValueError):
    pass


class DegenerateGridError(ModelError):
    pass


class NonFiniteError(ModelError):
    pass


@dataclass(frozen=True)
class Equilibrium:
    regime: str
    hours: float
    wage: float
    employment: float
    output: float
    profit: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CapSample:
    cap: float
    employment: float
    wage: float
    output: float


@dataclass(frozen=True)
class CapResponse:
    """Employment (and wage, output) as a function of an hours cap."""

    samples: tuple
    wage_regime: str

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        caps = [s.cap for s in self.samples]
        if any(b <= a for a, b in zip(caps, caps[1:])):
            raise ModelError("cap values must be strictly increasing")
        if any(not (s.employment >= 0) for s in self.samples):
            raise ModelError("employment must be non-negative")

    def __len__(self):
        return len(self.samples)

    @property
    def caps(self) -> np.ndarray:
        return np.array([s.cap for s in self.samples])

    @property
    def employment(self) -> np.ndarray:
        return np.array([s.employment for s in self.samples])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cap", "employment", "wage", "output"])
        for s in self.samples:
            writer.writerow([repr(float(s.cap)), repr(float(s.employment)),
                             repr(float(s.wage)), repr(float(s.output))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"wage_regime": self.wage_regime, "samples": [asdict(s) for s in self.samples]}


def effective_hours(params, hours):
    """Productive hours per worker, ``H - setup_hours - fatigue * H**2``."""
    hours = np.asarray(hours, dtype=float)
    return hours - params.setup_hours - params.fatigue_coefficient * hours**2


def labor_supply(params: MonopsonyParams, wage):
    return params.supply_scale * np.asarray(wage, dtype=float) ** params.supply_elasticity


def output_level(params, employment, hours):
    e = effective_hours(params, hours)
    return params.production_scale * (np.asarray(employment, dtype=float) * e) ** params.returns_exponent


def profit_grid(params: MonopsonyParams) -> np.ndarray:
    """Profit at every (hours, wage) grid node; rows are hours, columns wages."""
    hours = params.hours_grid.values()[:, None]
    wages = params.wage_grid.values()[None, :]
    labor = labor_supply(params, wages)
    revenue = params.output_price * output_level(params, labor, hours)
    profit = revenue - wages * hours * labor
    if not np.all(np.isfinite(profit)):
        raise NonFiniteError("profit is not finite on the whole grid")
    return profit


def grid_argmax(values: np.ndarray) -> tuple:
    """Index of the first maximum in row-major order."""
    values = np.asarray(values)
    if values.size == 0:
        raise DegenerateGridError("cannot take the argmax of an empty grid")
    return np.unravel_index(int(np.argmax(values)), values.shape)


def _equilibrium(params, regime, hours, wage, employment) -> Equilibrium:
    out = float(output_level(params, employment, hours))
    profit = params.output_price * out - wage * hours * employment
    return Equilibrium(regime, float(hours), float(wage), float(employment), out, float(profit))


def solve_monopsony(params: MonopsonyParams) -> Equilibrium:
    """Profit-maximising hours and hourly wage on the grids."""
    profit = profit_grid(params)
    i, j = grid_argmax(profit)
    hours = params.hours_grid.values()[i]
    wage = params.wage_grid.values()[j]
    return _equilibrium(params, "monopsony", hours, wage, float(labor_supply(params, wage)))


def marginal_product_per_hour(params, employment, hours):
    """Revenue from one more worker divided by that worker's hours."""
    a = params.returns_exponent
    e = effective_hours(params, hours)
    lab = np.asarray(employment, dtype=float)
    with np.errstate(divide="ignore"):
        mrp = a * params.output_price * params.production_scale * e**a * lab ** (a - 1.0)
    return mrp / hours


def solve_competitive(params: MonopsonyParams) -> Equilibrium:
    """Price-taking benchmark.

    Hours minimise the wage bill per effective hour (maximise ``E(H)/H``).
    The hourly wage is the highest grid wage that does not exceed the
    hourly marginal revenue product of the labor supplied at that wage, so
    profit is never negative.
    """
    hours_grid = params.hours_grid.values()
    ratio = effective_hours(params, hours_grid) / hours_grid
    if not np.all(np.isfinite(ratio)):
        raise NonFiniteError("effective hours are not finite on the grid")
    hours = hours_grid[int(np.argmax(ratio))]
    wages = params.wage_grid.values()
    labor = labor_supply(params, wages)
    margin = marginal_product_per_hour(params, labor, hours) - wages
    if not np.all(np.isfinite(margin)):
        raise NonFiniteError("marginal product is not finite on the wage grid")
    viable = np.flatnonzero(margin >= 0)
    if viable.size == 0:
        raise DegenerateGridError("no grid wage is covered by the marginal product")
    wage = wages[int(viable[-1])]
    return _equilibrium(params, "competitive", hours, wage, float(labor_supply(params, wage)))


def _check_caps(params, caps) -> np.ndarray:
    caps = np.asarray(caps, dtype=float)
    if caps.ndim != 1 or caps.size == 0:
        raise DegenerateGridError("caps must be a non-empty 1-d sequence")
    lo, hi = params.hours_grid.lo, params.hours_grid.hi
    if np.any(caps < lo - _CAP_EPS) or np.any(caps > hi + _CAP_EPS):
        raise ModelError(f"caps must lie inside the hours grid [{lo}, {hi}]")
    return caps


def monopsony_cap_sweep(params: MonopsonyParams, caps: Sequence[float]) -> CapResponse:
    """Re-solve the firm problem with ``H <= cap`` for every cap."""
    caps = _check_caps(params, caps)
    profit = profit_grid(params)
    hours = params.hours_grid.values()
    wages = params.wage_grid.values()
    best_col = np.argmax(profit, axis=1)
    row_best = profit[np.arange(len(hours)), best_col]
    # running argmax over rows, keeping the earliest row on ties
    prefix = np.empty(len(hours), dtype=int)
    best = 0
    for i in range(len(hours)):
        if row_best[i] > row_best[best]:
            best = i
        prefix[i] = best
    samples = []
    for cap in caps:
        m = int(np.searchsorted(hours, cap + _CAP_EPS, side="right")) - 1
        i = prefix[max(m, 0)]
        wage = wages[best_col[i]]
        lab = float(labor_supply(params, wage))
        samples.append(CapSample(float(cap), lab, float(wage), float(output_level(params, lab, hours[i]))))
    return CapResponse(samples, "firm_set")


def _labor_demand(params, wage, hours):
    """Workers demanded at a fixed hourly wage and fixed hours."""
    a = params.returns_exponent
    e = float(effective_hours(params, hours))
    unit = a * params.output_price * params.production_scale * e**a / (wage * hours)
    if a == 1.0:
        # linear technology: demand is unbounded above the break-even wage
        return math.inf if unit > 1.0 else (0.0 if unit < 1.0 else math.nan)
    return unit ** (1.0 / (1.0 - a))


def competitive_cap_scenario(params: MonopsonyParams, cap: float, wage_regime: str) -> CapSample:
    """Employment in the competitive benchmark when hours are capped at ``cap``.

    Under ``fixed_monthly`` the hourly wage rises so that pay per worker is
    unchanged; under ``proportional_hourly`` the hourly wage stays put and
    pay per worker falls with hours. Firms hire along their labor demand at
    that wage and capped hours, up to the workforce employed before the cap.
    """
    if wage_regime not in WAGE_REGIMES:
        raise ModelError(f"wage_regime must be one of {WAGE_REGIMES}, got {wage_regime!r}")
    _check_caps(params, [cap])
    base = solve_competitive(params)
    if cap >= base.hours - _CAP_EPS:
        return CapSample(float(cap), base.employment, base.wage, base.output)
    if wage_regime == "fixed_monthly":
        wage = base.wage * base.hours / cap
    else:
        wage = base.wage
    demand = _labor_demand(params, wage, cap)
    lab = base.employment if math.isnan(demand) else min(demand, base.employment)
    return CapSample(float(cap), lab, float(wage), float(output_level(params, lab, cap)))


def competitive_cap_sweep(params: MonopsonyParams, caps: Sequence[float], wage_regime: str) -> CapResponse:
    caps = _check_caps(params, caps)
    return CapResponse([competitive_cap_scenario(params, float(c), wage_regime) for c in caps], wage_regime)

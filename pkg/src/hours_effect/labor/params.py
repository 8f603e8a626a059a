"""Parameter records for the labor-market models and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

MIN_GRID_POINTS = 200


class ParamsError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    points: int = 400

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ParamsError(f"grid needs finite lo < hi, got [{self.lo}, {self.hi}]")
        if isinstance(self.points, bool) or not isinstance(self.points, int):
            raise ParamsError(f"grid points must be an integer, got {self.points!r}")
        if self.points < MIN_GRID_POINTS:
            raise ParamsError(f"grid needs at least {MIN_GRID_POINTS} points, got {self.points}")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)

    def refined(self, factor: int = 2) -> "Grid":
        """Same range, ``factor`` times as many intervals (old nodes are kept)."""
        return Grid(self.lo, self.hi, (self.points - 1) * factor + 1)


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ParamsError(f"{name} must be positive, got {value}")


def _unit(name, value):
    if not (0.0 <= value <= 1.0):
        raise ParamsError(f"{name} must lie in [0, 1], got {value}")


def _check_production(p) -> None:
    _positive("output_price", p.output_price)
    _positive("production_scale", p.production_scale)
    if not (0.0 < p.returns_exponent <= 1.0):
        raise ParamsError(f"returns_exponent must lie in (0, 1], got {p.returns_exponent}")
    if p.setup_hours < 0:
        raise ParamsError(f"setup_hours must be non-negative, got {p.setup_hours}")
    hi = p.hours_grid.hi
    # effective hours must rise over the whole searched range
    if not (0.0 <= p.fatigue_coefficient < 1.0 / (2.0 * hi)):
        raise ParamsError(
            f"fatigue_coefficient must lie in [0, {1.0 / (2.0 * hi):.6g}) for hours up to {hi}"
        )
    if p.hours_grid.lo <= 0:
        raise ParamsError("hours grid must be strictly positive")
    lo = p.hours_grid.lo
    if lo - p.setup_hours - p.fatigue_coefficient * lo**2 <= 0:
        raise ParamsError("effective hours are not positive at the bottom of the hours grid")


@dataclass(frozen=True)
class MonopsonyParams:
    """Firm facing labor supply ``L = supply_scale * w**supply_elasticity``.

    ``w`` is the hourly wage. Output is
    ``production_scale * (L * E(H))**returns_exponent`` with effective hours
    ``E(H) = H - setup_hours - fatigue_coefficient * H**2``, sold at
    ``output_price``.
    """

    supply_scale: float = 1.0
    supply_elasticity: float = 2.0
    output_price: float = 1.0
    production_scale: float = 5.0
    returns_exponent: float = 1.0
    fatigue_coefficient: float = 0.03
    setup_hours: float = 1.0
    hours_grid: Grid = Grid(4.0, 14.0, 400)
    wage_grid: Grid = Grid(0.1, 5.0, 400)

    def __post_init__(self):
        _positive("supply_scale", self.supply_scale)
        _positive("supply_elasticity", self.supply_elasticity)
        if self.wage_grid.lo <= 0:
            raise ParamsError("wage grid must be strictly positive")
        _check_production(self)


@dataclass(frozen=True)
class BargainParams:
    """Collective-bargaining economy.

    The bargained hourly wage has point elasticity ``-(eta0 + eta1 * H)``
    with respect to hours and equals ``base_wage`` at ``reference_hours``.
    On top of hourly pay each worker receives a rent premium
    ``market_power * union_power * base_wage * reference_hours`` that does
    not scale with hours.
    """

    bargained_hours: float = 11.5
    base_wage: float = 1.0
    reference_hours: float = 8.0
    eta0: float = 0.2
    eta1: float = 0.01
    market_power: float = 0.5
    union_power: float = 0.5
    output_price: float = 1.0
    production_scale: float = 5.0
    returns_exponent: float = 0.5
    fatigue_coefficient: float = 0.025
    setup_hours: float = 2.0
    hours_grid: Grid = Grid(4.0, 14.0, 400)

    def __post_init__(self):
        _positive("base_wage", self.base_wage)
        _positive("reference_hours", self.reference_hours)
        _unit("market_power", self.market_power)
        _unit("union_power", self.union_power)
        if self.eta1 < 0:
            raise ParamsError(f"eta1 must be non-negative, got {self.eta1}")
        if self.eta0 + self.eta1 * self.hours_grid.lo < 0:
            raise ParamsError("wage-hours elasticity must be non-negative on the hours grid")
        _check_production(self)
        if self.returns_exponent >= 1.0:
            raise ParamsError("bargaining labor demand needs returns_exponent < 1")
        if not (self.hours_grid.lo <= self.bargained_hours <= self.hours_grid.hi):
            raise ParamsError("bargained_hours must lie inside the hours grid")


def _build(cls, data: dict):
    if not isinstance(data, dict):
        raise ParamsError(f"{cls.__name__} expects a JSON object")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ParamsError(f"unknown {cls.__name__} field(s): {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        if name.endswith("_grid"):
            if not isinstance(value, dict) or set(value) - {"lo", "hi", "points"}:
                raise ParamsError(f"{name} must be an object with lo, hi, points")
            try:
                value = Grid(float(value["lo"]), float(value["hi"]), value.get("points", 400))
            except KeyError as exc:
                raise ParamsError(f"{name} is missing {exc.args[0]}") from None
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParamsError(f"{name} must be a number, got {value!r}")
        else:
            value = float(value)
        kwargs[name] = value
    return cls(**kwargs)


def params_from_dict(data: dict):
    """Build MonopsonyParams or BargainParams from a parsed JSON object.

    The object carries a ``model`` key (``"monopsony"`` or ``"bargaining"``)
    and the remaining keys are field names of the matching type.
    """
    if not isinstance(data, dict):
        raise ParamsError("parameter file must hold a JSON object")
    data = dict(data)
    model = data.pop("model", None)
    data.pop("version", None)
    data.pop("description", None)
    if model == "monopsony":
        return _build(MonopsonyParams, data)
    if model == "bargaining":
        return _build(BargainParams, data)
    raise ParamsError(f"model must be 'monopsony' or 'bargaining', got {model!r}")


def params_to_dict(params) -> dict:
    model = "bargaining" if isinstance(params, BargainParams) else "monopsony"
    return {"model": model, **asdict(params)}


def load_params(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParamsError(f"{path}: invalid JSON ({exc})") from None
    return params_from_dict(data)

"""Grid-search labor-market models: monopsony, competitive benchmark, bargaining."""

from .bargaining import (
    HmaxPoint,
    bargaining_cap_sweep,
    bargaining_employment_curve,
    comparative_static_hmax,
    employment_at_hours,
    find_h_max,
    hourly_wage,
    local_maxima,
)
from .checks import Check, bargaining_checks, competitive_checks, failures, monopsony_checks
from .monopsony import (
    WAGE_REGIMES,
    CapResponse,
    CapSample,
    DegenerateGridError,
    Equilibrium,
    ModelError,
    NonFiniteError,
    competitive_cap_scenario,
    competitive_cap_sweep,
    grid_argmax,
    monopsony_cap_sweep,
    solve_competitive,
    solve_monopsony,
)
from .params import BargainParams, Grid, MonopsonyParams, ParamsError, load_params, params_from_dict, params_to_dict

import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import bargaining_oracle, linspace, monopsony_oracle

from hours_effect.labor import (
    BargainParams,
    CapResponse,
    CapSample,
    Grid,
    ModelError,
    MonopsonyParams,
    ParamsError,
    bargaining_cap_sweep,
    bargaining_checks,
    bargaining_employment_curve,
    comparative_static_hmax,
    competitive_cap_scenario,
    competitive_cap_sweep,
    competitive_checks,
    find_h_max,
    grid_argmax,
    local_maxima,
    monopsony_cap_sweep,
    monopsony_checks,
    params_from_dict,
    params_to_dict,
    solve_competitive,
    solve_monopsony,
)
from hours_effect.labor.params import MIN_GRID_POINTS


def oracle_args(p):
    return dict(a=p.supply_scale, eps=p.supply_elasticity, p=p.output_price, A=p.production_scale,
                alpha=p.returns_exponent, b=p.fatigue_coefficient, h0=p.setup_hours,
                hours=linspace(p.hours_grid.lo, p.hours_grid.hi, p.hours_grid.points),
                wages=linspace(p.wage_grid.lo, p.wage_grid.hi, p.wage_grid.points))


# ---------------------------------------------------------------- params


def test_config_files_match_defaults(monopsony_params, bargain_params):
    assert monopsony_params == MonopsonyParams()
    assert bargain_params == BargainParams()


def test_params_json_round_trip(monopsony_params, bargain_params):
    for p in (monopsony_params, bargain_params):
        assert params_from_dict(json.loads(json.dumps(params_to_dict(p)))) == p


@pytest.mark.parametrize(
    "change",
    [
        {"supply_scale": 0.0},
        {"returns_exponent": 0.0},
        {"returns_exponent": 1.5},
        {"fatigue_coefficient": 0.04},
        {"setup_hours": 5.0},
        {"hours_grid": {"lo": 4, "hi": 14, "points": 10}},
        {"wage_grid": {"lo": 0, "hi": 5}},
        {"unknown": 1},
        {"supply_scale": "1"},
    ],
)
def test_invalid_monopsony_params(monopsony_params, change):
    data = params_to_dict(monopsony_params)
    data.update(change)
    with pytest.raises(ParamsError):
        params_from_dict(data)


@pytest.mark.parametrize(
    "change",
    [{"market_power": 1.2}, {"union_power": -0.1}, {"eta1": -0.01}, {"bargained_hours": 20.0},
     {"returns_exponent": 1.0}, {"eta0": -1.0}],
)
def test_invalid_bargain_params(bargain_params, change):
    with pytest.raises(ParamsError):
        replace(bargain_params, **change)


def test_params_model_tag():
    with pytest.raises(ParamsError):
        params_from_dict({"model": "other"})
    with pytest.raises(ParamsError):
        params_from_dict([])


def test_grid_validation():
    with pytest.raises(ParamsError):
        Grid(1.0, 1.0)
    with pytest.raises(ParamsError):
        Grid(0.0, 1.0, MIN_GRID_POINTS - 1)
    g = Grid(0.0, 1.0, 201)
    assert g.refined().points == 401
    assert np.all(g.refined().values()[::2] == g.values())


# ---------------------------------------------------------------- monopsony


def test_monopsony_matches_brute_force(monopsony_params):
    p = monopsony_params
    m = solve_monopsony(p)
    ref = monopsony_oracle(**oracle_args(p))
    assert m.hours == pytest.approx(ref["hours"], abs=1e-12)
    assert m.wage == pytest.approx(ref["wage"], abs=1e-12)
    assert m.employment == pytest.approx(ref["employment"], abs=1e-12)
    assert m.profit == pytest.approx(ref["profit"], rel=1e-12)
    # values frozen from the brute-force scan on the shipped parameters
    assert m.hours == pytest.approx(9.98997, abs=1e-5)
    assert m.employment == pytest.approx(4.01405, abs=1e-5)


def test_monopsony_near_analytic_optimum(monopsony_params):
    p = monopsony_params
    m = solve_monopsony(p)
    # with linear returns the optimal hours solve E(H) = (1 + 1/eps) H E'(H)
    kappa = 1 + 1 / p.supply_elasticity
    h_star = _analytic_monopsony_hours(kappa, p.fatigue_coefficient, p.setup_hours)
    assert abs(m.hours - h_star) < 3 * p.hours_grid.step


def _analytic_monopsony_hours(kappa, b, h0):
    # H - h0 - bH^2 = kappa H (1 - 2bH)  ->  b(2 kappa - 1) H^2 - (kappa - 1) H - h0 = 0
    qa, qb, qc = b * (2 * kappa - 1), -(kappa - 1), -h0
    return (-qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)


def test_competitive_hours_minimise_cost_per_effective_hour(monopsony_params):
    p = monopsony_params
    c = solve_competitive(p)
    assert abs(c.hours - math.sqrt(p.setup_hours / p.fatigue_coefficient)) <= p.hours_grid.step
    # price-taking wage sits just below the hourly marginal product
    mrp = p.production_scale * (c.hours - p.setup_hours - p.fatigue_coefficient * c.hours**2) / c.hours
    assert mrp - p.wage_grid.step < c.wage <= mrp
    assert c.profit >= 0


def test_monopsony_against_competitive(monopsony_params):
    m, c = solve_monopsony(monopsony_params), solve_competitive(monopsony_params)
    assert m.wage < c.wage
    assert m.employment < c.employment
    assert m.hours > c.hours


def test_no_fatigue_linear_output_goes_to_grid_top(monopsony_params):
    p = replace(monopsony_params, fatigue_coefficient=0.0, setup_hours=0.0, returns_exponent=1.0)
    assert solve_monopsony(p).hours == p.hours_grid.hi


def test_profit_is_grid_maximum(monopsony_params):
    from hours_effect.labor.monopsony import profit_grid

    m = solve_monopsony(monopsony_params)
    assert np.all(profit_grid(monopsony_params) <= m.profit + 1e-12)


def test_grid_argmax_tie_break():
    values = np.array([[0, 2, 2], [2, 1, 0]])
    assert grid_argmax(values) == (0, 1)
    with pytest.raises(ModelError):
        grid_argmax(np.array([]))


def test_cap_sweep_matches_oracle(monopsony_params):
    p = monopsony_params
    args = oracle_args(p)
    for cap in (4.5, 5.0, 7.3):
        s = monopsony_cap_sweep(p, [cap]).samples[0]
        ref = monopsony_oracle(**args, cap=cap)
        assert s.employment == pytest.approx(ref["employment"], abs=1e-12)


def test_cap_sweep_shape(monopsony_params):
    p = monopsony_params
    m, c = solve_monopsony(p), solve_competitive(p)
    hours = p.hours_grid.values()
    emp = monopsony_cap_sweep(p, hours).employment
    assert emp[hours >= m.hours].tolist() == [m.employment] * int(np.sum(hours >= m.hours))
    assert emp[np.searchsorted(hours, c.hours)] == emp.max()
    assert emp[0] < emp.max()


def test_cap_sweep_rejects_bad_caps(monopsony_params):
    with pytest.raises(ModelError):
        monopsony_cap_sweep(monopsony_params, [20.0])
    with pytest.raises(ModelError):
        monopsony_cap_sweep(monopsony_params, [6.0, 5.0])


def test_cap_response_csv():
    curve = CapResponse([CapSample(1.0, 2.0, 3.0, 4.0), CapSample(2.0, 0.0, 3.5, 0.0)], "fixed_monthly")
    assert curve.to_csv().splitlines() == ["cap,employment,wage,output", "1.0,2.0,3.0,4.0", "2.0,0.0,3.5,0.0"]
    with pytest.raises(ModelError):
        CapResponse([CapSample(1.0, -1.0, 1.0, 1.0)], "x")


def test_symmetric_price_productivity_scaling(monopsony_params):
    base = solve_competitive(monopsony_params)
    for c in (0.5, 3.0):
        scaled = replace(monopsony_params, output_price=c, production_scale=monopsony_params.production_scale / c)
        assert solve_competitive(scaled).hours == base.hours
        assert solve_monopsony(scaled).hours == solve_monopsony(monopsony_params).hours


# ---------------------------------------------------------------- competitive scenario


def test_wage_regimes(competitive_params):
    p = competitive_params
    c = solve_competitive(p)
    cut = 0.9 * c.hours
    fixed = competitive_cap_scenario(p, cut, "fixed_monthly")
    prop = competitive_cap_scenario(p, cut, "proportional_hourly")
    assert fixed.employment < c.employment
    assert prop.employment >= fixed.employment
    assert fixed.wage == pytest.approx(c.wage * c.hours / cut)
    assert prop.wage == c.wage


def test_slack_cap_leaves_employment(competitive_params):
    c = solve_competitive(competitive_params)
    for regime in ("fixed_monthly", "proportional_hourly"):
        s = competitive_cap_scenario(competitive_params, 13.0, regime)
        assert (s.employment, s.wage) == (c.employment, c.wage)


def test_unknown_regime(competitive_params):
    with pytest.raises(ModelError):
        competitive_cap_scenario(competitive_params, 5.0, "weekly")


def test_fixed_monthly_never_above_proportional(competitive_params):
    p = competitive_params
    caps = p.hours_grid.values()
    fixed = competitive_cap_sweep(p, caps, "fixed_monthly").employment
    prop = competitive_cap_sweep(p, caps, "proportional_hourly").employment
    assert np.all(fixed <= prop)
    assert np.all(np.diff(fixed) >= 0)


# ---------------------------------------------------------------- bargaining


def bargain_oracle(p):
    return bargaining_oracle(p.returns_exponent, p.output_price, p.production_scale, p.fatigue_coefficient,
                             p.setup_hours, p.base_wage, p.reference_hours, p.eta0, p.eta1, p.market_power,
                             p.union_power, linspace(p.hours_grid.lo, p.hours_grid.hi, p.hours_grid.points))


def test_bargaining_curve_matches_scan(bargain_params):
    curve = bargaining_employment_curve(bargain_params)
    ref, h_max, peaks = bargain_oracle(bargain_params)
    assert np.allclose(curve.employment, ref, rtol=1e-12, atol=0)
    assert find_h_max(curve)[0] == pytest.approx(h_max, abs=1e-12)
    assert peaks == 1
    assert h_max == pytest.approx(7.4586, abs=1e-4)


def test_h_max_tie_break():
    flat = CapResponse([CapSample(h, 1.0, 1.0, 1.0) for h in (4.0, 5.0, 6.0)], "bargained")
    assert find_h_max(flat) == (4.0, 1.0)
    with pytest.raises(ModelError):
        find_h_max(CapResponse([], "bargained"))


def test_local_maxima():
    assert local_maxima([1, 2, 3, 2, 1]) == [2]
    assert local_maxima([1, 2, 2, 1]) == [1]
    assert local_maxima([3, 1, 3]) == [0, 2]
    assert local_maxima([1, 1, 1]) == [0]


def test_cap_response_direction(bargain_params):
    h_max, _ = find_h_max(bargaining_employment_curve(bargain_params))
    assert bargain_params.bargained_hours > h_max
    long = bargaining_cap_sweep(bargain_params, [10.5, 11.0, 11.5]).employment
    assert long[0] > long[1] > long[2]
    short = replace(bargain_params, bargained_hours=6.0)
    low = bargaining_cap_sweep(short, [5.0, 5.5, 6.0]).employment
    assert low[0] < low[1] < low[2]
    # a cap above the bargained hours does not bind
    top = bargaining_cap_sweep(bargain_params, [12.0, 13.0]).employment
    assert top[0] == top[1]


def test_comparative_statics(bargain_params):
    mu = comparative_static_hmax(bargain_params, "market_power", np.linspace(0, 1, 11))
    gaps = [abs(p.gap) for p in mu]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    eta = comparative_static_hmax(bargain_params, "eta1", np.linspace(0, 0.02, 9))
    h = [p.h_max for p in eta]
    assert all(b >= a for a, b in zip(h, h[1:]))
    one = comparative_static_hmax(bargain_params, "union_power", [bargain_params.union_power])
    assert len(one) == 1
    assert one[0].h_max == find_h_max(bargaining_employment_curve(bargain_params))[0]
    with pytest.raises(ModelError):
        comparative_static_hmax(bargain_params, "eta0", [0.1])


# ---------------------------------------------------------------- shape checks


def test_shipped_defaults_pass_all_checks(monopsony_params, competitive_params, bargain_params):
    for checks in (monopsony_checks(monopsony_params), competitive_checks(competitive_params),
                   bargaining_checks(bargain_params)):
        assert [c.name for c in checks if not c.passed] == []


def test_checks_report_violations(competitive_params, bargain_params):
    # diminishing returns move the capped-employment peak below competitive hours
    failed = [c.name for c in monopsony_checks(competitive_params) if not c.passed]
    assert "sweep_peaks_at_hc" in failed
    short = replace(bargain_params, bargained_hours=6.0)
    failed = [c.name for c in bargaining_checks(short) if not c.passed]
    assert failed == ["gap_shrinks_with_market_power"]


# ---------------------------------------------------------------- properties


def test_grid_refinement_stability(monopsony_params, competitive_params, bargain_params):
    for p in (monopsony_params, competitive_params):
        fine = replace(p, hours_grid=p.hours_grid.refined(), wage_grid=p.wage_grid.refined())
        step = p.hours_grid.step
        for solve in (solve_monopsony, solve_competitive):
            assert abs(solve(fine).hours - solve(p).hours) <= step + 1e-12
    fine = replace(bargain_params, hours_grid=bargain_params.hours_grid.refined())
    h0 = find_h_max(bargaining_employment_curve(bargain_params))[0]
    h1 = find_h_max(bargaining_employment_curve(fine))[0]
    assert abs(h1 - h0) <= bargain_params.hours_grid.step + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 100.0))
def test_argmax_scale_invariance(c):
    from hours_effect.labor.monopsony import profit_grid

    profit = profit_grid(MonopsonyParams())
    assert grid_argmax(profit * c) == grid_argmax(profit)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(1.0, 4.0))
def test_monopsony_beats_every_capped_choice(a, eps):
    p = replace(MonopsonyParams(), supply_scale=a, supply_elasticity=eps)
    m = solve_monopsony(p)
    sweep = monopsony_cap_sweep(p, [5.0, 8.0, p.hours_grid.hi])
    assert sweep.samples[-1].employment == m.employment


def test_determinism(monopsony_params, bargain_params):
    assert solve_monopsony(monopsony_params) == solve_monopsony(monopsony_params)
    a = bargaining_employment_curve(bargain_params).to_csv()
    assert a == bargaining_employment_curve(bargain_params).to_csv()

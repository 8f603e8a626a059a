"""Command line: ``hours-effect {meta,simulate,policy,report}``.

Exit codes
----------
0  success
2  unreadable or invalid input (bad CSV row, bad parameter or ledger file)
3  the filter left no observations
4  a model shape check failed; outputs are still written and the failing
   checks are listed on stderr
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from . import __version__
from .labor import (
    WAGE_REGIMES,
    BargainParams,
    ModelError,
    MonopsonyParams,
    ParamsError,
    bargaining_cap_sweep,
    bargaining_checks,
    bargaining_employment_curve,
    competitive_cap_sweep,
    competitive_checks,
    find_h_max,
    load_params,
    monopsony_cap_sweep,
    monopsony_checks,
    params_to_dict,
    solve_competitive,
    solve_monopsony,
)
from .ledger import FilterSpec, LedgerError, analysis_filter, apply_filter, load_ledger
from .meta import EmptyInputError, contribution_rows, contribution_totals, meta_analyze
from .policy import PolicySchemaError, cost_per_job, load_policy
from .report import ReportBundle, curve_plot, dumps, file_digest, forest_plot, meta_report, row_label, write_text

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_CHECK = 4

OUT_ENV = "HOURS_EFFECT_OUT"

DEFAULT_LEDGER = "data/table2.csv"
DEFAULT_COSTS = "data/aubry_costs.json"
DEFAULT_MONOPSONY = "config/monopsony_default.json"
DEFAULT_COMPETITIVE = "config/competitive_default.json"
DEFAULT_BARGAINING = "config/bargaining_default.json"


class InputError(Exception):
    pass


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV) or "out")


def _input_record(path) -> dict:
    return {"file": os.path.basename(os.fspath(path)), "sha256": file_digest(path)}


def _parse_sweep(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise InputError(f"--sweep expects lo:hi:n, got {text!r}") from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise InputError("--sweep needs finite bounds and n >= 1")
    if n > 1 and not lo < hi:
        raise InputError("--sweep needs lo < hi when n > 1")
    return np.linspace(lo, hi, n) if n > 1 else np.array([lo])


# ---------------------------------------------------------------- meta


def _filter_from_args(args) -> FilterSpec:
    spec = analysis_filter(args.significant_only, args.cost_weighted_only, args.alternates)
    extra = FilterSpec(include_tags=args.include_tag or (), exclude_tags=args.exclude_tag or ())
    return spec.conjoin(extra)


def run_meta_analysis(ledger, spec: FilterSpec, z: float) -> dict:
    """Aggregate one selection and return its JSON-ready record."""
    selected = apply_filter(ledger, spec)
    if not selected:
        raise EmptyInputError("filter left no observations")
    result = meta_analyze(selected, z)
    rows = contribution_rows(selected, result.r_bar)
    return {"filter": spec.to_dict(), "result": result.to_dict(), "rows": rows,
            "totals": contribution_totals(rows), "_result": result}


def _forest(record: dict, title: str) -> str:
    z = record["result"]["z"]
    rows = []
    for row in record["rows"]:
        half = z * math.sqrt((1.0 - row["r"] ** 2) ** 2 / (row["n"] - 1))
        rows.append({"label": row_label(row), "r": row["r"], "lo": row["r"] - half, "hi": row["r"] + half})
    res = record["result"]
    return forest_plot(rows, res["r_bar"], (res["ci_low"], res["ci_high"]), title)


def _write_meta(out: Path, stem: str, record: dict, title: str) -> str:
    result = record.pop("_result")
    table = meta_report(record["rows"], result, title)
    write_text(out / f"{stem}_table.txt", table)
    write_text(out / f"{stem}_forest.svg", _forest(record, title))
    return table


def cmd_meta(args) -> int:
    ledger = load_ledger(args.input)
    record = run_meta_analysis(ledger, _filter_from_args(args), args.z)
    out = _out_dir(args)
    table = _write_meta(out, "meta", record, "Weighted meta-analysis")
    record["input"] = _input_record(args.input)
    record["version"] = __version__
    write_text(out / "meta.json", dumps(record))
    sys.stdout.write(table)
    return EXIT_OK


# ---------------------------------------------------------------- simulate


def _caps_from_args(args):
    if args.cap is not None and args.sweep is not None:
        raise InputError("use either --cap or --sweep, not both")
    if args.cap is not None:
        return np.array([args.cap])
    if args.sweep is not None:
        return _parse_sweep(args.sweep)
    return None


def simulate(model: str, params, caps=None, wage_regime: str = "fixed_monthly") -> dict:
    """Solve one model and collect curve, markers and shape checks."""
    if model in ("monopsony", "competitive") and not isinstance(params, MonopsonyParams):
        raise InputError(f"--model {model} needs a monopsony parameter file")
    if model == "bargaining" and not isinstance(params, BargainParams):
        raise InputError("--model bargaining needs a bargaining parameter file")
    record = {"model": model, "params": params_to_dict(params)}
    if model == "monopsony":
        m, c = solve_monopsony(params), solve_competitive(params)
        curve = monopsony_cap_sweep(params, params.hours_grid.values() if caps is None else caps)
        record["equilibria"] = {"monopsony": m.to_dict(), "competitive": c.to_dict()}
        markers = [("H_C", c.hours), ("H_M", m.hours)]
        checks = monopsony_checks(params)
    elif model == "competitive":
        c = solve_competitive(params)
        curve = competitive_cap_sweep(params, params.hours_grid.values() if caps is None else caps, wage_regime)
        record["equilibria"] = {"competitive": c.to_dict()}
        markers = [("H_C", c.hours)]
        checks = competitive_checks(params)
    elif model == "bargaining":
        full = bargaining_employment_curve(params)
        h_max, l_max = find_h_max(full)
        curve = full if caps is None else bargaining_cap_sweep(params, caps)
        record["h_max"] = {"hours": h_max, "employment": l_max, "gap": params.bargained_hours - h_max}
        markers = [("H_max", h_max), ("H_b", params.bargained_hours)]
        checks = bargaining_checks(params)
    else:
        raise InputError(f"unknown model {model!r}")
    record["markers"] = {label: hours for label, hours in markers}
    record["curve"] = curve.to_dict()
    record["checks"] = [c.to_dict() for c in checks]
    record["_curve"] = curve
    record["_markers"] = markers
    record["_x_label"] = "hours" if model == "bargaining" and caps is None else "hours cap"
    return record


def _write_simulation(out: Path, stem: str, record: dict) -> None:
    curve = record.pop("_curve")
    markers = record.pop("_markers")
    write_text(out / f"{stem}_curve.csv", curve.to_csv())
    x_label = record.pop("_x_label")
    svg = curve_plot([(curve.wage_regime, list(curve.caps), list(curve.employment))], markers,
                     f"Employment, {record['model']} model", x_label=x_label)
    write_text(out / f"{stem}_curve.svg", svg)


def _report_failures(record: dict) -> bool:
    bad = [c for c in record["checks"] if not c["passed"]]
    for c in bad:
        print(f"shape check failed [{record['model']}] {c['name']}: {c['detail']}", file=sys.stderr)
    return bool(bad)


def cmd_simulate(args) -> int:
    params = load_params(args.params)
    caps = _caps_from_args(args)
    record = simulate(args.model, params, caps, args.wage_regime)
    out = _out_dir(args)
    _write_simulation(out, args.model, record)
    record["input"] = _input_record(args.params)
    record["version"] = __version__
    write_text(out / f"{args.model}.json", dumps(record))
    for label, hours in record["markers"].items():
        print(f"{label} = {hours:.4f}")
    return EXIT_CHECK if _report_failures(record) else EXIT_OK


# ---------------------------------------------------------------- policy


def _whole(x: Decimal) -> str:
    return str(x.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def policy_record(policy_file, apply_offsets: bool) -> dict:
    led = policy_file.ledger
    result = cost_per_job(led, apply_offsets)
    record = {
        "currency": led.currency,
        "jobs": led.jobs,
        "gross_cost_low": str(led.gross_cost_low),
        "gross_cost_high": str(led.gross_cost_high),
        "offsets": [{"label": o.label, "amount": str(o.amount)} for o in led.offsets],
        "cost_per_job": result.to_dict(),
    }
    if policy_file.growth is not None:
        record["growth_decomposition"] = policy_file.growth.to_dict()
    return record


def policy_lines(record: dict) -> str:
    cost = record["cost_per_job"]
    label = "with offsets" if cost["offsets_applied"] else "without offsets"
    lines = [
        f"net cost ({record['currency']}, {label}): "
        f"{_whole(Decimal(cost['net_low']))} – {_whole(Decimal(cost['net_high']))}",
        f"{_whole(Decimal(cost['per_job_low']))} – {_whole(Decimal(cost['per_job_high']))} per job-year",
    ]
    if cost["low_clamped"] or cost["high_clamped"]:
        lines.append("warning: offsets exceed gross cost; net bound clamped at zero")
    growth = record.get("growth_decomposition")
    if growth is not None:
        flag = " (flagged)" if growth["flagged"] else ""
        lines.append(f"growth {growth['total_growth']}%: residual {growth['residual']} points{flag}")
    return "\n".join(lines) + "\n"


def cmd_policy(args) -> int:
    policy_file = load_policy(args.ledger)
    record = policy_record(policy_file, args.offsets)
    record["input"] = _input_record(args.ledger)
    record["version"] = __version__
    out = _out_dir(args)
    text = policy_lines(record)
    write_text(out / "policy.json", dumps(record))
    write_text(out / "policy.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- report


def cmd_report(args) -> int:
    out = _out_dir(args)
    bundle = ReportBundle(version=__version__)
    bundle.record_input("ledger", args.input)
    bundle.record_input("costs", args.ledger)
    ledger = load_ledger(args.input)
    runs = (
        ("significant", analysis_filter(significant_only=True), "Significant elasticities"),
        ("significant_cost_weighted", analysis_filter(significant_only=True, cost_weighted_only=True),
         "Significant elasticities weighted for hourly cost"),
    )
    for label, spec, title in runs:
        record = run_meta_analysis(ledger, spec, args.z)
        _write_meta(out, f"meta_{label}", record, title)
        bundle.meta_results[label] = record

    failed = False
    scenarios = (
        ("monopsony", "monopsony", args.monopsony_params, "fixed_monthly"),
        ("competitive_fixed_monthly", "competitive", args.competitive_params, "fixed_monthly"),
        ("competitive_proportional_hourly", "competitive", args.competitive_params, "proportional_hourly"),
        ("bargaining", "bargaining", args.bargaining_params, "fixed_monthly"),
    )
    for label, model, path, regime in scenarios:
        bundle.record_input(f"{label}_params", path)
        record = simulate(model, load_params(path), None, regime)
        _write_simulation(out, label, record)
        failed = _report_failures(record) or failed
        bundle.model_curves[label] = record

    policy_file = load_policy(args.ledger)
    bundle.policy = {
        "with_offsets": policy_record(policy_file, True),
        "without_offsets": policy_record(policy_file, False),
    }
    write_text(out / "report.json", dumps(bundle.to_dict()))
    text = "".join(policy_lines(bundle.policy[k]) for k in ("with_offsets", "without_offsets"))
    write_text(out / "policy.txt", text)
    for label, record in bundle.meta_results.items():
        res = record["result"]
        print(f"{label}: k={res['k']} r_bar={res['r_bar']:.4f} "
              f"interval=({res['ci_low']:.4f}, {res['ci_high']:.4f})")
    sys.stdout.write(text)
    return EXIT_CHECK if failed else EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hours-effect",
        description="Meta-analysis, labor-model simulation and policy arithmetic for working-hours reductions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_option(p):
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./out)")

    p = sub.add_parser("meta", help="weighted meta-analysis of a study ledger")
    p.add_argument("--input", required=True, help="ledger CSV")
    p.add_argument("--significant-only", action="store_true")
    p.add_argument("--cost-weighted-only", action="store_true")
    p.add_argument("--alternates", choices=("auto", "include", "exclude"), default="auto",
                   help="rows tagged 'alternate': auto keeps them only with --cost-weighted-only")
    p.add_argument("--include-tag", action="append", metavar="TAG", help="keep rows carrying TAG (repeatable)")
    p.add_argument("--exclude-tag", action="append", metavar="TAG", help="drop rows carrying TAG (repeatable)")
    p.add_argument("--z", type=float, default=1.96, help="interval multiplier (default 1.96)")
    out_option(p)
    p.set_defaults(func=cmd_meta)

    p = sub.add_parser("simulate", help="solve a labor-market model under hours caps")
    p.add_argument("--model", required=True, choices=("monopsony", "competitive", "bargaining"))
    p.add_argument("--params", required=True, help="parameter JSON")
    p.add_argument("--cap", type=float, help="single hours cap")
    p.add_argument("--sweep", metavar="LO:HI:N", help="evenly spaced caps")
    p.add_argument("--wage-regime", choices=WAGE_REGIMES, default="fixed_monthly",
                   help="competitive model only")
    out_option(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("policy", help="cost per job of a subsidy program")
    p.add_argument("--ledger", required=True, help="policy cost JSON")
    p.add_argument("--offsets", action=argparse.BooleanOptionalAction, default=True,
                   help="deduct fiscal offsets from gross cost (default on)")
    out_option(p)
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("report", help="run every analysis on the shipped inputs")
    p.add_argument("--input", default=DEFAULT_LEDGER)
    p.add_argument("--ledger", default=DEFAULT_COSTS)
    p.add_argument("--monopsony-params", default=DEFAULT_MONOPSONY)
    p.add_argument("--competitive-params", default=DEFAULT_COMPETITIVE)
    p.add_argument("--bargaining-params", default=DEFAULT_BARGAINING)
    p.add_argument("--z", type=float, default=1.96)
    out_option(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (LedgerError, ParamsError, PolicySchemaError, ModelError, InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

import json
import os
import re
import subprocess
import sys
import xml.etree.ElementTree as ET
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import pytest

from hours_effect.cli import main
from hours_effect.report import fmt
from hours_effect.report.tables import SUMMARY_FIELDS

ROOT = Path(__file__).resolve().parents[1]
TABLE2 = str(ROOT / "data" / "table2.csv")
COSTS = str(ROOT / "data" / "aubry_costs.json")
MONO = str(ROOT / "config" / "monopsony_default.json")
COMP = str(ROOT / "config" / "competitive_default.json")
BARG = str(ROOT / "config" / "bargaining_default.json")
BARG_SHORT = str(ROOT / "config" / "bargaining_short_hours.json")
SVG = "{http://www.w3.org/2000/svg}"


def run_cli(*args, cwd=None, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "hours_effect.cli", *args], cwd=cwd, env=full_env,
                          capture_output=True, text=True, encoding="utf-8")


# ---------------------------------------------------------------- exit codes (subprocess)


def test_exit_code_parse_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(Path(TABLE2).read_text().replace("13315", "many"))
    proc = run_cli("meta", "--input", str(bad), "--out", str(tmp_path / "o"))
    assert proc.returncode == 2
    assert "row 5" in proc.stderr and "sample_size" in proc.stderr


def test_exit_code_empty_filter(tmp_path):
    proc = run_cli("meta", "--input", TABLE2, "--include-tag", "nothing", "--out", str(tmp_path))
    assert proc.returncode == 3


def test_exit_code_shape_violation(tmp_path):
    proc = run_cli("simulate", "--model", "bargaining", "--params", BARG_SHORT, "--out", str(tmp_path))
    assert proc.returncode == 4
    assert "gap_shrinks_with_market_power" in proc.stderr
    # outputs are still written
    assert (tmp_path / "bargaining_curve.csv").exists()


def test_exit_code_bad_arguments(tmp_path):
    assert run_cli("simulate", "--model", "other", "--params", MONO).returncode == 2
    proc = run_cli("policy", "--ledger", MONO, "--out", str(tmp_path))
    assert proc.returncode == 2


def test_default_out_from_environment(tmp_path):
    proc = run_cli("policy", "--ledger", COSTS, cwd=tmp_path, env={"HOURS_EFFECT_OUT": str(tmp_path / "env")})
    assert proc.returncode == 0
    assert (tmp_path / "env" / "policy.json").exists()


# ---------------------------------------------------------------- in-process runs


def test_meta_outputs(tmp_path, capsys):
    assert main(["meta", "--input", TABLE2, "--significant-only", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "meta.json").read_text())
    assert data["result"]["k"] == 9
    assert round(data["result"]["r_bar"], 4) == 0.5548
    assert data["input"]["file"] == "table2.csv"
    assert "TOTAL" in capsys.readouterr().out
    ET.fromstring((tmp_path / "meta_forest.svg").read_text())


def test_meta_cost_weighted_and_zero_z(tmp_path):
    assert main(["meta", "--input", TABLE2, "--significant-only", "--cost-weighted-only",
                 "--z", "0", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "meta.json").read_text())["result"]
    assert round(res["r_bar"], 4) == 0.2486
    assert res["ci_low"] == res["ci_high"] == res["r_bar"]


def test_text_table_agrees_with_json(tmp_path):
    main(["meta", "--input", TABLE2, "--significant-only", "--out", str(tmp_path)])
    data = json.loads((tmp_path / "meta.json").read_text())
    text = (tmp_path / "meta_table.txt").read_text()
    for key, label in SUMMARY_FIELDS:
        line = next(l for l in text.splitlines() if l.startswith(label + " "))
        assert line.split()[-1] == fmt(data["result"][key]), key
    body = [l for l in text.splitlines() if re.search(r"\d\s*$", l) and "  " in l]
    for row in data["rows"]:
        cells = [fmt(row["n"]), fmt(row["r"]), fmt(row["n_r"]), fmt(row["n_sq_dev"])]
        assert any(l.split()[-4:] == cells for l in body), row["id"]
    total = next(l for l in text.splitlines() if l.startswith("TOTAL"))
    assert total.split()[1:] == [fmt(data["totals"]["n"]), fmt(data["totals"]["n_r"]),
                                 fmt(data["totals"]["n_sq_dev"])]


def test_policy_output(tmp_path, capsys):
    assert main(["policy", "--ledger", COSTS, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "30000 – 47143 per job-year" in out
    data = json.loads((tmp_path / "policy.json").read_text())
    for key in ("per_job_low", "per_job_high"):
        whole = Decimal(data["cost_per_job"][key]).quantize(Decimal(1), rounding=ROUND_HALF_UP)
        assert str(whole) in out
    assert main(["policy", "--ledger", COSTS, "--no-offsets", "--out", str(tmp_path)]) == 0
    assert "45714 – 62857" in capsys.readouterr().out


def test_policy_single_job(tmp_path, capsys):
    f = tmp_path / "one.json"
    f.write_text(json.dumps({"gross_cost_low": "5000", "gross_cost_high": "7000", "jobs": 1}))
    assert main(["policy", "--ledger", str(f), "--out", str(tmp_path)]) == 0
    assert "5000 – 7000 per job-year" in capsys.readouterr().out


def _markers(svg_path):
    root = ET.fromstring(svg_path.read_text())
    return {m.get("data-label"): float(m.get("data-hours")) for m in root.iter(SVG + "line") if m.get("class") == "marker"}


def test_monopsony_simulation_markers(tmp_path):
    from hours_effect.labor import load_params, solve_competitive, solve_monopsony

    assert main(["simulate", "--model", "monopsony", "--params", MONO, "--out", str(tmp_path)]) == 0
    p = load_params(MONO)
    marks = _markers(tmp_path / "monopsony_curve.svg")
    assert marks == {"H_C": solve_competitive(p).hours, "H_M": solve_monopsony(p).hours}
    rows = (tmp_path / "monopsony_curve.csv").read_text().splitlines()
    emp = [float(r.split(",")[1]) for r in rows[1:]]
    caps = [float(r.split(",")[0]) for r in rows[1:]]
    assert caps[emp.index(max(emp))] <= marks["H_C"]
    assert max(emp) == emp[caps.index(marks["H_C"])]


def test_cap_above_monopsony_hours_is_uncapped(tmp_path):
    assert main(["simulate", "--model", "monopsony", "--params", MONO, "--cap", "13.5",
                 "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "monopsony.json").read_text())
    row = data["curve"]["samples"][0]
    eq = data["equilibria"]["monopsony"]
    assert (row["employment"], row["wage"], row["output"]) == (eq["employment"], eq["wage"], eq["output"])


def test_bargaining_simulation(tmp_path):
    assert main(["simulate", "--model", "bargaining", "--params", BARG, "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "bargaining.json").read_text())
    assert _markers(tmp_path / "bargaining_curve.svg")["H_max"] == data["h_max"]["hours"]
    assert all(c["passed"] for c in data["checks"])


def test_competitive_sweep(tmp_path):
    assert main(["simulate", "--model", "competitive", "--params", COMP, "--sweep", "4:6:5",
                 "--wage-regime", "proportional_hourly", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "competitive.json").read_text())
    assert [s["cap"] for s in data["curve"]["samples"]] == [4.0, 4.5, 5.0, 5.5, 6.0]
    assert data["curve"]["wage_regime"] == "proportional_hourly"


@pytest.mark.parametrize("sweep", ["4:6", "6:4:3", "a:b:c", "4:6:0"])
def test_bad_sweep(tmp_path, sweep):
    assert main(["simulate", "--model", "monopsony", "--params", MONO, "--sweep", sweep,
                 "--out", str(tmp_path)]) == 2


def test_model_and_params_must_match(tmp_path):
    assert main(["simulate", "--model", "monopsony", "--params", BARG, "--out", str(tmp_path)]) == 2


def test_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["report", "--input", TABLE2, "--ledger", COSTS, "--monopsony-params", MONO,
                 "--competitive-params", COMP, "--bargaining-params", BARG, "--out", str(a)]) == 0
    assert main(["report", "--input", TABLE2, "--ledger", COSTS, "--monopsony-params", MONO,
                 "--competitive-params", COMP, "--bargaining-params", BARG, "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    report = json.loads((a / "report.json").read_text())
    assert set(report["provenance"]["inputs"]) >= {"ledger", "costs", "monopsony_params", "bargaining_params"}
    assert set(report["meta_results"]) == {"significant", "significant_cost_weighted"}

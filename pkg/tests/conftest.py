import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
CONFIG = ROOT / "config"

# make the oracle helpers importable as a plain module
sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def ledger():
    from hours_effect.ledger import load_ledger

    return load_ledger(DATA / "table2.csv")


@pytest.fixture(scope="session")
def monopsony_params():
    from hours_effect.labor import load_params

    return load_params(CONFIG / "monopsony_default.json")


@pytest.fixture(scope="session")
def competitive_params():
    from hours_effect.labor import load_params

    return load_params(CONFIG / "competitive_default.json")


@pytest.fixture(scope="session")
def bargain_params():
    from hours_effect.labor import load_params

    return load_params(CONFIG / "bargaining_default.json")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])

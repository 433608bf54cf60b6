# ==============================================================================
# CONFIGURATION PYTEST - fixtures partagées et option --runslow
# ==============================================================================

import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

BUNDLED_CSV = ROOT / "data" / "synthetic_ohlcv.csv"

# matériel de référence, hors suite de tests
collect_ignore = ["examples"]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="lance aussi les expériences longues (marqueur slow)")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: expérience longue, ignorée sans --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="expérience longue : relancer avec --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def bundled_csv() -> Path:
    return BUNDLED_CSV


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def make_bars_csv(closes, start="2002-01-02", spread=1.0) -> str:
    """Contenu CSV Yahoo à partir d'une liste de clôtures (Open = Close)."""
    dates = pd.bdate_range(start=start, periods=len(closes))
    lines = ["Date,Open,High,Low,Close,Adj Close,Volume"]
    for d, c in zip(dates, closes):
        lines.append(f"{d:%Y-%m-%d},{c},{c + spread},{c - spread},{c},{c},1000")
    return "\n".join(lines) + "\n"

# ==============================================================================
# TESTS - CONFIGURATION DES EXPÉRIENCES (INI + surcharges)
# ==============================================================================

from pathlib import Path

import pytest

from conftest import BUNDLED_CSV
from exceptions import ConfigError
from experiment_config import DEFAULT_DATA, load_config, write_snapshot
from technical_analyzer import FEATURE_COLUMNS


def write_ini(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults():
    config = load_config()
    assert config.data_path == DEFAULT_DATA == BUNDLED_CSV
    assert config.features == tuple(FEATURE_COLUMNS)
    assert (config.train.epochs, config.train.window, config.neurons, config.train.learning_rate) == (1000, 7, 32, 1e-3)
    assert config.train.batch_size == 64 and config.train.optimizer == "adam"
    assert (config.costs.buy, config.costs.sell) == (0.0025, 0.0045)
    assert (config.split.train, config.split.val, config.split.test) == (0.8, 0.1, 0.1)
    assert config.label == "ecnn"
    assert config.seed == 42


def test_ini_and_overrides(tmp_path):
    ini = write_ini(tmp_path / "exp.ini", f"""
[data]
path = {BUNDLED_CSV}
features = close, high, low, atr14

[model]
kind = lstm
neurons = 8

[smoothing]
enabled = true
alpha = 0.5

[training]
epochs = 5
window = 10
truncation = 4

[costs]
mode = paper-literal
sell_mode = exit
""")
    config = load_config(ini, {"training": {"seed": 7, "epochs": None}, "model": {"kind": "rnn"}})
    assert config.features == ("close", "high", "low", "atr14")
    assert config.model == "rnn" and config.neurons == 8
    assert config.smoothing and config.alpha == 0.5
    assert config.label == "rnn-es"
    assert (config.train.epochs, config.train.window, config.train.k, config.seed) == (5, 10, 4, 7)
    assert (config.backtest_mode, config.sell_mode) == ("paper-literal", "exit")


def test_date_range_split(tmp_path):
    ini = write_ini(tmp_path / "ranges.ini", """
[split]
train_range = 2002-01-01:2002-12-31
val_range = 2003-01-01:2003-06-30
test_range = 2003-07-01:2003-12-31
""")
    config = load_config(ini)
    assert config.split.date_ranges["val"] == ("2003-01-01", "2003-06-30")


def test_data_dir_environment(tmp_path, monkeypatch):
    target = tmp_path / "prices.csv"
    target.write_bytes(BUNDLED_CSV.read_bytes())
    monkeypatch.setenv("ECNN_DATA_DIR", str(tmp_path))
    assert load_config(None, {"data": {"path": "prices.csv"}}).data_path == target


def test_output_dir_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ECNN_OUTPUT_DIR", str(tmp_path / "out"))
    assert load_config().output_dir == tmp_path / "out"
    assert load_config(None, {"output": {"dir": "elsewhere"}}).output_dir == Path("elsewhere")


@pytest.mark.parametrize("section, key, value", [
    ("data", "path", "/nonexistent/prices.csv"),
    ("data", "features", "close,rsi"),
    ("data", "ma_mode", "weighted"),
    ("model", "kind", "gru"),
    ("model", "neurons", "0"),
    ("smoothing", "alpha", "1.5"),
    ("training", "epochs", "many"),
    ("training", "optimizer", "rmsprop"),
    ("split", "train", "0.9"),
    ("split", "train_range", "2002-01-01"),
    ("costs", "buy", "-0.01"),
    ("costs", "mode", "optimistic"),
    ("output", "period_mode", "monthly"),
])
def test_invalid_values(section, key, value):
    with pytest.raises(ConfigError):
        load_config(None, {section: {key: value}})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="introuvable"):
        load_config(tmp_path / "absent.ini")


def test_snapshot_roundtrip(tmp_path):
    original = load_config(None, {
        "data": {"features": "close,volume,macd"},
        "model": {"kind": "lstm", "neurons": 5},
        "smoothing": {"enabled": "true", "alpha": 0.7},
        "training": {"epochs": 3, "learning_rate": 0.01, "truncation": 2, "window": 4},
        "output": {"dir": str(tmp_path)},
    })
    path = write_snapshot(original, tmp_path / "resolved_config.ini")
    assert load_config(path) == original


def test_with_seed():
    config = load_config()
    assert config.with_seed(3).seed == 3
    assert config.seed == 42

# ==============================================================================
# TESTS - LISSAGE EXPONENTIEL (niveau, log-ratio, remise à l'échelle)
# ==============================================================================

import numpy as np
import pytest

from conftest import BUNDLED_CSV
from data_collector import parse_csv
from dataset_builder import SplitSpec
from exceptions import ConfigError, DataError, DimensionError
from model_registry import RecurrentModel, get_model_kind
from smoothing import (
    SmoothingTransform, from_model_space, smooth_level, to_model_space, wrap,
)
from technical_analyzer import compute_indicators
from trainer import TrainConfig

SPLIT = SplitSpec(train=0.8, val=0.1, test=0.1)


@pytest.fixture(scope="module")
def frame():
    return compute_indicators(parse_csv(BUNDLED_CSV))


# ------------------------------------------------------------------------------
# Niveau
# ------------------------------------------------------------------------------

def test_smooth_level_hand_values():
    np.testing.assert_allclose(smooth_level([1.0, 2.0], 0.8).levels, [1.0, 1.8])
    y = np.array([3.0, 7.0, 2.0, 9.0])
    assert np.array_equal(smooth_level(y, 1.0).levels, y)
    np.testing.assert_allclose(smooth_level([4.2] * 6, 0.3).levels, 4.2)


def test_smooth_level_errors():
    for alpha in (0.0, -0.5, 1.5):
        with pytest.raises(ConfigError):
            smooth_level([1.0, 2.0], alpha)
    with pytest.raises(DataError):
        smooth_level([1.0, 0.0, 2.0], 0.8)
    with pytest.raises(DataError):
        smooth_level([], 0.8)


def test_level_lags_increasing_series(rng):
    for _ in range(10):
        y = np.cumsum(rng.uniform(0.01, 2.0, size=50)) + 1.0
        levels = smooth_level(y, float(rng.uniform(0.05, 0.95))).levels
        assert np.all(levels <= y + 1e-12)


# ------------------------------------------------------------------------------
# Transformation et remise à l'échelle
# ------------------------------------------------------------------------------

def test_to_model_space_values():
    assert to_model_space([5.0], [5.0])[0] == 0.0
    assert to_model_space([2.0], [1.0])[0] == pytest.approx(0.693147, abs=1e-6)
    y = np.array([3.0, 1.0, 8.0])
    assert np.array_equal(to_model_space(y, smooth_level(y, 1.0).levels), np.zeros(3))


def test_from_model_space_values():
    assert from_model_space([np.log(2.0)], [3.0])[0] == pytest.approx(6.0)
    np.testing.assert_allclose(from_model_space([0.0, 0.0], [2.5, 4.0]), [2.5, 4.0])


def test_roundtrip(rng):
    y = rng.uniform(0.1, 500.0, size=100)
    levels = rng.uniform(0.1, 500.0, size=100)
    np.testing.assert_allclose(from_model_space(to_model_space(y, levels), levels), y, rtol=1e-12)


def test_transform_errors():
    with pytest.raises(DimensionError):
        to_model_space([1.0, 2.0], [1.0])
    with pytest.raises(DataError):
        to_model_space([-1.0], [1.0])
    with pytest.raises(DimensionError):
        from_model_space([0.0], [1.0, 2.0])
    with pytest.raises(ConfigError):
        SmoothingTransform(alpha=0.0)


def test_transform_keeps_warmup_rows_missing():
    transform = SmoothingTransform(alpha=0.8)
    out = transform.to_model_space([np.nan, 2.0], [1.0, 1.0])
    assert np.isnan(out[0])
    assert out[1] == pytest.approx(np.log(2.0))


# ------------------------------------------------------------------------------
# Pipeline
# ------------------------------------------------------------------------------

def last_close(features):
    def model(dataset, split):
        inputs, _ = dataset.subset(split)
        return inputs[:, -1, features.index("close")]
    return model


def test_identity_model_reproduces_series(frame):
    features = ["close", "volume", "atr14"]
    pipeline = wrap(last_close(features), frame, SPLIT, window=5, alpha=0.8, features=features)
    test = pipeline.dataset.splits["test"]
    np.testing.assert_allclose(pipeline.predict("test"), pipeline.dataset.anchor_prices[test], rtol=1e-12)


def test_target_oracle_reproduces_actual_prices(frame):
    pipeline = wrap(lambda ds, split: ds.subset(split)[1][:, -1, 0], frame, SPLIT, window=5)
    np.testing.assert_allclose(pipeline.predict("val"), pipeline.actual("val"), rtol=1e-12)


def test_alpha_one_zeroes_the_close_column(frame):
    features = ["close", "macd"]
    pipeline = wrap(last_close(features), frame, SPLIT, window=3, alpha=1.0, features=features)
    assert np.array_equal(pipeline.dataset.features[:, :, 0], np.zeros(pipeline.dataset.features.shape[:2]))
    # α = 1 et modèle identité : Ŷ = l_t = y_t
    test = pipeline.dataset.splits["test"]
    np.testing.assert_allclose(pipeline.predict("test"), pipeline.dataset.anchor_prices[test], rtol=1e-12)


def test_indicator_features_keep_min_max_scaling(frame):
    features = ["close", "atr14"]
    pipeline = wrap(last_close(features), frame, SPLIT, window=5, features=features)
    dataset = pipeline.dataset
    assert dataset.constants.features == ["atr14"]
    train_atr = dataset.subset("train")[0][:, :, 1]
    assert train_atr.min() >= -1e-12 and train_atr.max() <= 1.0 + 1e-12


def test_pipeline_fit_and_predict(frame):
    features = ["close", "high", "low", "pct_k14"]
    kind = get_model_kind("ecnn")
    model = RecurrentModel(kind=kind, params=kind.init(4, len(features), 1, 0))
    pipeline = wrap(model, frame, SPLIT, window=5, features=features)
    pipeline.fit(TrainConfig(epochs=2, batch_size=32, window=5, learning_rate=1e-3))
    assert model.params is pipeline.report.params
    predictions = pipeline.predict("test")
    assert predictions.shape == (pipeline.dataset.count("test"),)
    assert np.all(predictions > 0)


@pytest.mark.slow
def test_smoothing_keeps_accuracy_of_plain_model(tmp_path):
    from conftest import make_bars_csv
    from dataset_builder import make_windows
    from performance_analyzer import r2
    from prediction_analyzer import predict_split
    from trainer import fit

    t = np.arange(400)
    noise = np.random.default_rng(12).normal(0.0, 0.1, size=t.size)
    closes = np.round(100.0 + 20.0 * np.sin(2 * np.pi * t / 120) + noise, 4)
    path = tmp_path / "sine.csv"
    path.write_text(make_bars_csv(closes, spread=0.5), encoding="utf-8")
    sine = compute_indicators(parse_csv(path))

    features = ["close", "high", "low"]
    cfg = TrainConfig(epochs=300, batch_size=32, window=5, learning_rate=1e-2, seed=4)
    kind = get_model_kind("ecnn")

    plain = RecurrentModel(kind=kind, params=kind.init(8, len(features), 1, 4))
    dataset = make_windows(sine, SPLIT, 5, features=features)
    plain.params = fit(plain, dataset, cfg).params
    frame_plain = predict_split(plain, dataset, "test")
    r2_plain = r2(frame_plain["actual"], frame_plain["predicted"])

    smoothed = RecurrentModel(kind=kind, params=kind.init(8, len(features), 1, 4))
    pipeline = wrap(smoothed, sine, SPLIT, window=5, alpha=0.8, features=features).fit(cfg)
    r2_smoothed = r2(pipeline.actual("test"), pipeline.predict("test"))

    assert abs(r2_smoothed - r2_plain) <= 0.02

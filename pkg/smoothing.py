# ==============================================================================
# MODULE: SMOOTHING - lissage exponentiel autour d'un modèle récurrent
# ------------------------------------------------------------------------------
#   niveau        l_t = α·y_t + (1−α)·l_{t−1},  l_0 = y_0
#   entrée        X_t = ln(Input_t / l_t)
#   modèle        O_t = modèle(X_t)
#   remise à l'échelle  Ŷ_t = l_t · exp(O_t)
#
# Pour la prévision de t+1, la remise à l'échelle utilise l_t (dernier niveau
# connu) : l_{t+1} dépend de y_{t+1}, encore inconnu.
# ==============================================================================

import logging
from dataclasses import dataclass

import numpy as np

import trainer
from dataset_builder import SplitSpec, WindowedDataset, make_windows
from exceptions import ConfigError, DataError, DimensionError
from prediction_analyzer import predict_windows
from technical_analyzer import FeatureFrame

PRICE_COLUMNS = ("open", "high", "low", "close", "adj_close", "ema20")
DEFAULT_ALPHA = 0.8


@dataclass(frozen=True)
class LevelSeries:
    levels: np.ndarray
    alpha: float

    def __len__(self) -> int:
        return len(self.levels)


def _check_alpha(alpha: float):
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"α={alpha} hors de ]0, 1]")


def smooth_level(series, alpha: float = DEFAULT_ALPHA) -> LevelSeries:
    """Niveau lissé, amorcé sur la première valeur."""
    _check_alpha(alpha)
    y = np.asarray(series, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise DataError("smooth_level : série vide")
    if not np.all(y > 0):
        raise DataError(f"smooth_level : valeur non positive à l'index {int(np.argmin(y > 0))}")

    levels = np.empty_like(y)
    levels[0] = y[0]
    for t in range(1, y.size):
        levels[t] = alpha * y[t] + (1.0 - alpha) * levels[t - 1]
    return LevelSeries(levels=levels, alpha=alpha)


def to_model_space(series, levels) -> np.ndarray:
    series = np.asarray(series, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.float64)
    if series.shape != levels.shape:
        raise DimensionError(f"to_model_space : formes {series.shape} et {levels.shape}")
    ratio = series / levels
    if not np.all(ratio > 0):
        raise DataError("to_model_space : rapport Input/niveau non positif")
    return np.log(ratio)


def from_model_space(outputs, levels) -> np.ndarray:
    outputs = np.asarray(outputs, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.float64)
    if outputs.shape != levels.shape:
        raise DimensionError(f"from_model_space : formes {outputs.shape} et {levels.shape}")
    return levels * np.exp(outputs)


@dataclass(frozen=True)
class SmoothingTransform:
    """Transformation passée à make_windows : prix et cible en log-ratio du niveau."""
    alpha: float = DEFAULT_ALPHA
    price_columns: tuple = PRICE_COLUMNS

    def __post_init__(self):
        _check_alpha(self.alpha)

    def levels(self, close) -> np.ndarray:
        return smooth_level(close, self.alpha).levels

    def to_model_space(self, values, levels) -> np.ndarray:
        """Comme to_model_space, les lignes de chauffe (NaN) restant NaN."""
        values = np.asarray(values, dtype=np.float64)
        out = np.full(values.shape, np.nan)
        known = np.isfinite(values)
        out[known] = to_model_space(values[known], np.asarray(levels)[known])
        return out

    def from_model_space(self, outputs, levels) -> np.ndarray:
        return from_model_space(outputs, levels)


@dataclass
class SmoothedPipeline:
    """lissage → transformation → modèle → remise à l'échelle."""
    model: object
    dataset: WindowedDataset
    transform: SmoothingTransform
    report: object = None

    def fit(self, cfg) -> "SmoothedPipeline":
        self.report = trainer.fit(self.model, self.dataset, cfg)
        self.model.params = self.report.params
        return self

    def predict(self, split: str = "test") -> np.ndarray:
        """
        Prévisions en prix sur un split. `model` est un RecurrentModel, ou un
        appelable (dataset, split) -> sorties dans l'espace du modèle.
        """
        if callable(self.model):
            outputs = self.model(self.dataset, split)
        else:
            outputs = predict_windows(self.model, *self.dataset.subset(split))
        return self.dataset.denormalize(outputs, split)

    def actual(self, split: str = "test") -> np.ndarray:
        return self.dataset.target_prices[self.dataset.splits[split]]


def wrap(model, frame: FeatureFrame, split: SplitSpec, window: int, alpha: float = DEFAULT_ALPHA,
         horizon: int = 1, features=None) -> SmoothedPipeline:
    """Construit le jeu fenêtré en espace lissé et l'associe au modèle."""
    transform = SmoothingTransform(alpha=alpha)
    dataset = make_windows(frame, split, window, horizon=horizon, features=features, transform=transform)
    logging.info(f"🌊 Lissage exponentiel actif (α={alpha}) sur {len(dataset)} fenêtres")
    return SmoothedPipeline(model=model, dataset=dataset, transform=transform)

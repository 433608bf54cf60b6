# ==============================================================================
# MODULE: SYNTHETIC DATA - séries de contrôle pour les tests et les expériences
# ------------------------------------------------------------------------------
#   reference_task    : cibles produites par un ECNN connu (+ bruit d'observation)
#   hidden_driver   : état non linéaire piloté par une entrée NON observée
#                       u(t)   = 0.9·u(t−1) + ε(t)
#                       h(t+1) = tanh(0.7·h(t) + 0.5·x(t) + u(t))
#                     le modèle ne voit que x ; la cible est h
#   synthetic_ohlcv : historique au format Yahoo (marche aléatoire géométrique)
# ==============================================================================

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

import ecnn
import trainer
from dataset_builder import SplitSpec, WindowedDataset, windows_from_arrays
from exceptions import ConfigError
from model_registry import RecurrentModel, get_model_kind
from prediction_analyzer import predict_windows

REFERENCE_SPLIT = SplitSpec(train=0.8, val=0.1, test=0.1)


@dataclass
class SyntheticSeries:
    inputs: np.ndarray        # (rows, m)
    step_targets: np.ndarray  # (rows,) cible associée à la ligne d'entrée r
    hidden: np.ndarray = None

    def windows(self, window: int, split: SplitSpec = REFERENCE_SPLIT) -> WindowedDataset:
        labels = split.assign(np.arange(len(self.step_targets)))
        return windows_from_arrays(self.inputs, self.step_targets, labels, window, horizon=1)


def reference_task(rows: int = 300, n: int = 3, m: int = 1, seed: int = 0, noise: float = 0.0,
                   reference_seed: int = 1234) -> SyntheticSeries:
    """Entrées uniformes, cibles = sorties d'un ECNN de référence (p = 1)."""
    if rows < 10:
        raise ConfigError(f"reference_task : rows={rows} < 10")
    rng = np.random.default_rng(seed)
    reference = ecnn.init_params(n, m, 1, reference_seed)
    inputs = rng.uniform(-1.0, 1.0, size=(rows, m))

    s, z = np.zeros(n), np.zeros(1)
    targets = np.empty(rows)
    for r in range(rows):
        s, y, _ = ecnn.forward_step(reference, s, inputs[r], z)
        y_d = y + noise * rng.standard_normal(1)
        z = y - y_d
        targets[r] = y_d[0]
    return SyntheticSeries(inputs=inputs, step_targets=targets)


def hidden_driver(rows: int = 300, seed: int = 0, phi: float = 0.9, driver_scale: float = 0.3) -> SyntheticSeries:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=rows)
    u = np.zeros(rows)
    for t in range(1, rows):
        u[t] = phi * u[t - 1] + driver_scale * rng.standard_normal()

    h = np.zeros(rows + 1)
    for t in range(rows):
        h[t + 1] = np.tanh(0.7 * h[t] + 0.5 * x[t] + u[t])
    return SyntheticSeries(inputs=x.reshape(-1, 1), step_targets=h[1:], hidden=u)


def synthetic_ohlcv(rows: int = 500, seed: int = 0, start: str = "2002-01-02",
                    price: float = 100.0, volatility: float = 0.01) -> pd.DataFrame:
    """Barres OHLCV cohérentes (High ≥ max(Open, Close), Low ≤ min) aux jours ouvrés."""
    rng = np.random.default_rng(seed)
    dates = pd.bdate_range(start=start, periods=rows)
    close = price * np.exp(np.cumsum(volatility * rng.standard_normal(rows)))
    opening = np.concatenate([[price], close[:-1]]) * (1.0 + 0.002 * rng.standard_normal(rows))
    high = np.maximum(opening, close) * (1.0 + np.abs(0.005 * rng.standard_normal(rows)))
    low = np.minimum(opening, close) * (1.0 - np.abs(0.005 * rng.standard_normal(rows)))
    volume = rng.integers(1_000, 100_000, size=rows)
    return pd.DataFrame({
        "Date": dates.strftime("%Y-%m-%d"),
        "Open": opening.round(4),
        "High": high.round(4),
        "Low": low.round(4),
        "Close": close.round(4),
        "Adj Close": close.round(4),
        "Volume": volume,
    })


def write_ohlcv_csv(path, **kwargs):
    frame = synthetic_ohlcv(**kwargs)
    frame.to_csv(path, index=False)
    logging.info(f"💾 {len(frame)} barres synthétiques → {path}")
    return path


# ==============================================================================
# EXPÉRIENCE : ENTRÉE CACHÉE
# ==============================================================================

def holdout_mse(model, dataset: WindowedDataset) -> float:
    """MSE des prévisions à un pas sur le split de test (espace du modèle)."""
    features, targets = dataset.subset("test")
    predictions = predict_windows(model, features, targets)
    return trainer.mse_loss(predictions, targets[:, -1, 0], K=len(predictions))


def run_hidden_driver(seeds: int = 10, n: int = 8, window: int = 7, epochs: int = 300,
                      learning_rate: float = 1e-3, batch_size: int = 32, rows: int = 300,
                      base_seed: int = 0) -> pd.DataFrame:
    """ECNN contre RNN à taille d'état égale ; une ligne par graine."""
    results = []
    for k in range(seeds):
        seed = base_seed + k
        dataset = hidden_driver(rows=rows, seed=seed).windows(window)
        cfg = trainer.TrainConfig(epochs=epochs, batch_size=batch_size, window=window,
                                  learning_rate=learning_rate, seed=seed, optimizer="adam",
                                  log_every=max(epochs, 1))
        row = {"seed": seed}
        for name in ("ecnn", "rnn"):
            kind = get_model_kind(name)
            model = RecurrentModel(kind=kind, params=kind.init(n, 1, 1, seed))
            report = trainer.fit(model, dataset, cfg)
            row[f"{name}_mse"] = holdout_mse(RecurrentModel(kind=kind, params=report.params), dataset)
        row["ecnn_wins"] = row["ecnn_mse"] <= row["rnn_mse"]
        logging.info(f"   graine {seed} : ECNN={row['ecnn_mse']:.6e} | RNN={row['rnn_mse']:.6e}")
        results.append(row)

    table = pd.DataFrame(results)
    logging.info(f"🏁 ECNN ≤ RNN sur {int(table['ecnn_wins'].sum())}/{seeds} graine(s)")
    return table

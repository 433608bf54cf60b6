# ==============================================================================
# MODULE: PERFORMANCE ANALYZER - métriques de précision des prévisions
# ------------------------------------------------------------------------------
#   MAPE    : (1/N)·Σ |(ŷ − y)/y|           (fraction, pas de ×100)
#   Theil U : RMSE / (RMS(ŷ) + RMS(y))      ∈ [0, 1]
#   R       : corrélation de Pearson (forme standard)
#   DA      : proportion de jours où les mouvements prévus et réels ont le
#             même signe ; un produit nul compte comme un échec
#   R²      : 1 − SSE/SST (comparaison avec / sans lissage)
#
# Toutes les métriques se calculent sur les séries en prix (dénormalisées).
# Ordre des arguments : (réel, prévu).
# ==============================================================================

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sklearn.metrics import mean_absolute_percentage_error, r2_score

from exceptions import ConfigError, DataError, DimensionError

METRICS = ("MAPE", "R", "TheilU", "DA")
PERIOD_MODES = ("365d", "calendar")


def _aligned(actual, predicted, op: str, min_len: int = 1) -> tuple:
    y = np.asarray(actual, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if y.shape != y_hat.shape:
        raise DimensionError(f"{op} : {y.size} valeurs réelles pour {y_hat.size} prévisions")
    if y.size < min_len:
        raise DataError(f"{op} : au moins {min_len} valeur(s) requise(s), {y.size} reçue(s)")
    return y, y_hat


def mape(actual, predicted) -> float:
    y, y_hat = _aligned(actual, predicted, "mape")
    if np.any(y == 0):
        raise DataError(f"mape : valeur réelle nulle à l'index {int(np.flatnonzero(y == 0)[0])}")
    return float(mean_absolute_percentage_error(y, y_hat))


def theil_u(actual, predicted) -> float:
    y, y_hat = _aligned(actual, predicted, "theil_u")
    rmse = np.sqrt(np.mean((y_hat - y) ** 2))
    denom = np.sqrt(np.mean(y_hat ** 2)) + np.sqrt(np.mean(y ** 2))
    if denom == 0:
        raise DataError("theil_u : séries entièrement nulles")
    return float(rmse / denom)


def pearson_r(actual, predicted) -> float:
    y, y_hat = _aligned(actual, predicted, "pearson_r", min_len=2)
    dy = y - y.mean()
    dy_hat = y_hat - y_hat.mean()
    ss_y, ss_hat = float(dy @ dy), float(dy_hat @ dy_hat)
    if ss_y == 0 or ss_hat == 0:
        raise DataError("pearson_r : série constante")
    r = float(dy @ dy_hat) / np.sqrt(ss_y * ss_hat)
    return float(np.clip(r, -1.0, 1.0))


def directional_accuracy(actual, predicted) -> float:
    y, y_hat = _aligned(actual, predicted, "directional_accuracy", min_len=2)
    agree = np.diff(y) * np.diff(y_hat) > 0
    return float(np.mean(agree))


def r2(actual, predicted) -> float:
    y, y_hat = _aligned(actual, predicted, "r2", min_len=2)
    return float(r2_score(y, y_hat))


def compute_metrics(actual, predicted) -> dict:
    return {
        "MAPE": mape(actual, predicted),
        "R": pearson_r(actual, predicted),
        "TheilU": theil_u(actual, predicted),
        "DA": directional_accuracy(actual, predicted),
    }


# ==============================================================================
# RAPPORT PAR PÉRIODE
# ==============================================================================

@dataclass
class MetricReport:
    """Une ligne par période (Year 1..k) + la ligne Average."""
    table: pd.DataFrame = field(default_factory=pd.DataFrame)
    counts: dict = field(default_factory=dict)

    @property
    def periods(self) -> list:
        return [label for label in self.table.index if label != "Average"]

    @property
    def average(self) -> pd.Series:
        return self.table.loc["Average"]

    def grid(self, metric: str) -> pd.Series:
        """Valeurs d'une métrique sur Year 1..k, Average."""
        return self.table[metric]


def period_labels(dates, mode: str = "365d") -> np.ndarray:
    """Numéro de période (0..k−1) par date : tranches de 365 jours ou années civiles."""
    if mode not in PERIOD_MODES:
        raise ConfigError(f"Mode de période inconnu '{mode}' (choix : {', '.join(PERIOD_MODES)})")
    dates = pd.DatetimeIndex(dates)
    if mode == "calendar":
        years = dates.year.to_numpy()
        return years - years.min()
    return ((dates - dates.min()).days // 365).to_numpy()


def yearly_report(dates, actual, predicted, mode: str = "365d", with_r2: bool = False) -> MetricReport:
    y, y_hat = _aligned(actual, predicted, "yearly_report")
    if len(dates) != y.size:
        raise DimensionError(f"yearly_report : {len(dates)} dates pour {y.size} valeurs")

    labels = period_labels(dates, mode)
    rows, counts = {}, {}
    for number, period in enumerate(np.unique(labels), start=1):
        name = f"Year {number}"
        mask = labels == period
        try:
            values = compute_metrics(y[mask], y_hat[mask])
            if with_r2:
                values["R2"] = r2(y[mask], y_hat[mask])
        except DataError as exc:
            logging.warning(f"⚠️  {name} omise ({int(mask.sum())} jour(s)) : {exc}")
            continue
        rows[name] = values
        counts[name] = int(mask.sum())

    if not rows:
        raise DataError("yearly_report : aucune période exploitable")
    table = pd.DataFrame.from_dict(rows, orient="index")
    table.loc["Average"] = table.mean(axis=0)
    return MetricReport(table=table, counts=counts)


def metric_grid(reports: dict, metric: str) -> pd.DataFrame:
    """Grille modèles × (Year 1..k, Average) pour une métrique."""
    if metric not in METRICS and metric != "R2":
        raise ConfigError(f"Métrique inconnue : {metric}")
    rows = {name: report.grid(metric) for name, report in reports.items()}
    return pd.DataFrame.from_dict(rows, orient="index")

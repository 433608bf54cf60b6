# ==============================================================================
# MODULE: TECHNICAL ANALYZER - indicateurs techniques des séries OHLCV
# ------------------------------------------------------------------------------
#   MA(5), MA(10) : CCP − OCP (clôture courante − clôture 5/10 jours avant)
#                   ma_mode="rolling" → moyenne mobile classique
#   EMA(20)       : récursive, α = 2/(n+1), amorcée sur la première valeur
#   MACD(12,26)   : EMA(12) − EMA(26)
#   ATR(14)       : moyenne des 14 premiers true ranges puis (13·ATR + TR)/14
#   %K(14)        : (CCP − L14)/(H14 − L14) dans [0, 1] (pas de ×100)
#
# Les lignes de chauffe (indicateur encore indéfini) sont marquées NaN ;
# la première ligne valide de l'ATR et du %K est la 15e (index 14), celle du
# MACD l'index 26.
# ==============================================================================

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from data_collector import bars_to_frame
from exceptions import DataError

RAW_COLUMNS = ["open", "high", "low", "close", "adj_close", "volume"]
INDICATOR_COLUMNS = ["ma5", "ma10", "ema20", "macd", "atr14", "pct_k14"]
FEATURE_COLUMNS = RAW_COLUMNS + INDICATOR_COLUMNS
MA_MODES = ("momentum", "rolling")

WARMUP = {"ma5": 5, "ma10": 10, "ema20": 20, "macd": 26, "atr14": 14, "pct_k14": 14}
MIN_BARS = max(WARMUP.values()) + 1


@dataclass
class FeatureFrame:
    """Colonnes alignées OHLCV + indicateurs ; `warmup` = préfixe invalide."""
    frame: pd.DataFrame
    warmup: int

    @property
    def columns(self) -> list:
        return list(self.frame.columns)

    @property
    def valid(self) -> pd.Series:
        return self.frame.notna().all(axis=1)

    def __len__(self) -> int:
        return len(self.frame)


def ema(series: pd.Series, n: int) -> pd.Series:
    return series.ewm(alpha=2.0 / (n + 1), adjust=False).mean()


def true_range(high: pd.Series, low: pd.Series, close: pd.Series) -> pd.Series:
    prev_close = close.shift(1)
    tr = pd.concat([high - low, (high - prev_close).abs(), (low - prev_close).abs()], axis=1).max(axis=1)
    tr.iloc[0] = np.nan
    return tr


def average_true_range(high: pd.Series, low: pd.Series, close: pd.Series, period: int = 14) -> pd.Series:
    tr = true_range(high, low, close).to_numpy()
    atr = np.full(len(tr), np.nan)
    if len(tr) > period:
        atr[period] = tr[1:period + 1].mean()
        for t in range(period + 1, len(tr)):
            atr[t] = ((period - 1) * atr[t - 1] + tr[t]) / period
    return pd.Series(atr, index=high.index)


def calculate_stochastic(high: pd.Series, low: pd.Series, close: pd.Series, period: int = 14) -> pd.Series:
    """
    %K sur la barre courante et les `period` barres précédentes.
    H14 = L14 (série plate) → NaN, la ligne est alors invalide.
    """
    highest = high.rolling(window=period + 1).max()
    lowest = low.rolling(window=period + 1).min()
    span = (highest - lowest).replace(0.0, np.nan)
    return (close - lowest) / span


def moving_average(close: pd.Series, period: int, ma_mode: str = "momentum") -> pd.Series:
    if ma_mode == "momentum":
        return close - close.shift(period)
    if ma_mode == "rolling":
        return close.rolling(window=period).mean()
    raise DataError(f"ma_mode inconnu : {ma_mode}")


def compute_indicators(bars, ma_mode: str = "momentum") -> FeatureFrame:
    """Calcule les indicateurs sur une liste de barres (ou un DataFrame OHLCV)."""
    df = bars if isinstance(bars, pd.DataFrame) else bars_to_frame(bars)
    if len(df) < MIN_BARS:
        raise DataError(f"Données insuffisantes : {len(df)} barres < {MIN_BARS} requises")

    out = df[RAW_COLUMNS].astype(float).copy()
    close = out["close"]

    out["ma5"] = moving_average(close, 5, ma_mode)
    out["ma10"] = moving_average(close, 10, ma_mode)
    out["ema20"] = ema(close, 20)
    out["macd"] = ema(close, 12) - ema(close, 26)
    out["atr14"] = average_true_range(out["high"], out["low"], close, 14)
    out["pct_k14"] = calculate_stochastic(out["high"], out["low"], close, 14)

    for column, warmup in WARMUP.items():
        out.iloc[:warmup, out.columns.get_loc(column)] = np.nan

    feature_frame = FeatureFrame(frame=out, warmup=max(WARMUP.values()))
    n_valid = int(feature_frame.valid.sum())
    logging.info(f"📈 Indicateurs calculés : {len(out)} lignes, {n_valid} valides (chauffe {feature_frame.warmup})")
    if n_valid < len(out) - feature_frame.warmup:
        logging.warning(f"⚠️  {len(out) - feature_frame.warmup - n_valid} ligne(s) invalide(s) après la chauffe (%K plat ?)")
    return feature_frame

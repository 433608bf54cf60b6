# ==============================================================================
# MODULE: TRADING BACKTESTER - stratégie achat/vente sur prévisions
# ------------------------------------------------------------------------------
# Signal du jour t : ŷ(t+1) > ŷ(t) → Buy ; ŷ(t+1) < ŷ(t) → Sell ; égalité → Hold
#
# Contribution d'un jour (p = prix de référence t, p' = prix t+1) :
#   Buy  : (p' − p − (S·p' + B·p)) / p
#   Sell : (p − p' − (B·p' + S·p)) / p     vente à découvert (défaut)
#          0                               sell_mode="exit" (hors marché)
#   Hold : 0
# Rendement total R = 100 × Σ contributions. Les coûts sont soustraits.
#
# mode="actual"        : P&L sur les clôtures réelles, signaux issus des prévisions
# mode="paper-literal" : formule appliquée aux valeurs prévues, jours de vente
#                        non inversés : (p' − p − (B·p' + S·p)) / p
# ==============================================================================

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from exceptions import ConfigError, DataError, DimensionError
from performance_analyzer import period_labels

MODES = ("actual", "paper-literal")
SELL_MODES = ("short", "exit")


class Signal(Enum):
    BUY = "Buy"
    SELL = "Sell"
    HOLD = "Hold"


@dataclass(frozen=True)
class CostSpec:
    buy: float = 0.0025
    sell: float = 0.0045

    def __post_init__(self):
        for name, value in (("buy", self.buy), ("sell", self.sell)):
            if not 0.0 <= value < 1.0:
                raise ConfigError(f"Coût de transaction {name}={value} hors de [0, 1[")


@dataclass
class TradeLog:
    days: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def buy_days(self) -> int:
        return int((self.days["signal"] == Signal.BUY.value).sum())

    @property
    def sell_days(self) -> int:
        return int((self.days["signal"] == Signal.SELL.value).sum())

    @property
    def total_return(self) -> float:
        return 100.0 * float(self.days["contribution"].sum())

    def to_csv(self, path) -> Path:
        path = Path(path)
        self.days.to_csv(path, index=False, float_format="%.10g")
        return path


def _prices(values, op: str) -> np.ndarray:
    prices = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(prices <= 0):
        raise DataError(f"{op} : prix non positif à l'index {int(np.flatnonzero(prices <= 0)[0])}")
    return prices


def generate_signals(predicted) -> list:
    y = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if y.size < 2:
        raise DataError(f"generate_signals : au moins 2 prévisions requises, {y.size} reçue(s)")
    moves = np.diff(y)
    return [Signal.BUY if d > 0 else Signal.SELL if d < 0 else Signal.HOLD for d in moves]


def strategy_return(signals, prices, costs: CostSpec = CostSpec(), mode: str = "actual",
                    sell_mode: str = "short", dates=None) -> TradeLog:
    """
    Simule la stratégie jour par jour. `prices` a un élément de plus que
    `signals` : le jour t va de prices[t] à prices[t+1].
    """
    if mode not in MODES:
        raise ConfigError(f"Mode de backtest inconnu '{mode}' (choix : {', '.join(MODES)})")
    if sell_mode not in SELL_MODES:
        raise ConfigError(f"sell_mode inconnu '{sell_mode}' (choix : {', '.join(SELL_MODES)})")
    prices = _prices(prices, "strategy_return")
    if prices.size != len(signals) + 1:
        raise DimensionError(f"strategy_return : {len(signals)} signaux pour {prices.size} prix")

    p0, p1 = prices[:-1], prices[1:]
    buy = np.array([s is Signal.BUY for s in signals], dtype=bool)
    sell = np.array([s is Signal.SELL for s in signals], dtype=bool)

    gross = np.zeros(len(signals))
    cost = np.zeros(len(signals))
    gross[buy] = p1[buy] - p0[buy]
    cost[buy] = costs.sell * p1[buy] + costs.buy * p0[buy]
    if mode == "paper-literal":
        gross[sell] = p1[sell] - p0[sell]
        cost[sell] = costs.buy * p1[sell] + costs.sell * p0[sell]
    elif sell_mode == "short":
        gross[sell] = p0[sell] - p1[sell]
        cost[sell] = costs.buy * p1[sell] + costs.sell * p0[sell]

    days = pd.DataFrame({
        "date": np.asarray(dates)[:-1] if dates is not None else np.arange(len(signals)),
        "signal": [s.value for s in signals],
        "price": p0,
        "next_price": p1,
        "gross": gross / p0,
        "cost": cost / p0,
        "contribution": (gross - cost) / p0,
    })
    log = TradeLog(days=days)
    logging.info(
        f"💹 Stratégie ({mode}, vente={sell_mode}) : {log.buy_days} achat(s), "
        f"{log.sell_days} vente(s), R = {log.total_return:.3f} %"
    )
    return log


def buy_and_hold(prices, costs: CostSpec = CostSpec()) -> float:
    prices = _prices(prices, "buy_and_hold")
    if prices.size < 2:
        raise DataError("buy_and_hold : au moins 2 prix requis")
    entry = prices[0] * (1.0 + costs.buy)
    exit_value = prices[-1] * (1.0 - costs.sell)
    return float(100.0 * (exit_value - entry) / entry)


def yearly_returns(log: TradeLog, actual_prices, dates, costs: CostSpec = CostSpec(),
                   period_mode: str = "365d") -> pd.DataFrame:
    """
    Grille des rendements (%) : lignes strategy et buy-&-hold, colonnes
    Year 1..k puis Average. Les périodes suivent la date de chaque jour de trading.
    """
    prices = _prices(actual_prices, "yearly_returns")
    dates = pd.DatetimeIndex(dates)
    if dates.size != prices.size or len(log.days) != prices.size - 1:
        raise DimensionError("yearly_returns : dates, prix et journal désalignés")

    labels = period_labels(dates[:-1], period_mode)
    contributions = log.days["contribution"].to_numpy()
    strategy, baseline = {}, {}
    for number, period in enumerate(np.unique(labels), start=1):
        idx = np.flatnonzero(labels == period)
        name = f"Year {number}"
        strategy[name] = 100.0 * float(contributions[idx].sum())
        # période = du premier prix de référence au dernier prix suivant
        baseline[name] = buy_and_hold(prices[idx[0]:idx[-1] + 2], costs)

    grid = pd.DataFrame([strategy, baseline], index=["strategy", "buy-&-hold"])
    grid["Average"] = grid.mean(axis=1)
    return grid

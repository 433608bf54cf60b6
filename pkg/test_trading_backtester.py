# ==============================================================================
# TESTS - STRATÉGIE DE TRADING ET BUY-AND-HOLD
# ==============================================================================

import numpy as np
import pandas as pd
import pytest

from exceptions import ConfigError, DataError, DimensionError
from trading_backtester import (
    CostSpec, Signal, buy_and_hold, generate_signals, strategy_return, yearly_returns,
)

FREE = CostSpec(buy=0.0, sell=0.0)


def test_generate_signals():
    assert generate_signals([1.0, 2.0, 1.0]) == [Signal.BUY, Signal.SELL]
    assert generate_signals([5.0] * 4) == [Signal.HOLD] * 3
    assert generate_signals(np.arange(6.0)) == [Signal.BUY] * 5
    with pytest.raises(DataError):
        generate_signals([1.0])


def test_all_hold_returns_zero():
    log = strategy_return([Signal.HOLD] * 3, [100.0, 101.0, 99.0, 120.0])
    assert log.total_return == 0.0
    assert log.buy_days == log.sell_days == 0


def test_single_buy_day():
    assert strategy_return([Signal.BUY], [100.0, 110.0], FREE).total_return == pytest.approx(10.0)
    log = strategy_return([Signal.BUY], [100.0, 110.0], CostSpec(buy=0.0025, sell=0.0045))
    assert log.days["contribution"].iloc[0] == pytest.approx(0.09255)
    assert log.total_return == pytest.approx(9.255)


def test_sell_day_modes():
    prices = [100.0, 90.0]
    costs = CostSpec(buy=0.0025, sell=0.0045)
    short = strategy_return([Signal.SELL], prices, costs, sell_mode="short")
    assert short.total_return == pytest.approx(100.0 * (10.0 - (0.0025 * 90.0 + 0.0045 * 100.0)) / 100.0)
    assert strategy_return([Signal.SELL], prices, costs, sell_mode="exit").total_return == 0.0
    literal = strategy_return([Signal.SELL], prices, costs, mode="paper-literal")
    assert literal.total_return == pytest.approx(100.0 * (-10.0 - (0.0025 * 90.0 + 0.0045 * 100.0)) / 100.0)


def test_buy_and_hold():
    assert buy_and_hold([100.0, 105.0, 100.0], FREE) == 0.0
    assert buy_and_hold([100.0, 120.0], FREE) == pytest.approx(20.0)
    assert buy_and_hold([100.0, 120.0], CostSpec(buy=0.0025, sell=0.0045)) == pytest.approx(19.16, abs=0.01)
    with pytest.raises(DataError):
        buy_and_hold([100.0])


def test_perfect_predictions_beat_buy_and_hold_without_costs(rng):
    for _ in range(100):
        prices = 100.0 * np.exp(np.cumsum(0.01 * rng.standard_normal(50)))
        log = strategy_return(generate_signals(prices), prices, FREE)
        assert log.total_return >= buy_and_hold(prices, FREE)


def test_costs_are_monotone(rng):
    prices = 50.0 * np.exp(np.cumsum(0.02 * rng.standard_normal(60)))
    signals = generate_signals(prices + rng.normal(0, 0.5, size=60))
    previous = None
    for cost in (0.0, 0.001, 0.0025, 0.01):
        by_buy = strategy_return(signals, prices, CostSpec(buy=cost, sell=0.0045)).total_return
        by_sell = strategy_return(signals, prices, CostSpec(buy=0.0025, sell=cost)).total_return
        if previous is not None:
            assert by_buy <= previous[0] and by_sell <= previous[1]
        previous = (by_buy, by_sell)


def test_trade_log_sums_to_total_return(tmp_path, rng):
    prices = 100.0 + np.cumsum(rng.normal(0, 1, size=30))
    log = strategy_return(generate_signals(prices[::-1]), prices, dates=pd.bdate_range("2015-01-01", periods=30))
    assert 100.0 * log.days["contribution"].sum() == log.total_return
    assert list(log.days.columns) == ["date", "signal", "price", "next_price", "gross", "cost", "contribution"]
    assert log.buy_days + log.sell_days <= len(log.days) == 29
    saved = pd.read_csv(log.to_csv(tmp_path / "trade_log.csv"))
    assert len(saved) == 29


def test_strategy_argument_errors():
    with pytest.raises(DimensionError):
        strategy_return([Signal.BUY], [100.0, 101.0, 102.0])
    with pytest.raises(ConfigError):
        strategy_return([Signal.BUY], [100.0, 101.0], mode="optimistic")
    with pytest.raises(ConfigError):
        strategy_return([Signal.BUY], [100.0, 101.0], sell_mode="hedge")
    with pytest.raises(DataError):
        strategy_return([Signal.BUY], [0.0, 101.0])
    with pytest.raises(ConfigError):
        CostSpec(buy=-0.1)


def test_yearly_returns_grid(rng):
    days = 600
    dates = pd.bdate_range("2010-01-04", periods=days)
    prices = 100.0 * np.exp(np.cumsum(0.01 * rng.standard_normal(days)))
    log = strategy_return(generate_signals(prices), prices, dates=dates)
    grid = yearly_returns(log, prices, dates)

    assert list(grid.index) == ["strategy", "buy-&-hold"]
    assert list(grid.columns) == ["Year 1", "Year 2", "Year 3", "Average"]
    years = grid[["Year 1", "Year 2", "Year 3"]]
    np.testing.assert_allclose(grid["Average"], years.mean(axis=1), atol=1e-12)
    assert years.loc["strategy"].sum() == pytest.approx(log.total_return)

    with pytest.raises(DimensionError):
        yearly_returns(log, prices[:-1], dates[:-1])

# ==============================================================================
# MODULE: DATA COLLECTOR - ingestion des historiques OHLCV (format Yahoo Finance)
# ------------------------------------------------------------------------------
# En-tête attendu : Date,Open,High,Low,Close,Adj Close,Volume (dates ISO)
#
# Règles :
#   - toute ligne avec un champ manquant/vide est rejetée avec son numéro
#   - nombre illisible, date dupliquée, incohérence OHLC → DataError localisée
#   - sortie triée par date croissante
# ==============================================================================

import logging
import os
from dataclasses import dataclass
from datetime import date
from io import BytesIO, StringIO

import numpy as np
import pandas as pd

from exceptions import DataError

EXPECTED_HEADER = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]
PRICE_FIELDS = ["Open", "High", "Low", "Close", "Adj Close"]


@dataclass(frozen=True)
class OhlcvBar:
    date: date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int


def clean_and_convert_numeric(value: str, field: str, row_number: int) -> float:
    """Conversion d'un champ numérique, erreur localisée sinon."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise DataError(f"Ligne {row_number} : valeur illisible '{value}' pour {field}") from None
    if not np.isfinite(number):
        raise DataError(f"Ligne {row_number} : valeur non finie '{value}' pour {field}")
    return number


def _read_raw(source) -> pd.DataFrame:
    if isinstance(source, (bytes, bytearray)):
        source = BytesIO(source)
    elif isinstance(source, str) and "\n" in source and not os.path.exists(source):
        source = StringIO(source)
    try:
        return pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataError("Fichier CSV vide : no data rows") from None
    except FileNotFoundError:
        raise DataError(f"Fichier introuvable : {source}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"Encodage illisible (UTF-8 attendu), octet {exc.start} : {exc.reason}") from None
    except pd.errors.ParserError as exc:
        raise DataError(f"CSV mal formé : {exc}") from None


def _parse_row(row: pd.Series, row_number: int) -> OhlcvBar:
    missing = [col for col in EXPECTED_HEADER if not str(row[col]).strip()]
    if missing:
        raise DataError(f"Ligne {row_number} : champ(s) manquant(s) {', '.join(missing)}")

    try:
        bar_date = date.fromisoformat(row["Date"].strip())
    except ValueError:
        raise DataError(f"Ligne {row_number} : date illisible '{row['Date']}'") from None

    prices = {f: clean_and_convert_numeric(row[f], f, row_number) for f in PRICE_FIELDS}
    volume = clean_and_convert_numeric(row["Volume"], "Volume", row_number)

    if any(v <= 0 for v in prices.values()):
        raise DataError(f"Ligne {row_number} : prix non positif")
    if prices["High"] < max(prices["Open"], prices["Close"]) or prices["Low"] > min(prices["Open"], prices["Close"]):
        raise DataError(f"Ligne {row_number} : bornes High/Low incohérentes")
    if volume < 0:
        raise DataError(f"Ligne {row_number} : volume négatif")
    if not volume.is_integer():
        raise DataError(f"Ligne {row_number} : volume non entier '{row['Volume']}'")

    return OhlcvBar(
        date=bar_date,
        open=prices["Open"],
        high=prices["High"],
        low=prices["Low"],
        close=prices["Close"],
        adj_close=prices["Adj Close"],
        volume=int(volume),
    )


def parse_csv(source) -> list:
    """
    Lit un CSV Yahoo (chemin, contenu texte ou octets) et renvoie les barres triées.
    """
    raw = _read_raw(source)
    header = [c.strip() for c in raw.columns]
    if header != EXPECTED_HEADER:
        raise DataError(f"En-tête invalide : {','.join(header)} (attendu {','.join(EXPECTED_HEADER)})")
    raw.columns = header
    if raw.empty:
        raise DataError("Fichier CSV sans données : no data rows")

    bars = []
    seen = {}
    for idx, row in raw.iterrows():
        row_number = idx + 2  # ligne 1 = en-tête
        bar = _parse_row(row, row_number)
        if bar.date in seen:
            raise DataError(f"Ligne {row_number} : date dupliquée {bar.date} (déjà ligne {seen[bar.date]})")
        seen[bar.date] = row_number
        bars.append(bar)

    bars.sort(key=lambda b: b.date)
    logging.info(f"✅ {len(bars)} barre(s) OHLCV chargée(s) ({bars[0].date} → {bars[-1].date})")
    return bars


def bars_to_frame(bars: list) -> pd.DataFrame:
    """Barres → DataFrame indexé par date (colonnes en minuscules)."""
    if not bars:
        raise DataError("Aucune barre à convertir")
    frame = pd.DataFrame(
        {
            "open": [b.open for b in bars],
            "high": [b.high for b in bars],
            "low": [b.low for b in bars],
            "close": [b.close for b in bars],
            "adj_close": [b.adj_close for b in bars],
            "volume": [float(b.volume) for b in bars],
        },
        index=pd.DatetimeIndex([pd.Timestamp(b.date) for b in bars], name="date"),
    )
    return frame

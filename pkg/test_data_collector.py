# ==============================================================================
# TESTS - INGESTION CSV (format Yahoo Finance)
# ==============================================================================

from datetime import date

import pytest

from conftest import make_bars_csv
from data_collector import bars_to_frame, clean_and_convert_numeric, parse_csv
from exceptions import DataError

HEADER = "Date,Open,High,Low,Close,Adj Close,Volume\n"


def test_parse_single_row():
    bars = parse_csv(HEADER + "2002-01-02,100,101,99,100.5,100.5,1000\n")
    assert len(bars) == 1
    bar = bars[0]
    assert bar.date == date(2002, 1, 2)
    assert bar.close == 100.5
    assert bar.volume == 1000


def test_parse_bytes_and_path(tmp_path):
    content = make_bars_csv([10.0, 11.0, 12.0])
    path = tmp_path / "prices.csv"
    path.write_text(content)
    from_path = parse_csv(path)
    from_bytes = parse_csv(content.encode())
    assert [b.close for b in from_path] == [10.0, 11.0, 12.0]
    assert from_path == from_bytes


def test_bundled_csv_loads(bundled_csv):
    bars = parse_csv(bundled_csv)
    assert len(bars) == 500
    assert all(a.date < b.date for a, b in zip(bars, bars[1:]))


def test_empty_inputs():
    with pytest.raises(DataError, match="no data rows"):
        parse_csv(b"")
    with pytest.raises(DataError, match="no data rows"):
        parse_csv(HEADER)


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="introuvable"):
        parse_csv(tmp_path / "absent.csv")


def test_bad_header():
    with pytest.raises(DataError, match="En-tête invalide"):
        parse_csv("Date,Open,High,Low,Close,Volume\n2002-01-02,1,1,1,1,1\n")


def test_unsorted_dates_are_sorted():
    content = HEADER + "2002-01-04,3,3,3,3,3,1\n2002-01-02,1,1,1,1,1,1\n2002-01-03,2,2,2,2,2,1\n"
    assert [b.close for b in parse_csv(content)] == [1.0, 2.0, 3.0]


def test_duplicate_date_reports_rows():
    content = HEADER + "2002-01-02,1,1,1,1,1,1\n2002-01-03,2,2,2,2,2,1\n2002-01-02,3,3,3,3,3,1\n"
    with pytest.raises(DataError, match="Ligne 4 : date dupliquée"):
        parse_csv(content)


@pytest.mark.parametrize("row, message", [
    ("2002-01-02,100,,99,100.5,100.5,1000", "Ligne 2 : champ"),
    ("2002-01-02,100,abc,99,100.5,100.5,1000", "illisible 'abc'"),
    ("02/01/2002,100,101,99,100.5,100.5,1000", "date illisible"),
    ("2002-01-02,100,99,98,100.5,100.5,1000", "High/Low"),
    ("2002-01-02,-1,1,-2,0.5,0.5,1000", "non positif"),
    ("2002-01-02,100,101,99,nan,100,1000", "non finie 'nan' pour Close"),
    ("2002-01-02,100,inf,99,inf,100,1000", "non finie 'inf' pour High"),
    ("2002-01-02,100,101,99,100.5,100.5,-inf", "non finie"),
    ("2002-01-02,100,101,99,100.5,100.5,NaN", "non finie"),
    ("2002-01-02,100,101,99,100.5,100.5,1000.7", "volume non entier '1000.7'"),
])
def test_invalid_rows_are_located(row, message):
    with pytest.raises(DataError, match=message):
        parse_csv(HEADER + row + "\n")


def test_clean_and_convert_numeric():
    assert clean_and_convert_numeric(" 12.5", "Close", 3) == 12.5
    with pytest.raises(DataError, match="Ligne 7"):
        clean_and_convert_numeric("n/a", "Close", 7)


def test_bars_to_frame_columns():
    frame = bars_to_frame(parse_csv(make_bars_csv([5.0, 6.0])))
    assert list(frame.columns) == ["open", "high", "low", "close", "adj_close", "volume"]
    assert frame.index.name == "date"
    assert frame["high"].tolist() == [6.0, 7.0]
    with pytest.raises(DataError):
        bars_to_frame([])


def test_generated_csv_is_accepted(tmp_path):
    from synthetic_data import write_ohlcv_csv
    path = write_ohlcv_csv(tmp_path / "gen.csv", rows=60, seed=3, volatility=0.03)
    bars = parse_csv(path)
    assert len(bars) == 60
    assert all(b.low <= min(b.open, b.close) and b.high >= max(b.open, b.close) for b in bars)


def test_non_utf8_file_is_a_data_error(tmp_path):
    bad = tmp_path / "latin.csv"
    bad.write_bytes(HEADER.encode() + b"2002-01-02,\xff\xfe,101,99,100.5,100.5,1000\n")
    with pytest.raises(DataError, match="Encodage"):
        parse_csv(bad)


def test_integral_volume_with_decimal_point_is_accepted():
    bars = parse_csv(HEADER + "2002-01-02,100,101,99,100.5,100.5,1000.0\n")
    assert bars[0].volume == 1000

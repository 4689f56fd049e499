import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emdhurst.exceptions import (
    MissingColumnError,
    NoValidRowsError,
    OutOfRangeError,
    UnparseableDateError,
)
from emdhurst.series_io import TimeSeries, parse_ohlcv_csv, read_csv, slice_series, to_csv

HEADER = "Date,Open,High,Low,Close,Adj Close,Volume\n"


def test_three_rows_read_through():
    text = HEADER + "".join(
        f"2020-01-0{i + 1},1,1,1,{v},{v},10\n" for i, v in enumerate([10, 11, 12])
    )
    s = parse_ohlcv_csv(text, column="close")
    np.testing.assert_array_equal(s.values, [10.0, 11.0, 12.0])
    assert s.dt == 1.0
    assert len(s) == 3


def test_null_row_dropped_and_sorted(sample_csv_path):
    s = read_csv(sample_csv_path, column="close")
    np.testing.assert_array_equal(s.values, [101.0, 101.5, 102.75, 103.5, 104.25])
    assert np.all(np.diff(s.dates) > np.timedelta64(0, "D"))
    assert s.dropped_rows == 1
    assert s.label == "sample_prices"


def test_default_column_prefers_adjusted(sample_csv_path):
    s = read_csv(sample_csv_path)
    assert s.values[0] == 100.5


def test_default_column_falls_back_to_close():
    text = "Date,Close\n2020-01-01,5\n2020-01-02,6\n"
    np.testing.assert_array_equal(parse_ohlcv_csv(text).values, [5.0, 6.0])


def test_unsorted_input_is_sorted():
    text = HEADER + "2020-01-03,1,1,1,3,3,1\n2020-01-01,1,1,1,1,1,1\n2020-01-02,1,1,1,2,2,1\n"
    s = parse_ohlcv_csv(text, column="close")
    np.testing.assert_array_equal(s.values, [1.0, 2.0, 3.0])


def test_missing_column():
    with pytest.raises(MissingColumnError):
        parse_ohlcv_csv("Date,Close\n2020-01-01,1\n2020-01-02,2\n", column="high")


def test_no_valid_rows():
    text = HEADER + "2020-01-01,null,null,null,null,null,null\n"
    with pytest.raises(NoValidRowsError):
        parse_ohlcv_csv(text)


def test_unparseable_date_reports_row():
    text = HEADER + "2020-01-01,1,1,1,1,1,1\nnot-a-date,1,1,1,1,1,1\n"
    with pytest.raises(UnparseableDateError) as exc:
        parse_ohlcv_csv(text)
    assert exc.value.row == 1


def test_timeseries_invariants():
    with pytest.raises(ValueError):
        TimeSeries(values=np.array([1.0, np.nan]), dates=np.array(["2020-01-01", "2020-01-02"]))
    with pytest.raises(ValueError):
        TimeSeries(values=np.array([1.0, 2.0]), dates=np.array(["2020-01-02", "2020-01-01"]))
    with pytest.raises(ValueError):
        TimeSeries(values=np.array([1.0, 2.0, 3.0]), dates=np.array(["2020-01-01", "2020-01-02"]))


@pytest.fixture
def hundred():
    return TimeSeries.from_values(np.arange(100.0), label="x")


def test_slice_identity(hundred):
    s = slice_series(hundred, 0, 100)
    np.testing.assert_array_equal(s.values, hundred.values)
    np.testing.assert_array_equal(s.dates, hundred.dates)


def test_slice_prefix(hundred):
    s = slice_series(hundred, 0, 50)
    np.testing.assert_array_equal(s.values, np.arange(50.0))
    assert s.label == "x[0:50]"


def test_slice_out_of_range(hundred):
    with pytest.raises(OutOfRangeError):
        slice_series(hundred, 60, 40)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.floats(allow_nan=False, allow_infinity=False, width=64),
        min_size=2,
        max_size=40,
    )
)
def test_serialize_parse_round_trip(values):
    s = TimeSeries.from_values(values, label="rt")
    back = parse_ohlcv_csv(to_csv(s), column="close")
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.dates, s.dates)

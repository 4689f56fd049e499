"""Daily price series: parsing Yahoo-style CSV exports and slicing.

The time axis is the trading-day index ``t = 0, 1, 2, ...`` over the
retained rows; calendar dates ride along as metadata only.
"""
from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .exceptions import (
    MissingColumnError,
    NoValidRowsError,
    OutOfRangeError,
    TooShortError,
    UnparseableDateError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "COLUMNS",
    "TimeSeries",
    "parse_ohlcv_csv",
    "read_csv",
    "to_csv",
    "write_csv",
    "slice_series",
]

# canonical name -> header used by Yahoo exports
COLUMNS = {
    "open": "Open",
    "high": "High",
    "low": "Low",
    "close": "Close",
    "adjclose": "Adj Close",
}
_CSV_HEADER = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly indexed daily series (``dt`` = 1 trading day)."""

    values: np.ndarray
    dates: np.ndarray
    label: str = ""
    dt: float = 1.0
    dropped_rows: int = field(default=0, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        if values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if values.shape != dates.shape:
            raise ValueError(
                f"values ({values.size}) and dates ({dates.size}) differ in length"
            )
        if values.size < 2:
            raise TooShortError("a TimeSeries needs at least 2 points")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise ValueError("dates must be strictly increasing")
        values.setflags(write=False)
        dates.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", dates)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @classmethod
    def from_values(cls, values, label="", start="2000-01-03"):
        """Wrap raw values, assigning consecutive business-day dates."""
        values = np.asarray(values, dtype=np.float64)
        dates = np.busday_offset(
            np.datetime64(start, "D"), np.arange(values.size), roll="forward"
        )
        return cls(values=values, dates=dates, label=label)


def _resolve_column(header, column):
    if column is None:
        return "Adj Close" if "Adj Close" in header else "Close"
    key = str(column).replace(" ", "").replace("_", "").lower()
    if key not in COLUMNS:
        raise ValueError(
            f"unknown column {column!r}; expected one of {sorted(COLUMNS)}"
        )
    return COLUMNS[key]


def parse_ohlcv_csv(text, column=None, label=""):
    """Parse a Yahoo-finance style CSV into a :class:`TimeSeries`.

    Parameters
    ----------
    text : str or file-like
        CSV content with a header row (``Date,Open,High,Low,Close,Adj Close,Volume``).
    column : {"close", "adjclose", "open", "high", "low"}, optional
        Price column to extract. Defaults to ``Adj Close`` when present,
        otherwise ``Close``.
    label : str
        Provenance label stored on the series.

    Rows with a missing or non-numeric value in any numeric column are
    dropped (never interpolated); the count is kept in ``dropped_rows``.
    """
    buf = io.StringIO(text) if isinstance(text, str) else text
    frame = pd.read_csv(
        buf, dtype=str, keep_default_na=False, skipinitialspace=True
    )
    frame.columns = [c.strip() for c in frame.columns]
    if "Date" not in frame.columns:
        raise MissingColumnError("CSV has no 'Date' column")
    name = _resolve_column(frame.columns, column)
    if name not in frame.columns:
        raise MissingColumnError(f"CSV has no {name!r} column")

    dates = pd.to_datetime(frame["Date"], format="ISO8601", errors="coerce")
    bad = dates.isna().to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise UnparseableDateError(row, frame["Date"].iloc[row])

    numeric_cols = [c for c in frame.columns if c != "Date"]
    numeric = frame[numeric_cols].apply(
        lambda s: pd.to_numeric(s.str.strip(), errors="coerce")
    )
    # pandas' default float parser is not round-trip exact
    numeric[name] = [_parse_float(v) for v in frame[name]]
    keep = np.isfinite(numeric.to_numpy(dtype=np.float64)).all(axis=1)
    dropped = int((~keep).sum())

    kept = pd.DataFrame(
        {"date": dates[keep].dt.normalize(), "value": numeric.loc[keep, name]}
    )
    kept = kept.sort_values("date", kind="stable")
    dup = kept["date"].duplicated(keep="last").to_numpy()
    dropped += int(dup.sum())
    kept = kept[~dup]
    if len(kept) == 0:
        raise NoValidRowsError(f"no valid rows for column {name!r}")
    if len(kept) < 2:
        raise TooShortError("fewer than 2 valid rows")
    if dropped:
        logger.info("dropped %d invalid row(s) from %s", dropped, label or "input")
    return TimeSeries(
        values=kept["value"].to_numpy(dtype=np.float64),
        dates=kept["date"].to_numpy().astype("datetime64[D]"),
        label=label,
        dropped_rows=dropped,
    )


def _parse_float(token):
    try:
        return float(token)
    except (TypeError, ValueError):
        return np.nan


def read_csv(path, column=None, label=None):
    """Read a CSV file from disk; the label defaults to the file stem."""
    if label is None:
        label = os.path.splitext(os.path.basename(str(path)))[0]
    with open(path, newline="") as fh:
        return parse_ohlcv_csv(fh, column=column, label=label)


def to_csv(series):
    """Serialize ``series`` in the Yahoo CSV layout that :func:`parse_ohlcv_csv` reads.

    All price columns carry the series value (``repr`` precision, so the
    round trip is exact); ``Volume`` is zero.
    """
    out = io.StringIO()
    out.write(",".join(_CSV_HEADER) + "\n")
    for d, v in zip(series.dates, series.values):
        p = repr(float(v))
        out.write(f"{d},{p},{p},{p},{p},{p},0\n")
    return out.getvalue()


def write_csv(series, path):
    with open(path, "w", newline="") as fh:
        fh.write(to_csv(series))


def slice_series(series, start, end):
    """Contiguous sub-series ``[start, end)``; label gains a ``[start:end]`` suffix."""
    n = len(series)
    if not (0 <= start < end <= n):
        raise OutOfRangeError(f"slice [{start}, {end}) invalid for length {n}")
    return TimeSeries(
        values=series.values[start:end].copy(),
        dates=series.dates[start:end].copy(),
        label=f"{series.label}[{start}:{end}]",
        dt=series.dt,
    )

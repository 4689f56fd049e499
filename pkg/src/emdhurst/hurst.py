"""Rescaled-range (R/S) Hurst exponent."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_series
from .exceptions import DegenerateSeriesError, TooShortError

__all__ = [
    "RescaledRangePoint",
    "HurstEstimate",
    "rescaled_range",
    "auto_lag_grid",
    "expected_rescaled_range",
    "hurst_exponent",
    "RescaledRangeHurst",
]

MIN_WINDOW = 8
MIN_AUTO_LENGTH = 256
AUTO_MIN_LAG = 16
AUTO_N_LAGS = 12
AUTO_MIN_WINDOWS = 8


@dataclass(frozen=True)
class RescaledRangePoint:
    n: int
    rs: float


@dataclass(frozen=True, eq=False)
class HurstEstimate:
    h: float
    stderr: float
    intercept: float
    points: tuple = field(default=())
    corrected: bool = False

    def band(self, k=2.0):
        """``(h - k*stderr, h + k*stderr)``; ``k=2`` gives the usual 2-sigma bar."""
        return self.h - k * self.stderr, self.h + k * self.stderr

    @property
    def log_points(self):
        n = np.array([p.n for p in self.points], dtype=np.float64)
        rs = np.array([p.rs for p in self.points], dtype=np.float64)
        return np.log(n), np.log(rs)

    def to_csv(self):
        ln_n, ln_rs = self.log_points
        rows = ["ln_n,ln_rs"]
        rows += [f"{a!r},{b!r}" for a, b in zip(ln_n.tolist(), ln_rs.tolist())]
        return "\n".join(rows) + "\n"

    def to_dict(self):
        return {
            "h": self.h,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "corrected": self.corrected,
            "points": [{"n": p.n, "rs": p.rs} for p in self.points],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            h=d["h"],
            stderr=d["stderr"],
            intercept=d["intercept"],
            corrected=d.get("corrected", False),
            points=tuple(RescaledRangePoint(int(p["n"]), p["rs"]) for p in d["points"]),
        )


def _window_rs(values, n):
    """R/S of every complete length-``n`` window; NaN for flat windows."""
    p = values.size // n
    w = values[: p * n].reshape(p, n)
    mu = w.mean(axis=1, keepdims=True)
    dev = w - mu
    s = np.sqrt(np.mean(dev**2, axis=1))
    y = np.cumsum(dev, axis=1)
    r = y.max(axis=1) - y.min(axis=1)
    scale = np.max(np.abs(w), axis=1)
    flat = s <= 1e-13 * np.where(scale > 0, scale, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(flat, np.nan, r / np.where(flat, 1.0, s))
    return ratio


def rescaled_range(values, n):
    """Mean rescaled range over the ``floor(N/n)`` consecutive windows of length ``n``.

    Each window uses the population standard deviation (divisor ``n``) and
    the range of cumulative departures from the window mean. Trailing
    points that do not fill a window are dropped; flat windows are skipped.
    """
    x = check_series(values)
    n = check_int(n, "n", minimum=MIN_WINDOW)
    if x.size // n < 1:
        raise TooShortError(f"window {n} longer than series ({x.size})")
    ratio = _window_rs(x, n)
    ok = np.isfinite(ratio)
    if not ok.any():
        raise DegenerateSeriesError(f"every window of length {n} is flat")
    return float(ratio[ok].mean())


def auto_lag_grid(length, n_lags=AUTO_N_LAGS, min_lag=AUTO_MIN_LAG):
    """About ``n_lags`` window sizes, log-spaced over ``[min_lag, length // 8]``.

    The largest window still leaves 8 subperiods to average over; with
    fewer the top point of the log-log fit gets noisy enough to move H.
    """
    if length < MIN_AUTO_LENGTH:
        raise TooShortError(
            f"auto lag grid needs >= {MIN_AUTO_LENGTH} points, got {length}"
        )
    hi = length // AUTO_MIN_WINDOWS
    grid = np.unique(np.round(np.geomspace(min_lag, hi, n_lags)).astype(int))
    return [int(g) for g in grid]


def expected_rescaled_range(n):
    """Anis-Lloyd expected R/S of i.i.d. Gaussian noise, with Peters' factor."""
    i = np.arange(1, n)
    tail = np.sum(np.sqrt((n - i) / i))
    if n <= 340:
        lead = np.exp(gammaln((n - 1) / 2) - gammaln(n / 2)) / np.sqrt(np.pi)
    else:
        lead = 1.0 / np.sqrt(n * np.pi / 2)
    return float((n - 0.5) / n * lead * tail)


def hurst_exponent(values, lags=None, anis_lloyd=False):
    """Slope of ``ln(R/S_n)`` against ``ln(n)`` by ordinary least squares.

    Parameters
    ----------
    values : array-like
    lags : sequence of int, optional
        Window sizes, each in ``[8, len(values) // 2]``. ``None`` uses
        :func:`auto_lag_grid`.
    anis_lloyd : bool, default=False
        Subtract the expected R/S of white noise before fitting and add 0.5
        back, which removes the small-window bias of the raw estimator.

    Returns
    -------
    HurstEstimate
    """
    x = check_series(values)
    if lags is None:
        grid = auto_lag_grid(x.size)
    else:
        grid = sorted({check_int(n, "lag", minimum=MIN_WINDOW) for n in lags})
        if grid and grid[-1] > x.size // 2:
            raise TooShortError(
                f"lag {grid[-1]} exceeds half the series length ({x.size})"
            )
    if len(grid) < 4:
        raise TooShortError("at least 4 distinct window sizes are needed")

    points = []
    for n in grid:
        try:
            points.append(RescaledRangePoint(n, rescaled_range(x, n)))
        except DegenerateSeriesError:
            continue
    if len(points) < 4:
        raise DegenerateSeriesError("fewer than 4 non-degenerate window sizes")

    ln_n = np.log([p.n for p in points])
    ln_rs = np.log([p.rs for p in points])
    if anis_lloyd:
        ln_rs = ln_rs - np.log([expected_rescaled_range(p.n) for p in points]) + 0.5 * ln_n
    slope, intercept, stderr = _ols_line(ln_n, ln_rs)
    return HurstEstimate(
        h=slope,
        stderr=stderr,
        intercept=intercept,
        points=tuple(points),
        corrected=bool(anis_lloyd),
    )


def _ols_line(x, y):
    xm = x.mean()
    dx = x - xm
    sxx = np.dot(dx, dx)
    slope = np.dot(dx, y - y.mean()) / sxx
    intercept = y.mean() - slope * xm
    resid = y - intercept - slope * x
    dof = x.size - 2
    stderr = np.sqrt(np.dot(resid, resid) / dof / sxx)
    return float(slope), float(intercept), float(stderr)


class RescaledRangeHurst(BaseEstimator):
    """Hurst exponent estimator.

    Parameters
    ----------
    lags : sequence of int or None, default=None
        Window sizes; ``None`` picks a log-spaced grid from the data length.
    anis_lloyd : bool, default=False

    Attributes
    ----------
    hurst_ : float
    stderr_ : float
    intercept_ : float
        Log of the prefactor ``c`` in ``R/S ~ c * n**H``.
    estimate_ : HurstEstimate
    """

    def __init__(self, lags=None, anis_lloyd=False):
        self.lags = lags
        self.anis_lloyd = anis_lloyd

    def fit(self, X, y=None):
        est = hurst_exponent(X, lags=self.lags, anis_lloyd=self.anis_lloyd)
        self.estimate_ = est
        self.hurst_ = est.h
        self.stderr_ = est.stderr
        self.intercept_ = est.intercept
        self.points_ = est.points
        return self

    def predict(self, X):
        """Fitted ``R/S`` at window sizes ``X``."""
        check_is_fitted(self, "estimate_")
        n = np.asarray(X, dtype=np.float64).ravel()
        return np.exp(self.intercept_) * n**self.hurst_

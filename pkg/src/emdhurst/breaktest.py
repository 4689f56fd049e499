"""Zivot-Andrews unit-root test with one break in level and trend (model C).

For a candidate break ``tb`` the test regression is::

    dX_t = c + alpha*X_{t-1} + beta*t + theta*DU_t + gamma*DT_t
           + sum_{j=1..k} d_j dX_{t-j} + e_t

with ``DU_t = 1[t > tb]`` and ``DT_t = (t - tb) * 1[t > tb]``. The break is
placed where the t-statistic on ``alpha`` is smallest.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_series
from .exceptions import (
    AllRankDeficientError,
    OutOfRangeError,
    RankDeficientError,
    TooShortError,
)
from .series_io import TimeSeries, slice_series

__all__ = [
    "CRITICAL_VALUES",
    "BreakRegressionFit",
    "BreakTestResult",
    "design_matrix",
    "za_regression",
    "default_max_lags",
    "select_lags",
    "za_test",
    "split_at_break",
    "simulate_critical_values",
    "ZivotAndrews",
]

# Zivot & Andrews (1992), Table 4, model C asymptotic quantiles
CRITICAL_VALUES = {"p01": -5.57, "p05": -5.08, "p10": -4.82}
MIN_TEST_LENGTH = 50
TSIG_CUTOFF = 1.645
_RANK_TOL = 1e-10

COEF_NAMES = ("c", "alpha", "beta", "theta", "gamma")


@dataclass(frozen=True, eq=False)
class BreakRegressionFit:
    t_b: int | None
    k: int
    coeffs: dict
    alpha_tstat: float
    nobs: int
    params: np.ndarray = field(repr=False)
    bse: np.ndarray = field(repr=False)
    resid: np.ndarray = field(repr=False)

    @property
    def tvalues(self):
        return self.params / self.bse


@dataclass(frozen=True, eq=False)
class BreakTestResult:
    break_index: int
    min_tstat: float
    candidates: np.ndarray
    candidate_tstats: np.ndarray
    k_used: int
    trim: float
    critical_values: dict = field(default_factory=lambda: dict(CRITICAL_VALUES))
    nobs: int = 0
    break_date: str | None = None
    label: str = ""

    @property
    def reject_unit_root(self):
        return {p: bool(self.min_tstat < cv) for p, cv in self.critical_values.items()}

    def to_dict(self):
        return {
            "label": self.label,
            "break_index": self.break_index,
            "break_date": self.break_date,
            "min_tstat": self.min_tstat,
            "k_used": self.k_used,
            "trim": self.trim,
            "nobs": self.nobs,
            "critical_values": dict(self.critical_values),
            "reject_unit_root": self.reject_unit_root,
            "candidates": [int(c) for c in self.candidates],
            "candidate_tstats": [_finite_or_none(v) for v in self.candidate_tstats],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d):
        return cls(
            break_index=int(d["break_index"]),
            min_tstat=float(d["min_tstat"]),
            candidates=np.asarray(d["candidates"], dtype=np.intp),
            candidate_tstats=np.array(
                [np.nan if v is None else v for v in d["candidate_tstats"]], dtype=float
            ),
            k_used=int(d["k_used"]),
            trim=float(d["trim"]),
            critical_values=dict(d["critical_values"]),
            nobs=int(d.get("nobs", 0)),
            break_date=d.get("break_date"),
            label=d.get("label", ""),
        )


def _finite_or_none(v):
    v = float(v)
    return v if math.isfinite(v) else None


def design_matrix(x, t_b, k):
    """Response and regressors of the test regression for break ``t_b``.

    Rows run over ``t = k+1 .. T-1``. ``t_b=None`` drops the two break
    columns (plain trend ADF regression). Columns are
    ``[1, X_{t-1}, t, DU_t, DT_t, dX_{t-1}, ..., dX_{t-k}]``.
    """
    T = x.size
    dx = np.diff(x)  # dx[i] = X_{i+1} - X_i
    t = np.arange(k + 1, T)
    y = dx[t - 1]
    cols = [np.ones(t.size), x[t - 1], t.astype(np.float64)]
    if t_b is not None:
        after = t > t_b
        cols.append(after.astype(np.float64))
        cols.append(np.where(after, t - t_b, 0).astype(np.float64))
    for j in range(1, k + 1):
        cols.append(dx[t - 1 - j])
    return y, np.column_stack(cols)


def _ols_qr(y, X):
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= _RANK_TOL * max(diag.max(), 1.0) or X.shape[0] <= X.shape[1]:
        raise RankDeficientError("regressor matrix is rank deficient")
    params = solve_triangular(r, q.T @ y)
    resid = y - X @ params
    dof = X.shape[0] - X.shape[1]
    sigma2 = np.dot(resid, resid) / dof
    rinv = solve_triangular(r, np.eye(r.shape[0]))
    bse = np.sqrt(sigma2 * np.sum(rinv**2, axis=1))
    return params, bse, resid


def za_regression(series, t_b, k=0):
    """Fit the break regression at one candidate ``t_b`` by QR least squares."""
    x = check_series(series, min_length=3)
    k = check_int(k, "k", minimum=0)
    T = x.size
    if T - k - 1 < 6 + k:
        raise TooShortError(f"{T} points cannot support {k} lags")
    if t_b is not None and not (k + 1 <= t_b <= T - 3):
        raise OutOfRangeError(f"break index {t_b} outside estimable sample")
    y, X = design_matrix(x, t_b, k)
    params, bse, resid = _ols_qr(y, X)
    names = COEF_NAMES if t_b is not None else ("c", "alpha", "beta")
    coeffs = dict(zip(names, params.tolist()))
    coeffs["d"] = params[len(names) :].tolist()
    return BreakRegressionFit(
        t_b=t_b,
        k=k,
        coeffs=coeffs,
        alpha_tstat=float(params[1] / bse[1]),
        nobs=y.size,
        params=params,
        bse=bse,
        resid=resid,
    )


def default_max_lags(T):
    return int(math.floor(12 * (T / 100) ** 0.25))


def select_lags(series, t_b=None, k_max=None):
    """General-to-specific lag choice.

    Starting from ``k_max``, drop the last lag while its |t| is below 1.645.
    ``t_b=None`` runs the selection on the no-break trend regression.
    """
    x = check_series(series, min_length=3)
    if k_max is None:
        k_max = default_max_lags(x.size)
    k_max = check_int(k_max, "k_max", minimum=0)
    for k in range(k_max, 0, -1):
        try:
            fit = za_regression(x, t_b, k)
        except RankDeficientError:
            continue
        if abs(fit.tvalues[-1]) >= TSIG_CUTOFF:
            return k
    return 0


def _candidate_range(T, trim, k):
    lo = max(int(math.ceil(trim * T)), k + 1)
    hi = min(int(math.floor((1 - trim) * T)), T - 3)
    return np.arange(lo, hi + 1)


def _suffix_sum(a):
    """``out[i] = a[i:].sum(axis=0)``, with one trailing zero row."""
    out = np.zeros((a.shape[0] + 1,) + a.shape[1:])
    out[:-1] = np.cumsum(a[::-1], axis=0)[::-1]
    return out


def _scan_alpha_tstats(x, candidates, k):
    """alpha t-statistic at every candidate break, by partitioned regression.

    The fixed regressors ``W = [1, t, dX lags]`` are projected out once with
    a QR factorisation. The break columns are suffix indicators, so their
    projections and cross products reduce to suffix sums, leaving a 3x3
    system in ``[X_{t-1}, DU, DT]`` per candidate. Agrees with
    :func:`za_regression` to rounding.
    """
    y, X = design_matrix(x, None, k)
    t = X[:, 2]
    W = np.delete(X, 1, axis=1)
    q, r = np.linalg.qr(W)
    diag = np.abs(np.diag(r))
    n, p = y.size, W.shape[1] + 3
    if diag.min() <= _RANK_TOL * max(diag.max(), 1.0) or n <= p:
        return np.full(candidates.size, np.nan)

    v = np.column_stack([y, X[:, 1]])
    v = v - q @ (q.T @ v)
    yr, xr = v[:, 0], v[:, 1]

    # rows with t > tb start at position tb - k
    pos = candidates - k
    tb = candidates.astype(np.float64)
    s_q = _suffix_sum(q)[pos]
    s_tq = _suffix_sum(t[:, None] * q)[pos]
    s_1 = (n - pos).astype(np.float64)
    s_t = _suffix_sum(t)[pos]
    s_tt = _suffix_sum(t * t)[pos]
    s_v = _suffix_sum(v)[pos]
    s_tv = _suffix_sum(t[:, None] * v)[pos]

    qdu = s_q
    qdt = s_tq - tb[:, None] * s_q
    du_du = s_1 - np.einsum("ci,ci->c", qdu, qdu)
    dt_dt = (s_tt - 2 * tb * s_t + tb * tb * s_1) - np.einsum("ci,ci->c", qdt, qdt)
    du_dt = (s_t - tb * s_1) - np.einsum("ci,ci->c", qdu, qdt)
    du_v = s_v
    dt_v = s_tv - tb[:, None] * s_v

    c = candidates.size
    G = np.empty((c, 3, 3))
    G[:, 0, 0] = xr @ xr
    G[:, 0, 1] = G[:, 1, 0] = du_v[:, 1]
    G[:, 0, 2] = G[:, 2, 0] = dt_v[:, 1]
    G[:, 1, 1] = du_du
    G[:, 1, 2] = G[:, 2, 1] = du_dt
    G[:, 2, 2] = dt_dt
    b = np.stack([np.full(c, xr @ yr), du_v[:, 0], dt_v[:, 0]], axis=1)

    # scale to unit diagonal before judging conditioning
    d = np.sqrt(np.abs(np.diagonal(G, axis1=1, axis2=2)))
    d = np.where(d > 0, d, 1.0)
    Gs = G / (d[:, :, None] * d[:, None, :])
    ok = np.linalg.eigvalsh(Gs)[:, 0] > 1e-10
    Gs = np.where(ok[:, None, None], Gs, np.eye(3))
    Ginv = np.linalg.inv(Gs) / (d[:, :, None] * d[:, None, :])
    beta = np.einsum("cij,cj->ci", Ginv, b)
    rss = yr @ yr - np.einsum("ci,ci->c", b, beta)
    sigma2 = np.maximum(rss, 0.0) / (n - p)
    with np.errstate(divide="ignore", invalid="ignore"):
        tstat = beta[:, 0] / np.sqrt(sigma2 * Ginv[:, 0, 0])
    return np.where(ok, tstat, np.nan)


def _parse_lag_policy(lags, max_lags, T):
    if isinstance(lags, (int, np.integer)) and not isinstance(lags, bool):
        return "fixed", check_int(lags, "lags", minimum=0)
    if lags == "tsig":
        return "tsig", default_max_lags(T) if max_lags is None else max_lags
    raise ValueError(f"lags must be an int or 'tsig', got {lags!r}")


def za_test(series, trim=0.15, lags="tsig", max_lags=None):
    """Scan every candidate break and return the minimum ``alpha`` t-statistic.

    Parameters
    ----------
    series : TimeSeries or array-like
    trim : float, default=0.15
        Fraction of the sample excluded at each end from the candidate set.
    lags : int or "tsig", default="tsig"
        Fixed lag count, or general-to-specific selection (run once on the
        no-break regression and held fixed across candidates).
    max_lags : int, optional
        Upper bound for "tsig"; defaults to ``floor(12 * (T/100)**0.25)``.
    """
    x = check_series(series, min_length=MIN_TEST_LENGTH)
    if not 0 < trim < 0.5:
        raise ValueError(f"trim must lie in (0, 0.5), got {trim}")
    T = x.size
    policy, k = _parse_lag_policy(lags, max_lags, T)
    if policy == "tsig":
        k = select_lags(x, None, k)
    candidates = _candidate_range(T, trim, k)
    if candidates.size == 0:
        raise TooShortError("no candidate break points after trimming")
    tstats = _scan_alpha_tstats(x, candidates, k)
    if np.all(np.isnan(tstats)):
        raise AllRankDeficientError("regression is rank deficient at every candidate")
    best = int(np.nanargmin(tstats))  # first occurrence: ties go to the earliest break
    dates = getattr(series, "dates", None)
    break_index = int(candidates[best])
    return BreakTestResult(
        break_index=break_index,
        min_tstat=float(tstats[best]),
        candidates=candidates,
        candidate_tstats=tstats,
        k_used=k,
        trim=float(trim),
        nobs=T - k - 1,
        break_date=str(dates[break_index]) if dates is not None else None,
        label=getattr(series, "label", ""),
    )


def split_at_break(series, result):
    """Points ``[0, break]`` before the break and ``(break, end]`` after it."""
    b = result.break_index if hasattr(result, "break_index") else int(result)
    n = len(series)
    if not 0 <= b < n - 1:
        raise OutOfRangeError(f"break index {b} invalid for length {n}")
    if isinstance(series, TimeSeries):
        before = slice_series(series, 0, b + 1)
        after = slice_series(series, b + 1, n)
        return before, after
    x = np.asarray(series)
    return x[: b + 1], x[b + 1 :]


def simulate_critical_values(n, reps=500, trim=0.15, seed=0, quantiles=(0.01, 0.05, 0.10)):
    """Finite-sample critical values from Gaussian random walks (``k = 0``)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    stats = np.array(
        [za_test(np.cumsum(rng.standard_normal(n)), trim=trim, lags=0).min_tstat for _ in range(reps)]
    )
    return {f"p{int(round(q * 100)):02d}": float(np.quantile(stats, q)) for q in quantiles}


class ZivotAndrews(BaseEstimator):
    """Zivot-Andrews model C break test as an estimator.

    Parameters
    ----------
    trim : float, default=0.15
    lags : int or "tsig", default="tsig"
    max_lags : int or None, default=None

    Attributes
    ----------
    result_ : BreakTestResult
    break_index_ : int
    stat_ : float
        Minimum t-statistic on ``alpha`` over candidate breaks.
    """

    def __init__(self, trim=0.15, lags="tsig", max_lags=None):
        self.trim = trim
        self.lags = lags
        self.max_lags = max_lags

    def fit(self, X, y=None):
        self.result_ = za_test(X, trim=self.trim, lags=self.lags, max_lags=self.max_lags)
        self.break_index_ = self.result_.break_index
        self.stat_ = self.result_.min_tstat
        self.lags_ = self.result_.k_used
        return self

    def split(self, X):
        """Before/after pieces of ``X`` around the fitted break."""
        check_is_fitted(self, "result_")
        return split_at_break(X, self.result_)

"""IMF importance, short/long-term classification and the per-series report."""
from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_series
from .breaktest import BreakTestResult
from .emd import EmdConfig, decompose, reconstruct
from .exceptions import AllZeroImfsError, EmdHurstError, InconsistentInputsError
from .hurst import HurstEstimate, hurst_exponent
from .spectral import instantaneous_attributes

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_H_THRESHOLD",
    "SplitDecision",
    "ImfScale",
    "ScaleReport",
    "normalized_variance",
    "parse_split_policy",
    "classify_scales",
    "build_report",
    "analyze_scales",
    "TimeScaleSeparator",
]

DEFAULT_H_THRESHOLD = 0.65
SERIES_KINDS = ("TSO", "TSB", "TSA")


def normalized_variance(decomp, include_residue=False):
    """Root energy of each IMF divided by the summed root energies.

    The residue is left out of both numerator and denominator unless
    ``include_residue`` is set, in which case it gets the last entry.
    """
    comps = decomp.components() if include_residue else decomp.imfs
    if comps.shape[0] == 0:
        raise AllZeroImfsError("decomposition has no IMFs")
    root = np.sqrt(np.einsum("ij,ij->i", comps, comps))
    total = root.sum()
    if total == 0:
        raise AllZeroImfsError("every IMF is identically zero")
    return root / total


@dataclass(frozen=True)
class SplitDecision:
    split_index: int  # number of IMFs in the short-term group
    flagged: bool = False
    reason: str = ""


def parse_split_policy(policy):
    """``"auto"`` / ``"threshold:0.7"`` / ``"fixed:5"`` / ``("fixed", 5)`` -> (kind, value)."""
    if policy is None or policy == "auto":
        return "threshold", DEFAULT_H_THRESHOLD
    if isinstance(policy, tuple):
        kind, value = policy
    else:
        kind, _, value = str(policy).partition(":")
        value = value or None
    if kind == "fixed":
        if value is None:
            raise ValueError("fixed split needs an index, e.g. 'fixed:5'")
        j = int(value)
        if j < 0:
            raise ValueError(f"fixed split index must be >= 0, got {j}")
        return "fixed", j
    if kind == "threshold":
        return "threshold", DEFAULT_H_THRESHOLD if value is None else float(value)
    raise ValueError(f"unknown split policy {policy!r}")


def classify_scales(h_values, policy="auto"):
    """Count the leading short-term IMFs.

    Threshold policy: the long-term group is the longest tail of IMFs whose
    H all reach ``h*``; everything before it is short-term. A split with no
    short-term IMF, or with no long-term IMF, is returned flagged.
    """
    kind, value = parse_split_policy(policy)
    if kind == "fixed":
        return SplitDecision(int(value))
    h = np.array(
        [getattr(v, "h", v) if v is not None else np.nan for v in h_values], dtype=float
    )
    if h.size < 2:
        raise InconsistentInputsError("classification needs at least 2 IMFs")
    above = np.nan_to_num(h, nan=-np.inf) >= value
    j = h.size
    while j > 0 and above[j - 1]:
        j -= 1
    if j == h.size:
        return SplitDecision(j, True, f"no IMF tail reaches H >= {value}; all short-term")
    if j == 0:
        return SplitDecision(0, True, f"every IMF has H >= {value}; all long-term")
    return SplitDecision(j)


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _nan(v):
    return np.nan if v is None else float(v)


@dataclass(frozen=True)
class ImfScale:
    index: int  # 1-based, IMF1 fastest
    tau_days: float
    tau_zc_days: float
    h: float
    h_stderr: float
    nv: float

    def to_dict(self):
        return {
            "index": self.index,
            "tau_days": _num(self.tau_days),
            "tau_zc_days": _num(self.tau_zc_days),
            "h": _num(self.h),
            "h_stderr": _num(self.h_stderr),
            "nv": _num(self.nv),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            index=int(d["index"]),
            tau_days=_nan(d["tau_days"]),
            tau_zc_days=_nan(d.get("tau_zc_days")),
            h=_nan(d["h"]),
            h_stderr=_nan(d["h_stderr"]),
            nv=_nan(d["nv"]),
        )


@dataclass(eq=False)
class ScaleReport:
    """Per-series result: IMF table, ST/LT split and the two reconstructions' H."""

    series_kind: str
    label: str
    n_samples: int
    per_imf: list
    split_index: int
    split_policy: str
    h_st: HurstEstimate | None
    h_lt: HurstEstimate | None
    h_residue: HurstEstimate | None = None
    split_flagged: bool = False
    break_info: BreakTestResult | None = None
    warnings: list = field(default_factory=list)
    imf_hurst: list = field(default_factory=list)  # full R/S fit per IMF

    @property
    def n_imfs(self):
        return len(self.per_imf)

    @property
    def st_tau_days(self):
        """Time scale of the slowest short-term IMF (NaN when there is none)."""
        if 1 <= self.split_index <= self.n_imfs:
            return self.per_imf[self.split_index - 1].tau_days
        return float("nan")

    def to_dict(self):
        est = lambda e: None if e is None else e.to_dict()  # noqa: E731
        return {
            "series_kind": self.series_kind,
            "label": self.label,
            "n_samples": self.n_samples,
            "n_imfs": self.n_imfs,
            "per_imf": [p.to_dict() for p in self.per_imf],
            "split_index": self.split_index,
            "split_policy": self.split_policy,
            "split_flagged": self.split_flagged,
            "st_tau_days": _num(self.st_tau_days),
            "h_st": est(self.h_st),
            "h_lt": est(self.h_lt),
            "h_residue": est(self.h_residue),
            "break_info": None if self.break_info is None else self.break_info.to_dict(),
            "warnings": list(self.warnings),
            "imf_hurst": [est(e) for e in self.imf_hurst],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d):
        est = lambda e: None if e is None else HurstEstimate.from_dict(e)  # noqa: E731
        return cls(
            series_kind=d["series_kind"],
            label=d["label"],
            n_samples=int(d["n_samples"]),
            per_imf=[ImfScale.from_dict(p) for p in d["per_imf"]],
            split_index=int(d["split_index"]),
            split_policy=d["split_policy"],
            split_flagged=bool(d["split_flagged"]),
            h_st=est(d["h_st"]),
            h_lt=est(d["h_lt"]),
            h_residue=est(d.get("h_residue")),
            break_info=None
            if d.get("break_info") is None
            else BreakTestResult.from_dict(d["break_info"]),
            warnings=list(d.get("warnings", [])),
            imf_hurst=[est(e) for e in d.get("imf_hurst", [])],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def imf_table_csv(self):
        out = io.StringIO()
        out.write("index,tau_days,tau_zc_days,h,h_stderr,nv,group\n")
        for p in self.per_imf:
            group = "short" if p.index <= self.split_index else "long"
            vals = [p.tau_days, p.tau_zc_days, p.h, p.h_stderr, p.nv]
            out.write(f"{p.index}," + ",".join(repr(float(v)) for v in vals) + f",{group}\n")
        return out.getvalue()


def _safe_hurst(x, lags, what, warnings):
    try:
        return hurst_exponent(x, lags=lags)
    except EmdHurstError as exc:
        warnings.append(f"{what}: Hurst exponent unavailable ({exc})")
        return None


def build_report(
    decomp,
    taus,
    hurst_estimates,
    nv,
    split,
    break_info=None,
    kind="TSO",
    lags=None,
    tau_zc=None,
    split_policy="",
    warnings=None,
):
    """Assemble a :class:`ScaleReport` from per-IMF results.

    ``split`` is a :class:`SplitDecision` or an int. H of the short-term
    sum (IMFs ``1..split``) and of the long-term sum (the rest plus the
    residue) are computed here.
    """
    k = decomp.n_imfs
    if tau_zc is None:
        tau_zc = [np.nan] * k
    if not (len(taus) == len(hurst_estimates) == len(nv) == len(tau_zc) == k):
        raise InconsistentInputsError(
            f"{k} IMFs but {len(taus)} taus, {len(hurst_estimates)} H estimates, "
            f"{len(nv)} NV values"
        )
    if kind not in SERIES_KINDS:
        raise ValueError(f"series kind must be one of {SERIES_KINDS}")
    warnings = list(warnings or [])
    if not isinstance(split, SplitDecision):
        split = SplitDecision(int(split))
    j = split.split_index
    flagged = split.flagged
    if split.reason:
        warnings.append(split.reason)
    if not 0 <= j <= k:
        warnings.append(f"split index {j} clamped to the {k} available IMFs")
        j = min(max(j, 0), k)
        flagged = True

    per_imf = []
    for i in range(k):
        est = hurst_estimates[i]
        per_imf.append(
            ImfScale(
                index=i + 1,
                tau_days=float(taus[i]),
                tau_zc_days=float(tau_zc[i]),
                h=np.nan if est is None else est.h,
                h_stderr=np.nan if est is None else est.stderr,
                nv=float(nv[i]),
            )
        )
    x_st = reconstruct(decomp, range(j))
    x_lt = reconstruct(decomp, range(j, k), include_residue=True)
    h_st = _safe_hurst(x_st, lags, "X_ST", warnings) if j > 0 else None
    h_lt = _safe_hurst(x_lt, lags, "X_LT", warnings)
    h_res = _safe_hurst(decomp.residue, lags, "residue", warnings)
    return ScaleReport(
        series_kind=kind,
        label=decomp.source_label,
        n_samples=len(decomp),
        per_imf=per_imf,
        split_index=j,
        split_policy=str(split_policy),
        split_flagged=flagged,
        h_st=h_st,
        h_lt=h_lt,
        h_residue=h_res,
        break_info=break_info,
        warnings=warnings,
        imf_hurst=list(hurst_estimates),
    )


def analyze_scales(
    series,
    emd_config=None,
    split_policy="auto",
    kind="TSO",
    break_info=None,
    lags=None,
    dt=1.0,
):
    """Decompose ``series`` and measure every IMF's time scale, H and NV.

    Returns
    -------
    report : ScaleReport
    decomp : Decomposition
    """
    emd_config = emd_config or EmdConfig()
    decomp = decompose(series, emd_config)
    if decomp.n_imfs == 0:
        raise AllZeroImfsError("series produced no IMFs")
    dt = getattr(series, "dt", dt)
    warnings = []
    taus, tau_zc, hs = [], [], []
    for i, imf in enumerate(decomp.imfs, start=1):
        try:
            attrs = instantaneous_attributes(imf, dt)
            taus.append(attrs.mean_period_days)
            tau_zc.append(attrs.zero_crossing_period_days)
        except EmdHurstError as exc:
            warnings.append(f"IMF{i}: time scale unavailable ({exc})")
            taus.append(np.nan)
            tau_zc.append(np.nan)
        hs.append(_safe_hurst(imf, lags, f"IMF{i}", warnings))
    nv = normalized_variance(decomp)
    split = classify_scales(hs, split_policy) if decomp.n_imfs >= 2 else SplitDecision(
        decomp.n_imfs, True, "fewer than 2 IMFs; no split"
    )
    kind_name, value = parse_split_policy(split_policy)
    report = build_report(
        decomp,
        taus,
        hs,
        nv,
        split,
        break_info=break_info,
        kind=kind,
        lags=lags,
        tau_zc=tau_zc,
        split_policy=f"{kind_name}:{value}",
        warnings=warnings,
    )
    return report, decomp


class TimeScaleSeparator(TransformerMixin, BaseEstimator):
    """Split a price series into short-term and long-term components.

    ``fit`` decomposes the series, estimates H for every IMF and chooses the
    split; ``transform`` returns the ``(n, 2)`` array ``[X_ST, X_LT]``.

    Parameters
    ----------
    split : str, default="auto"
        ``"auto"`` (H threshold 0.65), ``"threshold:<h>"`` or ``"fixed:<j>"``.
    sd_threshold, envelope_tol, max_sift_iters, max_imfs
        Passed to :class:`~emdhurst.emd.EmdConfig`.
    lags : sequence of int or None
        R/S window sizes; ``None`` for the automatic grid.
    """

    def __init__(
        self,
        split="auto",
        sd_threshold=0.2,
        envelope_tol=0.1,
        max_sift_iters=100,
        max_imfs=None,
        lags=None,
    ):
        self.split = split
        self.sd_threshold = sd_threshold
        self.envelope_tol = envelope_tol
        self.max_sift_iters = max_sift_iters
        self.max_imfs = max_imfs
        self.lags = lags

    def _config(self):
        return EmdConfig(
            sd_threshold=self.sd_threshold,
            envelope_tol=self.envelope_tol,
            max_sift_iters=self.max_sift_iters,
            max_imfs=self.max_imfs,
        )

    def fit(self, X, y=None):
        self.report_, self.decomposition_ = analyze_scales(
            X, self._config(), split_policy=self.split, lags=self.lags
        )
        self.split_index_ = self.report_.split_index
        self.n_imfs_ = self.decomposition_.n_imfs
        return self

    def _split_components(self, decomp):
        j = min(self.split_index_, decomp.n_imfs)
        x_st = reconstruct(decomp, range(j))
        x_lt = reconstruct(decomp, range(j, decomp.n_imfs), include_residue=True)
        return np.column_stack([x_st, x_lt])

    def transform(self, X):
        check_is_fitted(self, "report_")
        check_series(X)
        return self._split_components(decompose(X, self._config()))

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return self._split_components(self.decomposition_)

    def inverse_transform(self, Xt):
        return np.asarray(Xt, dtype=np.float64).sum(axis=1)

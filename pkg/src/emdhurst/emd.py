"""Empirical mode decomposition by cubic-spline envelope sifting."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_int, check_series
from .exceptions import (
    InsufficientAnchorsError,
    NoOscillationError,
    OutOfRangeError,
    TooShortError,
)

__all__ = [
    "EmdConfig",
    "Decomposition",
    "find_extrema",
    "count_zero_crossings",
    "envelope",
    "mean_envelope",
    "sift",
    "envelope_ratio",
    "decompose",
    "reconstruct",
    "EMD",
]

MIN_DECOMPOSE_LENGTH = 16
_HARD_CAP_FACTOR = 10


@dataclass(frozen=True)
class EmdConfig:
    """Sifting controls.

    ``sd_threshold`` bounds the relative change between successive sifting
    iterates, ``sum((h_prev - h)**2) / sum(h_prev**2)``. ``envelope_tol``
    bounds the RMS of the candidate's own mean envelope relative to its RMS,
    measured on the interior 90% of samples.
    """

    sd_threshold: float = 0.2
    envelope_tol: float = 0.1
    max_sift_iters: int = 100
    max_imfs: int | None = None
    boundary: str = "mirror_extrema"
    spline: str = "natural_cubic"

    def __post_init__(self):
        if not self.sd_threshold > 0:
            raise ValueError("sd_threshold must be > 0")
        if not self.envelope_tol > 0:
            raise ValueError("envelope_tol must be > 0")
        check_int(self.max_sift_iters, "max_sift_iters", minimum=1)
        if self.max_imfs is not None:
            check_int(self.max_imfs, "max_imfs", minimum=1)
        if self.boundary != "mirror_extrema":
            raise ValueError(f"unsupported boundary {self.boundary!r}")
        if self.spline != "natural_cubic":
            raise ValueError(f"unsupported spline {self.spline!r}")


@dataclass(eq=False)
class Decomposition:
    imfs: np.ndarray  # shape (n_imfs, n_samples)
    residue: np.ndarray
    sift_counts: list = field(default_factory=list)
    source_label: str = ""

    @property
    def n_imfs(self):
        return self.imfs.shape[0]

    def __len__(self):
        return self.residue.size

    def components(self):
        """IMFs followed by the residue as rows of one array."""
        return np.vstack([self.imfs, self.residue[None, :]])

    def to_csv(self):
        """CSV with columns ``t, imf1..imfK, residue``."""
        header = ["t"] + [f"imf{i + 1}" for i in range(self.n_imfs)] + ["residue"]
        out = io.StringIO()
        out.write(",".join(header) + "\n")
        comps = self.components().T
        for t, row in enumerate(comps):
            out.write(str(t) + "," + ",".join(repr(float(v)) for v in row) + "\n")
        return out.getvalue()


def find_extrema(values):
    """Indices of strict local maxima and minima.

    A flat run bounded by a rise and a fall counts as one extremum placed
    at the midpoint of the run. End points are never extrema.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size < 3:
        raise TooShortError("find_extrema needs at least 3 samples")
    d = np.sign(np.diff(x))
    nz = np.flatnonzero(d)
    if nz.size < 2:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    s = d[nz]
    turn = np.flatnonzero(s[:-1] != s[1:])
    # extremum spans samples nz[turn]+1 .. nz[turn+1]
    first = nz[turn] + 1
    last = nz[turn + 1]
    mid = (first + last) // 2
    is_max = s[turn] > 0
    return mid[is_max].astype(np.intp), mid[~is_max].astype(np.intp)


def count_zero_crossings(values):
    """Sign changes, with exact zeros skipped rather than counted twice."""
    s = np.sign(np.asarray(values, dtype=np.float64))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _mirror(anchors, n):
    """Reflect the two outermost anchors across each end of ``[0, n-1]``."""
    left = -anchors[:2][::-1]
    right = 2 * (n - 1) - anchors[-2:][::-1]
    return np.concatenate([left, anchors, right])


def envelope(values, anchors, boundary="mirror_extrema"):
    """Natural cubic spline through ``values`` at ``anchors``, over all indices.

    With ``boundary="mirror_extrema"`` the outermost two anchors at each end
    are reflected across the end point first, which pins the spline beyond
    the data instead of letting it swing freely. ``boundary=None`` fits the
    anchors as given.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    idx = np.unique(np.asarray(anchors, dtype=np.intp))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise OutOfRangeError("anchor index outside the series")
    knots = idx
    if boundary == "mirror_extrema" and idx.size:
        knots = _mirror(idx, n)
        knots = np.unique(knots)
    elif boundary is not None:
        raise ValueError(f"unsupported boundary {boundary!r}")
    if knots.size < 2:
        raise InsufficientAnchorsError("an envelope needs at least 2 anchors")
    ref = np.abs(knots)
    ref = np.where(ref > n - 1, 2 * (n - 1) - ref, ref)
    spline = CubicSpline(knots.astype(np.float64), x[ref], bc_type="natural")
    return spline(np.arange(n, dtype=np.float64))


def mean_envelope(values, maxima=None, minima=None):
    x = np.asarray(values, dtype=np.float64)
    if maxima is None or minima is None:
        maxima, minima = find_extrema(x)
    upper = envelope(x, maxima)
    lower = envelope(x, minima)
    return 0.5 * (upper + lower)


def _can_sift(maxima, minima):
    return maxima.size >= 1 and minima.size >= 1 and maxima.size + minima.size >= 3


def _imf_count_ok(h, maxima, minima):
    return abs(maxima.size + minima.size - count_zero_crossings(h)) <= 1


def envelope_ratio(h, m, edge=0.05):
    """RMS of mean envelope ``m`` over RMS of ``h`` on the interior samples."""
    n = h.size
    lo, hi = int(edge * n), n - int(edge * n)
    den = np.sqrt(np.mean(h[lo:hi] ** 2))
    if den == 0:
        return 0.0
    return float(np.sqrt(np.mean(m[lo:hi] ** 2)) / den)


def sift(values, config=None):
    """Extract one IMF from ``values``.

    Repeats ``h <- h - mean_envelope(h)`` until the last step changed ``h``
    by less than ``config.sd_threshold`` (relative energy), the extrema and
    zero-crossing counts of ``h`` differ by at most one, and the mean
    envelope of ``h`` is within ``config.envelope_tol`` of zero. After
    ``config.max_sift_iters`` subtractions the energy and envelope tests are
    dropped and sifting continues only until the count condition holds.

    Returns
    -------
    imf : ndarray
    iterations : int
        Number of envelope subtractions performed.
    """
    config = config or EmdConfig()
    h = np.array(values, dtype=np.float64)
    if h.size < 3:
        raise NoOscillationError("series too short to sift")
    maxima, minima = find_extrema(h)
    if not _can_sift(maxima, minima):
        raise NoOscillationError(
            f"{maxima.size} maxima / {minima.size} minima: too few extrema to sift"
        )
    iterations = 0
    sd = np.inf
    while True:
        m = mean_envelope(h, maxima, minima)
        if (
            sd < config.sd_threshold
            and _imf_count_ok(h, maxima, minima)
            and envelope_ratio(h, m) <= config.envelope_tol
        ):
            break
        # past the cap only the count condition is still required
        if iterations >= config.max_sift_iters and _imf_count_ok(h, maxima, minima):
            break
        if iterations >= _HARD_CAP_FACTOR * config.max_sift_iters:
            break
        energy = np.dot(h, h)
        sd = np.dot(m, m) / energy if energy > 0 else 0.0
        h_next = h - m
        next_max, next_min = find_extrema(h_next)
        if not _can_sift(next_max, next_min):
            break
        h, maxima, minima = h_next, next_max, next_min
        iterations += 1
    return h, iterations


def _is_monotonic(x):
    d = np.diff(x)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def decompose(series, config=None):
    """Split a series into IMFs and a residue.

    IMFs are peeled off successive remainders until the remainder is
    monotonic, has fewer than three extrema, or ``config.max_imfs`` IMFs
    have been extracted. The residue is defined as the input minus the sum
    of IMFs, so the decomposition is complete up to rounding.
    """
    config = config or EmdConfig()
    label = getattr(series, "label", "")
    x = check_series(series, min_length=MIN_DECOMPOSE_LENGTH)
    imfs = []
    counts = []
    remainder = x.copy()
    scale = np.max(np.abs(x)) or 1.0
    while config.max_imfs is None or len(imfs) < config.max_imfs:
        if _is_monotonic(remainder):
            break
        maxima, minima = find_extrema(remainder)
        if maxima.size + minima.size < 3 or not _can_sift(maxima, minima):
            break
        imf, its = sift(remainder, config)
        if not np.any(np.abs(imf) > 1e-12 * scale):
            break
        imfs.append(imf)
        counts.append(its)
        remainder = remainder - imf
    if imfs:
        stack = np.vstack(imfs)
        residue = x - stack.sum(axis=0)
    else:
        stack = np.empty((0, x.size))
        residue = x.copy()
    return Decomposition(
        imfs=stack, residue=residue, sift_counts=counts, source_label=label
    )


def reconstruct(decomp, imf_indices, include_residue=False):
    """Pointwise sum of selected IMFs (0-based indices), optionally plus the residue."""
    idx = [int(i) for i in imf_indices]
    for i in idx:
        if not 0 <= i < decomp.n_imfs:
            raise OutOfRangeError(
                f"IMF index {i} out of range for {decomp.n_imfs} IMFs"
            )
    out = np.zeros_like(decomp.residue)
    for i in idx:
        out += decomp.imfs[i]
    if include_residue:
        out += decomp.residue
    return out


class EMD(TransformerMixin, BaseEstimator):
    """Empirical mode decomposition as an sklearn transformer.

    ``transform`` maps a series of length ``n`` to an ``(n, k + 1)`` array:
    ``k`` IMF columns (fastest first) followed by the residue.
    ``inverse_transform`` sums the columns back.

    Parameters
    ----------
    sd_threshold : float, default=0.2
    envelope_tol : float, default=0.1
    max_sift_iters : int, default=100
    max_imfs : int or None, default=None
    """

    def __init__(
        self, sd_threshold=0.2, envelope_tol=0.1, max_sift_iters=100, max_imfs=None
    ):
        self.sd_threshold = sd_threshold
        self.envelope_tol = envelope_tol
        self.max_sift_iters = max_sift_iters
        self.max_imfs = max_imfs

    def _config(self):
        return EmdConfig(
            sd_threshold=self.sd_threshold,
            envelope_tol=self.envelope_tol,
            max_sift_iters=self.max_sift_iters,
            max_imfs=self.max_imfs,
        )

    def fit(self, X, y=None):
        self.decomposition_ = decompose(X, self._config())
        self.n_imfs_ = self.decomposition_.n_imfs
        return self

    def transform(self, X):
        check_is_fitted(self, "decomposition_")
        return decompose(X, self._config()).components().T

    def fit_transform(self, X, y=None, **fit_params):
        self.fit(X)
        return self.decomposition_.components().T

    def inverse_transform(self, Xt):
        return np.asarray(Xt, dtype=np.float64).sum(axis=1)

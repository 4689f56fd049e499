"""Seeded synthetic series with known ground truth.

Random numbers come from NumPy's ``PCG64`` bit generator
(``numpy.random.Generator(numpy.random.PCG64(seed))``) and its
``standard_normal`` method (ziggurat). Fixtures are reproducible bit for
bit from ``(spec, seed)`` on NumPy >= 1.17.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import InvalidSpecError
from .series_io import TimeSeries

__all__ = [
    "KINDS",
    "SynthSpec",
    "rng_for",
    "fgn_davies_harte",
    "fgn_hosking",
    "fgn",
    "generate",
]

KINDS = ("white_noise", "random_walk", "fbm", "broken_trend", "tone", "chirp")


@dataclass(frozen=True)
class SynthSpec:
    """What to generate.

    Only the fields relevant to ``kind`` are read: ``h`` for ``fbm``;
    ``break_frac``, ``level_shift``, ``slope_shift``, ``noise_sd``,
    ``intercept`` and ``slope`` for ``broken_trend``; ``period`` for
    ``tone``; ``f0``/``f1`` (cycles per sample) for ``chirp``.
    """

    kind: str
    n: int
    seed: int = 0
    h: float = 0.5
    break_frac: float = 0.5
    level_shift: float = 10.0
    slope_shift: float = 0.0
    noise_sd: float = 1.0
    intercept: float = 0.0
    slope: float = 0.0
    period: float = 20.0
    f0: float = 0.01
    f1: float = 0.1

    def validate(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) != self.n or self.n < 16:
            raise InvalidSpecError("n must be an integer >= 16")
        if self.kind == "fbm" and not 0 < self.h < 1:
            raise InvalidSpecError("fbm needs 0 < h < 1")
        if self.kind == "broken_trend":
            if not 0 < self.break_frac < 1:
                raise InvalidSpecError("break_frac must lie in (0, 1)")
            if self.noise_sd < 0:
                raise InvalidSpecError("noise_sd must be >= 0")
        if self.kind == "tone" and not self.period > 0:
            raise InvalidSpecError("period must be > 0")
        return self

    def describe(self):
        return {k: v for k, v in asdict(self).items()}


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _fgn_autocov(h, n):
    k = np.arange(n, dtype=np.float64)
    return 0.5 * (
        np.abs(k + 1) ** (2 * h) - 2 * np.abs(k) ** (2 * h) + np.abs(k - 1) ** (2 * h)
    )


def fgn_davies_harte(h, n, rng):
    """Unit-variance fractional Gaussian noise by circulant embedding.

    Returns ``None`` when the embedding has a negative eigenvalue.
    """
    gamma = _fgn_autocov(h, n + 1)
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # length 2n
    lam = np.fft.fft(row).real
    if np.any(lam < -1e-10 * lam.max()):
        return None
    lam = np.clip(lam, 0.0, None)
    m = row.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    w = np.fft.fft(np.sqrt(lam / m) * z)
    return w.real[:n]


def fgn_hosking(h, n, rng):
    """Fractional Gaussian noise by the Durbin-Levinson (Hosking) recursion, O(n^2)."""
    gamma = _fgn_autocov(h, n)
    out = np.empty(n)
    eps = rng.standard_normal(n)
    phi = np.zeros(n)
    var = 1.0
    out[0] = eps[0]
    for t in range(1, n):
        prev = phi[: t - 1].copy()
        k = (gamma[t] - np.dot(prev, gamma[t - 1 : 0 : -1])) / var
        phi[: t - 1] = prev - k * prev[::-1]
        phi[t - 1] = k
        var *= 1.0 - k * k
        out[t] = np.dot(phi[:t], out[t - 1 :: -1]) + np.sqrt(var) * eps[t]
    return out


def fgn(h, n, rng):
    noise = fgn_davies_harte(h, n, rng)
    if noise is None:
        noise = fgn_hosking(h, n, rng)
    return noise


def generate(spec):
    """Build the series described by ``spec`` as a :class:`TimeSeries`.

    ``fbm`` and ``random_walk`` return paths (cumulative sums of unit
    increments); use ``np.diff`` to recover the stationary increments.
    """
    spec.validate()
    n = int(spec.n)
    rng = rng_for(spec.seed)
    t = np.arange(n, dtype=np.float64)
    kind = spec.kind
    if kind == "white_noise":
        values = rng.standard_normal(n)
    elif kind == "random_walk":
        values = np.cumsum(rng.standard_normal(n))
    elif kind == "fbm":
        values = np.cumsum(fgn(spec.h, n, rng))
    elif kind == "broken_trend":
        tb = int(round(spec.break_frac * n))
        after = t > tb
        values = (
            spec.intercept
            + spec.slope * t
            + spec.level_shift * after
            + spec.slope_shift * np.where(after, t - tb, 0.0)
            + spec.noise_sd * rng.standard_normal(n)
        )
    elif kind == "tone":
        values = np.sin(2 * np.pi * t / spec.period)
    else:  # chirp: frequency sweeps linearly from f0 to f1 cycles/sample
        values = np.cos(2 * np.pi * (spec.f0 * t + 0.5 * (spec.f1 - spec.f0) * t**2 / n))
    label = f"synth-{kind}-n{n}-seed{spec.seed}"
    return TimeSeries.from_values(values, label=label)

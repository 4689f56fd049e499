"""Instantaneous frequency and characteristic time scale of an IMF.

Frequencies are in cycles per day so that the period ``1 / f`` comes out
directly in (trading) days.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_series
from .emd import count_zero_crossings
from .exceptions import NoOscillationError, ZeroMagnitudeError

__all__ = [
    "InstantaneousAttributes",
    "analytic_signal",
    "instantaneous_frequency",
    "instantaneous_attributes",
    "mean_period",
    "zero_crossing_period",
]

EDGE_FRACTION = 0.05
_ZERO_MAGNITUDE = 1e-12


@dataclass(frozen=True, eq=False)
class InstantaneousAttributes:
    phase: np.ndarray  # unwrapped, radians
    omega: np.ndarray  # cycles/day, NaN where the magnitude vanishes
    amplitude: np.ndarray
    mean_period_days: float
    zero_crossing_period_days: float


def analytic_signal(values):
    """``x + i*H[x]`` via the FFT: negative bins zeroed, positive bins doubled.

    The DC bin (and the Nyquist bin for even lengths) is kept as is.
    """
    x = check_series(values, min_length=8)
    n = x.size
    spec = np.fft.fft(x)
    gain = np.zeros(n)
    gain[0] = 1.0
    if n % 2 == 0:
        gain[n // 2] = 1.0
        gain[1 : n // 2] = 2.0
    else:
        gain[1 : (n + 1) // 2] = 2.0
    z = np.fft.ifft(spec * gain)
    # the real part is the input by construction; drop FFT round-off
    return x + 1j * z.imag


def _interior(n, edge=EDGE_FRACTION):
    cut = int(edge * n)
    return slice(cut, n - cut)


def instantaneous_frequency(analytic, dt=1.0):
    """Phase derivative of an analytic signal in cycles per unit of ``dt``.

    The phase is unwrapped and differentiated with central differences
    (one-sided at the ends). Samples where ``|z| < 1e-12`` get NaN; if that
    covers the whole interior, :class:`ZeroMagnitudeError` is raised.
    """
    z = np.asarray(analytic, dtype=np.complex128)
    amp = np.abs(z)
    phase = np.unwrap(np.angle(z))
    freq = np.gradient(phase, dt) / (2.0 * np.pi)
    zero = amp < _ZERO_MAGNITUDE
    if zero.any():
        freq = freq.copy()
        # a vanishing sample also spoils the central differences next to it
        spoiled = zero.copy()
        spoiled[1:] |= zero[:-1]
        spoiled[:-1] |= zero[1:]
        freq[spoiled] = np.nan
        inner = _interior(z.size)
        if np.all(zero[inner]):
            raise ZeroMagnitudeError(np.flatnonzero(zero))
    return freq


def zero_crossing_period(imf, dt=1.0):
    """Period estimate ``2 * length * dt / #zero-crossings``."""
    x = np.asarray(imf, dtype=np.float64)
    zc = count_zero_crossings(x)
    if zc < 2:
        raise NoOscillationError(f"{zc} zero crossing(s): no oscillation")
    return 2.0 * x.size * dt / zc


def instantaneous_attributes(imf, dt=1.0):
    """Phase, frequency and mean period of one IMF.

    The mean period is the reciprocal of the amplitude-squared weighted mean
    frequency over the interior 90% of samples.
    """
    x = check_series(imf, min_length=8, name="imf")
    zc_period = zero_crossing_period(x, dt)
    z = analytic_signal(x)
    freq = instantaneous_frequency(z, dt)
    amp = np.abs(z)
    inner = _interior(x.size)
    f = freq[inner]
    w = amp[inner] ** 2
    ok = np.isfinite(f)
    wsum = w[ok].sum()
    mean_f = float(np.dot(w[ok], f[ok]) / wsum) if wsum > 0 else 0.0
    if not mean_f > 0:
        raise NoOscillationError("mean instantaneous frequency is not positive")
    return InstantaneousAttributes(
        phase=np.unwrap(np.angle(z)),
        omega=freq,
        amplitude=amp,
        mean_period_days=1.0 / mean_f,
        zero_crossing_period_days=zc_period,
    )


def mean_period(imf, dt=1.0):
    """Characteristic time scale of an IMF in units of ``dt`` (days)."""
    return instantaneous_attributes(imf, dt).mean_period_days

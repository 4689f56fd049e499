import numpy as np
import pytest
from scipy.signal import hilbert

from emdhurst.emd import decompose
from emdhurst.exceptions import NoOscillationError, TooShortError, ZeroMagnitudeError
from emdhurst.spectral import (
    analytic_signal,
    instantaneous_attributes,
    instantaneous_frequency,
    mean_period,
    zero_crossing_period,
)
from emdhurst.synth import SynthSpec, generate, rng_for

T = np.arange(1024, dtype=float)
INNER = slice(51, 1024 - 51)


def test_cosine_pair():
    z = analytic_signal(np.cos(2 * np.pi * T / 32))
    assert np.max(np.abs(z.imag[INNER] - np.sin(2 * np.pi * T / 32)[INNER])) < 1e-3


def test_constant_has_zero_imaginary_part():
    z = analytic_signal(np.full(64, 3.5))
    assert np.max(np.abs(z.imag)) < 1e-12


def test_real_part_is_input(rng):
    x = rng.standard_normal(999)
    z = analytic_signal(x)
    np.testing.assert_allclose(z.real, x, rtol=1e-10, atol=0)


@pytest.mark.parametrize("n", [257, 1000])
def test_matches_scipy_hilbert(rng, n):
    x = rng.standard_normal(n)
    np.testing.assert_allclose(analytic_signal(x), hilbert(x), atol=1e-10)


def test_too_short():
    with pytest.raises(TooShortError):
        analytic_signal(np.arange(7.0))


def test_single_tone_frequency():
    f = instantaneous_frequency(analytic_signal(np.cos(2 * np.pi * T / 32)), dt=1.0)
    np.testing.assert_allclose(f[INNER], 1 / 32, rtol=0.02)


def test_dt_scales_frequency():
    z = analytic_signal(np.cos(2 * np.pi * T / 32))
    f1 = instantaneous_frequency(z, dt=1.0)
    f2 = instantaneous_frequency(z, dt=0.5)
    np.testing.assert_allclose(f2, 2 * f1, rtol=1e-12)


def test_chirp_frequency_rises():
    x = generate(SynthSpec(kind="chirp", n=2048, f0=0.01, f1=0.1)).values
    f = instantaneous_frequency(analytic_signal(x))
    smooth = np.convolve(f, np.ones(64) / 64, mode="valid")
    cut = int(0.05 * smooth.size)
    assert np.all(np.diff(smooth[cut:-cut]) > 0)


def test_constant_series_zero_magnitude():
    with pytest.raises(ZeroMagnitudeError):
        instantaneous_frequency(analytic_signal(np.zeros(64)))


def test_isolated_zero_is_masked():
    z = np.exp(2j * np.pi * np.arange(200) / 20)
    z[100] = 0
    f = instantaneous_frequency(z)
    assert np.isnan(f[99:102]).all()
    assert np.isfinite(f[:99]).all() and np.isfinite(f[102:]).all()


def test_sine_period_20():
    x = np.sin(2 * np.pi * np.arange(2000) / 20)
    assert mean_period(x) == pytest.approx(20, abs=0.5)
    assert zero_crossing_period(x) == pytest.approx(20, abs=0.5)


def test_flat_imf_no_oscillation():
    with pytest.raises(NoOscillationError):
        mean_period(np.ones(100))


def test_white_noise_imf1_matches_zero_crossings():
    x = rng_for(7).standard_normal(4096)
    imf1 = decompose(x).imfs[0]
    att = instantaneous_attributes(imf1)
    assert 2 <= att.mean_period_days <= 4.5
    assert abs(att.mean_period_days / att.zero_crossing_period_days - 1) < 0.2


def test_periods_increase_across_imfs():
    x = np.cumsum(rng_for(11).standard_normal(4096))
    taus = [mean_period(imf) for imf in decompose(x).imfs]
    assert np.all(np.diff(taus) >= 0)


@pytest.mark.parametrize("period", [7.5, 16, 45, 120])
def test_hilbert_and_zero_crossing_agree_on_tones(period):
    x = np.sin(2 * np.pi * np.arange(4000) / period + 0.3)
    att = instantaneous_attributes(x)
    assert abs(att.mean_period_days / att.zero_crossing_period_days - 1) < 0.25


def test_amplitude_scaling(rng):
    imf = decompose(rng.standard_normal(2048)).imfs[1]
    base = mean_period(imf)
    # powers of two scale without rounding; other factors to rounding error
    for c in (0.25, 2.0, 1024.0):
        assert mean_period(c * imf) == base
    for c in (0.3, 7.0, 1e5):
        assert mean_period(c * imf) == pytest.approx(base, rel=1e-12)

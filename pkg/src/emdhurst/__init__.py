"""Short-term / long-term time-scale separation of financial time series.

Empirical mode decomposition splits a price series into intrinsic mode
functions (IMFs); rescaled-range Hurst exponents and Hilbert time scales
sort those IMFs into a random short-term group and a persistent long-term
group. A Zivot-Andrews break test optionally splits the series first.
"""
from .breaktest import BreakTestResult, ZivotAndrews, split_at_break, za_regression, za_test
from .emd import EMD, Decomposition, EmdConfig, decompose, reconstruct, sift
from .hurst import HurstEstimate, RescaledRangeHurst, hurst_exponent, rescaled_range
from .scales import (
    ScaleReport,
    TimeScaleSeparator,
    analyze_scales,
    classify_scales,
    normalized_variance,
)
from .series_io import TimeSeries, parse_ohlcv_csv, read_csv, slice_series
from .spectral import analytic_signal, instantaneous_frequency, mean_period
from .synth import SynthSpec, generate

__version__ = "0.1.0"

__all__ = [
    "BreakTestResult",
    "Decomposition",
    "EMD",
    "EmdConfig",
    "HurstEstimate",
    "RescaledRangeHurst",
    "ScaleReport",
    "SynthSpec",
    "TimeScaleSeparator",
    "TimeSeries",
    "ZivotAndrews",
    "analytic_signal",
    "analyze_scales",
    "classify_scales",
    "decompose",
    "generate",
    "hurst_exponent",
    "instantaneous_frequency",
    "mean_period",
    "normalized_variance",
    "parse_ohlcv_csv",
    "read_csv",
    "reconstruct",
    "rescaled_range",
    "sift",
    "slice_series",
    "split_at_break",
    "za_regression",
    "za_test",
]

import os

import numpy as np
import pytest

from emdhurst.synth import SynthSpec, generate, rng_for

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
# daily S&P 500 CSV (Dec 1995 - Jul 2018); the S&P 500 acceptance check skips without it
SP500_ENV = "EMDHURST_SP500_CSV"


def sp500_path():
    path = os.environ.get(SP500_ENV) or os.path.join(DATA_DIR, "sp500.csv")
    return path if os.path.exists(path) else None


@pytest.fixture
def rng():
    return rng_for(12345)


@pytest.fixture
def sample_csv_path():
    return os.path.join(DATA_DIR, "sample_prices.csv")


def price_path(n=3000, seed=0):
    """Geometric random walk with drift, roughly daily-equity-like."""
    r = rng_for(seed)
    return 1000.0 * np.exp(np.cumsum(0.0003 + 0.012 * r.standard_normal(n)))


def synthetic_fixtures():
    """Named arrays used by the decomposition-wide checks."""
    t = np.arange(4096, dtype=float)
    fx = {
        "white_noise": generate(SynthSpec("white_noise", 6000, seed=1)).values,
        "random_walk": generate(SynthSpec("random_walk", 6000, seed=2)).values,
        "price": price_path(5680, seed=3),
        "fbm_0.3": generate(SynthSpec("fbm", 4096, seed=4, h=0.3)).values,
        "fbm_0.8": generate(SynthSpec("fbm", 4096, seed=5, h=0.8)).values,
        "two_tones_trend": np.sin(2 * np.pi * t / 16) + np.sin(2 * np.pi * t / 128) + 0.002 * t,
        "chirp": generate(SynthSpec("chirp", 2048, f0=0.005, f1=0.2)).values,
        "broken_trend": generate(
            SynthSpec("broken_trend", 2000, seed=6, slope=0.05, slope_shift=0.1)
        ).values,
    }
    return fx


# criterion id -> (status, title, detail); filled in by test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS):
        status, title, detail = ACCEPTANCE_RESULTS[cid]
        line = f"[{status}] criterion {cid}: {title}"
        terminalreporter.write_line(f"{line} -- {detail}" if detail else line)

"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL/SKIP line.

Run just this module with ``pytest tests/test_acceptance.py -v``; the summary
lines appear at the end of the terminal report.
"""
import contextlib
import os
import time

import numpy as np
import pytest

from emdhurst.breaktest import design_matrix, za_regression, za_test
from emdhurst.emd import (
    EmdConfig,
    count_zero_crossings,
    decompose,
    envelope_ratio,
    find_extrema,
    mean_envelope,
)
from emdhurst.exceptions import RankDeficientError
from emdhurst.hurst import hurst_exponent, rescaled_range
from emdhurst.pipeline import PipelineConfig, run_pipeline
from emdhurst.scales import analyze_scales, normalized_variance
from emdhurst.series_io import TimeSeries, read_csv, write_csv
from emdhurst.synth import SynthSpec, fgn, generate, rng_for

from conftest import ACCEPTANCE_RESULTS, price_path, sp500_path, synthetic_fixtures
from oracles import brute_force_rs, naive_ols


@contextlib.contextmanager
def criterion(cid, title):
    """Record the outcome of the enclosed checks; ``note`` collects detail text."""
    note = []
    try:
        yield note
    except pytest.skip.Exception as exc:
        ACCEPTANCE_RESULTS[cid] = ("SKIP", title, str(exc.msg))
        print(f"SKIP criterion {cid}: {title} -- {exc.msg}")
        raise
    except BaseException as exc:
        detail = "; ".join(note + [f"{type(exc).__name__}: {exc}".splitlines()[0]])
        ACCEPTANCE_RESULTS[cid] = ("FAIL", title, detail)
        print(f"FAIL criterion {cid}: {title} -- {detail}")
        raise
    else:
        ACCEPTANCE_RESULTS[cid] = ("PASS", title, "; ".join(note))
        print(f"PASS criterion {cid}: {title} -- {'; '.join(note)}")


def all_fixtures():
    fx = dict(synthetic_fixtures())
    path = sp500_path()
    if path:
        fx["sp500"] = read_csv(path).values
    return fx


@pytest.fixture(scope="module")
def decompositions():
    return {name: (x, decompose(x)) for name, x in all_fixtures().items()}


def test_criterion_1_completeness(decompositions):
    with criterion(1, "EMD completeness <= 1e-8 max|X|, 6000 points < 2 s") as note:
        worst = 0.0
        for name, (x, d) in decompositions.items():
            err = np.max(np.abs(x - d.components().sum(axis=0))) / np.max(np.abs(x))
            worst = max(worst, err)
            assert err <= 1e-8, f"{name}: relative error {err:.3g}"
        x = price_path(6000, seed=77)
        t0 = time.perf_counter()
        decompose(x)
        elapsed = time.perf_counter() - t0
        note.append(f"{len(decompositions)} fixtures, worst {worst:.2g}")
        note.append(f"6000-point decomposition {elapsed:.2f} s")
        assert elapsed < 2.0


def test_criterion_2_imf_validity(decompositions):
    with criterion(2, "|extrema - zero crossings| <= 1 and envelope mean <= 0.1 RMS") as note:
        n_imfs, worst_ratio = 0, 0.0
        for name, (_, d) in decompositions.items():
            for i, imf in enumerate(d.imfs, start=1):
                mx, mn = find_extrema(imf)
                diff = abs(mx.size + mn.size - count_zero_crossings(imf))
                ratio = envelope_ratio(imf, mean_envelope(imf))
                worst_ratio = max(worst_ratio, ratio)
                n_imfs += 1
                assert diff <= 1, f"{name} IMF{i}: count difference {diff}"
                assert ratio <= 0.1, f"{name} IMF{i}: envelope ratio {ratio:.3f}"
        note.append(f"{n_imfs} IMFs, worst envelope ratio {worst_ratio:.3f}")


def test_criterion_3_hurst_calibration():
    with criterion(3, "R/S calibration over 20 seeds, < 5 s") as note:
        t0 = time.perf_counter()
        bands = {
            "white noise": ([hurst_exponent(rng_for(s).standard_normal(10000)).h
                             for s in range(20)], 0.45, 0.62),
            "fBm H=0.8": ([hurst_exponent(fgn(0.8, 8192, rng_for(1000 + s))).h
                           for s in range(20)], 0.70, 0.90),
            "fBm H=0.3": ([hurst_exponent(fgn(0.3, 8192, rng_for(2000 + s))).h
                           for s in range(20)], 0.20, 0.45),
        }
        elapsed = time.perf_counter() - t0
        for name, (hs, lo, hi) in bands.items():
            note.append(f"{name} h in [{min(hs):.3f}, {max(hs):.3f}]")
        note.append(f"{elapsed:.2f} s")
        for name, (hs, lo, hi) in bands.items():
            assert lo <= min(hs) and max(hs) <= hi, f"{name} outside [{lo}, {hi}]"
        assert elapsed < 5.0


def test_criterion_4_rs_oracle():
    with criterion(4, "rescaled_range matches brute force to 1e-12 on 50 fixtures") as note:
        worst = 0.0
        for s in range(50):
            rng = rng_for(4000 + s)
            length = int(rng.integers(64, 3000))
            x = rng.standard_normal(length)
            if s % 2:
                x = np.cumsum(x)
            n = int(rng.integers(8, length // 2 + 1))
            got, want = rescaled_range(x, n), brute_force_rs(x, n)
            rel = abs(got - want) / abs(want)
            worst = max(worst, rel)
            assert rel <= 1e-12, f"fixture {s}: rel diff {rel:.3g}"
        note.append(f"worst relative difference {worst:.2g}")


def test_criterion_5_za_size_and_power():
    with criterion(5, "ZA size 5% +/- 3% and break located +/- 2% N in >= 90%, < 60 s") as note:
        t0 = time.perf_counter()
        rejections = sum(
            za_test(np.cumsum(rng_for(5000 + s).standard_normal(1000))).reject_unit_root["p05"]
            for s in range(200)
        )
        located = 0
        for s in range(200):
            spec = SynthSpec(kind="broken_trend", n=1000, seed=6000 + s, break_frac=0.5,
                             level_shift=10.0, slope_shift=0.02, slope=0.01)
            res = za_test(generate(spec).values)
            located += abs(res.break_index - 500) <= 20
        elapsed = time.perf_counter() - t0
        size, power = rejections / 200, located / 200
        note.append(f"size {size:.1%}, located {power:.1%}, {elapsed:.1f} s")
        assert 0.02 <= size <= 0.08
        assert power >= 0.90
        assert elapsed < 60


def test_criterion_6_za_ols_oracle():
    with criterion(6, "za_regression matches normal equations to 1e-8") as note:
        n_fits, n_singular = 0, 0
        for name, x in synthetic_fixtures().items():
            x = x[:1500]
            T = x.size
            for k in (0, 2, 5):
                for frac in (0.2, 0.5, 0.8):
                    t_b = int(frac * T)
                    try:
                        fit = za_regression(x, t_b, k)
                    except RankDeficientError:
                        # noiseless periodic fixtures obey an exact linear recurrence;
                        # confirm the design really is singular
                        _, X = design_matrix(x, t_b, k)
                        Xs = X / np.sqrt((X**2).sum(axis=0))
                        assert np.linalg.matrix_rank(Xs) < X.shape[1], f"{name}: false alarm"
                        n_singular += 1
                        continue
                    beta, se = naive_ols(x, t_b, k)
                    np.testing.assert_allclose(fit.params, beta, rtol=1e-8, atol=1e-8,
                                               err_msg=f"{name} t_b={t_b} k={k}")
                    np.testing.assert_allclose(fit.tvalues, beta / se, rtol=1e-8, atol=1e-8,
                                               err_msg=f"{name} t_b={t_b} k={k}")
                    n_fits += 1
        note.append(f"{n_fits} regressions matched, {n_singular} confirmed singular")
        assert n_fits >= 50


def test_criterion_7_sp500_reproduction():
    title = "S&P 500 with --paper-repro pins (IMF H, X_ST/X_LT, tau, residue)"
    with criterion(7, title) as note:
        path = sp500_path()
        if path is None:
            pytest.skip("S&P 500 daily CSV not available (set EMDHURST_SP500_CSV or add "
                        "tests/data/sp500.csv)")
        series = read_csv(path)
        report, _ = analyze_scales(series, EmdConfig(max_imfs=9), split_policy="fixed:5")
        h = [p.h for p in report.per_imf]
        note.append("IMF H " + ", ".join(f"{v:.2f}" for v in h))
        note.append(f"h_st {report.h_st.h:.3f}, h_lt {report.h_lt.h:.3f}, "
                    f"tau {report.st_tau_days:.1f} d, residue {report.h_residue.h:.3f}")
        assert report.n_imfs == 9
        assert all(abs(v - 0.5) <= 0.12 for v in h[:5]), "(a) IMF1-5 not near 0.5"
        assert all(v >= 0.70 for v in h[5:9]), "(b) IMF6-9 below 0.70"
        assert report.h_lt.h >= 0.90, "(c) X_LT below 0.90"
        assert 0.40 <= report.h_st.h <= 0.62, "(c) X_ST outside [0.40, 0.62]"
        assert abs(report.st_tau_days - 78) <= 0.3 * 78, "(d) short-term tau off"
        assert report.h_residue.h > 0.9, "(e) residue H <= 0.9"


def test_criterion_8_nv_properties(decompositions):
    with criterion(8, "sum NV = 1 +/- 1e-9, invariant to input scaling to 1e-12") as note:
        worst_sum, worst_scale = 0.0, 0.0
        for name, (x, d) in decompositions.items():
            nv = normalized_variance(d)
            worst_sum = max(worst_sum, abs(nv.sum() - 1))
            assert abs(nv.sum() - 1) <= 1e-9, name
            for c in (0.5, 3.0, 250.0):
                scaled = normalized_variance(decompose(c * x))
                assert scaled.shape == nv.shape, f"{name} x{c}: IMF count changed"
                dev = np.max(np.abs(scaled - nv))
                worst_scale = max(worst_scale, dev)
                assert dev <= 1e-12, f"{name} x{c}: NV moved by {dev:.3g}"
        note.append(f"worst sum error {worst_sum:.2g}, worst scaling change {worst_scale:.2g}")


def test_criterion_9_determinism(tmp_path):
    with criterion(9, "two full pipeline runs give byte-identical outputs") as note:
        inputs = []
        for seed in (1, 2):
            p = tmp_path / f"series{seed}.csv"
            write_csv(TimeSeries.from_values(price_path(2000, seed=seed)), p)
            inputs.append(str(p))
        trees = []
        for run in ("run1", "run2"):
            out = tmp_path / run
            result = run_pipeline(PipelineConfig(inputs=tuple(inputs), output_dir=str(out)))
            assert result.exit_code == 0
            tree = {}
            for dirpath, _, files in os.walk(out):
                for f in files:
                    full = os.path.join(dirpath, f)
                    with open(full, "rb") as fh:
                        tree[os.path.relpath(full, out)] = fh.read()
            trees.append(tree)
        note.append(f"{len(trees[0])} files compared")
        assert trees[0] and trees[0] == trees[1]
